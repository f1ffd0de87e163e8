#pragma once

#include <deque>
#include <vector>

#include "smls/model.hpp"

namespace smls {

/// Deferred acceptance. Proposing with men yields the man-optimal stable
/// marriage (top of the dominance lattice), with women the woman-optimal one.
/// Free proposers wait in a FIFO queue.
inline Matching gale_shapley(const Instance& inst, Gender proposing = Gender::Men) {
  if (!inst.strict()) throw Error(ErrorKind::UnsupportedMode, "Gale-Shapley needs strict complete lists");
  const int n = inst.n();
  const Gender receiving = other(proposing);
  Matching m(n);
  std::vector<std::size_t> next(static_cast<std::size_t>(n) + 1, 0);
  std::deque<Id> free;
  for (Id p = 1; p <= n; ++p) free.push_back(p);

  while (!free.empty()) {
    const Id p = free.front();
    free.pop_front();
    const Id q = inst.list(proposing, p)[next[p]++];
    const Id held = m.partner(receiving, q);
    if (held == kSingle) {
      m.marry(proposing, p, q);
    } else if (inst.rank(receiving, q, p) < inst.rank(receiving, q, held)) {
      m.marry(proposing, p, q);
      free.push_back(held);
    } else {
      free.push_back(p);
    }
  }
  return m;
}

}  // namespace smls
