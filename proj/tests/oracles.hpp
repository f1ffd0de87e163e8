#pragma once

// Slow, obviously-correct reference implementations used only by the tests.
// They work from the raw preference lists the test itself built, never from
// the library's rank tables.

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "smls/model.hpp"

namespace oracle {

using smls::Id;
using smls::RawList;

struct Profile {
  int n = 0;
  std::vector<RawList> men;    // men[m-1]
  std::vector<RawList> women;  // women[w-1]
  smls::Mode mode = smls::Mode::StrictComplete;

  smls::Instance build(smls::BuildOptions opts = {}) const { return smls::build_instance(n, men, women, mode, opts); }
};

/// Position of q's tie group in the list, INT_MAX if absent.
inline int rank_in(const RawList& list, Id q) {
  for (std::size_t g = 0; g < list.size(); ++g)
    for (Id x : list[g])
      if (x == q) return static_cast<int>(g);
  return INT_MAX;
}

inline int man_rank(const Profile& p, Id m, Id w) { return rank_in(p.men[m - 1], w); }
inline int woman_rank(const Profile& p, Id w, Id m) { return rank_in(p.women[w - 1], m); }

using Pairs = std::vector<std::pair<Id, Id>>;

/// wives[m-1] is m's wife or 0.
inline Pairs blocking(const Profile& p, const std::vector<Id>& wives) {
  std::vector<Id> husbands(p.n + 1, 0);
  for (int m = 1; m <= p.n; ++m)
    if (wives[m - 1]) husbands[wives[m - 1]] = m;
  Pairs out;
  for (Id m = 1; m <= p.n; ++m)
    for (Id w = 1; w <= p.n; ++w) {
      if (wives[m - 1] == w) continue;
      const int rmw = man_rank(p, m, w), rwm = woman_rank(p, w, m);
      if (rmw == INT_MAX || rwm == INT_MAX) continue;
      const bool man_wants = wives[m - 1] == 0 || rmw < man_rank(p, m, wives[m - 1]);
      const bool woman_wants = husbands[w] == 0 || rwm < woman_rank(p, w, husbands[w]);
      if (man_wants && woman_wants) out.emplace_back(m, w);
    }
  return out;
}

/// nbp + singles (both sexes) not in any blocking pair; ns only outside strict mode.
inline std::pair<int, int> evaluate(const Profile& p, const std::vector<Id>& wives) {
  const auto bps = blocking(p, wives);
  int ns = 0;
  if (p.mode == smls::Mode::Smti) {
    std::set<Id> in_men, in_women, married_women;
    for (auto [m, w] : bps) in_men.insert(m), in_women.insert(w);
    for (int m = 1; m <= p.n; ++m) {
      if (wives[m - 1]) married_women.insert(wives[m - 1]);
      else if (!in_men.count(m)) ++ns;
    }
    for (int w = 1; w <= p.n; ++w)
      if (!married_women.count(w) && !in_women.count(w)) ++ns;
  }
  return {static_cast<int>(bps.size()), ns};
}

/// All stable perfect matchings of a strict profile by trying all n! permutations.
inline std::vector<std::vector<Id>> stable_sm(const Profile& p) {
  std::vector<Id> perm(p.n);
  std::iota(perm.begin(), perm.end(), 1);
  std::vector<std::vector<Id>> out;
  do {
    if (blocking(p, perm).empty()) out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

/// All injective partial matchings over mutually acceptable pairs with no blocking pair.
inline std::vector<std::vector<Id>> stable_smti(const Profile& p) {
  std::vector<std::vector<Id>> out;
  std::vector<Id> wives(p.n, 0);
  std::vector<char> used(p.n + 1, 0);
  auto rec = [&](auto&& self, int m) -> void {
    if (m > p.n) {
      if (blocking(p, wives).empty()) out.push_back(wives);
      return;
    }
    wives[m - 1] = 0;
    self(self, m + 1);
    for (Id w = 1; w <= p.n; ++w) {
      if (used[w] || man_rank(p, m, w) == INT_MAX || woman_rank(p, w, m) == INT_MAX) continue;
      used[w] = 1;
      wives[m - 1] = w;
      self(self, m + 1);
      used[w] = 0;
      wives[m - 1] = 0;
    }
  };
  rec(rec, 1);
  std::sort(out.begin(), out.end());
  return out;
}

/// a dominates b: every man at least as well off.
inline bool dominates(const Profile& p, const std::vector<Id>& a, const std::vector<Id>& b) {
  for (int m = 1; m <= p.n; ++m)
    if (man_rank(p, m, a[m - 1]) > man_rank(p, m, b[m - 1])) return false;
  return true;
}

/// Cover pairs (i, j) of a partial order given as a full relation matrix, by the naive cubic test.
inline std::set<std::pair<std::size_t, std::size_t>> transitive_reduction(const std::vector<std::vector<char>>& rel) {
  const std::size_t k = rel.size();
  std::set<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j || !rel[i][j]) continue;
      bool between = false;
      for (std::size_t c = 0; c < k && !between; ++c) between = c != i && c != j && rel[i][c] && rel[c][j];
      if (!between) out.emplace(i, j);
    }
  return out;
}

inline RawList strict(const std::vector<Id>& order) {
  RawList out;
  for (Id x : order) out.push_back({x});
  return out;
}

inline std::vector<Id> shuffled(int n, std::mt19937_64& rng) {
  std::vector<Id> v(n);
  std::iota(v.begin(), v.end(), 1);
  std::shuffle(v.begin(), v.end(), rng);
  return v;
}

inline Profile random_sm(int n, std::mt19937_64& rng) {
  Profile p;
  p.n = n;
  for (int i = 0; i < n; ++i) p.men.push_back(strict(shuffled(n, rng)));
  for (int i = 0; i < n; ++i) p.women.push_back(strict(shuffled(n, rng)));
  return p;
}

/// Random ties and symmetric deletions; resamples until no list is empty.
inline Profile random_smti(int n, double p1, double p2, std::mt19937_64& rng) {
  std::bernoulli_distribution del(p1), tie(p2);
  for (;;) {
    std::vector<std::vector<Id>> men, women;
    for (int i = 0; i < n; ++i) men.push_back(shuffled(n, rng));
    for (int i = 0; i < n; ++i) women.push_back(shuffled(n, rng));
    std::set<std::pair<Id, Id>> gone;
    for (int m = 1; m <= n; ++m)
      for (int w = 1; w <= n; ++w)
        if (del(rng)) gone.emplace(m, w);
    auto group = [&](const std::vector<Id>& order, bool of_man, Id self) {
      RawList out;
      for (Id x : order) {
        if (gone.count(of_man ? std::pair(self, x) : std::pair(x, self))) continue;
        if (!out.empty() && tie(rng)) out.back().push_back(x);
        else out.push_back({x});
      }
      return out;
    };
    Profile p;
    p.n = n;
    p.mode = smls::Mode::Smti;
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      p.men.push_back(group(men[i], true, i + 1));
      ok = ok && !p.men.back().empty();
    }
    for (int i = 0; i < n; ++i) {
      p.women.push_back(group(women[i], false, i + 1));
      ok = ok && !p.women.back().empty();
    }
    if (ok) return p;
  }
}

/// Uniformly random perfect matching (strict) or random partial matching over
/// mutually acceptable pairs (SMTI), as wives[m-1].
inline std::vector<Id> random_wives(const Profile& p, std::mt19937_64& rng) {
  if (p.mode == smls::Mode::StrictComplete) return shuffled(p.n, rng);
  std::vector<Id> wives(p.n, 0);
  std::vector<char> used(p.n + 1, 0);
  std::bernoulli_distribution leave_single(0.25);
  for (Id m : shuffled(p.n, rng)) {
    if (leave_single(rng)) continue;
    std::vector<Id> options;
    for (Id w = 1; w <= p.n; ++w)
      if (!used[w] && man_rank(p, m, w) != INT_MAX && woman_rank(p, w, m) != INT_MAX) options.push_back(w);
    if (options.empty()) continue;
    const Id w = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
    wives[m - 1] = w;
    used[w] = 1;
  }
  return wives;
}

/// Removing blocking pair (m, w): strict swaps ex-partners, SMTI leaves them single.
inline std::vector<Id> remove(const Profile& p, std::vector<Id> wives, Id m, Id w) {
  Id ex_husband = 0;
  for (int k = 1; k <= p.n; ++k)
    if (wives[k - 1] == w) ex_husband = k;
  const Id ex_wife = wives[m - 1];
  if (ex_husband) wives[ex_husband - 1] = 0;
  wives[m - 1] = w;
  if (p.mode == smls::Mode::StrictComplete && ex_husband) wives[ex_husband - 1] = ex_wife;
  return wives;
}

/// Pearson chi-squared statistic against uniform expected counts.
inline double chi_squared(const std::vector<long>& counts) {
  long total = 0;
  for (long c : counts) total += c;
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  double x2 = 0;
  for (long c : counts) x2 += (c - expected) * (c - expected) / expected;
  return x2;
}

/// Upper 0.1% quantile of chi-squared with k degrees of freedom (Wilson-Hilferty).
inline double chi_squared_critical(int k) {
  const double z = 3.090232;
  const double a = 2.0 / (9.0 * k);
  return k * std::pow(1.0 - a + z * std::sqrt(a), 3.0);
}

}  // namespace oracle
