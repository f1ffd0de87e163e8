#pragma once

// Exhaustive enumeration of stable marriages, the dominance order and its
// Hasse diagram, and the sampling-fairness measures computed on top of it.
// Everything here is exponential in the worst case and meant for small
// instances; the size caps make that explicit.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "smls/gale_shapley.hpp"
#include "smls/model.hpp"
#include "smls/stability.hpp"

namespace smls {

struct EnumerateOptions {
  int max_n_strict = 9;
  int max_n_smti = 7;
};

namespace detail {

// Backtracking over men in id order. A man's candidates are restricted to the
// range between his partners in the man-optimal and woman-optimal stable
// marriages (every stable partner lies there), and a partial assignment is
// abandoned as soon as two assigned couples contain a blocking pair.
class StrictEnumerator {
 public:
  explicit StrictEnumerator(const Instance& inst) : inst_(inst), n_(inst.n()) {
    const Matching top = gale_shapley(inst, Gender::Men);
    const Matching bottom = gale_shapley(inst, Gender::Women);
    const auto size = static_cast<std::size_t>(n_) + 1;
    man_lo_.resize(size);
    man_hi_.resize(size);
    woman_lo_.resize(size);
    woman_hi_.resize(size);
    for (Id p = 1; p <= n_; ++p) {
      man_lo_[p] = inst.man_rank(p, top.wife(p));
      man_hi_[p] = inst.man_rank(p, bottom.wife(p));
      woman_lo_[p] = inst.woman_rank(p, bottom.husband(p));
      woman_hi_[p] = inst.woman_rank(p, top.husband(p));
    }
    wife_.assign(size, kSingle);
    taken_.assign(size, 0);
  }

  std::vector<Matching> run() {
    out_.clear();
    recurse(1);
    return std::move(out_);
  }

 private:
  void recurse(Id man) {
    if (man > n_) {
      out_.push_back(Matching::from_wives(std::span<const Id>(wife_.data() + 1, static_cast<std::size_t>(n_))));
      return;
    }
    auto list = inst_.list(Gender::Men, man);
    for (int r = man_lo_[man]; r <= man_hi_[man]; ++r) {
      const Id w = list[static_cast<std::size_t>(r - 1)];
      if (taken_[w]) continue;
      const int wr = inst_.woman_rank(w, man);
      if (wr < woman_lo_[w] || wr > woman_hi_[w]) continue;
      if (!consistent(man, w)) continue;
      taken_[w] = 1;
      wife_[man] = w;
      recurse(man + 1);
      wife_[man] = kSingle;
      taken_[w] = 0;
    }
  }

  bool consistent(Id man, Id w) const {
    for (Id j = 1; j < man; ++j) {
      const Id y = wife_[j];
      if (inst_.man_rank(man, y) < inst_.man_rank(man, w) && inst_.woman_rank(y, man) < inst_.woman_rank(y, j))
        return false;
      if (inst_.man_rank(j, w) < inst_.man_rank(j, y) && inst_.woman_rank(w, j) < inst_.woman_rank(w, man))
        return false;
    }
    return true;
  }

  const Instance& inst_;
  int n_;
  std::vector<int> man_lo_, man_hi_, woman_lo_, woman_hi_;
  std::vector<Id> wife_;
  std::vector<char> taken_;
  std::vector<Matching> out_;
};

// All partial matchings over mutually acceptable pairs, pruned on blocking
// pairs between decided men, with a full check at the leaves (single women
// are only known there).
class SmtiEnumerator {
 public:
  explicit SmtiEnumerator(const Instance& inst) : inst_(inst), n_(inst.n()) {
    const auto size = static_cast<std::size_t>(n_) + 1;
    wife_.assign(size, kSingle);
    taken_.assign(size, 0);
  }

  std::vector<Matching> run() {
    out_.clear();
    recurse(1);
    return std::move(out_);
  }

 private:
  void recurse(Id man) {
    if (man > n_) {
      auto m = Matching::from_wives(std::span<const Id>(wife_.data() + 1, static_cast<std::size_t>(n_)));
      if (is_stable(inst_, m)) out_.push_back(std::move(m));
      return;
    }
    if (consistent(man, kSingle)) recurse(man + 1);
    for (Id w : inst_.list(Gender::Men, man)) {
      if (taken_[w] || !inst_.accepts(Gender::Women, w, man) || !consistent(man, w)) continue;
      taken_[w] = 1;
      wife_[man] = w;
      recurse(man + 1);
      wife_[man] = kSingle;
      taken_[w] = 0;
    }
  }

  bool consistent(Id man, Id x) const {
    for (Id j = 1; j < man; ++j) {
      const Id y = wife_[j];
      if (y != kSingle && inst_.man_rank(man, y) < inst_.man_rank(man, x) &&
          inst_.woman_rank(y, man) < inst_.woman_rank(y, j))
        return false;
      if (x != kSingle && inst_.man_rank(j, x) < inst_.man_rank(j, y) &&
          inst_.woman_rank(x, j) < inst_.woman_rank(x, man))
        return false;
    }
    return true;
  }

  const Instance& inst_;
  int n_;
  std::vector<Id> wife_;
  std::vector<char> taken_;
  std::vector<Matching> out_;
};

}  // namespace detail

/// Every stable matching, sorted lexicographically by the wives vector.
inline std::vector<Matching> enumerate_stable(const Instance& inst, EnumerateOptions opts = {}) {
  const int cap = inst.strict() ? opts.max_n_strict : opts.max_n_smti;
  if (inst.n() > cap)
    throw Error(ErrorKind::SizeCapExceeded,
                "enumeration capped at n=" + std::to_string(cap) + ", got " + std::to_string(inst.n()));
  auto out = inst.strict() ? detail::StrictEnumerator(inst).run() : detail::SmtiEnumerator(inst).run();
  std::sort(out.begin(), out.end());
  return out;
}

/// Every man does at least as well in a as in b.
inline bool dominates(const Instance& inst, const Matching& a, const Matching& b) {
  for (Id m = 1; m <= inst.n(); ++m)
    if (inst.man_rank(m, a.wife(m)) > inst.man_rank(m, b.wife(m))) return false;
  return true;
}

struct Lattice {
  std::vector<Matching> marriages;
  /// Hasse diagram arcs (dominating, dominated), sorted.
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::size_t top = 0;
  std::size_t bottom = 0;
  /// Arcs from the top along any maximal chain.
  std::vector<int> rank_of;

  std::size_t size() const { return marriages.size(); }

  std::size_t index_of(const Matching& m) const {
    const auto it = std::lower_bound(marriages.begin(), marriages.end(), m);
    if (it == marriages.end() || !(*it == m))
      throw Error(ErrorKind::NotInLattice, "matching is not a stable marriage of this instance");
    return static_cast<std::size_t>(it - marriages.begin());
  }
  bool contains(const Matching& m) const { return std::binary_search(marriages.begin(), marriages.end(), m); }
};

namespace detail {

class BitRows {
 public:
  BitRows(std::size_t rows, std::size_t cols) : words_((cols + 63) / 64), bits_(rows * words_, 0) {}
  void set(std::size_t r, std::size_t c) { bits_[r * words_ + c / 64] |= std::uint64_t{1} << (c % 64); }
  void reset(std::size_t r, std::size_t c) { bits_[r * words_ + c / 64] &= ~(std::uint64_t{1} << (c % 64)); }
  bool test(std::size_t r, std::size_t c) const { return (bits_[r * words_ + c / 64] >> (c % 64)) & 1u; }
  std::uint64_t* row(std::size_t r) { return bits_.data() + r * words_; }
  const std::uint64_t* row(std::size_t r) const { return bits_.data() + r * words_; }
  std::size_t words() const { return words_; }
  std::size_t count(std::size_t r) const {
    std::size_t c = 0;
    for (std::size_t k = 0; k < words_; ++k) c += static_cast<std::size_t>(std::popcount(row(r)[k]));
    return c;
  }

 private:
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

}  // namespace detail

/// Stable marriages of a strict instance with the transitive reduction of
/// dominance. Throws GradednessViolation if two maximal chains from the top
/// disagree in length, which a correct enumeration never produces.
inline Lattice build_lattice(const Instance& inst, EnumerateOptions opts = {}) {
  if (!inst.strict()) throw Error(ErrorKind::UnsupportedMode, "the dominance lattice needs strict complete lists");
  Lattice lat;
  lat.marriages = enumerate_stable(inst, opts);
  const std::size_t k = lat.marriages.size();

  detail::BitRows down(k, k);  // down(i) = { j : i dominates j, j != i }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (i != j && dominates(inst, lat.marriages[i], lat.marriages[j])) down.set(i, j);

  std::vector<std::size_t> below(k);
  for (std::size_t i = 0; i < k; ++i) below[i] = down.count(i);
  lat.top = static_cast<std::size_t>(std::max_element(below.begin(), below.end()) - below.begin());
  lat.bottom = static_cast<std::size_t>(std::min_element(below.begin(), below.end()) - below.begin());
  if (below[lat.top] + 1 != k || below[lat.bottom] != 0)
    throw Error(ErrorKind::GradednessViolation, "stable set has no unique top and bottom");

  // i covers j iff j is below i but below no element strictly between them.
  std::vector<std::uint64_t> reach(down.words());
  for (std::size_t i = 0; i < k; ++i) {
    std::fill(reach.begin(), reach.end(), 0);
    for (std::size_t c = 0; c < k; ++c)
      if (down.test(i, c))
        for (std::size_t w = 0; w < down.words(); ++w) reach[w] |= down.row(c)[w];
    for (std::size_t j = 0; j < k; ++j)
      if (down.test(i, j) && !((reach[j / 64] >> (j % 64)) & 1u)) lat.edges.emplace_back(i, j);
  }
  std::sort(lat.edges.begin(), lat.edges.end());

  // Shortest and longest arc counts from the top, in order of decreasing
  // down-set size (a topological order of the dominance DAG).
  std::vector<std::size_t> order(k);
  for (std::size_t i = 0; i < k; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return below[a] > below[b]; });
  std::vector<std::vector<std::size_t>> succ(k);
  for (const auto& [a, b] : lat.edges) succ[a].push_back(b);
  std::vector<int> shortest(k, -1), longest(k, -1);
  shortest[lat.top] = longest[lat.top] = 0;
  for (std::size_t a : order) {
    if (shortest[a] < 0) continue;
    for (std::size_t b : succ[a]) {
      if (shortest[b] < 0 || shortest[a] + 1 < shortest[b]) shortest[b] = shortest[a] + 1;
      longest[b] = std::max(longest[b], longest[a] + 1);
    }
  }
  for (std::size_t i = 0; i < k; ++i)
    if (shortest[i] < 0 || shortest[i] != longest[i])
      throw Error(ErrorKind::GradednessViolation, "marriage " + std::to_string(i) + " has chains of length " +
                                                      std::to_string(shortest[i]) + " and " +
                                                      std::to_string(longest[i]));
  lat.rank_of = std::move(shortest);
  return lat;
}

struct Distances {
  int to_man_optimal = 0;    // d_m
  int to_woman_optimal = 0;  // d_w
};

inline Distances distance_metrics(const Lattice& lat, const Matching& m) {
  const std::size_t i = lat.index_of(m);
  return {lat.rank_of[i], lat.rank_of[lat.bottom] - lat.rank_of[i]};
}

struct SampleStats {
  std::size_t runs = 0;
  std::size_t lattice_size = 0;
  std::vector<double> frequencies;  // indexed like Lattice::marriages
  double entropy_bits = 0.0;
  /// entropy / log2|S|; 1.0 for a single-marriage lattice.
  double normalized_entropy = 1.0;
  /// Mean of d_m / (d_m + d_w) over runs; 0.5 for a single-marriage lattice.
  double mean_normalized_distance = 0.5;
};

inline SampleStats sampling_metrics(const Lattice& lat, const std::vector<Matching>& results) {
  if (results.empty()) throw Error(ErrorKind::InsufficientData, "no runs to summarize");
  SampleStats s;
  s.runs = results.size();
  s.lattice_size = lat.size();
  std::vector<std::size_t> hits(lat.size(), 0);
  double distance_sum = 0.0;
  const int height = lat.rank_of[lat.bottom];
  for (const auto& m : results) {
    const std::size_t i = lat.index_of(m);
    ++hits[i];
    distance_sum += height == 0 ? 0.5 : static_cast<double>(lat.rank_of[i]) / height;
  }
  s.frequencies.resize(lat.size());
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const double f = static_cast<double>(hits[i]) / static_cast<double>(s.runs);
    s.frequencies[i] = f;
    if (f > 0.0) s.entropy_bits -= f * std::log2(f);
  }
  s.normalized_entropy = lat.size() > 1 ? s.entropy_bits / std::log2(static_cast<double>(lat.size())) : 1.0;
  s.mean_normalized_distance = distance_sum / static_cast<double>(s.runs);
  return s;
}

/// Graphviz digraph of the Hasse diagram; node labels are wives vectors.
inline std::string to_dot(const Lattice& lat) {
  std::ostringstream os;
  os << "digraph lattice {\n  rankdir=TB;\n";
  for (std::size_t i = 0; i < lat.size(); ++i) {
    os << "  n" << i << " [label=\"";
    const auto wives = lat.marriages[i].wives();
    for (std::size_t k = 0; k < wives.size(); ++k) os << (k ? " " : "") << wives[k];
    os << "\"";
    if (i == lat.top) os << ", shape=box";
    if (i == lat.bottom) os << ", shape=doublecircle";
    os << "];\n";
  }
  for (const auto& [a, b] : lat.edges) os << "  n" << a << " -> n" << b << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace smls
