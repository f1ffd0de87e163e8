#pragma once

// Core domain types: preference profiles (Instance), one-to-one assignments
// (Matching) and pairwise preference queries.
//
// Ids are 1-based on both sides; 0 (kSingle) stands for "no partner". Ranks
// are positive and normalized to 1,2,3,... with equal ranks encoding a tie.
// An unacceptable partner, and being single, both have rank kUnranked, so any
// acceptable partner is strictly preferred to being single.

#include <algorithm>
#include <climits>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace smls {

using Id = std::int32_t;
inline constexpr Id kSingle = 0;
inline constexpr int kUnranked = INT_MAX;

enum class Mode { StrictComplete, Smti };
enum class Gender { Men, Women };

constexpr Gender other(Gender g) { return g == Gender::Men ? Gender::Women : Gender::Men; }
constexpr int index_of(Gender g) { return g == Gender::Men ? 0 : 1; }

inline const char* to_string(Mode m) { return m == Mode::StrictComplete ? "SM" : "SMTI"; }
inline const char* to_string(Gender g) { return g == Gender::Men ? "men" : "women"; }

enum class ErrorKind {
  InvalidArgument,
  InvalidId,
  AsymmetricAcceptance,
  EmptyList,
  DuplicateEntry,
  TiesInStrictMode,
  IncompleteInStrictMode,
  SyntaxError,
  RetriesExhausted,
  UnsupportedMode,
  NotABlockingPair,
  EmptyNeighborhood,
  InvalidMatching,
  DimensionMismatch,
  SizeCapExceeded,
  NotInLattice,
  GradednessViolation,
  InsufficientData,
  DegenerateFit,
  IoError,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidId: return "InvalidId";
    case ErrorKind::AsymmetricAcceptance: return "AsymmetricAcceptance";
    case ErrorKind::EmptyList: return "EmptyList";
    case ErrorKind::DuplicateEntry: return "DuplicateEntry";
    case ErrorKind::TiesInStrictMode: return "TiesInStrictMode";
    case ErrorKind::IncompleteInStrictMode: return "IncompleteInStrictMode";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::RetriesExhausted: return "RetriesExhausted";
    case ErrorKind::UnsupportedMode: return "UnsupportedMode";
    case ErrorKind::NotABlockingPair: return "NotABlockingPair";
    case ErrorKind::EmptyNeighborhood: return "EmptyNeighborhood";
    case ErrorKind::InvalidMatching: return "InvalidMatching";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SizeCapExceeded: return "SizeCapExceeded";
    case ErrorKind::NotInLattice: return "NotInLattice";
    case ErrorKind::GradednessViolation: return "GradednessViolation";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, int line = 0)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), line_(line) {}

  ErrorKind kind() const { return kind_; }
  /// Source line for parse errors, 0 otherwise.
  int line() const { return line_; }

 private:
  ErrorKind kind_;
  int line_;
};

inline std::string person_name(Gender g, Id p) {
  return (g == Gender::Men ? "m" : "w") + std::to_string(p);
}

/// A preference list as written: tie groups in decreasing preference.
/// {{5}, {7}, {1, 2}} means 5 first, 7 second, then 1 and 2 tied.
using RawList = std::vector<std::vector<Id>>;

struct BuildOptions {
  /// Reject profiles where w is on m's list but m is not on w's (or vice versa).
  /// Hand-written SMTI files may turn this off; mutual acceptance is then
  /// required only for matched pairs and blocking pairs.
  bool require_symmetric_acceptance = true;
};

class Instance;
Instance build_instance(int n, const std::vector<RawList>& men, const std::vector<RawList>& women,
                        Mode mode, BuildOptions options = {});

class Instance {
 public:
  Instance() = default;

  int n() const { return n_; }
  Mode mode() const { return mode_; }
  bool strict() const { return mode_ == Mode::StrictComplete; }

  /// Rank of `other` on the list of `person` (of gender g); kUnranked when
  /// `other` is unacceptable or kSingle.
  int rank(Gender g, Id person, Id other) const {
    return ranks_[index_of(g)][static_cast<std::size_t>(person) * stride() + other];
  }
  int man_rank(Id m, Id w) const { return rank(Gender::Men, m, w); }
  int woman_rank(Id w, Id m) const { return rank(Gender::Women, w, m); }

  bool accepts(Gender g, Id person, Id other) const { return rank(g, person, other) != kUnranked; }
  bool mutually_acceptable(Id m, Id w) const {
    return accepts(Gender::Men, m, w) && accepts(Gender::Women, w, m);
  }

  /// Acceptable partners ordered by (rank, id).
  std::span<const Id> list(Gender g, Id person) const { return lists_[index_of(g)][person]; }

  /// Ranks aligned with list(g, person).
  std::span<const int> list_ranks(Gender g, Id person) const { return list_ranks_[index_of(g)][person]; }

  /// Row `person` of the ranks the other gender gives: entry q is
  /// rank(other(g), q, person). Contiguous, for scanning person's list.
  std::span<const int> ranks_given_to(Gender g, Id person) const {
    return {reverse_[index_of(g)].data() + static_cast<std::size_t>(person) * stride(), stride()};
  }

  /// Number of acceptable partners.
  int list_length(Gender g, Id person) const { return static_cast<int>(list(g, person).size()); }

  bool has_ties() const {
    for (int gi = 0; gi < 2; ++gi) {
      const Gender g = gi == 0 ? Gender::Men : Gender::Women;
      for (Id p = 1; p <= n_; ++p) {
        auto l = list(g, p);
        for (std::size_t j = 1; j < l.size(); ++j)
          if (rank(g, p, l[j]) == rank(g, p, l[j - 1])) return true;
      }
    }
    return false;
  }

  /// The list in tie-group form, ids ascending inside each group.
  RawList raw_list(Gender g, Id person) const {
    RawList out;
    int last = 0;
    for (Id o : list(g, person)) {
      const int r = rank(g, person, o);
      if (r != last) {
        out.emplace_back();
        last = r;
      }
      out.back().push_back(o);
    }
    return out;
  }

  std::vector<RawList> raw_lists(Gender g) const {
    std::vector<RawList> out;
    out.reserve(static_cast<std::size_t>(n_));
    for (Id p = 1; p <= n_; ++p) out.push_back(raw_list(g, p));
    return out;
  }

  friend bool operator==(const Instance& a, const Instance& b) {
    return a.n_ == b.n_ && a.mode_ == b.mode_ && a.ranks_[0] == b.ranks_[0] &&
           a.ranks_[1] == b.ranks_[1];
  }

 private:
  friend Instance build_instance(int, const std::vector<RawList>&, const std::vector<RawList>&,
                                 Mode, BuildOptions);

  std::size_t stride() const { return static_cast<std::size_t>(n_) + 1; }

  int n_ = 0;
  Mode mode_ = Mode::StrictComplete;
  std::vector<int> ranks_[2];              // (n+1) x (n+1), row = person, column 0 = single
  std::vector<std::vector<Id>> lists_[2];  // index 0 unused
  std::vector<std::vector<int>> list_ranks_[2];
  std::vector<int> reverse_[2];            // reverse_[g][p][q] = ranks_[other(g)][q][p]
};

namespace detail {

inline void normalize_list(Gender g, Id person, const RawList& raw, int n, Mode mode,
                           std::vector<int>& ranks, std::vector<Id>& sorted) {
  const std::size_t stride = static_cast<std::size_t>(n) + 1;
  const std::string who = person_name(g, person);
  sorted.clear();
  int rank = 0;
  for (const auto& group : raw) {
    if (group.empty()) throw Error(ErrorKind::InvalidArgument, who + ": empty tie group");
    if (mode == Mode::StrictComplete && group.size() > 1)
      throw Error(ErrorKind::TiesInStrictMode, who + " has a tie group of size " +
                                                   std::to_string(group.size()));
    ++rank;
    std::vector<Id> ids(group);
    std::sort(ids.begin(), ids.end());
    for (Id o : ids) {
      if (o < 1 || o > n)
        throw Error(ErrorKind::InvalidId, who + " lists id " + std::to_string(o) +
                                              " outside 1.." + std::to_string(n));
      int& slot = ranks[static_cast<std::size_t>(person) * stride + o];
      if (slot != kUnranked)
        throw Error(ErrorKind::DuplicateEntry,
                    who + " lists " + person_name(other(g), o) + " more than once");
      slot = rank;
      sorted.push_back(o);
    }
  }
  if (sorted.empty()) throw Error(ErrorKind::EmptyList, who + " has an empty list");
  if (mode == Mode::StrictComplete && static_cast<int>(sorted.size()) != n)
    throw Error(ErrorKind::IncompleteInStrictMode,
                who + " ranks " + std::to_string(sorted.size()) + " of " + std::to_string(n));
}

}  // namespace detail

inline Instance build_instance(int n, const std::vector<RawList>& men,
                               const std::vector<RawList>& women, Mode mode,
                               BuildOptions options) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "size must be positive");
  if (static_cast<int>(men.size()) != n || static_cast<int>(women.size()) != n)
    throw Error(ErrorKind::InvalidArgument, "expected " + std::to_string(n) + " lists per side");

  Instance inst;
  inst.n_ = n;
  inst.mode_ = mode;
  const std::size_t cells = inst.stride() * inst.stride();
  const std::vector<RawList>* raw[2] = {&men, &women};
  for (int gi = 0; gi < 2; ++gi) {
    const Gender g = gi == 0 ? Gender::Men : Gender::Women;
    inst.ranks_[gi].assign(cells, kUnranked);
    inst.lists_[gi].assign(inst.stride(), {});
    for (Id p = 1; p <= n; ++p)
      detail::normalize_list(g, p, (*raw[gi])[p - 1], n, mode, inst.ranks_[gi], inst.lists_[gi][p]);
  }
  for (int gi = 0; gi < 2; ++gi) {
    const Gender g = gi == 0 ? Gender::Men : Gender::Women;
    inst.list_ranks_[gi].assign(inst.stride(), {});
    inst.reverse_[gi].assign(cells, kUnranked);
    for (Id p = 1; p <= n; ++p) {
      for (Id q : inst.lists_[gi][p]) inst.list_ranks_[gi][p].push_back(inst.rank(g, p, q));
      for (Id q = 1; q <= n; ++q)
        inst.reverse_[gi][static_cast<std::size_t>(p) * inst.stride() + q] = inst.rank(other(g), q, p);
    }
  }
  if (options.require_symmetric_acceptance) {
    for (Id m = 1; m <= n; ++m)
      for (Id w = 1; w <= n; ++w)
        if (inst.accepts(Gender::Men, m, w) != inst.accepts(Gender::Women, w, m))
          throw Error(ErrorKind::AsymmetricAcceptance,
                      inst.accepts(Gender::Men, m, w)
                          ? "m" + std::to_string(m) + " lists w" + std::to_string(w) + " but not vice versa"
                          : "w" + std::to_string(w) + " lists m" + std::to_string(m) + " but not vice versa");
  }
  return inst;
}

/// Convenience for strict lists: each inner vector is a plain ranking.
inline std::vector<RawList> strict_lists(const std::vector<std::vector<Id>>& rankings) {
  std::vector<RawList> out;
  out.reserve(rankings.size());
  for (const auto& r : rankings) {
    RawList l;
    for (Id x : r) l.push_back({x});
    out.push_back(std::move(l));
  }
  return out;
}

/// Same profile with the roles of men and women exchanged.
inline Instance swap_genders(const Instance& inst) {
  return build_instance(inst.n(), inst.raw_lists(Gender::Women), inst.raw_lists(Gender::Men),
                        inst.mode(), BuildOptions{.require_symmetric_acceptance = false});
}

enum class Preference { StrictlyPrefersA, Indifferent, StrictlyPrefersB, Incomparable };

/// How `person` (of gender g) compares candidates a and b. Either candidate
/// may be unacceptable or kSingle; both of those rank below every acceptable
/// partner.
inline Preference prefers(const Instance& inst, Gender g, Id person, Id a, Id b) {
  const int ra = inst.rank(g, person, a);
  const int rb = inst.rank(g, person, b);
  if (ra == kUnranked && rb == kUnranked) return Preference::Incomparable;
  if (ra < rb) return Preference::StrictlyPrefersA;
  if (rb < ra) return Preference::StrictlyPrefersB;
  return Preference::Indifferent;
}

class Matching {
 public:
  Matching() = default;
  explicit Matching(int n)
      : wife_of_(static_cast<std::size_t>(n) + 1, kSingle),
        husband_of_(static_cast<std::size_t>(n) + 1, kSingle) {}

  /// wives[i] is the wife of man i+1, or kSingle.
  static Matching from_wives(std::span<const Id> wives) {
    const int n = static_cast<int>(wives.size());
    Matching m(n);
    for (Id man = 1; man <= n; ++man) {
      const Id w = wives[man - 1];
      if (w == kSingle) continue;
      if (w < 1 || w > n)
        throw Error(ErrorKind::InvalidId, "woman id " + std::to_string(w) + " outside 1.." + std::to_string(n));
      if (m.husband(w) != kSingle)
        throw Error(ErrorKind::InvalidMatching, "w" + std::to_string(w) + " matched twice");
      m.marry(man, w);
    }
    return m;
  }
  static Matching from_wives(std::initializer_list<Id> wives) {
    const std::vector<Id> v(wives);
    return from_wives(std::span<const Id>(v));
  }

  int n() const { return wife_of_.empty() ? 0 : static_cast<int>(wife_of_.size()) - 1; }

  Id wife(Id m) const { return wife_of_[m]; }
  Id husband(Id w) const { return husband_of_[w]; }
  Id partner(Gender g, Id p) const { return g == Gender::Men ? wife_of_[p] : husband_of_[p]; }

  /// Matches m and w; any previous partners of either become single.
  void marry(Id m, Id w) {
    if (const Id old_w = wife_of_[m]; old_w != kSingle) husband_of_[old_w] = kSingle;
    if (const Id old_m = husband_of_[w]; old_m != kSingle) wife_of_[old_m] = kSingle;
    wife_of_[m] = w;
    husband_of_[w] = m;
  }

  /// Pairs p (of gender g) with q of the other gender.
  void marry(Gender g, Id p, Id q) {
    if (g == Gender::Men) marry(p, q);
    else marry(q, p);
  }

  void make_single(Gender g, Id p) {
    const Id q = partner(g, p);
    if (q == kSingle) return;
    if (g == Gender::Men) {
      wife_of_[p] = kSingle;
      husband_of_[q] = kSingle;
    } else {
      husband_of_[p] = kSingle;
      wife_of_[q] = kSingle;
    }
  }

  /// Number of married couples.
  int size() const {
    int s = 0;
    for (std::size_t m = 1; m < wife_of_.size(); ++m) s += wife_of_[m] != kSingle;
    return s;
  }
  int singles() const { return 2 * (n() - size()); }
  bool perfect() const { return size() == n(); }

  std::vector<Id> wives() const { return {wife_of_.begin() + (wife_of_.empty() ? 0 : 1), wife_of_.end()}; }

  /// The same couples with men and women relabelled as each other.
  Matching swapped() const {
    Matching out(n());
    out.wife_of_ = husband_of_;
    out.husband_of_ = wife_of_;
    return out;
  }

  friend bool operator==(const Matching& a, const Matching& b) { return a.wife_of_ == b.wife_of_; }
  friend auto operator<=>(const Matching& a, const Matching& b) { return a.wife_of_ <=> b.wife_of_; }

 private:
  std::vector<Id> wife_of_;
  std::vector<Id> husband_of_;
};

/// Throws InvalidMatching unless `m` is a matching of the right size whose
/// couples accept each other; strict instances also require a perfect matching.
inline void validate_matching(const Instance& inst, const Matching& m) {
  if (m.n() != inst.n())
    throw Error(ErrorKind::DimensionMismatch,
                "matching has size " + std::to_string(m.n()) + ", instance " + std::to_string(inst.n()));
  for (Id man = 1; man <= inst.n(); ++man) {
    const Id w = m.wife(man);
    if (w == kSingle) {
      if (inst.strict())
        throw Error(ErrorKind::InvalidMatching, "m" + std::to_string(man) + " is single in a strict instance");
      continue;
    }
    if (m.husband(w) != man) throw Error(ErrorKind::InvalidMatching, "inconsistent inverse");
    if (!inst.mutually_acceptable(man, w))
      throw Error(ErrorKind::InvalidMatching,
                  "m" + std::to_string(man) + " and w" + std::to_string(w) + " do not accept each other");
  }
}

}  // namespace smls
