#pragma once

// Blocking pairs, the dominance filters that shrink the neighbourhood, the
// evaluation function and the pair-removal moves.
//
// A pair (m, w) blocks M when both accept each other, they are not partners,
// and each strictly prefers the other to their current situation (a partner
// or being single). With strict complete lists this is the classical
// definition; with ties it is weak stability.

#include <algorithm>
#include <compare>
#include <span>
#include <utility>
#include <vector>

#include "smls/model.hpp"

namespace smls {

struct BlockingPair {
  Id man = kSingle;
  Id woman = kSingle;

  /// The member of gender g.
  Id of(Gender g) const { return g == Gender::Men ? man : woman; }

  friend bool operator==(const BlockingPair&, const BlockingPair&) = default;
  friend auto operator<=>(const BlockingPair&, const BlockingPair&) = default;
};

inline BlockingPair make_pair(Gender g, Id p, Id q) {
  return g == Gender::Men ? BlockingPair{p, q} : BlockingPair{q, p};
}

enum class BlockingKind { Full, Undominated, Extended };

struct BlockingSet {
  std::vector<BlockingPair> pairs;
  BlockingKind kind = BlockingKind::Full;
  Gender primary = Gender::Men;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
  bool contains(BlockingPair bp) const { return std::find(pairs.begin(), pairs.end(), bp) != pairs.end(); }
};

struct Evaluation {
  int nbp = 0;  // blocking pairs
  int ns = 0;   // singles in no blocking pair (SMTI only)
  int f = 0;    // nbp + ns

  friend bool operator==(const Evaluation&, const Evaluation&) = default;
};

inline bool is_blocking(const Instance& inst, const Matching& m, Id man, Id woman) {
  return m.wife(man) != woman && inst.man_rank(man, woman) < inst.man_rank(man, m.wife(man)) &&
         inst.woman_rank(woman, man) < inst.woman_rank(woman, m.husband(woman));
}

/// Appends to `out` every q such that (p, q) blocks, in p's list order.
template <typename Sink>
void for_each_blocking_partner(const Instance& inst, const Matching& m, Gender g, Id p, Sink&& sink) {
  const Gender h = other(g);
  const int current = inst.rank(g, p, m.partner(g, p));
  for (Id q : inst.list(g, p)) {
    if (inst.rank(g, p, q) >= current) break;
    if (inst.rank(h, q, p) < inst.rank(h, q, m.partner(h, q))) sink(q);
  }
}

/// All blocking pairs: men ascending, each man's partners in his rank order.
inline BlockingSet blocking_pairs(const Instance& inst, const Matching& m) {
  BlockingSet out;
  for (Id man = 1; man <= inst.n(); ++man)
    for_each_blocking_partner(inst, m, Gender::Men, man,
                              [&](Id w) { out.pairs.push_back({man, w}); });
  return out;
}

namespace detail {

// (rank, id) of q on p's list: the total order used to pick "best" partners.
inline std::pair<int, Id> pref_key(const Instance& inst, Gender g, Id p, Id q) {
  return {inst.rank(g, p, q), q};
}

struct DominanceStages {
  std::vector<Id> stage1;  // per primary person: best blocking partner, or kSingle
  std::vector<Id> runner;  // per primary person: second-best blocking partner, or kSingle
  std::vector<Id> stage2;  // per other-gender person: best primary among stage1 survivors
};

inline DominanceStages dominance_stages(const Instance& inst, std::span<const BlockingPair> full,
                                        Gender primary) {
  const Gender secondary = other(primary);
  const auto size = static_cast<std::size_t>(inst.n()) + 1;
  DominanceStages s{std::vector<Id>(size, kSingle), std::vector<Id>(size, kSingle),
                    std::vector<Id>(size, kSingle)};
  for (const auto& bp : full) {
    const Id p = bp.of(primary), q = bp.of(secondary);
    Id& best = s.stage1[p];
    Id& second = s.runner[p];
    const auto key = pref_key(inst, primary, p, q);
    if (best == kSingle || key < pref_key(inst, primary, p, best)) {
      second = best;
      best = q;
    } else if (second == kSingle || key < pref_key(inst, primary, p, second)) {
      second = q;
    }
  }
  for (Id p = 1; p <= inst.n(); ++p) {
    const Id q = s.stage1[p];
    if (q == kSingle) continue;
    Id& best = s.stage2[q];
    if (best == kSingle || pref_key(inst, secondary, q, p) < pref_key(inst, secondary, q, best)) best = p;
  }
  return s;
}

inline bool undominated_member(const DominanceStages& s, Gender primary, const BlockingPair& bp) {
  const Id p = bp.of(primary), q = bp.of(other(primary));
  return s.stage1[p] == q && s.stage2[q] == p;
}

inline std::vector<BlockingPair> undominated_pairs(const Instance& inst, std::span<const BlockingPair> full,
                                                   Gender primary) {
  const auto s = dominance_stages(inst, full, primary);
  std::vector<BlockingPair> out;
  for (const auto& bp : full)
    if (undominated_member(s, primary, bp)) out.push_back(bp);
  return out;
}

inline std::vector<BlockingPair> extended_pairs(const Instance& inst, std::span<const BlockingPair> full,
                                                Gender primary) {
  const auto s = dominance_stages(inst, full, primary);
  // Stage-1 survivors knocked out in stage 2 hand their slot to the next
  // blocking partner of the same primary person.
  std::vector<BlockingPair> extra;
  for (Id p = 1; p <= inst.n(); ++p) {
    const Id q = s.stage1[p];
    if (q == kSingle || s.stage2[q] == p) continue;
    // q is p's best, so the next one after q is the runner-up.
    const Id next = s.runner[p];
    if (next != kSingle) extra.push_back(make_pair(primary, p, next));
  }
  std::sort(extra.begin(), extra.end());
  std::vector<BlockingPair> out;
  for (const auto& bp : full)
    if (undominated_member(s, primary, bp) || std::binary_search(extra.begin(), extra.end(), bp))
      out.push_back(bp);
  return out;
}

}  // namespace detail

/// Two-stage filter: each primary-gender person keeps only their best blocking
/// partner, then each person of the other gender keeps only their best among
/// the survivors. Ties on a list are broken by the lower id. Every person ends
/// up in at most one pair.
inline BlockingSet undominated(const Instance& inst, const Matching& /*m*/, const BlockingSet& full,
                               Gender primary) {
  if (full.kind != BlockingKind::Full)
    throw Error(ErrorKind::InvalidArgument, "undominated() expects the full blocking set");
  return {detail::undominated_pairs(inst, full.pairs, primary), BlockingKind::Undominated, primary};
}

/// The undominated set plus, for every stage-1 survivor (p, q) eliminated in
/// stage 2, the pair of p with his or her next-best blocking partner after q.
inline BlockingSet extended_undominated(const Instance& inst, const Matching& /*m*/, const BlockingSet& full,
                                        Gender primary) {
  if (full.kind != BlockingKind::Full)
    throw Error(ErrorKind::InvalidArgument, "extended_undominated() expects the full blocking set");
  return {detail::extended_pairs(inst, full.pairs, primary), BlockingKind::Extended, primary};
}

/// f = nbp + ns; ns counts single men and women who are in no blocking pair
/// and is always 0 for strict complete instances.
inline Evaluation evaluate(const Instance& inst, const Matching& m) {
  const auto full = blocking_pairs(inst, m);
  Evaluation e;
  e.nbp = static_cast<int>(full.size());
  if (!inst.strict()) {
    const auto size = static_cast<std::size_t>(inst.n()) + 1;
    std::vector<char> man_blocks(size, 0), woman_blocks(size, 0);
    for (const auto& bp : full.pairs) {
      man_blocks[bp.man] = 1;
      woman_blocks[bp.woman] = 1;
    }
    for (Id p = 1; p <= inst.n(); ++p) {
      e.ns += m.wife(p) == kSingle && !man_blocks[p];
      e.ns += m.husband(p) == kSingle && !woman_blocks[p];
    }
  }
  e.f = e.nbp + e.ns;
  return e;
}

inline bool is_stable(const Instance& inst, const Matching& m) { return blocking_pairs(inst, m).empty(); }

namespace detail {

// Applies the move in place. Strict: the two ex-partners marry each other.
// SMTI: the ex-partners become single.
inline void apply_removal(Matching& m, BlockingPair bp, Mode mode) {
  const Id ex_husband = m.husband(bp.woman);
  const Id ex_wife = m.wife(bp.man);
  m.marry(bp.man, bp.woman);
  if (mode == Mode::StrictComplete && ex_husband != kSingle && ex_wife != kSingle) m.marry(ex_husband, ex_wife);
}

}  // namespace detail

inline Matching remove_pair(const Instance& inst, const Matching& m, BlockingPair bp, Mode mode) {
  if (bp.man < 1 || bp.man > inst.n() || bp.woman < 1 || bp.woman > inst.n() ||
      !is_blocking(inst, m, bp.man, bp.woman))
    throw Error(ErrorKind::NotABlockingPair,
                "(m" + std::to_string(bp.man) + ", w" + std::to_string(bp.woman) + ") does not block");
  Matching out = m;
  detail::apply_removal(out, bp, mode);
  return out;
}

inline Matching remove_pair(const Instance& inst, const Matching& m, BlockingPair bp) {
  return remove_pair(inst, m, bp, inst.mode());
}

/// Keeps the blocking structure of a current matching and scores candidate
/// removals without rebuilding it: only the (at most) four people whose
/// partner changes can gain or lose blocking pairs, so each neighbour costs
/// O(n) instead of O(n^2).
class MoveEvaluator {
 public:
  explicit MoveEvaluator(const Instance& inst) : inst_(&inst), rule_(inst.mode()) {
    const auto size = static_cast<std::size_t>(inst.n()) + 1;
    for (int gi = 0; gi < 2; ++gi) {
      count_[gi].assign(size, 0);
      delta_[gi].assign(size, 0);
      stamp_[gi].assign(size, 0);
      partner_rank_[gi].assign(size, kUnranked);
    }
  }

  void reset(const Matching& m) {
    current_ = m;
    work_ = m;
    full_.pairs = blocking_pairs(*inst_, m).pairs;
    for (auto& c : count_) std::fill(c.begin(), c.end(), 0);
    for (const auto& bp : full_.pairs) {
      ++count_[0][bp.man];
      ++count_[1][bp.woman];
    }
    for (Id p = 1; p <= inst_->n(); ++p) {
      partner_rank_[0][p] = inst_->man_rank(p, m.wife(p));
      partner_rank_[1][p] = inst_->woman_rank(p, m.husband(p));
    }
    eval_ = {};
    eval_.nbp = static_cast<int>(full_.size());
    if (!inst_->strict())
      for (Id p = 1; p <= inst_->n(); ++p)
        for (Gender g : {Gender::Men, Gender::Women})
          eval_.ns += m.partner(g, p) == kSingle && count_[index_of(g)][p] == 0;
    eval_.f = eval_.nbp + eval_.ns;
  }

  const Matching& current() const { return current_; }
  const BlockingSet& full() const { return full_; }
  Evaluation evaluation() const { return eval_; }

  /// Evaluation of remove_pair(current, bp); bp must block.
  Evaluation evaluate_removal(BlockingPair bp) {
    const Id m1 = bp.man, w1 = bp.woman;
    const Id m2 = current_.husband(w1), w2 = current_.wife(m1);
    const Id men[2] = {m1, m2};
    const Id women[2] = {w1, w2};
    const bool track = !inst_->strict();

    ++epoch_;
    touched_.clear();
    int lost;
    if (track) {
      lost = collect(men, women, -1);
    } else {
      // Pairs touching the four people, by inclusion-exclusion on the counts.
      lost = 0;
      for (Id p : men)
        if (p != kSingle) lost += count_[0][p];
      for (Id q : women)
        if (q != kSingle) lost += count_[1][q];
      for (Id p : men)
        for (Id q : women)
          if (p != kSingle && q != kSingle && is_blocking(*inst_, current_, p, q)) --lost;
    }

    detail::apply_removal(work_, bp, rule_);
    for (Id p : men)
      if (p != kSingle) partner_rank_[0][p] = inst_->man_rank(p, work_.wife(p));
    for (Id q : women)
      if (q != kSingle) partner_rank_[1][q] = inst_->woman_rank(q, work_.husband(q));
    const int gained = collect(men, women, +1);

    Evaluation e;
    e.nbp = eval_.nbp - lost + gained;
    if (track) {
      for (Id p : men) touch(Gender::Men, p);
      for (Id q : women) touch(Gender::Women, q);
      int ns = eval_.ns;
      for (const auto& [g, p] : touched_) {
        const int gi = index_of(g);
        ns -= current_.partner(g, p) == kSingle && count_[gi][p] == 0;
        ns += work_.partner(g, p) == kSingle && count_[gi][p] + delta_[gi][p] == 0;
      }
      e.ns = ns;
      for (const auto& [g, p] : touched_) delta_[index_of(g)][p] = 0;
    }
    e.f = e.nbp + e.ns;

    restore(men, women);
    return e;
  }

 private:
  // Calls sink(q) for each q blocking with p under the partner ranks in
  // partner_rank_.
  template <typename Sink>
  void scan(Gender g, Id p, Sink&& sink) const {
    const int gi = index_of(g);
    const auto& other_rank = partner_rank_[1 - gi];
    const int current = partner_rank_[gi][p];
    const auto list = inst_->list(g, p);
    const auto ranks = inst_->list_ranks(g, p);
    const auto given = inst_->ranks_given_to(g, p);
    for (std::size_t j = 0; j < list.size() && ranks[j] < current; ++j) {
      const Id q = list[j];
      if (given[q] < other_rank[q]) sink(q);
    }
  }

  // Blocking pairs involving any of the listed people, each counted once;
  // records per-person count deltas when SMTI needs them.
  int collect(const Id (&men)[2], const Id (&women)[2], int sign) {
    int total = 0;
    const bool track = !inst_->strict();
    for (int i = 0; i < 2; ++i) {
      const Id a = men[i];
      if (a == kSingle || (i == 1 && a == men[0])) continue;
      scan(Gender::Men, a, [&](Id w) {
        ++total;
        if (track) {
          add(Gender::Men, a, sign);
          add(Gender::Women, w, sign);
        }
      });
    }
    for (int i = 0; i < 2; ++i) {
      const Id b = women[i];
      if (b == kSingle || (i == 1 && b == women[0])) continue;
      scan(Gender::Women, b, [&](Id x) {
        if (x == men[0] || x == men[1]) return;
        ++total;
        if (track) {
          add(Gender::Women, b, sign);
          add(Gender::Men, x, sign);
        }
      });
    }
    return total;
  }

  void touch(Gender g, Id p) {
    if (p == kSingle) return;
    auto& s = stamp_[index_of(g)][p];
    if (s != epoch_) {
      s = epoch_;
      touched_.emplace_back(g, p);
    }
  }

  void add(Gender g, Id p, int sign) {
    touch(g, p);
    delta_[index_of(g)][p] += sign;
  }

  void restore(const Id (&men)[2], const Id (&women)[2]) {
    for (Id p : men)
      if (p != kSingle) work_.make_single(Gender::Men, p);
    for (Id q : women)
      if (q != kSingle) work_.make_single(Gender::Women, q);
    for (Id p : men)
      if (p != kSingle && current_.wife(p) != kSingle) work_.marry(p, current_.wife(p));
    for (Id q : women)
      if (q != kSingle && current_.husband(q) != kSingle) work_.marry(current_.husband(q), q);
    for (Id p : men)
      if (p != kSingle) partner_rank_[0][p] = inst_->man_rank(p, current_.wife(p));
    for (Id q : women)
      if (q != kSingle) partner_rank_[1][q] = inst_->woman_rank(q, current_.husband(q));
  }

  const Instance* inst_;
  Mode rule_;
  Matching current_;
  Matching work_;
  BlockingSet full_;
  Evaluation eval_;
  std::vector<int> count_[2];
  std::vector<int> delta_[2];
  std::vector<int> partner_rank_[2];
  std::vector<unsigned> stamp_[2];
  unsigned epoch_ = 0;
  std::vector<std::pair<Gender, Id>> touched_;
};

}  // namespace smls
