#pragma once

// Local search for stable marriages: SML, SML1, SML2 (strict complete lists)
// and LTIU (ties and incomplete lists) share one loop and differ only in the
// candidate blocking pairs that define the neighbourhood.
//
// One step:
//   1. if the current matching has no blocking pair the step only records it
//      (SM: the run ends; LTIU: the run ends if the matching is perfect,
//      otherwise it restarts from a fresh random matching);
//   2. otherwise the candidates are computed for the current primary gender
//      and listed by (primary id, partner id);
//   3. with probability p_walk a uniformly random candidate is removed,
//      otherwise every candidate's removal is scored and one of the
//      minimum-f neighbours is taken uniformly at random;
//   4. the primary gender flips.
//
// RNG draw order per run: initial gender (unless fixed), initial matching,
// then per step: walk coin, then either the walk index or the tie-break index.

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "smls/model.hpp"
#include "smls/rng.hpp"
#include "smls/stability.hpp"

namespace smls {

enum class Variant { SML, SML1, SML2, LTIU };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::SML: return "SML";
    case Variant::SML1: return "SML1";
    case Variant::SML2: return "SML2";
    case Variant::LTIU: return "LTIU";
  }
  return "?";
}

inline Variant parse_variant(const std::string& s) {
  if (s == "SML" || s == "sml") return Variant::SML;
  if (s == "SML1" || s == "sml1") return Variant::SML1;
  if (s == "SML2" || s == "sml2") return Variant::SML2;
  if (s == "LTIU" || s == "ltiu") return Variant::LTIU;
  throw Error(ErrorKind::InvalidArgument, "unknown variant '" + s + "'");
}

struct SearchParams {
  Variant variant = Variant::SML2;
  double p_walk = 0.2;
  long max_steps = 50000;
  std::uint64_t seed = 0;
  std::optional<std::chrono::milliseconds> wall_timeout{};
  /// Fixed starting gender; drawn from the RNG when empty.
  std::optional<Gender> initial_gender{};
  /// SML1/SML2/LTIU walk over their reduced candidate set unless this is set.
  /// SML always walks over the full set.
  bool walk_over_full = false;
  /// LTIU with the extended set instead of the undominated one.
  bool ltiu_extended = false;
  bool record_trace = true;
};

struct TraceRecord {
  long step = 0;
  // Current matching after the step.
  int nbp = 0;
  int ns = 0;
  int f = 0;
  bool walked = false;
  bool restarted = false;
  // Best matching so far.
  int best_nbp = 0;
  int best_ns = 0;
  int best_singles = 0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct SearchResult {
  Matching best;
  Evaluation best_eval;
  long steps_taken = 0;
  long restarts = 0;
  bool found_stable = false;
  bool found_perfect = false;
  bool timed_out = false;
  /// One record per step; empty when tracing is off.
  std::vector<TraceRecord> trace;

  friend bool operator==(const SearchResult&, const SearchResult&) = default;
};

/// SM: uniform random perfect matching. SMTI: people of `side` in random
/// order, each paired with a uniformly chosen free partner they accept and
/// who accepts them, or left single.
inline Matching random_matching(const Instance& inst, Rng& rng, Gender side = Gender::Men) {
  const int n = inst.n();
  Matching m(n);
  if (inst.strict()) {
    std::vector<Id> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[i] = i + 1;
    rng.shuffle(perm);
    for (Id p = 1; p <= n; ++p) m.marry(side, p, perm[p - 1]);
    return m;
  }
  std::vector<Id> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[i] = i + 1;
  rng.shuffle(order);
  const Gender h = other(side);
  std::vector<Id> options;
  for (Id p : order) {
    options.clear();
    for (Id q : inst.list(side, p))
      if (m.partner(h, q) == kSingle && inst.accepts(h, q, p)) options.push_back(q);
    if (options.empty()) continue;
    m.marry(side, p, options[rng.uniform_below(options.size())]);
  }
  return m;
}

inline void check_variant(const Instance& inst, Variant v) {
  if ((v == Variant::LTIU) == inst.strict())
    throw Error(ErrorKind::UnsupportedMode,
                std::string(to_string(v)) + " cannot run on a " + to_string(inst.mode()) + " instance");
}

class LocalSearch {
 public:
  struct StepOutcome {
    BlockingPair removed;
    bool walked = false;
  };

  LocalSearch(const Instance& inst, const SearchParams& params)
      : inst_(&inst), params_(params), rng_(params.seed), evaluator_(inst) {
    check_variant(inst, params.variant);
    primary_ = params.initial_gender ? *params.initial_gender
                                     : (rng_.uniform_below(2) == 0 ? Gender::Men : Gender::Women);
    evaluator_.reset(random_matching(inst, rng_, primary_));
  }

  /// Starts from a given matching; the RNG is still seeded from params.
  LocalSearch(const Instance& inst, const SearchParams& params, const Matching& start, Gender primary)
      : inst_(&inst), params_(params), rng_(params.seed), evaluator_(inst), primary_(primary) {
    check_variant(inst, params.variant);
    validate_matching(inst, start);
    evaluator_.reset(start);
  }

  const Matching& current() const { return evaluator_.current(); }
  Evaluation evaluation() const { return evaluator_.evaluation(); }
  const BlockingSet& full() const { return evaluator_.full(); }
  Gender primary() const { return primary_; }
  bool stable() const { return evaluator_.full().empty(); }

  /// Candidate pairs for the current primary gender, by (primary id, partner id).
  std::vector<BlockingPair> candidates() const {
    const auto& full = evaluator_.full().pairs;
    std::vector<BlockingPair> out;
    switch (params_.variant) {
      case Variant::SML: out = full; break;
      case Variant::SML1: out = detail::undominated_pairs(*inst_, full, primary_); break;
      case Variant::SML2: out = detail::extended_pairs(*inst_, full, primary_); break;
      case Variant::LTIU:
        out = params_.ltiu_extended ? detail::extended_pairs(*inst_, full, primary_)
                                    : detail::undominated_pairs(*inst_, full, primary_);
        break;
    }
    sort_by_primary(out);
    return out;
  }

  /// One move. Throws EmptyNeighborhood when the current matching is stable.
  StepOutcome step() {
    if (stable()) throw Error(ErrorKind::EmptyNeighborhood, "current matching is stable");
    const auto cands = candidates();
    StepOutcome out;
    out.walked = rng_.bernoulli(params_.p_walk);
    if (out.walked) {
      if (params_.variant == Variant::SML || !params_.walk_over_full) {
        out.removed = cands[rng_.uniform_below(cands.size())];
      } else {
        auto pool = evaluator_.full().pairs;
        sort_by_primary(pool);
        out.removed = pool[rng_.uniform_below(pool.size())];
      }
    } else {
      best_moves_.clear();
      int best_f = 0;
      for (const auto& bp : cands) {
        const int f = evaluator_.evaluate_removal(bp).f;
        if (best_moves_.empty() || f < best_f) {
          best_moves_.clear();
          best_f = f;
        }
        if (f == best_f) best_moves_.push_back(bp);
      }
      out.removed = best_moves_[rng_.uniform_below(best_moves_.size())];
    }
    Matching next = evaluator_.current();
    detail::apply_removal(next, out.removed, inst_->mode());
    evaluator_.reset(next);
    primary_ = other(primary_);
    return out;
  }

  /// Fresh random matching drawn from the current primary side; the RNG stream continues.
  void restart() { evaluator_.reset(random_matching(*inst_, rng_, primary_)); }

  void flip_gender() { primary_ = other(primary_); }

 private:
  void sort_by_primary(std::vector<BlockingPair>& v) const {
    const Gender g = primary_;
    std::sort(v.begin(), v.end(), [g](const BlockingPair& a, const BlockingPair& b) {
      return std::pair(a.of(g), a.of(other(g))) < std::pair(b.of(g), b.of(other(g)));
    });
  }

  const Instance* inst_;
  SearchParams params_;
  Rng rng_;
  MoveEvaluator evaluator_;
  Gender primary_ = Gender::Men;
  std::vector<BlockingPair> best_moves_;
};

namespace detail {

class BestTracker {
 public:
  explicit BestTracker(const Matching& m, Evaluation e) : best_(m), eval_(e), stable_(e.nbp == 0) {}

  // A stable matching beats any unstable one; among stable ones fewer singles
  // wins; among unstable ones strictly smaller f wins. Ties keep the earlier.
  void offer(const Matching& m, Evaluation e) {
    if (e.nbp == 0) {
      if (!stable_ || m.singles() < best_.singles()) {
        best_ = m;
        eval_ = e;
        stable_ = true;
      }
    } else if (!stable_ && e.f < eval_.f) {
      best_ = m;
      eval_ = e;
    }
  }

  const Matching& best() const { return best_; }
  Evaluation eval() const { return eval_; }
  bool stable() const { return stable_; }

 private:
  Matching best_;
  Evaluation eval_;
  bool stable_;
};

inline SearchResult drive(LocalSearch& search, const SearchParams& params, bool ltiu) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  BestTracker tracker(search.current(), search.evaluation());
  SearchResult result;
  bool done = false;

  while (!done && result.steps_taken < params.max_steps) {
    if (params.wall_timeout && (result.steps_taken & 63) == 0 && clock::now() - start >= *params.wall_timeout) {
      result.timed_out = true;
      break;
    }
    ++result.steps_taken;
    TraceRecord rec;
    rec.step = result.steps_taken;
    if (search.stable()) {
      if (!ltiu || search.current().perfect()) {
        done = true;
      } else {
        search.restart();
        ++result.restarts;
        rec.restarted = true;
        tracker.offer(search.current(), search.evaluation());
      }
      search.flip_gender();
    } else {
      rec.walked = search.step().walked;
      tracker.offer(search.current(), search.evaluation());
    }
    const Evaluation e = search.evaluation();
    rec.nbp = e.nbp;
    rec.ns = e.ns;
    rec.f = e.f;
    rec.best_nbp = tracker.eval().nbp;
    rec.best_ns = tracker.eval().ns;
    rec.best_singles = tracker.best().singles();
    if (params.record_trace) result.trace.push_back(rec);
  }

  result.best = tracker.best();
  result.best_eval = tracker.eval();
  result.found_stable = tracker.stable();
  result.found_perfect = tracker.stable() && tracker.best().perfect();
  return result;
}

}  // namespace detail

inline SearchResult run_search(const Instance& inst, const SearchParams& params) {
  LocalSearch search(inst, params);
  return detail::drive(search, params, params.variant == Variant::LTIU);
}

/// Same loop from a caller-supplied starting matching and gender.
inline SearchResult run_search_from(const Instance& inst, const SearchParams& params, const Matching& start,
                                    Gender primary) {
  LocalSearch search(inst, params, start, primary);
  return detail::drive(search, params, params.variant == Variant::LTIU);
}

}  // namespace smls
