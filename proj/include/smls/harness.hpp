#pragma once

// Experiment harness behind the command-line tool: instance corpora, single
// solves, stability checks, lattice sampling, parameter sweeps and curve
// fits. Every function here is deterministic given its seeds except for the
// wall-clock columns.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "smls/csv.hpp"
#include "smls/fit.hpp"
#include "smls/generate.hpp"
#include "smls/lattice.hpp"
#include "smls/model.hpp"
#include "smls/search.hpp"
#include "smls/stability.hpp"

namespace smls::harness {

namespace fs = std::filesystem;

/// Seed for item (a, b, c) of a batch started from `base`.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t x = base;
  std::uint64_t h = splitmix64(x);
  for (std::uint64_t v : {a, b, c}) {
    x = h ^ (v * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL);
    h = splitmix64(x);
  }
  return h;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

inline Instance load_instance(const fs::path& path, BuildOptions options = {}) {
  return parse_instance(read_file(path), options);
}

/// Runs fn(0..count-1) on `jobs` threads; fn must only touch its own slot.
inline void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------
// Matching files: one "m: w" line per man, "m: -" when single.

inline std::string serialize_matching(const Matching& m) {
  std::string out;
  for (Id man = 1; man <= m.n(); ++man) {
    out += std::to_string(man) + ": ";
    out += m.wife(man) == kSingle ? std::string("-") : std::to_string(m.wife(man));
    out += '\n';
  }
  return out;
}

/// Men without a line are single. Ids beyond n are a DimensionMismatch.
inline Matching parse_matching(std::string_view text, int n) {
  std::vector<Id> wives(static_cast<std::size_t>(n), kSingle);
  std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    ++lineno;
    const auto line = detail::trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (!line.empty() && line.front() != '#') {
      const auto colon = line.find(':');
      long long man = 0;
      if (colon == std::string_view::npos || !detail::parse_int(detail::trim(line.substr(0, colon)), man))
        throw Error(ErrorKind::SyntaxError, "expected 'm: w' or 'm: -'", lineno);
      const auto rhs = detail::trim(line.substr(colon + 1));
      if (man < 1 || man > n)
        throw Error(ErrorKind::DimensionMismatch, "man " + std::to_string(man) + " outside 1.." + std::to_string(n),
                    lineno);
      if (seen[man]) throw Error(ErrorKind::InvalidMatching, "man " + std::to_string(man) + " listed twice", lineno);
      seen[man] = 1;
      if (rhs != "-") {
        long long w = 0;
        if (!detail::parse_int(rhs, w)) throw Error(ErrorKind::SyntaxError, "bad woman id", lineno);
        if (w < 1 || w > n)
          throw Error(ErrorKind::DimensionMismatch,
                      "woman " + std::to_string(w) + " outside 1.." + std::to_string(n), lineno);
        wives[man - 1] = static_cast<Id>(w);
      }
    }
    if (nl == std::string_view::npos) break;
  }
  return Matching::from_wives(std::span<const Id>(wives));
}

// ---------------------------------------------------------------------------
// gen

enum class InstanceKind { Sm, Smti };

struct GenCommand {
  InstanceKind kind = InstanceKind::Sm;
  int n = 10;
  double p1 = 0.0;
  double p2 = 0.0;
  int count = 1;
  std::uint64_t seed = 0;
  int max_retries = 1000;
  fs::path out_dir = ".";
};

struct GenReport {
  std::vector<fs::path> files;
  std::vector<std::string> errors;  // one per failed index, "index: message"
  bool ok() const { return errors.empty(); }
};

inline std::string instance_file_name(const GenCommand& c, int index) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s_n%d_s%llu_%04d.txt", c.kind == InstanceKind::Sm ? "sm" : "smti", c.n,
                static_cast<unsigned long long>(c.seed), index);
  return buf;
}

/// Writes `count` instance files plus manifest.csv into out_dir. Instance i
/// uses seed derive_seed(seed, i).
inline GenReport cmd_gen(const GenCommand& c) {
  if (c.count < 0) throw Error(ErrorKind::InvalidArgument, "count must be non-negative");
  fs::create_directories(c.out_dir);
  GenReport report;
  std::string manifest = "schema,file,kind,n,p1,p2,base_seed,index,seed,status,error\n";
  for (int i = 0; i < c.count; ++i) {
    const std::uint64_t seed = derive_seed(c.seed, static_cast<std::uint64_t>(i));
    const auto name = instance_file_name(c, i);
    std::string status = "ok", error;
    try {
      const Instance inst = c.kind == InstanceKind::Sm
                                ? gen_sm_ic(c.n, seed)
                                : gen_smti(GenParams{c.n, c.p1, c.p2, seed, c.max_retries});
      write_file(c.out_dir / name, serialize_instance(inst));
      report.files.push_back(c.out_dir / name);
    } catch (const Error& e) {
      status = "error";
      error = e.what();
      report.errors.push_back(std::to_string(i) + ": " + error);
    }
    csv::Row row;
    row << csv::kSchema << (status == "ok" ? name : std::string()) << (c.kind == InstanceKind::Sm ? "sm" : "smti")
        << c.n << c.p1 << c.p2 << c.seed << i << seed << status << error;
    manifest += row.str() + '\n';
  }
  write_file(c.out_dir / "manifest.csv", manifest);
  return report;
}

// ---------------------------------------------------------------------------
// solve

struct SolveRecord {
  std::string file;
  SearchParams params;
  int n = 0;
  SearchResult result;
  double wall_ms = 0;
};

inline std::string solve_header() {
  return "schema,file,variant,seed,p_walk,max_steps,n,found_stable,found_perfect,steps,restarts,size,singles,"
         "nbp,ns,f,timed_out,wall_ms";
}

inline std::string solve_row(const SolveRecord& r, bool with_time = true) {
  csv::Row row;
  row << csv::kSchema << r.file << to_string(r.params.variant) << r.params.seed << r.params.p_walk
      << r.params.max_steps << r.n << r.result.found_stable << r.result.found_perfect << r.result.steps_taken
      << r.result.restarts << r.result.best.size() << r.result.best.singles() << r.result.best_eval.nbp
      << r.result.best_eval.ns << r.result.best_eval.f << r.result.timed_out;
  if (with_time) row << r.wall_ms;
  else row << "";
  return row.str();
}

inline std::string trace_csv(const std::vector<TraceRecord>& trace) {
  std::string out = "step,nbp,ns,f,walked,restarted,best_nbp,best_ns,best_singles\n";
  for (const auto& t : trace) {
    csv::Row row;
    row << t.step << t.nbp << t.ns << t.f << t.walked << t.restarted << t.best_nbp << t.best_ns << t.best_singles;
    out += row.str() + '\n';
  }
  return out;
}

inline SolveRecord solve_instance(const Instance& inst, const SearchParams& params, std::string file = {}) {
  SolveRecord r;
  r.file = std::move(file);
  r.params = params;
  r.n = inst.n();
  const auto start = std::chrono::steady_clock::now();
  r.result = run_search(inst, params);
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

inline SolveRecord cmd_solve(const fs::path& instance_file, const SearchParams& params,
                             const std::optional<fs::path>& trace_out = std::nullopt,
                             const std::optional<fs::path>& matching_out = std::nullopt,
                             BuildOptions build = {}) {
  const Instance inst = load_instance(instance_file, build);
  auto r = solve_instance(inst, params, instance_file.filename().string());
  if (trace_out) write_file(*trace_out, trace_csv(r.result.trace));
  if (matching_out) write_file(*matching_out, serialize_matching(r.result.best));
  return r;
}

// ---------------------------------------------------------------------------
// check

struct CheckReport {
  Evaluation eval;
  std::vector<BlockingPair> pairs;
  int size = 0;
  bool stable() const { return eval.nbp == 0; }
};

inline CheckReport cmd_check(const Instance& inst, const Matching& m) {
  validate_matching(inst, m);
  CheckReport r;
  r.pairs = blocking_pairs(inst, m).pairs;
  r.eval = evaluate(inst, m);
  r.size = m.size();
  return r;
}

inline CheckReport cmd_check(const fs::path& instance_file, const fs::path& matching_file, BuildOptions build = {}) {
  const Instance inst = load_instance(instance_file, build);
  return cmd_check(inst, parse_matching(read_file(matching_file), inst.n()));
}

inline std::string format_check(const CheckReport& r, std::size_t cap) {
  std::ostringstream os;
  os << (r.stable() ? "stable" : "unstable") << "\nsize: " << r.size << "\nnbp: " << r.eval.nbp
     << "\nns: " << r.eval.ns << "\nf: " << r.eval.f << '\n';
  const std::size_t shown = std::min(cap, r.pairs.size());
  for (std::size_t i = 0; i < shown; ++i)
    os << "blocking: (m" << r.pairs[i].man << ", w" << r.pairs[i].woman << ")\n";
  if (shown < r.pairs.size()) os << "... " << (r.pairs.size() - shown) << " more\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// sample

struct SampleRecord {
  std::string file;
  int n = 0;
  SampleStats stats;
  std::size_t distinct = 0;
};

/// `runs` independent searches (run r seeded with derive_seed(seed, r))
/// summarized against the instance's full lattice.
inline SampleRecord sample_instance(const Instance& inst, int runs, std::uint64_t seed, SearchParams engine = {},
                                    EnumerateOptions caps = {.max_n_strict = 40, .max_n_smti = 7}, int jobs = 1,
                                    std::string file = {}) {
  if (runs < 1) throw Error(ErrorKind::InvalidArgument, "runs must be positive");
  const Lattice lat = build_lattice(inst, caps);
  std::vector<Matching> results(static_cast<std::size_t>(runs));
  parallel_for(results.size(), jobs, [&](std::size_t r) {
    SearchParams p = engine;
    p.seed = derive_seed(seed, r);
    p.record_trace = false;
    const auto res = run_search(inst, p);
    if (!res.found_stable)
      throw Error(ErrorKind::InvalidArgument, "run " + std::to_string(r) + " hit the step limit before stability");
    results[r] = res.best;
  });
  SampleRecord rec;
  rec.file = std::move(file);
  rec.n = inst.n();
  rec.stats = sampling_metrics(lat, results);
  rec.distinct = static_cast<std::size_t>(
      std::count_if(rec.stats.frequencies.begin(), rec.stats.frequencies.end(), [](double f) { return f > 0; }));
  return rec;
}

inline std::string sample_header() {
  return "schema,file,n,lattice_size,runs,distinct,entropy_bits,normalized_entropy,mean_normalized_distance";
}

inline std::string sample_row(const SampleRecord& r) {
  csv::Row row;
  row << csv::kSchema << r.file << r.n << r.stats.lattice_size << r.stats.runs << r.distinct << r.stats.entropy_bits
      << r.stats.normalized_entropy << r.stats.mean_normalized_distance;
  return row.str();
}

/// Mean over instances, as an "ALL" row.
inline std::string sample_aggregate_row(const std::vector<SampleRecord>& records) {
  double h = 0, hn = 0, d = 0, size = 0;
  std::size_t runs = 0, distinct = 0;
  for (const auto& r : records) {
    h += r.stats.entropy_bits;
    hn += r.stats.normalized_entropy;
    d += r.stats.mean_normalized_distance;
    size += static_cast<double>(r.stats.lattice_size);
    runs += r.stats.runs;
    distinct += r.distinct;
  }
  const double k = records.empty() ? 1.0 : static_cast<double>(records.size());
  csv::Row row;
  row << csv::kSchema << "ALL" << (records.empty() ? 0 : records.front().n) << size / k << runs << distinct << h / k
      << hn / k << d / k;
  return row.str();
}

// ---------------------------------------------------------------------------
// sweep

struct SweepSpec {
  InstanceKind kind = InstanceKind::Sm;
  std::vector<int> sizes;
  std::vector<double> p1_grid{0.0};
  std::vector<double> p2_grid{0.0};
  int instances_per_cell = 1;
  int runs_per_instance = 1;
  std::uint64_t base_seed = 0;
  SearchParams engine;  // variant, p_walk, max_steps; seed is derived per run
  int max_retries = 1000;
  /// Steps covered by the per-step profile.
  long profile_steps = 5000;
  int jobs = 1;
};

struct Cell {
  int n = 0;
  double p1 = 0;
  double p2 = 0;
};

struct RunRow {
  std::size_t cell = 0;
  int instance = 0;
  int run = 0;
  std::uint64_t instance_seed = 0;
  std::uint64_t run_seed = 0;
  bool found_stable = false;
  bool found_perfect = false;
  long steps = 0;
  long restarts = 0;
  int size = 0;
  int singles = 0;
  int nbp = 0;
  int ns = 0;
  double wall_ms = 0;
  std::string error;
  Matching best;
};

struct CellRow {
  Cell cell;
  int runs = 0;
  int errors = 0;
  double mean_size = 0;
  double mean_singles = 0;
  double pct_perfect = 0;
  double pct_stable = 0;
  double mean_steps = 0;
  double median_steps = 0;
  double mean_wall_ms = 0;
  std::string error;
};

/// Means over a cell's runs at step t; a finished run contributes its final state.
struct ProfileRow {
  std::size_t cell = 0;
  long t = 0;
  double mean_nbp = 0;
  double mean_ns = 0;
  double mean_best_nbp = 0;
  double mean_best_singles = 0;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<Cell> cells;
  std::vector<RunRow> runs;  // sorted by (cell, instance, run)
  std::vector<CellRow> cell_rows;
  std::vector<ProfileRow> profile;  // sorted by (cell, t)
};

inline void validate(const SweepSpec& s) {
  for (double p : s.p1_grid)
    if (!(p >= 0 && p <= 1)) throw Error(ErrorKind::InvalidArgument, "p1 grid outside [0, 1]");
  for (double p : s.p2_grid)
    if (!(p >= 0 && p <= 1)) throw Error(ErrorKind::InvalidArgument, "p2 grid outside [0, 1]");
  for (int n : s.sizes)
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "sizes must be positive");
  if (s.instances_per_cell < 1 || s.runs_per_instance < 1)
    throw Error(ErrorKind::InvalidArgument, "counts must be positive");
  if (s.engine.max_steps < 1) throw Error(ErrorKind::InvalidArgument, "max_steps must be positive");
}

inline std::vector<Cell> sweep_cells(const SweepSpec& s) {
  std::vector<Cell> cells;
  for (int n : s.sizes) {
    if (s.kind == InstanceKind::Sm) {
      cells.push_back({n, 0.0, 0.0});
      continue;
    }
    for (double p1 : s.p1_grid)
      for (double p2 : s.p2_grid) cells.push_back({n, p1, p2});
  }
  return cells;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size();
  return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

/// Instance i of cell c is generated from derive_seed(base, c, i); run r on
/// it searches with derive_seed(base, c, i, r + 1). Rows come out in
/// canonical order whatever the number of jobs.
inline SweepResult run_sweep(const SweepSpec& spec) {
  validate(spec);
  SweepResult out;
  out.spec = spec;
  out.cells = sweep_cells(spec);
  const std::size_t per_cell =
      static_cast<std::size_t>(spec.instances_per_cell) * static_cast<std::size_t>(spec.runs_per_instance);
  const std::size_t total = out.cells.size() * per_cell;
  out.runs.resize(total);

  // Integer sums per (cell, step) make the profile independent of run order.
  const std::size_t width = static_cast<std::size_t>(std::max<long>(1, spec.profile_steps));
  struct Sums {
    std::vector<long long> nbp, ns, best_nbp, best_singles;
    long longest = 0;
  };
  std::vector<Sums> sums(out.cells.size());
  for (auto& s : sums) {
    s.nbp.assign(width, 0);
    s.ns.assign(width, 0);
    s.best_nbp.assign(width, 0);
    s.best_singles.assign(width, 0);
  }
  std::vector<std::mutex> locks(out.cells.size());

  parallel_for(total, spec.jobs, [&](std::size_t k) {
    const std::size_t c = k / per_cell;
    const int instance = static_cast<int>((k % per_cell) / static_cast<std::size_t>(spec.runs_per_instance));
    const int run = static_cast<int>(k % static_cast<std::size_t>(spec.runs_per_instance));
    const Cell cell = out.cells[c];
    RunRow& row = out.runs[k];
    row.cell = c;
    row.instance = instance;
    row.run = run;
    row.instance_seed = derive_seed(spec.base_seed, c, static_cast<std::uint64_t>(instance));
    row.run_seed = derive_seed(spec.base_seed, c, static_cast<std::uint64_t>(instance), static_cast<std::uint64_t>(run) + 1);
    try {
      const Instance inst = spec.kind == InstanceKind::Sm
                                ? gen_sm_ic(cell.n, row.instance_seed)
                                : gen_smti(GenParams{cell.n, cell.p1, cell.p2, row.instance_seed, spec.max_retries});
      SearchParams p = spec.engine;
      p.seed = row.run_seed;
      p.record_trace = true;
      const auto rec = solve_instance(inst, p);
      const auto& r = rec.result;
      row.found_stable = r.found_stable;
      row.found_perfect = r.found_perfect;
      row.steps = r.steps_taken;
      row.restarts = r.restarts;
      row.size = r.best.size();
      row.singles = r.best.singles();
      row.nbp = r.best_eval.nbp;
      row.ns = r.best_eval.ns;
      row.wall_ms = rec.wall_ms;
      row.best = r.best;

      std::lock_guard lock(locks[c]);
      Sums& s = sums[c];
      s.longest = std::max<long>(s.longest, static_cast<long>(std::min(r.trace.size(), width)));
      for (std::size_t t = 0; t < width; ++t) {
        const TraceRecord& tr = t < r.trace.size() ? r.trace[t] : r.trace.back();
        s.nbp[t] += tr.nbp;
        s.ns[t] += tr.ns;
        s.best_nbp[t] += tr.best_nbp;
        s.best_singles[t] += tr.best_singles;
      }
    } catch (const Error& e) {
      row.error = e.what();
    }
  });

  for (std::size_t c = 0; c < out.cells.size(); ++c) {
    CellRow cr;
    cr.cell = out.cells[c];
    std::vector<double> steps;
    double size = 0, singles = 0, wall = 0;
    int perfect = 0, stable = 0;
    for (std::size_t k = c * per_cell; k < (c + 1) * per_cell; ++k) {
      const RunRow& r = out.runs[k];
      if (!r.error.empty()) {
        ++cr.errors;
        if (cr.error.empty()) cr.error = r.error;
        continue;
      }
      ++cr.runs;
      steps.push_back(static_cast<double>(r.steps));
      size += r.size;
      singles += r.singles;
      wall += r.wall_ms;
      perfect += r.found_perfect;
      stable += r.found_stable;
    }
    if (cr.runs > 0) {
      const double k = cr.runs;
      cr.mean_size = size / k;
      cr.mean_singles = singles / k;
      cr.pct_perfect = 100.0 * perfect / k;
      cr.pct_stable = 100.0 * stable / k;
      double total_steps = 0;
      for (double s : steps) total_steps += s;
      cr.mean_steps = total_steps / k;
      cr.median_steps = median(steps);
      cr.mean_wall_ms = wall / k;
      const Sums& s = sums[c];
      for (long t = 0; t < s.longest; ++t)
        out.profile.push_back({c, t + 1, s.nbp[t] / k, s.ns[t] / k, s.best_nbp[t] / k, s.best_singles[t] / k});
    }
    out.cell_rows.push_back(cr);
  }
  return out;
}

inline std::string runs_csv(const SweepResult& r) {
  std::string out =
      "schema,cell,n,p1,p2,instance,run,instance_seed,run_seed,variant,found_stable,found_perfect,steps,restarts,"
      "size,singles,nbp,ns,wall_ms,error\n";
  for (const auto& row : r.runs) {
    const Cell& c = r.cells[row.cell];
    csv::Row line;
    line << csv::kSchema << row.cell << c.n << c.p1 << c.p2 << row.instance << row.run << row.instance_seed
         << row.run_seed << to_string(r.spec.engine.variant) << row.found_stable << row.found_perfect << row.steps
         << row.restarts << row.size << row.singles << row.nbp << row.ns << row.wall_ms << row.error;
    out += line.str() + '\n';
  }
  return out;
}

inline std::string cells_csv(const SweepResult& r) {
  std::string out =
      "schema,cell,n,p1,p2,runs,errors,mean_size,mean_singles,pct_perfect,pct_stable,mean_steps,median_steps,"
      "mean_wall_ms,error\n";
  for (std::size_t i = 0; i < r.cell_rows.size(); ++i) {
    const auto& c = r.cell_rows[i];
    csv::Row line;
    line << csv::kSchema << i << c.cell.n << c.cell.p1 << c.cell.p2 << c.runs << c.errors << c.mean_size
         << c.mean_singles << c.pct_perfect << c.pct_stable << c.mean_steps << c.median_steps << c.mean_wall_ms
         << c.error;
    out += line.str() + '\n';
  }
  return out;
}

inline std::string profile_csv(const SweepResult& r) {
  std::string out =
      "schema,cell,n,p1,p2,t,t_over_n,mean_nbp,mean_nbp_over_n,mean_ns,mean_best_nbp,mean_best_singles\n";
  for (const auto& p : r.profile) {
    const Cell& c = r.cells[p.cell];
    csv::Row line;
    line << csv::kSchema << p.cell << c.n << c.p1 << c.p2 << p.t << static_cast<double>(p.t) / c.n << p.mean_nbp
         << p.mean_nbp / c.n << p.mean_ns << p.mean_best_nbp << p.mean_best_singles;
    out += line.str() + '\n';
  }
  return out;
}

inline std::string median_steps_csv(const SweepResult& r) {
  std::string out = "schema,n,median_steps,runs\n";
  for (const auto& c : r.cell_rows) {
    if (c.runs == 0) continue;
    csv::Row line;
    line << csv::kSchema << c.cell.n << c.median_steps << c.runs;
    out += line.str() + '\n';
  }
  return out;
}

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

/// A bare-bones line chart.
inline std::string svg_chart(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                             const std::vector<Series>& series) {
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  if (x0 > x1) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const double W = 640, H = 400, L = 60, R = 20, T = 30, B = 50;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
     << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title << "</text>\n"
     << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n"
     << "<text x=\"" << W / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">" << xlabel << "</text>\n"
     << "<text x=\"15\" y=\"" << H / 2 << "\" transform=\"rotate(-90 15 " << H / 2 << ")\" text-anchor=\"middle\">"
     << ylabel << "</text>\n"
     << "<text x=\"" << L << "\" y=\"" << H - B + 15 << "\" font-size=\"10\">" << csv::format_double(x0) << "</text>\n"
     << "<text x=\"" << W - R << "\" y=\"" << H - B + 15 << "\" font-size=\"10\" text-anchor=\"end\">"
     << csv::format_double(x1) << "</text>\n"
     << "<text x=\"" << L - 5 << "\" y=\"" << H - B << "\" font-size=\"10\" text-anchor=\"end\">"
     << csv::format_double(y0) << "</text>\n"
     << "<text x=\"" << L - 5 << "\" y=\"" << T + 5 << "\" font-size=\"10\" text-anchor=\"end\">"
     << csv::format_double(y1) << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = colors[i % 6];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (const auto& [x, y] : series[i].points) os << px(x) << ',' << py(y) << ' ';
    os << "\"/>\n<text x=\"" << W - R - 5 << "\" y=\"" << T + 15 * (i + 1) << "\" font-size=\"11\" fill=\"" << color
       << "\" text-anchor=\"end\">" << series[i].label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

/// runs.csv, cells.csv, profile.csv, and for SM sweeps median_steps.csv;
/// optional SVG charts of median steps against n and nbp/n against t/n.
inline void write_sweep(const SweepResult& r, const fs::path& out_dir, bool svg = false) {
  fs::create_directories(out_dir);
  write_file(out_dir / "runs.csv", runs_csv(r));
  write_file(out_dir / "cells.csv", cells_csv(r));
  write_file(out_dir / "profile.csv", profile_csv(r));
  if (r.spec.kind == InstanceKind::Sm) write_file(out_dir / "median_steps.csv", median_steps_csv(r));
  if (!svg) return;
  std::vector<Series> decay;
  for (std::size_t c = 0; c < r.cells.size(); ++c) {
    Series s{"n=" + std::to_string(r.cells[c].n), {}};
    for (const auto& p : r.profile)
      if (p.cell == c) s.points.emplace_back(static_cast<double>(p.t) / r.cells[c].n, p.mean_nbp / r.cells[c].n);
    decay.push_back(std::move(s));
  }
  write_file(out_dir / "decay.svg", svg_chart("mean blocking pairs / n", "t / n", "nbp / n", decay));
  Series med{"median steps", {}};
  for (const auto& c : r.cell_rows)
    if (c.runs > 0) med.points.emplace_back(c.cell.n, c.median_steps);
  write_file(out_dir / "median_steps.svg", svg_chart("median steps", "n", "steps", {med}));
}

inline SweepResult cmd_sweep(const SweepSpec& spec, const fs::path& out_dir, bool svg = false) {
  auto r = run_sweep(spec);
  write_sweep(r, out_dir, svg);
  return r;
}

// ---------------------------------------------------------------------------
// fit

struct FitOptions {
  /// Decay points with a smaller mean are dropped: the law describes the
  /// bulk of the descent, and log2 of a tail average over a handful of
  /// unfinished runs is dominated by sampling noise.
  double min_mean_nbp = 0.5;
};

/// BLOCKING_DECAY reads columns n, t, mean_nbp (profile.csv); TMED reads
/// n, median_steps (median_steps.csv or cells.csv).
inline FitResult fit_curves(const csv::Table& data, FitModel model, FitOptions options = {}) {
  if (model == FitModel::BlockingDecay) {
    std::vector<DecayPoint> pts;
    for (std::size_t i = 0; i < data.rows(); ++i) {
      DecayPoint p{data.number(i, "n"), data.number(i, "t"), data.number(i, "mean_nbp")};
      if (p.mean_nbp >= options.min_mean_nbp) pts.push_back(p);
    }
    return fit_blocking_decay(pts);
  }
  std::vector<MedianPoint> pts;
  for (std::size_t i = 0; i < data.rows(); ++i) pts.push_back({data.number(i, "n"), data.number(i, "median_steps")});
  return fit_tmed(pts);
}

inline std::string fit_header() { return "schema,model,first,second,residual,r_squared,points"; }

inline std::string fit_row(const FitResult& f) {
  csv::Row row;
  row << csv::kSchema << to_string(f.model) << f.first << f.second << f.residual << f.r_squared << f.points;
  return row.str();
}

}  // namespace smls::harness
