// smls: generate instances, run the local-search solvers, check matchings,
// sample lattices, run sweeps and fit scaling curves.
//
// Exit codes: 0 ok / stable, 1 unstable (check), 2 usage, 3 runtime error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "smls/harness.hpp"

namespace fs = std::filesystem;
using namespace smls;
using namespace smls::harness;
using nlohmann::json;

namespace {

constexpr int kExitUnstable = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
  int jobs = 1;
};

void add_common(CLI::App* cmd, Common& c, bool with_out = true, bool with_jobs = false) {
  cmd->add_option("--seed", c.seed, "Base seed");
  if (with_out) cmd->add_option("--out", c.out, "Output file or directory");
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  if (with_jobs) cmd->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

// Writes to --out when given, stdout otherwise.
void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) std::cout << text;
  else write_file(c.out, text);
}

json solve_json(const SolveRecord& r) {
  return {{"schema", csv::kSchema},
          {"file", r.file},
          {"variant", to_string(r.params.variant)},
          {"seed", r.params.seed},
          {"p_walk", r.params.p_walk},
          {"max_steps", r.params.max_steps},
          {"n", r.n},
          {"found_stable", r.result.found_stable},
          {"found_perfect", r.result.found_perfect},
          {"steps", r.result.steps_taken},
          {"restarts", r.result.restarts},
          {"size", r.result.best.size()},
          {"singles", r.result.best.singles()},
          {"nbp", r.result.best_eval.nbp},
          {"ns", r.result.best_eval.ns},
          {"f", r.result.best_eval.f},
          {"timed_out", r.result.timed_out},
          {"wall_ms", r.wall_ms}};
}

json sample_json(const SampleRecord& r) {
  return {{"schema", csv::kSchema},
          {"file", r.file},
          {"n", r.n},
          {"lattice_size", r.stats.lattice_size},
          {"runs", r.stats.runs},
          {"distinct", r.distinct},
          {"frequencies", r.stats.frequencies},
          {"entropy_bits", r.stats.entropy_bits},
          {"normalized_entropy", r.stats.normalized_entropy},
          {"mean_normalized_distance", r.stats.mean_normalized_distance}};
}

std::vector<double> parse_grid(const std::string& text) {
  // "a:b:step" or a comma list
  std::vector<double> out;
  if (text.empty()) return out;
  if (text.find(':') != std::string::npos) {
    double a = 0, b = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream is(text);
    if (!(is >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0))
      throw Error(ErrorKind::InvalidArgument, "bad grid '" + text + "'");
    const long k = std::lround((b - a) / step);
    for (long i = 0; i <= k; ++i) out.push_back(std::round((a + static_cast<double>(i) * step) * 1e9) / 1e9);
    return out;
  }
  std::istringstream is(text);
  for (std::string item; std::getline(is, item, ',');) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "bad grid value '" + item + "'");
    }
  }
  return out;
}

std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_grid(text)) out.push_back(static_cast<int>(std::lround(v)));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local search for stable marriage problems"};
  app.require_subcommand(1);

  // gen
  Common gen_c;
  GenCommand gen;
  std::string gen_kind = "sm";
  auto* gen_cmd = app.add_subcommand("gen", "Generate random instances");
  add_common(gen_cmd, gen_c);
  gen_cmd->add_option("--kind", gen_kind)->check(CLI::IsMember({"sm", "smti"}));
  gen_cmd->add_option("-n,--size", gen.n)->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--p1", gen.p1, "Deletion probability");
  gen_cmd->add_option("--p2", gen.p2, "Tie probability");
  gen_cmd->add_option("--count", gen.count);
  gen_cmd->add_option("--max-retries", gen.max_retries);

  // solve
  Common solve_c;
  SearchParams sp;
  std::string solve_file, solve_variant, solve_trace, solve_matching;
  long timeout_ms = 0;
  bool lenient = false;
  auto* solve_cmd = app.add_subcommand("solve", "Run a solver on one instance file");
  add_common(solve_cmd, solve_c);
  solve_cmd->add_option("instance", solve_file)->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--variant", solve_variant, "SML, SML1, SML2 or LTIU (default by mode)");
  solve_cmd->add_option("--p-walk", sp.p_walk)->check(CLI::Range(0.0, 1.0));
  solve_cmd->add_option("--max-steps", sp.max_steps)->check(CLI::PositiveNumber);
  solve_cmd->add_option("--timeout-ms", timeout_ms);
  solve_cmd->add_option("--trace", solve_trace, "Trace CSV output");
  solve_cmd->add_option("--matching", solve_matching, "Best matching output");
  solve_cmd->add_flag("--lenient", lenient, "Accept one-sided acceptability");

  // check
  Common check_c;
  std::string check_inst, check_match;
  std::size_t check_cap = 20;
  auto* check_cmd = app.add_subcommand("check", "Check a matching for stability");
  add_common(check_cmd, check_c, false);
  check_cmd->add_option("instance", check_inst)->required()->check(CLI::ExistingFile);
  check_cmd->add_option("matching", check_match)->required()->check(CLI::ExistingFile);
  check_cmd->add_option("--cap", check_cap, "Blocking pairs listed");
  check_cmd->add_flag("--lenient", lenient, "Accept one-sided acceptability");

  // sample
  Common sample_c;
  std::vector<std::string> sample_files;
  int sample_runs = 500;
  int sample_cap = 40;
  auto* sample_cmd = app.add_subcommand("sample", "Sample stable marriages and compare with the lattice");
  add_common(sample_cmd, sample_c, true, true);
  sample_cmd->add_option("instances", sample_files)->required()->check(CLI::ExistingFile);
  sample_cmd->add_option("--runs", sample_runs)->check(CLI::PositiveNumber);
  sample_cmd->add_option("--max-n", sample_cap, "Largest n enumerated");

  // sweep
  Common sweep_c;
  SweepSpec spec;
  std::string sweep_kind = "sm", sweep_sizes, sweep_p1 = "0", sweep_p2 = "0", sweep_variant;
  bool sweep_svg = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep");
  add_common(sweep_cmd, sweep_c, true, true);
  sweep_cmd->add_option("--kind", sweep_kind)->check(CLI::IsMember({"sm", "smti"}));
  sweep_cmd->add_option("--sizes", sweep_sizes, "e.g. 100:500:100 or 10,20")->required();
  sweep_cmd->add_option("--p1", sweep_p1, "Grid, e.g. 0.1:0.8:0.1");
  sweep_cmd->add_option("--p2", sweep_p2, "Grid, e.g. 0:1:0.1");
  sweep_cmd->add_option("--instances", spec.instances_per_cell);
  sweep_cmd->add_option("--runs", spec.runs_per_instance);
  sweep_cmd->add_option("--variant", sweep_variant);
  sweep_cmd->add_option("--p-walk", spec.engine.p_walk)->check(CLI::Range(0.0, 1.0));
  sweep_cmd->add_option("--max-steps", spec.engine.max_steps);
  sweep_cmd->add_option("--profile-steps", spec.profile_steps);
  sweep_cmd->add_flag("--svg", sweep_svg, "Also write SVG charts");

  // fit
  Common fit_c;
  std::string fit_file, fit_model = "tmed";
  FitOptions fit_opts;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a scaling curve to a sweep dataset");
  add_common(fit_cmd, fit_c);
  fit_cmd->add_option("dataset", fit_file)->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--model", fit_model)->check(CLI::IsMember({"decay", "tmed"}));
  fit_cmd->add_option("--min-mean", fit_opts.min_mean_nbp, "Decay points below this mean are dropped");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen_cmd) {
      gen.kind = gen_kind == "sm" ? InstanceKind::Sm : InstanceKind::Smti;
      gen.seed = gen_c.seed;
      gen.out_dir = gen_c.out.empty() ? fs::path(".") : fs::path(gen_c.out);
      const auto report = cmd_gen(gen);
      for (const auto& e : report.errors) std::cerr << "error: instance " << e << '\n';
      std::cerr << report.files.size() << " files written to " << gen.out_dir.string() << '\n';
      return report.ok() ? 0 : kExitRuntime;
    }

    if (*solve_cmd) {
      const Instance inst = load_instance(solve_file, BuildOptions{!lenient});
      sp.variant = solve_variant.empty() ? (inst.strict() ? Variant::SML2 : Variant::LTIU) : parse_variant(solve_variant);
      sp.seed = solve_c.seed;
      sp.record_trace = !solve_trace.empty();
      if (timeout_ms > 0) sp.wall_timeout = std::chrono::milliseconds(timeout_ms);
      auto rec = solve_instance(inst, sp, fs::path(solve_file).filename().string());
      if (!solve_trace.empty()) write_file(solve_trace, trace_csv(rec.result.trace));
      if (!solve_matching.empty()) write_file(solve_matching, serialize_matching(rec.result.best));
      emit(solve_c, solve_c.format == "json" ? solve_json(rec).dump() + "\n"
                                             : solve_header() + "\n" + solve_row(rec) + "\n");
      return 0;
    }

    if (*check_cmd) {
      const auto report = cmd_check(check_inst, check_match, BuildOptions{!lenient});
      if (check_c.format == "json") {
        json pairs = json::array();
        for (std::size_t i = 0; i < std::min(check_cap, report.pairs.size()); ++i)
          pairs.push_back({report.pairs[i].man, report.pairs[i].woman});
        std::cout << json{{"stable", report.stable()}, {"size", report.size}, {"nbp", report.eval.nbp},
                          {"ns", report.eval.ns}, {"f", report.eval.f}, {"blocking_pairs", pairs}}
                         .dump()
                  << '\n';
      } else {
        std::cout << format_check(report, check_cap);
      }
      return report.stable() ? 0 : kExitUnstable;
    }

    if (*sample_cmd) {
      std::vector<SampleRecord> records;
      json rows = json::array();
      std::string text = sample_header() + "\n";
      for (std::size_t i = 0; i < sample_files.size(); ++i) {
        const Instance inst = load_instance(sample_files[i]);
        auto rec = sample_instance(inst, sample_runs, derive_seed(sample_c.seed, i), SearchParams{},
                                   EnumerateOptions{.max_n_strict = sample_cap, .max_n_smti = 7}, sample_c.jobs,
                                   fs::path(sample_files[i]).filename().string());
        if (rec.stats.lattice_size == 1)
          std::cerr << rec.file << ": single stable marriage, normalized entropy set to 1\n";
        text += sample_row(rec) + "\n";
        rows.push_back(sample_json(rec));
        records.push_back(std::move(rec));
      }
      text += sample_aggregate_row(records) + "\n";
      emit(sample_c, sample_c.format == "json" ? rows.dump(1) + "\n" : text);
      return 0;
    }

    if (*sweep_cmd) {
      spec.kind = sweep_kind == "sm" ? InstanceKind::Sm : InstanceKind::Smti;
      spec.sizes = parse_sizes(sweep_sizes);
      spec.p1_grid = parse_grid(sweep_p1);
      spec.p2_grid = parse_grid(sweep_p2);
      spec.base_seed = sweep_c.seed;
      spec.jobs = sweep_c.jobs;
      spec.engine.variant = !sweep_variant.empty()            ? parse_variant(sweep_variant)
                            : spec.kind == InstanceKind::Sm ? Variant::SML2
                                                            : Variant::LTIU;
      const fs::path out = sweep_c.out.empty() ? fs::path("sweep") : fs::path(sweep_c.out);
      const auto r = cmd_sweep(spec, out, sweep_svg);
      std::size_t failed = 0;
      for (const auto& c : r.cell_rows) failed += c.errors > 0;
      std::cerr << r.runs.size() << " runs in " << r.cells.size() << " cells written to " << out.string();
      if (failed) std::cerr << " (" << failed << " cells with errors)";
      std::cerr << '\n';
      return 0;
    }

    if (*fit_cmd) {
      const auto table = csv::Table::parse(read_file(fit_file));
      const auto f = fit_curves(table, fit_model == "decay" ? FitModel::BlockingDecay : FitModel::TMed, fit_opts);
      if (fit_c.format == "json") {
        emit(fit_c, json{{"model", to_string(f.model)}, {"first", f.first}, {"second", f.second},
                         {"residual", f.residual}, {"r_squared", f.r_squared}, {"points", f.points}}
                            .dump() +
                        "\n");
      } else {
        emit(fit_c, fit_header() + "\n" + fit_row(f) + "\n");
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what();
    if (e.line() > 0) std::cerr << " (line " << e.line() << ")";
    std::cerr << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
