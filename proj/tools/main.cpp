#include <charconv>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "hybrid/bench.hpp"
#include "hybrid/instances.hpp"
#include "hybrid/io.hpp"
#include "hybrid/offline.hpp"
#include "hybrid/online.hpp"
#include "hybrid/relaxation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hybrid;

namespace {

enum Exit { kOk = 0, kValidation = 1, kInput = 2, kInternal = 3 };

int exit_code(const Error& e) {
  switch (kind_of(e.code())) {
    case ErrorKind::Validation: return kValidation;
    case ErrorKind::Input: return kInput;
    case ErrorKind::Internal: return kInternal;
  }
  return kInternal;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    write_text(out_path, text);
  }
}

ArrivalMode parse_arrival(const std::string& text) {
  if (text == "natural") return ArrivalMode::natural();
  const std::string prefix = "random:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string digits = text.substr(prefix.size());
    std::uint64_t seed = 0;
    auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), seed);
    if (!digits.empty() && ec == std::errc{} && end == digits.data() + digits.size()) {
      return ArrivalMode::random_topo(seed);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "--arrival must be natural or random:SEED");
}

fs::path sidecar_path(const fs::path& out) {
  fs::path meta = out;
  meta.replace_extension(".meta.json");
  return meta;
}

struct GenerateArgs {
  std::string family;
  std::size_t phases = 2;
  std::size_t width = 20;
  std::size_t types = 2;
  std::size_t m = 4;
  std::size_t k = 1;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  InstanceSpec spec;
  spec.family = a.family;
  spec.phases = a.phases;
  spec.width = a.width;
  spec.types = a.types;
  spec.m = a.m;
  spec.k = a.k;
  spec.seed = a.seed;
  if (a.family == "file") throw Error(ErrorCode::InvalidArgument, "cannot generate the file family");
  const BuiltInstance built = build_instance(spec);
  validate_graph_structure(built.graph);

  json meta;
  meta["family"] = a.family;
  if (a.family == "forkjoin") {
    meta["phases"] = a.phases;
    meta["width"] = a.width;
    meta["types"] = a.types;
    meta["seed"] = a.seed;
    meta["rng"] = "mt19937_64/splitmix64";
  } else {
    meta["m"] = a.m;
    if (a.family != "hlp-adv") meta["k"] = a.k;
  }
  if (built.native_platform) meta["platform"] = built.native_platform->to_string();
  meta["tasks"] = built.graph.size();
  meta["edges"] = built.graph.edges().size();

  const std::string text = format_graph(built.graph);
  if (a.out.empty() || a.out == "-") {
    std::cout << text;
    std::cerr << meta.dump() << "\n";
  } else {
    write_text(a.out, text);
    write_text(sidecar_path(a.out), meta.dump(2) + "\n");
  }
  return kOk;
}

struct SolveArgs {
  std::string algo;
  std::string platform;
  std::string graph;
  std::string out;
  std::string arrival = "natural";
  std::uint64_t seed = 0;
  std::string lp_dump;
};

int cmd_solve(const SolveArgs& a) {
  const TaskGraph g = read_graph(a.graph);
  const Platform platform = parse_platform(a.platform);
  validate_graph(g, platform);

  if (!a.lp_dump.empty()) {
    std::ostringstream lp;
    write_lp_format(lp, build_hlp(g, platform).program);
    write_text(a.lp_dump, lp.str());
  }

  json result;
  result["algorithm"] = a.algo;
  result["platform"] = platform.to_string();
  result["seed"] = a.seed;
  Schedule schedule;

  if (auto policy = parse_online_policy(a.algo)) {
    const ArrivalMode mode = parse_arrival(a.arrival);
    const OnlineResult run = online_run(g, platform, *policy, mode, a.seed);
    schedule = run.schedule;
    result["policy"] = a.algo;
    result["arrival"] = a.arrival;
    json log = json::array();
    for (const Decision& d : run.decisions) {
      json entry{{"task", d.task}, {"type", d.type}, {"machine", d.machine}, {"start", d.start}};
      if (d.forced) entry["forced"] = true;
      log.push_back(std::move(entry));
    }
    result["decisions"] = std::move(log);
  } else if (a.algo == "hlp-est" || a.algo == "hlp-ols" || a.algo == "qhlp-est" ||
             a.algo == "qhlp-ols") {
    const Policy policy = a.algo.ends_with("est") ? Policy::Est : Policy::Ols;
    const PipelineResult run = run_pipeline(g, platform, policy);
    schedule = run.schedule;
    result["lp_star"] = run.lp.objective;
    result["lp_iterations"] = run.lp.iterations;
  } else if (a.algo == "heft") {
    schedule = heft_schedule(g, platform);
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown algorithm \"" + a.algo + "\"");
  }

  validate_schedule(schedule, g, platform);
  result["makespan"] = schedule.empty() ? 0.0 : makespan(schedule);
  if (!a.out.empty()) write_schedule(schedule, a.out);
  std::cout << result.dump(2) << "\n";
  return kOk;
}

int cmd_bounds(const std::string& graph, const std::string& platform_text) {
  const TaskGraph g = read_graph(graph);
  const Platform platform = parse_platform(platform_text);
  validate_graph(g, platform);
  const LowerBounds lb = lower_bounds(g, platform);
  json out{{"lp_star", lb.lp_star}, {"cp_min", lb.cp_min}};
  if (g.size() <= kBruteForceCap && platform.types() == 2) out["opt"] = brute_force_opt(g, platform);
  std::cout << out.dump(2) << "\n";
  return kOk;
}

int cmd_validate(const std::string& graph, const std::string& platform_text,
                 const std::string& schedule_path) {
  const TaskGraph g = read_graph(graph);
  if (platform_text.empty()) {
    validate_graph_structure(g);
  } else {
    validate_graph(g, parse_platform(platform_text));
  }
  if (!schedule_path.empty()) {
    if (platform_text.empty()) {
      throw Error(ErrorCode::InvalidArgument, "--schedule requires --platform");
    }
    validate_schedule(read_schedule(schedule_path), g, parse_platform(platform_text));
  }
  std::cout << "ok\n";
  return kOk;
}

int cmd_bench(const std::string& config_path, const std::string& out, bool timing,
              std::size_t threads, const std::string& summary) {
  ExperimentConfig config = parse_experiment_config(
      read_text(config_path), fs::path(config_path).parent_path().string());
  config.timing = timing;
  if (threads > 0) config.threads = threads;
  const std::string csv = run_experiment(config);
  emit(csv, out);
  if (!summary.empty()) write_text(summary, hybrid::summarize(csv));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scheduling task graphs on hybrid CPU/GPU platforms"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate an instance graph");
  generate->add_option("--family", gen.family, "forkjoin, heft-adv, hlp-adv or erls-adv")
      ->required()
      ->check(CLI::IsMember({"forkjoin", "heft-adv", "hlp-adv", "erls-adv"}));
  generate->add_option("--phases,-p", gen.phases, "Fork-join phases");
  generate->add_option("--width,-w", gen.width, "Fork-join width");
  generate->add_option("--types,-q", gen.types, "Resource types (2 or 3)");
  generate->add_option("--m", gen.m, "CPU count of adversarial instances");
  generate->add_option("--k", gen.k, "GPU count of adversarial instances");
  generate->add_option("--seed", gen.seed, "Random seed");
  generate->add_option("--out,-o", gen.out, "Output graph path (a .meta.json sidecar is written)");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Schedule a graph with one algorithm");
  solve_cmd->add_option("--algo,--policy", solve.algo, "Algorithm")
      ->required()
      ->check(CLI::IsMember(algorithm_names()));
  solve_cmd->add_option("--platform", solve.platform, "Machine counts, e.g. 16,4")->required();
  solve_cmd->add_option("--graph", solve.graph, "Graph JSON")->required();
  solve_cmd->add_option("--out,-o", solve.out, "Schedule output (.json or .csv)");
  solve_cmd->add_option("--arrival", solve.arrival, "natural or random:SEED (online algorithms)");
  solve_cmd->add_option("--seed", solve.seed, "Seed of the random policy");
  solve_cmd->add_option("--lp-dump", solve.lp_dump, "Write the relaxation in CPLEX LP format");

  std::string bounds_graph;
  std::string bounds_platform;
  auto* bounds = app.add_subcommand("bounds", "Print lower bounds (and the optimum on tiny graphs)");
  bounds->add_option("--graph", bounds_graph, "Graph JSON")->required();
  bounds->add_option("--platform", bounds_platform, "Machine counts")->required();

  std::string val_graph;
  std::string val_platform;
  std::string val_schedule;
  auto* validate = app.add_subcommand("validate", "Check a graph and optionally a schedule");
  validate->add_option("--graph", val_graph, "Graph JSON")->required();
  validate->add_option("--platform", val_platform, "Machine counts");
  validate->add_option("--schedule", val_schedule, "Schedule (.json or .csv)");

  std::string bench_config;
  std::string bench_out;
  std::string bench_summary;
  bool bench_timing = false;
  std::size_t bench_threads = 0;
  auto* bench = app.add_subcommand("bench", "Run an experiment matrix");
  bench->add_option("--config", bench_config, "JSON matrix file")->required();
  bench->add_option("--out,-o", bench_out, "Run CSV (stdout if omitted)");
  bench->add_option("--summary", bench_summary, "Also write the summary CSV here");
  bench->add_flag("--timing", bench_timing, "Fill the wall_ms column");
  bench->add_option("--threads", bench_threads, "Worker threads (overrides the config)");

  std::string sum_in;
  std::string sum_out;
  auto* summarize = app.add_subcommand("summarize", "Aggregate a run CSV");
  summarize->add_option("--in,input", sum_in, "Run CSV")->required();
  summarize->add_option("--out,-o", sum_out, "Summary CSV (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*solve_cmd) return cmd_solve(solve);
    if (*bounds) return cmd_bounds(bounds_graph, bounds_platform);
    if (*validate) return cmd_validate(val_graph, val_platform, val_schedule);
    if (*bench) return cmd_bench(bench_config, bench_out, bench_timing, bench_threads, bench_summary);
    if (*summarize) {
      emit(hybrid::summarize(read_text(sum_in)), sum_out);
      return kOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
