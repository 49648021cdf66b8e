#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hybrid/instances.hpp"
#include "hybrid/schedule.hpp"
#include "hybrid/task_graph.hpp"

namespace hybrid {

struct LowerBounds {
  double lp_star = 0;
  double cp_min = 0;
};

LowerBounds lower_bounds(const TaskGraph& g, const Platform& platform);

inline constexpr std::size_t kBruteForceCap = 7;

/// Exact optimum for two-type instances with at most kBruteForceCap tasks.
/// Enumerates every allocation and every precedence-feasible task order,
/// placing each task at its earliest start that respects precedence and the
/// machine count of its type. Throws TooLarge.
Time brute_force_opt(const TaskGraph& g, const Platform& platform);

/// Every algorithm name accepted by run_algorithm.
const std::vector<std::string>& algorithm_names();

/// Runs one named algorithm. Online algorithms use the natural arrival
/// order; `seed` feeds the Random policy.
Schedule run_algorithm(const std::string& name, const TaskGraph& g, const Platform& platform,
                       std::uint64_t seed = 0);

/// One instance of the experiment matrix.
struct InstanceSpec {
  std::string family;  // forkjoin | heft-adv | hlp-adv | erls-adv | file
  std::size_t phases = 0;
  std::size_t width = 0;
  std::size_t types = 2;
  std::size_t m = 0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::string path;

  /// "forkjoin-p2-w20-q2-s1" style identifier.
  std::string name() const;
  /// "p=2;width=20;q=2" style parameter list.
  std::string params() const;
};

struct BuiltInstance {
  TaskGraph graph;
  std::optional<Platform> native_platform;  // adversarial families only
};

BuiltInstance build_instance(const InstanceSpec& spec);

struct ExperimentConfig {
  std::vector<InstanceSpec> instances;
  // Per instance: platforms to run on. Empty means the native platform.
  std::vector<std::vector<Platform>> platforms;
  std::vector<std::string> algorithms;
  std::size_t threads = 1;
  bool timing = false;
};

/// JSON matrix file:
///   {"platforms": ["16,2", "32,4"],
///    "algorithms": ["hlp-est", "hlp-ols", "heft"],
///    "threads": 2,
///    "instances": [
///      {"family": "forkjoin", "phases": [2, 5], "width": [20, 50],
///       "seeds": [1, 2, 3], "types": 2, "platforms": ["16,2,1"]},
///      {"family": "heft-adv", "m": 4, "k": 2},
///      {"family": "file", "path": "graph.json", "platforms": ["4,2"]}]}
/// Fork-join and file entries use their own "platforms" when present, else
/// the top-level list. Adversarial families run on their native platform.
/// Relative file paths resolve against `base_dir`.
ExperimentConfig parse_experiment_config(std::string_view text, const std::string& base_dir = ".");

inline constexpr std::string_view kRunCsvHeader =
    "instance,family,params,seed,platform,algorithm,makespan,lp_star,cp_min,ratio,wall_ms,status";

/// One CSV row per (instance, platform, algorithm). Fields containing a
/// comma, such as the platform "16,2", are double-quoted. A failing cell yields a
/// row whose status is the error code; the matrix always completes. When
/// the optimum is computable it is appended to params as "opt=...".
std::string run_experiment(const ExperimentConfig& config);

/// Aggregates a run CSV into
///   kind,family,algorithm,baseline,count,mean,min,max
/// with kind "ratio" (makespan / lp_star per algorithm and family) and kind
/// "pairwise" (makespan of `algorithm` over makespan of `baseline` on the
/// same instance and platform, for every ordered pair). Throws ParseError.
std::string summarize(std::string_view run_csv);

}  // namespace hybrid
