#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hybrid/schedule.hpp"
#include "hybrid/task_graph.hpp"

namespace hybrid {

struct ArrivalMode {
  enum class Kind { Natural, RandomTopo };
  Kind kind = Kind::Natural;
  std::uint64_t seed = 0;

  static ArrivalMode natural() { return {}; }
  static ArrivalMode random_topo(std::uint64_t seed) { return {Kind::RandomTopo, seed}; }
};

/// Precedence-respecting arrival order. Natural: smallest ready id first.
/// RandomTopo: uniform choice among ready tasks. Throws CycleDetected.
std::vector<TaskId> arrival_stream(const TaskGraph& g, ArrivalMode mode);

enum class Rule { R1, R2, R3 };

/// Two-type allocation rules; `<=` sends the task to the CPU side. A task
/// with one forbidden side goes to the other.
TypeIndex rule_allocate(const Task& task, const Platform& platform, Rule rule);

/// Committed placements and per-machine availability of an online run.
/// Commitments are append-only.
class OnlineState {
 public:
  OnlineState(const TaskGraph& g, const Platform& platform);

  const TaskGraph& graph() const noexcept { return *graph_; }
  const Platform& platform() const noexcept { return platform_; }
  const Schedule& schedule() const noexcept { return schedule_; }

  bool committed(std::size_t index) const { return completion_[index].has_value(); }
  std::optional<Time> completion(std::size_t index) const { return completion_[index]; }

  /// Latest completion over the predecessors. Throws PredecessorNotCommitted.
  Time ready_time(std::size_t index) const;

  Time availability(TypeIndex q, std::size_t machine) const { return avail_[q][machine]; }

  /// Earliest availability over the machines of type q.
  Time earliest_idle(TypeIndex q) const;

  /// Earliest-available machine of type q, ties by lower index.
  std::size_t earliest_machine(TypeIndex q) const;

  /// Appends the task to `machine` at max(availability, ready time).
  const Placement& commit(std::size_t index, TypeIndex q, std::size_t machine);

  /// Same, on the earliest-available machine of q.
  const Placement& commit(std::size_t index, TypeIndex q);

 private:
  const TaskGraph* graph_;
  Platform platform_;
  std::vector<std::vector<Time>> avail_;
  std::vector<std::optional<Time>> completion_;
  Schedule schedule_;
};

/// Step 1 sends the task to the GPU side if its CPU time is at least the
/// GPU time plus the earliest moment it could start on a GPU; otherwise
/// R2 decides. Throws PredecessorNotCommitted.
TypeIndex erls_decide(const Task& task, const OnlineState& state, const Platform& platform);

enum class OnlinePolicy { Erls, Eft, Greedy, Random, R1, R2, R3 };

std::string to_string(OnlinePolicy policy);

/// Parses "erls", "eft", "greedy", "random", "r1", "r2", "r3".
std::optional<OnlinePolicy> parse_online_policy(const std::string& text);

struct Decision {
  TaskId task = 0;
  TypeIndex type = 0;
  std::size_t machine = 0;
  Time start = 0;
  bool forced = false;  // only one side was allowed
};

struct OnlineResult {
  Schedule schedule;
  std::vector<Decision> decisions;
};

/// Feeds `arrivals` one by one, committing each task immediately. `seed`
/// drives the Random policy's coin. Every task must arrive after its
/// predecessors; a prefix of a full stream is allowed.
OnlineResult online_run(const TaskGraph& g, const Platform& platform, OnlinePolicy policy,
                        const std::vector<TaskId>& arrivals, std::uint64_t seed = 0);

OnlineResult online_run(const TaskGraph& g, const Platform& platform, OnlinePolicy policy,
                        ArrivalMode mode, std::uint64_t seed = 0);

}  // namespace hybrid
