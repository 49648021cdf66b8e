#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hybrid/error.hpp"

namespace hybrid {

using TaskId = std::int64_t;
using TypeIndex = std::size_t;
using Time = double;

inline constexpr TypeIndex kCpu = 0;
inline constexpr TypeIndex kGpu = 1;

/// A task with one processing time per resource type. Types listed in
/// `forbidden` cannot run the task; their `proc_times` slot is ignored.
struct Task {
  TaskId id = 0;
  std::vector<Time> proc_times;
  std::vector<TypeIndex> forbidden;  // sorted, unique
  std::string label;

  Task() = default;
  Task(TaskId id, std::vector<Time> times, std::vector<TypeIndex> forbidden = {},
       std::string label = {});

  std::size_t arity() const noexcept { return proc_times.size(); }
  bool allows(TypeIndex q) const noexcept;
  Time time_on(TypeIndex q) const noexcept { return proc_times[q]; }

  /// Smallest processing time over allowed types.
  Time min_time() const;

  /// Allowed type with the smallest processing time (ties: lowest index).
  TypeIndex fastest_type() const;

  friend bool operator==(const Task&, const Task&) = default;
};

struct Edge {
  TaskId from = 0;
  TaskId to = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Precedence DAG. Tasks are stored in insertion order; per-task data in
/// other structures (allocations, ranks) is aligned with this order.
/// Tasks must be added before edges that reference them; an edge with an
/// unknown endpoint is kept verbatim and reported by validate_graph.
class TaskGraph {
 public:
  explicit TaskGraph(std::size_t type_count = 2) : type_count_(type_count) {}

  TaskId add_task(Task task);
  void add_edge(TaskId from, TaskId to);

  std::size_t type_count() const noexcept { return type_count_; }
  std::size_t size() const noexcept { return tasks_.size(); }
  bool empty() const noexcept { return tasks_.empty(); }

  const std::vector<Task>& tasks() const noexcept { return tasks_; }
  const Task& task(std::size_t index) const { return tasks_[index]; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  std::optional<std::size_t> find(TaskId id) const;
  std::size_t index_of(TaskId id) const;

  std::span<const std::size_t> predecessors(std::size_t index) const { return preds_[index]; }
  std::span<const std::size_t> successors(std::size_t index) const { return succs_[index]; }

  /// Ids passed to add_task more than once (only the first copy is indexed).
  const std::vector<TaskId>& duplicate_ids() const noexcept { return duplicate_ids_; }

  friend bool operator==(const TaskGraph& a, const TaskGraph& b) {
    return a.type_count_ == b.type_count_ && a.tasks_ == b.tasks_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t type_count_;
  std::vector<Task> tasks_;
  std::vector<Edge> edges_;
  std::unordered_map<TaskId, std::size_t> index_;
  std::vector<std::vector<std::size_t>> preds_;
  std::vector<std::vector<std::size_t>> succs_;
  std::vector<TaskId> duplicate_ids_;
};

/// Machine counts per resource type. Index 0 is the CPU side, index 1 the
/// (first) GPU side.
class Platform {
 public:
  Platform() = default;
  explicit Platform(std::vector<std::size_t> counts);

  std::size_t types() const noexcept { return counts_.size(); }
  std::size_t count(TypeIndex q) const { return counts_[q]; }
  std::size_t cpus() const { return counts_[kCpu]; }
  std::size_t gpus() const { return counts_[kGpu]; }
  std::size_t total() const noexcept;
  const std::vector<std::size_t>& counts() const noexcept { return counts_; }

  /// "16,4" style rendering.
  std::string to_string() const;

  friend bool operator==(const Platform&, const Platform&) = default;

 private:
  std::vector<std::size_t> counts_;
};

/// Throws Error on the first violated invariant.
void validate_graph(const TaskGraph& g, const Platform& platform);

/// Same as validate_graph but without the platform arity check.
void validate_graph_structure(const TaskGraph& g);

/// Deterministic topological order (ready tasks by ascending id), as task
/// indices. Throws CycleDetected.
std::vector<std::size_t> topological_indices(const TaskGraph& g);

/// Same order as topological_indices, as task ids.
std::vector<TaskId> topological_order(const TaskGraph& g);

/// Longest path where each task weighs its minimum allowed processing time.
Time critical_path_min(const TaskGraph& g);

}  // namespace hybrid
