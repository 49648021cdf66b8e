#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "hybrid/task_graph.hpp"

namespace hybrid {

/// Resource type per task, aligned with TaskGraph::tasks().
struct Allocation {
  std::vector<TypeIndex> type_of;

  std::size_t size() const noexcept { return type_of.size(); }
  TypeIndex operator[](std::size_t index) const { return type_of[index]; }
  friend bool operator==(const Allocation&, const Allocation&) = default;
};

/// Throws AllocatesForbiddenType / ArityMismatch if `alloc` is not a total,
/// allowed mapping for `g` on `platform`.
void check_allocation(const TaskGraph& g, const Platform& platform, const Allocation& alloc);

/// Rank per task, aligned with TaskGraph::tasks().
struct RankTable {
  std::vector<double> rank;

  std::size_t size() const noexcept { return rank.size(); }
  double operator[](std::size_t index) const { return rank[index]; }
};

/// Upward rank using the allocated processing time of each task.
RankTable compute_rank_alloc(const TaskGraph& g, const Allocation& alloc);

/// Upward rank using the machine-count weighted average processing time.
/// A forbidden type contributes 10x the sum of all finite processing times
/// of the graph in place of its (infinite) time.
RankTable compute_rank_avg(const TaskGraph& g, const Platform& platform);

/// Task indices sorted by non-increasing rank, ties by ascending id.
std::vector<std::size_t> priority_order(const TaskGraph& g, const RankTable& ranks);

struct Placement {
  TaskId task = 0;
  TypeIndex type = 0;
  std::size_t machine = 0;
  Time start = 0;
  Time finish = 0;

  friend bool operator==(const Placement&, const Placement&) = default;
};

/// Placements in commit order.
struct Schedule {
  std::vector<Placement> placements;

  bool empty() const noexcept { return placements.empty(); }
  std::size_t size() const noexcept { return placements.size(); }
  const Placement* find(TaskId task) const;

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

/// Throws Error on the first violated invariant (non-preemptive durations,
/// machine ranges, no overlap per machine, precedence, completeness).
void validate_schedule(const Schedule& s, const TaskGraph& g, const Platform& platform);

/// Maximum finish time. Throws EmptySchedule.
Time makespan(const Schedule& s);

/// Placements re-ordered to follow the graph's task order.
std::vector<Placement> placements_by_task(const Schedule& s, const TaskGraph& g);

}  // namespace hybrid
