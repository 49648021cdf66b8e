#pragma once

#include <optional>
#include <vector>

#include "hybrid/relaxation.hpp"
#include "hybrid/schedule.hpp"
#include "hybrid/task_graph.hpp"

namespace hybrid {

/// Event-driven list scheduling of a fixed allocation. Whenever a machine of
/// type q is idle and a ready task allocated to q exists, the highest
/// priority such task starts at once on the earliest-available machine of q.
/// Priority: higher rank first, ties by ascending id.
Schedule list_schedule(const TaskGraph& g, const Platform& platform, const Allocation& alloc,
                       const RankTable& priority);

/// Same, with priority given as a sequence of task ids (earlier = higher).
/// Ids missing from `order` rank after all listed ones, by ascending id.
Schedule list_schedule(const TaskGraph& g, const Platform& platform, const Allocation& alloc,
                       const std::vector<TaskId>& order);

/// Repeatedly commits the ready task with the earliest possible start on
/// its allocated side (ties by id). Machines are filled append-only.
Schedule est_schedule(const TaskGraph& g, const Platform& platform, const Allocation& alloc);

/// list_schedule with the allocation-dependent upward rank.
Schedule ols_schedule(const TaskGraph& g, const Platform& platform, const Allocation& alloc);

struct HeftOptions {
  bool insertion = true;
};

/// HEFT: average-rank order, each task to the (type, machine, slot) with the
/// smallest finish time. Equal finish times prefer the higher type index,
/// then the lower machine index.
Schedule heft_schedule(const TaskGraph& g, const Platform& platform, HeftOptions options = {});

enum class Policy { Est, Ols };

struct PipelineResult {
  LpSolution lp;
  Allocation allocation;
  Schedule schedule;
};

/// Relaxation, rounding, then EST or OLS. When `injected` is given it
/// replaces the LP solve.
PipelineResult run_pipeline(const TaskGraph& g, const Platform& platform, Policy policy,
                            const LpSolution* injected = nullptr,
                            const LpBackend& backend = default_backend());

Schedule hlp_pipeline(const TaskGraph& g, const Platform& platform, Policy policy);

/// Schedules an already-rounded allocation with the given policy.
Schedule schedule_allocation(const TaskGraph& g, const Platform& platform, const Allocation& alloc,
                             Policy policy);

}  // namespace hybrid
