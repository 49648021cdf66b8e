#include "hybrid/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace hybrid {

namespace {

// Absolute slack for comparisons of times that went through additions.
bool time_less(Time a, Time b) {
  const Time scale = std::max({Time{1}, std::abs(a), std::abs(b)});
  return a < b - 1e-9 * scale;
}

std::string task_str(TaskId id) { return "task " + std::to_string(id); }

}  // namespace

void check_allocation(const TaskGraph& g, const Platform& platform, const Allocation& alloc) {
  if (alloc.size() != g.size()) {
    throw Error(ErrorCode::ArityMismatch, "allocation covers " + std::to_string(alloc.size()) +
                                              " tasks, graph has " + std::to_string(g.size()));
  }
  for (std::size_t v = 0; v < g.size(); ++v) {
    const TypeIndex q = alloc[v];
    if (q >= platform.types() || !g.task(v).allows(q)) {
      throw Error(ErrorCode::AllocatesForbiddenType,
                  task_str(g.task(v).id) + " allocated to type " + std::to_string(q));
    }
  }
}

RankTable compute_rank_alloc(const TaskGraph& g, const Allocation& alloc) {
  RankTable table{std::vector<double>(g.size(), 0.0)};
  const auto order = topological_indices(g);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::size_t v = *it;
    double tail = 0;
    for (std::size_t w : g.successors(v)) tail = std::max(tail, table.rank[w]);
    table.rank[v] = g.task(v).time_on(alloc[v]) + tail;
  }
  return table;
}

RankTable compute_rank_avg(const TaskGraph& g, const Platform& platform) {
  double finite_sum = 0;
  for (const Task& t : g.tasks()) {
    for (TypeIndex q = 0; q < t.arity(); ++q) {
      if (t.allows(q)) finite_sum += t.proc_times[q];
    }
  }
  const double penalty = 10.0 * finite_sum;
  const double machines = static_cast<double>(platform.total());

  RankTable table{std::vector<double>(g.size(), 0.0)};
  const auto order = topological_indices(g);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::size_t v = *it;
    const Task& t = g.task(v);
    double weighted = 0;
    for (TypeIndex q = 0; q < platform.types(); ++q) {
      const double p = t.allows(q) ? t.proc_times[q] : penalty;
      weighted += static_cast<double>(platform.count(q)) * p;
    }
    double tail = 0;
    for (std::size_t w : g.successors(v)) tail = std::max(tail, table.rank[w]);
    table.rank[v] = weighted / machines + tail;
  }
  return table;
}

std::vector<std::size_t> priority_order(const TaskGraph& g, const RankTable& ranks) {
  std::vector<std::size_t> order(g.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (ranks[a] != ranks[b]) return ranks[a] > ranks[b];
    return g.task(a).id < g.task(b).id;
  });
  return order;
}

const Placement* Schedule::find(TaskId task) const {
  for (const Placement& p : placements) {
    if (p.task == task) return &p;
  }
  return nullptr;
}

std::vector<Placement> placements_by_task(const Schedule& s, const TaskGraph& g) {
  std::vector<Placement> out(g.size());
  std::vector<bool> seen(g.size(), false);
  for (const Placement& p : s.placements) {
    auto index = g.find(p.task);
    if (!index) throw Error(ErrorCode::MissingTask, "schedule places unknown " + task_str(p.task));
    if (seen[*index]) throw Error(ErrorCode::Overlap, task_str(p.task) + " placed twice");
    seen[*index] = true;
    out[*index] = p;
  }
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (!seen[v]) throw Error(ErrorCode::MissingTask, task_str(g.task(v).id) + " is not scheduled");
  }
  return out;
}

void validate_schedule(const Schedule& s, const TaskGraph& g, const Platform& platform) {
  const auto placed = placements_by_task(s, g);

  for (std::size_t v = 0; v < g.size(); ++v) {
    const Placement& p = placed[v];
    const Task& t = g.task(v);
    if (p.type >= platform.types()) {
      throw Error(ErrorCode::MachineOutOfRange,
                  task_str(t.id) + " on unknown type " + std::to_string(p.type));
    }
    if (!t.allows(p.type)) {
      throw Error(ErrorCode::AllocatesForbiddenType,
                  task_str(t.id) + " runs on forbidden type " + std::to_string(p.type));
    }
    if (p.machine >= platform.count(p.type)) {
      throw Error(ErrorCode::MachineOutOfRange,
                  task_str(t.id) + " on machine " + std::to_string(p.machine) + " of type " +
                      std::to_string(p.type));
    }
    const Time expected = t.time_on(p.type);
    if (!std::isfinite(p.start) || !std::isfinite(p.finish) || time_less(p.start, 0) ||
        std::abs((p.finish - p.start) - expected) >
            1e-9 * std::max({Time{1}, std::abs(p.finish), expected})) {
      throw Error(ErrorCode::WrongDuration, task_str(t.id) + " runs [" + std::to_string(p.start) +
                                                ", " + std::to_string(p.finish) + "), expected length " +
                                                std::to_string(expected));
    }
  }

  for (std::size_t v = 0; v < g.size(); ++v) {
    for (std::size_t u : g.predecessors(v)) {
      if (time_less(placed[v].start, placed[u].finish)) {
        throw Error(ErrorCode::PrecedenceViolation,
                    task_str(g.task(v).id) + " starts at " + std::to_string(placed[v].start) +
                        " before predecessor " + std::to_string(g.task(u).id) + " finishes at " +
                        std::to_string(placed[u].finish));
      }
    }
  }

  std::vector<const Placement*> by_machine;
  by_machine.reserve(placed.size());
  for (const Placement& p : placed) by_machine.push_back(&p);
  std::sort(by_machine.begin(), by_machine.end(), [](const Placement* a, const Placement* b) {
    if (a->type != b->type) return a->type < b->type;
    if (a->machine != b->machine) return a->machine < b->machine;
    if (a->start != b->start) return a->start < b->start;
    return a->finish < b->finish;
  });
  // Compare each placement with the latest-finishing earlier one on the
  // same machine.
  const Placement* latest = nullptr;
  for (const Placement* cur : by_machine) {
    if (latest && (latest->type != cur->type || latest->machine != cur->machine)) latest = nullptr;
    if (latest && time_less(cur->start, latest->finish)) {
      throw Error(ErrorCode::Overlap, task_str(latest->task) + " and " + task_str(cur->task) +
                                          " overlap on type " + std::to_string(cur->type) +
                                          " machine " + std::to_string(cur->machine));
    }
    if (!latest || cur->finish > latest->finish) latest = cur;
  }
}

Time makespan(const Schedule& s) {
  if (s.empty()) throw Error(ErrorCode::EmptySchedule, "no placements");
  Time latest = s.placements.front().finish;
  for (const Placement& p : s.placements) latest = std::max(latest, p.finish);
  return latest;
}

}  // namespace hybrid
