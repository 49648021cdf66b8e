#include "hybrid/offline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <set>
#include <unordered_map>
#include <utility>

namespace hybrid {

namespace {

constexpr Time kInf = std::numeric_limits<Time>::infinity();

// Availability per (type, machine).
class MachinePool {
 public:
  explicit MachinePool(const Platform& platform) {
    for (std::size_t c : platform.counts()) avail_.emplace_back(c, 0.0);
  }

  // Earliest-available machine of type q, ties by index.
  std::size_t earliest(TypeIndex q) const {
    const auto& a = avail_[q];
    return static_cast<std::size_t>(std::min_element(a.begin(), a.end()) - a.begin());
  }

  Time available(TypeIndex q, std::size_t machine) const { return avail_[q][machine]; }
  void occupy(TypeIndex q, std::size_t machine, Time until) { avail_[q][machine] = until; }

 private:
  std::vector<std::vector<Time>> avail_;
};

// `key[v]`: smaller is scheduled first.
Schedule list_schedule_by_key(const TaskGraph& g, const Platform& platform, const Allocation& alloc,
                              const std::vector<std::size_t>& key) {
  check_allocation(g, platform, alloc);
  const std::size_t n = g.size();
  Schedule out;
  out.placements.reserve(n);
  if (n == 0) return out;

  using ReadyKey = std::pair<std::size_t, std::size_t>;  // (key, index)
  std::vector<std::set<ReadyKey>> ready(platform.types());
  std::vector<std::size_t> waiting(n);
  for (std::size_t v = 0; v < n; ++v) {
    waiting[v] = g.predecessors(v).size();
    if (waiting[v] == 0) ready[alloc[v]].insert({key[v], v});
  }

  using Event = std::pair<Time, std::size_t>;  // (finish, index)
  std::priority_queue<Event, std::vector<Event>, std::greater<>> running;
  MachinePool machines(platform);
  Time now = 0;

  while (out.placements.size() < n) {
    while (!running.empty() && running.top().first <= now) {
      const std::size_t v = running.top().second;
      running.pop();
      for (std::size_t w : g.successors(v)) {
        if (--waiting[w] == 0) ready[alloc[w]].insert({key[w], w});
      }
    }

    for (TypeIndex q = 0; q < platform.types(); ++q) {
      while (!ready[q].empty()) {
        const std::size_t machine = machines.earliest(q);
        if (machines.available(q, machine) > now) break;
        const std::size_t v = ready[q].begin()->second;
        ready[q].erase(ready[q].begin());
        const Time finish = now + g.task(v).time_on(q);
        machines.occupy(q, machine, finish);
        out.placements.push_back({g.task(v).id, q, machine, now, finish});
        running.push({finish, v});
      }
    }

    if (running.empty()) {
      if (out.placements.size() < n) {
        throw Error(ErrorCode::CycleDetected, "list scheduling stalled with unscheduled tasks");
      }
      break;
    }
    // Zero-length tasks finish at `now`; release their successors before
    // moving the clock.
    now = std::max(now, running.top().first);
  }
  return out;
}

}  // namespace

Schedule list_schedule(const TaskGraph& g, const Platform& platform, const Allocation& alloc,
                       const RankTable& priority) {
  if (priority.size() != g.size()) {
    throw Error(ErrorCode::ArityMismatch, "priority table does not cover every task");
  }
  const auto order = priority_order(g, priority);
  std::vector<std::size_t> key(g.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) key[order[pos]] = pos;
  return list_schedule_by_key(g, platform, alloc, key);
}

Schedule list_schedule(const TaskGraph& g, const Platform& platform, const Allocation& alloc,
                       const std::vector<TaskId>& order) {
  const std::size_t n = g.size();
  std::vector<std::size_t> key(n, std::numeric_limits<std::size_t>::max());
  std::size_t pos = 0;
  for (TaskId id : order) {
    const std::size_t v = g.index_of(id);
    if (key[v] == std::numeric_limits<std::size_t>::max()) key[v] = pos++;
  }
  std::vector<std::size_t> rest;
  for (std::size_t v = 0; v < n; ++v) {
    if (key[v] == std::numeric_limits<std::size_t>::max()) rest.push_back(v);
  }
  std::sort(rest.begin(), rest.end(),
            [&](std::size_t a, std::size_t b) { return g.task(a).id < g.task(b).id; });
  for (std::size_t v : rest) key[v] = pos++;
  return list_schedule_by_key(g, platform, alloc, key);
}

Schedule est_schedule(const TaskGraph& g, const Platform& platform, const Allocation& alloc) {
  check_allocation(g, platform, alloc);
  const std::size_t n = g.size();
  Schedule out;
  out.placements.reserve(n);

  std::vector<std::size_t> waiting(n);
  std::vector<Time> ready_at(n, 0.0);
  std::vector<std::size_t> ready;
  for (std::size_t v = 0; v < n; ++v) {
    waiting[v] = g.predecessors(v).size();
    if (waiting[v] == 0) ready.push_back(v);
  }
  MachinePool machines(platform);

  while (!ready.empty()) {
    std::vector<Time> side_free(platform.types());
    for (TypeIndex q = 0; q < platform.types(); ++q) {
      side_free[q] = machines.available(q, machines.earliest(q));
    }
    std::size_t best = 0;
    Time best_start = kInf;
    for (std::size_t i = 0; i < ready.size(); ++i) {
      const std::size_t v = ready[i];
      const Time start = std::max(side_free[alloc[v]], ready_at[v]);
      if (start < best_start ||
          (start == best_start && g.task(v).id < g.task(ready[best]).id)) {
        best = i;
        best_start = start;
      }
    }
    const std::size_t v = ready[best];
    ready[best] = ready.back();
    ready.pop_back();

    const TypeIndex q = alloc[v];
    const std::size_t machine = machines.earliest(q);
    const Time finish = best_start + g.task(v).time_on(q);
    machines.occupy(q, machine, finish);
    out.placements.push_back({g.task(v).id, q, machine, best_start, finish});
    for (std::size_t w : g.successors(v)) {
      ready_at[w] = std::max(ready_at[w], finish);
      if (--waiting[w] == 0) ready.push_back(w);
    }
  }
  if (out.placements.size() < n) {
    throw Error(ErrorCode::CycleDetected, "EST left tasks unscheduled");
  }
  return out;
}

Schedule ols_schedule(const TaskGraph& g, const Platform& platform, const Allocation& alloc) {
  check_allocation(g, platform, alloc);
  return list_schedule(g, platform, alloc, compute_rank_alloc(g, alloc));
}

namespace {

// Busy intervals of one machine, sorted by (start, finish); finishes are
// then sorted too, zero-length intervals included.
struct Timeline {
  std::vector<std::pair<Time, Time>> busy;

  Time end() const { return busy.empty() ? 0.0 : busy.back().second; }

  // Earliest start >= ready for a task of length `length`.
  Time earliest_fit(Time ready, Time length) const {
    auto it = std::upper_bound(busy.begin(), busy.end(), ready,
                               [](Time t, const auto& iv) { return t < iv.second; });
    Time candidate = ready;
    for (; it != busy.end(); ++it) {
      if (candidate + length <= it->first) return candidate;
      candidate = std::max(candidate, it->second);
    }
    return candidate;
  }

  void insert(Time start, Time finish) {
    const std::pair<Time, Time> interval{start, finish};
    busy.insert(std::upper_bound(busy.begin(), busy.end(), interval), interval);
  }
};

}  // namespace

Schedule heft_schedule(const TaskGraph& g, const Platform& platform, HeftOptions options) {
  const std::size_t n = g.size();
  Schedule out;
  out.placements.reserve(n);
  if (n == 0) return out;

  const auto order = priority_order(g, compute_rank_avg(g, platform));
  std::vector<std::size_t> key(n);
  for (std::size_t pos = 0; pos < n; ++pos) key[order[pos]] = pos;

  std::vector<std::vector<Timeline>> lines;
  for (std::size_t c : platform.counts()) lines.emplace_back(c);

  std::vector<std::size_t> waiting(n);
  std::vector<Time> ready_at(n, 0.0);
  std::set<std::pair<std::size_t, std::size_t>> ready;
  for (std::size_t v = 0; v < n; ++v) {
    waiting[v] = g.predecessors(v).size();
    if (waiting[v] == 0) ready.insert({key[v], v});
  }

  while (!ready.empty()) {
    const std::size_t v = ready.begin()->second;
    ready.erase(ready.begin());
    const Task& t = g.task(v);

    Placement best{t.id, 0, 0, 0, kInf};
    for (TypeIndex q = platform.types(); q-- > 0;) {
      if (!t.allows(q)) continue;
      const Time length = t.time_on(q);
      for (std::size_t m = 0; m < platform.count(q); ++m) {
        const Timeline& line = lines[q][m];
        const Time start = options.insertion ? line.earliest_fit(ready_at[v], length)
                                             : std::max(line.end(), ready_at[v]);
        const Time finish = start + length;
        if (finish < best.finish) best = {t.id, q, m, start, finish};
      }
    }
    lines[best.type][best.machine].insert(best.start, best.finish);
    out.placements.push_back(best);
    for (std::size_t w : g.successors(v)) {
      ready_at[w] = std::max(ready_at[w], best.finish);
      if (--waiting[w] == 0) ready.insert({key[w], w});
    }
  }
  if (out.placements.size() < n) {
    throw Error(ErrorCode::CycleDetected, "HEFT left tasks unscheduled");
  }
  return out;
}

Schedule schedule_allocation(const TaskGraph& g, const Platform& platform, const Allocation& alloc,
                             Policy policy) {
  return policy == Policy::Est ? est_schedule(g, platform, alloc)
                               : ols_schedule(g, platform, alloc);
}

PipelineResult run_pipeline(const TaskGraph& g, const Platform& platform, Policy policy,
                            const LpSolution* injected, const LpBackend& backend) {
  PipelineResult result;
  if (injected) {
    result.lp = *injected;
  } else {
    result.lp = solve_lp(build_hlp(g, platform), backend);
  }
  result.allocation = round_allocation(result.lp, g);
  result.schedule = schedule_allocation(g, platform, result.allocation, policy);
  return result;
}

Schedule hlp_pipeline(const TaskGraph& g, const Platform& platform, Policy policy) {
  return run_pipeline(g, platform, policy).schedule;
}

}  // namespace hybrid
