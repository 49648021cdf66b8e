#include "hybrid/task_graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

namespace hybrid {

// ---------------------------------------------------------------------------
// Task

Task::Task(TaskId id, std::vector<Time> times, std::vector<TypeIndex> forbidden, std::string label)
    : id(id), proc_times(std::move(times)), forbidden(std::move(forbidden)), label(std::move(label)) {
  std::sort(this->forbidden.begin(), this->forbidden.end());
  this->forbidden.erase(std::unique(this->forbidden.begin(), this->forbidden.end()),
                        this->forbidden.end());
  for (TypeIndex q : this->forbidden) {
    if (q < proc_times.size()) proc_times[q] = 0;
  }
}

bool Task::allows(TypeIndex q) const noexcept {
  return q < proc_times.size() && !std::binary_search(forbidden.begin(), forbidden.end(), q);
}

Time Task::min_time() const { return proc_times[fastest_type()]; }

TypeIndex Task::fastest_type() const {
  std::optional<TypeIndex> best;
  for (TypeIndex q = 0; q < proc_times.size(); ++q) {
    if (!allows(q)) continue;
    if (!best || proc_times[q] < proc_times[*best]) best = q;
  }
  if (!best) {
    throw Error(ErrorCode::AllTypesForbidden, "task " + std::to_string(id));
  }
  return *best;
}

// ---------------------------------------------------------------------------
// TaskGraph

TaskId TaskGraph::add_task(Task task) {
  const TaskId id = task.id;
  if (index_.contains(id)) {
    duplicate_ids_.push_back(id);
  } else {
    index_.emplace(id, tasks_.size());
  }
  tasks_.push_back(std::move(task));
  preds_.emplace_back();
  succs_.emplace_back();
  return id;
}

void TaskGraph::add_edge(TaskId from, TaskId to) {
  edges_.push_back({from, to});
  auto a = find(from);
  auto b = find(to);
  if (a && b) {
    succs_[*a].push_back(*b);
    preds_[*b].push_back(*a);
  }
}

std::optional<std::size_t> TaskGraph::find(TaskId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t TaskGraph::index_of(TaskId id) const {
  auto index = find(id);
  if (!index) throw Error(ErrorCode::InvalidArgument, "unknown task id " + std::to_string(id));
  return *index;
}

// ---------------------------------------------------------------------------
// Platform

Platform::Platform(std::vector<std::size_t> counts) : counts_(std::move(counts)) {
  if (counts_.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "a platform needs at least two resource types");
  }
  for (std::size_t c : counts_) {
    if (c == 0) throw Error(ErrorCode::InvalidArgument, "machine counts must be >= 1");
  }
}

std::size_t Platform::total() const noexcept {
  std::size_t sum = 0;
  for (std::size_t c : counts_) sum += c;
  return sum;
}

std::string Platform::to_string() const {
  std::string out;
  for (std::size_t q = 0; q < counts_.size(); ++q) {
    if (q) out += ',';
    out += std::to_string(counts_[q]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation and orderings

namespace {

// Returns one directed cycle among the tasks that Kahn's algorithm left
// unprocessed.
std::vector<TaskId> find_cycle(const TaskGraph& g, const std::vector<bool>& processed) {
  const std::size_t n = g.size();
  std::vector<int> color(n, 0);  // 0 = new, 1 = on stack, 2 = done
  std::vector<std::size_t> parent(n, n);
  std::vector<TaskId> cycle;

  std::function<bool(std::size_t)> dfs = [&](std::size_t v) {
    color[v] = 1;
    for (std::size_t w : g.successors(v)) {
      if (processed[w]) continue;
      if (color[w] == 1) {
        cycle.push_back(g.task(w).id);
        for (std::size_t u = v; u != w; u = parent[u]) cycle.push_back(g.task(u).id);
        std::reverse(cycle.begin() + 1, cycle.end());
        return true;
      }
      if (color[w] == 0) {
        parent[w] = v;
        if (dfs(w)) return true;
      }
    }
    color[v] = 2;
    return false;
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (!processed[v] && color[v] == 0 && dfs(v)) break;
  }
  return cycle;
}

[[noreturn]] void throw_cycle(const TaskGraph& g, const std::vector<bool>& processed) {
  std::ostringstream msg;
  msg << "cycle";
  for (TaskId id : find_cycle(g, processed)) msg << ' ' << id;
  throw Error(ErrorCode::CycleDetected, msg.str());
}

}  // namespace

std::vector<std::size_t> topological_indices(const TaskGraph& g) {
  const std::size_t n = g.size();
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t v = 0; v < n; ++v) indegree[v] = g.predecessors(v).size();

  using Entry = std::pair<TaskId, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> ready;
  for (std::size_t v = 0; v < n; ++v) {
    if (indegree[v] == 0) ready.emplace(g.task(v).id, v);
  }

  std::vector<std::size_t> order;
  order.reserve(n);
  std::vector<bool> processed(n, false);
  while (!ready.empty()) {
    const std::size_t v = ready.top().second;
    ready.pop();
    processed[v] = true;
    order.push_back(v);
    for (std::size_t w : g.successors(v)) {
      if (--indegree[w] == 0) ready.emplace(g.task(w).id, w);
    }
  }
  if (order.size() != n) throw_cycle(g, processed);
  return order;
}

std::vector<TaskId> topological_order(const TaskGraph& g) {
  std::vector<TaskId> ids;
  for (std::size_t v : topological_indices(g)) ids.push_back(g.task(v).id);
  return ids;
}

void validate_graph_structure(const TaskGraph& g) {
  if (!g.duplicate_ids().empty()) {
    throw Error(ErrorCode::DuplicateTask, "task id " + std::to_string(g.duplicate_ids().front()));
  }
  const std::size_t q_count = g.type_count();
  for (const Task& t : g.tasks()) {
    if (t.id < 0) {
      throw Error(ErrorCode::InvalidArgument, "negative task id " + std::to_string(t.id));
    }
    if (t.arity() != q_count) {
      throw Error(ErrorCode::ArityMismatch, "task " + std::to_string(t.id) + " has " +
                                                std::to_string(t.arity()) + " processing times, expected " +
                                                std::to_string(q_count));
    }
    for (TypeIndex q : t.forbidden) {
      if (q >= q_count) {
        throw Error(ErrorCode::ArityMismatch,
                    "task " + std::to_string(t.id) + " forbids unknown type " + std::to_string(q));
      }
    }
    bool any_allowed = false;
    for (TypeIndex q = 0; q < q_count; ++q) {
      if (!t.allows(q)) continue;
      any_allowed = true;
      const Time p = t.proc_times[q];
      if (!std::isfinite(p) || p < 0) {
        throw Error(ErrorCode::NegativeTime, "task " + std::to_string(t.id) + " type " +
                                                 std::to_string(q) + " has time " + std::to_string(p));
      }
    }
    if (!any_allowed) throw Error(ErrorCode::AllTypesForbidden, "task " + std::to_string(t.id));
  }

  std::set<std::pair<TaskId, TaskId>> seen;
  for (const Edge& e : g.edges()) {
    if (!g.find(e.from) || !g.find(e.to)) {
      throw Error(ErrorCode::DanglingEdge,
                  "edge (" + std::to_string(e.from) + "," + std::to_string(e.to) + ")");
    }
    if (!seen.emplace(e.from, e.to).second) {
      throw Error(ErrorCode::DuplicateEdge,
                  "edge (" + std::to_string(e.from) + "," + std::to_string(e.to) + ")");
    }
  }
  topological_indices(g);
}

void validate_graph(const TaskGraph& g, const Platform& platform) {
  if (g.type_count() != platform.types()) {
    throw Error(ErrorCode::ArityMismatch, "graph has " + std::to_string(g.type_count()) +
                                              " resource types, platform has " +
                                              std::to_string(platform.types()));
  }
  validate_graph_structure(g);
}

Time critical_path_min(const TaskGraph& g) {
  std::vector<Time> finish(g.size(), 0);
  Time longest = 0;
  for (std::size_t v : topological_indices(g)) {
    Time ready = 0;
    for (std::size_t u : g.predecessors(v)) ready = std::max(ready, finish[u]);
    finish[v] = ready + g.task(v).min_time();
    longest = std::max(longest, finish[v]);
  }
  return longest;
}

}  // namespace hybrid
