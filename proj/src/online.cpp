#include "hybrid/online.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "hybrid/random.hpp"

namespace hybrid {

std::vector<TaskId> arrival_stream(const TaskGraph& g, ArrivalMode mode) {
  if (mode.kind == ArrivalMode::Kind::Natural) return topological_order(g);

  const std::size_t n = g.size();
  std::vector<std::size_t> waiting(n);
  std::vector<std::size_t> ready;
  for (std::size_t v = 0; v < n; ++v) {
    waiting[v] = g.predecessors(v).size();
    if (waiting[v] == 0) ready.push_back(v);
  }
  // Ready set kept sorted by id so the draw does not depend on insertion
  // history.
  auto by_id = [&](std::size_t a, std::size_t b) { return g.task(a).id < g.task(b).id; };
  Rng rng(mode.seed);
  std::vector<TaskId> out;
  out.reserve(n);
  while (!ready.empty()) {
    std::sort(ready.begin(), ready.end(), by_id);
    const std::size_t pick = static_cast<std::size_t>(rng.below(ready.size()));
    const std::size_t v = ready[pick];
    ready.erase(ready.begin() + static_cast<std::ptrdiff_t>(pick));
    out.push_back(g.task(v).id);
    for (std::size_t w : g.successors(v)) {
      if (--waiting[w] == 0) ready.push_back(w);
    }
  }
  if (out.size() < n) topological_indices(g);  // throws CycleDetected
  return out;
}

namespace {

void require_two_types(const Platform& platform, const char* what) {
  if (platform.types() != 2) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(what) + " needs exactly two resource types");
  }
}

// Only allowed side, if the task has exactly one.
std::optional<TypeIndex> forced_side(const Task& task) {
  const bool cpu = task.allows(kCpu);
  const bool gpu = task.allows(kGpu);
  if (cpu && !gpu) return kCpu;
  if (gpu && !cpu) return kGpu;
  if (!cpu && !gpu) {
    throw Error(ErrorCode::AllTypesForbidden,
                "task " + std::to_string(task.id) + " has no allowed type");
  }
  return std::nullopt;
}

}  // namespace

TypeIndex rule_allocate(const Task& task, const Platform& platform, Rule rule) {
  require_two_types(platform, "rule allocation");
  if (auto side = forced_side(task)) return *side;
  const double cpu = task.time_on(kCpu);
  const double gpu = task.time_on(kGpu);
  const double m = static_cast<double>(platform.cpus());
  const double k = static_cast<double>(platform.gpus());
  switch (rule) {
    case Rule::R1:
      return cpu / m <= gpu / k ? kCpu : kGpu;
    case Rule::R2:
      return cpu / std::sqrt(m) <= gpu / std::sqrt(k) ? kCpu : kGpu;
    case Rule::R3:
      return cpu <= gpu ? kCpu : kGpu;
  }
  return kCpu;
}

OnlineState::OnlineState(const TaskGraph& g, const Platform& platform)
    : graph_(&g), platform_(platform), completion_(g.size()) {
  for (std::size_t c : platform.counts()) avail_.emplace_back(c, 0.0);
}

Time OnlineState::ready_time(std::size_t index) const {
  Time ready = 0;
  for (std::size_t p : graph_->predecessors(index)) {
    if (!completion_[p]) {
      throw Error(ErrorCode::PredecessorNotCommitted,
                  "task " + std::to_string(graph_->task(index).id) + " arrived before predecessor " +
                      std::to_string(graph_->task(p).id));
    }
    ready = std::max(ready, *completion_[p]);
  }
  return ready;
}

Time OnlineState::earliest_idle(TypeIndex q) const {
  return avail_[q][earliest_machine(q)];
}

std::size_t OnlineState::earliest_machine(TypeIndex q) const {
  const auto& a = avail_[q];
  return static_cast<std::size_t>(std::min_element(a.begin(), a.end()) - a.begin());
}

const Placement& OnlineState::commit(std::size_t index, TypeIndex q, std::size_t machine) {
  const Task& t = graph_->task(index);
  if (completion_[index]) {
    throw Error(ErrorCode::Overlap, "task " + std::to_string(t.id) + " committed twice");
  }
  if (!t.allows(q)) {
    throw Error(ErrorCode::AllocatesForbiddenType,
                "task " + std::to_string(t.id) + " committed to forbidden type " + std::to_string(q));
  }
  const Time start = std::max(avail_[q][machine], ready_time(index));
  const Time finish = start + t.time_on(q);
  avail_[q][machine] = finish;
  completion_[index] = finish;
  schedule_.placements.push_back({t.id, q, machine, start, finish});
  return schedule_.placements.back();
}

const Placement& OnlineState::commit(std::size_t index, TypeIndex q) {
  return commit(index, q, earliest_machine(q));
}

TypeIndex erls_decide(const Task& task, const OnlineState& state, const Platform& platform) {
  require_two_types(platform, "ER-LS");
  const std::size_t index = state.graph().index_of(task.id);
  const Time ready = state.ready_time(index);
  if (auto side = forced_side(task)) return *side;
  const Time gpu_ready = std::max(state.earliest_idle(kGpu), ready);
  if (task.time_on(kCpu) >= gpu_ready + task.time_on(kGpu)) return kGpu;
  return rule_allocate(task, platform, Rule::R2);
}

std::string to_string(OnlinePolicy policy) {
  switch (policy) {
    case OnlinePolicy::Erls: return "erls";
    case OnlinePolicy::Eft: return "eft";
    case OnlinePolicy::Greedy: return "greedy";
    case OnlinePolicy::Random: return "random";
    case OnlinePolicy::R1: return "r1";
    case OnlinePolicy::R2: return "r2";
    case OnlinePolicy::R3: return "r3";
  }
  return "unknown";
}

std::optional<OnlinePolicy> parse_online_policy(const std::string& text) {
  for (OnlinePolicy p : {OnlinePolicy::Erls, OnlinePolicy::Eft, OnlinePolicy::Greedy,
                         OnlinePolicy::Random, OnlinePolicy::R1, OnlinePolicy::R2,
                         OnlinePolicy::R3}) {
    if (to_string(p) == text) return p;
  }
  return std::nullopt;
}

OnlineResult online_run(const TaskGraph& g, const Platform& platform, OnlinePolicy policy,
                        const std::vector<TaskId>& arrivals, std::uint64_t seed) {
  if (policy != OnlinePolicy::Eft && policy != OnlinePolicy::Greedy) {
    require_two_types(platform, to_string(policy).c_str());
  }
  OnlineState state(g, platform);
  Rng coin(seed);
  OnlineResult result;
  result.decisions.reserve(arrivals.size());

  for (TaskId id : arrivals) {
    const std::size_t v = g.index_of(id);
    const Task& t = g.task(v);
    const Time ready = state.ready_time(v);
    std::size_t allowed = 0;
    for (TypeIndex q = 0; q < platform.types(); ++q) allowed += t.allows(q) ? 1 : 0;
    if (allowed == 0) {
      throw Error(ErrorCode::AllTypesForbidden, "task " + std::to_string(id) + " has no allowed type");
    }

    TypeIndex type = 0;
    std::optional<std::size_t> machine;
    switch (policy) {
      case OnlinePolicy::Erls:
        type = erls_decide(t, state, platform);
        break;
      case OnlinePolicy::Greedy:
        type = t.fastest_type();
        break;
      case OnlinePolicy::Random:
        if (auto side = forced_side(t)) {
          type = *side;
        } else {
          type = coin.coin() ? kGpu : kCpu;
        }
        break;
      case OnlinePolicy::R1:
        type = rule_allocate(t, platform, Rule::R1);
        break;
      case OnlinePolicy::R2:
        type = rule_allocate(t, platform, Rule::R2);
        break;
      case OnlinePolicy::R3:
        type = rule_allocate(t, platform, Rule::R3);
        break;
      case OnlinePolicy::Eft: {
        Time best = std::numeric_limits<Time>::infinity();
        for (TypeIndex q = platform.types(); q-- > 0;) {
          if (!t.allows(q)) continue;
          for (std::size_t m = 0; m < platform.count(q); ++m) {
            const Time finish = std::max(state.availability(q, m), ready) + t.time_on(q);
            if (finish < best) {
              best = finish;
              type = q;
              machine = m;
            }
          }
        }
        break;
      }
    }

    const Placement& p = machine ? state.commit(v, type, *machine) : state.commit(v, type);
    result.decisions.push_back({id, p.type, p.machine, p.start, allowed == 1});
  }
  result.schedule = state.schedule();
  return result;
}

OnlineResult online_run(const TaskGraph& g, const Platform& platform, OnlinePolicy policy,
                        ArrivalMode mode, std::uint64_t seed) {
  return online_run(g, platform, policy, arrival_stream(g, mode), seed);
}

}  // namespace hybrid
