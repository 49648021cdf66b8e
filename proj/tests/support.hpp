#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hybrid/random.hpp"
#include "hybrid/schedule.hpp"
#include "hybrid/task_graph.hpp"

namespace hybrid::testing {

/// Random DAG on ids 0..n-1: edge i -> j (i < j) with probability `density`.
/// density 0 gives an antichain, 1 a total order. Times uniform in [lo, hi].
inline TaskGraph random_dag(Rng& rng, std::size_t n, double density, std::size_t types = 2,
                            double lo = 1.0, double hi = 10.0) {
  TaskGraph g(types);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Time> p(types);
    for (auto& t : p) t = rng.uniform(lo, hi);
    g.add_task(Task(static_cast<TaskId>(i), p));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.uniform01() < density) g.add_edge(static_cast<TaskId>(i), static_cast<TaskId>(j));
    }
  }
  return g;
}

/// First violation of the list-scheduling no-idle property, if any: a time
/// at which a machine of type q is idle while a q-allocated task whose
/// predecessors are all finished has not started yet.
inline std::optional<std::string> find_avoidable_idle(const Schedule& s, const TaskGraph& g,
                                                      const Platform& platform) {
  const auto placed = placements_by_task(s, g);
  std::vector<Time> events{0.0};
  for (const Placement& p : placed) {
    events.push_back(p.start);
    events.push_back(p.finish);
  }
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());

  for (Time t : events) {
    for (TypeIndex q = 0; q < platform.types(); ++q) {
      std::size_t busy = 0;
      for (const Placement& p : placed) {
        if (p.type == q && p.start <= t && t < p.finish) ++busy;
      }
      if (busy >= platform.count(q)) continue;
      for (std::size_t v = 0; v < g.size(); ++v) {
        const Placement& p = placed[v];
        if (p.type != q || p.start <= t) continue;
        bool released = true;
        for (std::size_t u : g.predecessors(v)) released = released && placed[u].finish <= t;
        if (released) {
          return "task " + std::to_string(g.task(v).id) + " waits at t=" + std::to_string(t) +
                 " while a machine of type " + std::to_string(q) + " is idle";
        }
      }
    }
  }
  return std::nullopt;
}

/// Every maximal source-to-sink path, as task index lists.
inline std::vector<std::vector<std::size_t>> maximal_paths(const TaskGraph& g) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> path;
  auto walk = [&](auto&& self, std::size_t v) -> void {
    path.push_back(v);
    if (g.successors(v).empty()) {
      out.push_back(path);
    } else {
      for (std::size_t w : g.successors(v)) self(self, w);
    }
    path.pop_back();
  };
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (g.predecessors(v).empty()) walk(walk, v);
  }
  return out;
}

/// Optimum of the two-type relaxation by explicit vertex enumeration.
/// With completion times eliminated the relaxation reads
///   min L  s.t.  L >= a_r . x + b_r  for every maximal path and both loads,
///                0 <= x <= 1,
/// where x_j is the CPU fraction of task j. Every vertex has each x_j at 0,
/// at 1 or free, and |free| + 1 tight rows; all are enumerated.
inline double relaxation_by_vertices(const TaskGraph& g, const Platform& platform) {
  const std::size_t n = g.size();
  if (n == 0) return 0.0;
  struct Row {
    Eigen::VectorXd a;
    double b;
  };
  std::vector<Row> rows;
  for (const auto& path : maximal_paths(g)) {
    Row r{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)), 0.0};
    for (std::size_t j : path) {
      const Task& t = g.task(j);
      r.a[static_cast<Eigen::Index>(j)] = t.time_on(kCpu) - t.time_on(kGpu);
      r.b += t.time_on(kGpu);
    }
    rows.push_back(r);
  }
  const double m = static_cast<double>(platform.cpus());
  const double k = static_cast<double>(platform.gpus());
  Row cpu{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)), 0.0};
  Row gpu{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)), 0.0};
  for (std::size_t j = 0; j < n; ++j) {
    cpu.a[static_cast<Eigen::Index>(j)] = g.task(j).time_on(kCpu) / m;
    gpu.a[static_cast<Eigen::Index>(j)] = -g.task(j).time_on(kGpu) / k;
    gpu.b += g.task(j).time_on(kGpu) / k;
  }
  rows.push_back(cpu);
  rows.push_back(gpu);

  auto value_at = [&](const Eigen::VectorXd& x) {
    double best = -std::numeric_limits<double>::infinity();
    for (const Row& r : rows) best = std::max(best, r.a.dot(x) + r.b);
    return best;
  };

  double best = std::numeric_limits<double>::infinity();
  std::vector<int> state(n, 0);  // 0: x=0, 1: x=1, 2: free
  const std::size_t combos = static_cast<std::size_t>(std::pow(3.0, static_cast<double>(n)));
  for (std::size_t code = 0; code < combos; ++code) {
    std::size_t c = code;
    std::vector<std::size_t> free;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    bool allowed = true;
    for (std::size_t j = 0; j < n; ++j) {
      state[j] = static_cast<int>(c % 3);
      c /= 3;
      const Task& t = g.task(j);
      if (state[j] == 2) {
        free.push_back(j);
        if (!t.allows(kCpu) || !t.allows(kGpu)) allowed = false;
      } else {
        x[static_cast<Eigen::Index>(j)] = state[j];
        if (state[j] == 1 && !t.allows(kCpu)) allowed = false;
        if (state[j] == 0 && !t.allows(kGpu)) allowed = false;
      }
    }
    if (!allowed) continue;
    const std::size_t need = free.size() + 1;
    if (need > rows.size()) continue;

    // Choose `need` tight rows.
    std::vector<std::size_t> pick(need);
    for (std::size_t i = 0; i < need; ++i) pick[i] = i;
    for (;;) {
      const auto dim = static_cast<Eigen::Index>(need);
      Eigen::MatrixXd A(dim, dim);
      Eigen::VectorXd rhs(dim);
      for (std::size_t i = 0; i < need; ++i) {
        const Row& r = rows[pick[i]];
        // a_free . y - L = -(a_fixed . x_fixed + b)
        for (std::size_t f = 0; f < free.size(); ++f) {
          A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f)) =
              r.a[static_cast<Eigen::Index>(free[f])];
        }
        A(static_cast<Eigen::Index>(i), dim - 1) = -1.0;
        rhs[static_cast<Eigen::Index>(i)] = -(r.a.dot(x) + r.b);
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      if (lu.isInvertible()) {
        const Eigen::VectorXd sol = lu.solve(rhs);
        Eigen::VectorXd y = x;
        bool inside = true;
        for (std::size_t f = 0; f < free.size(); ++f) {
          const double v = sol[static_cast<Eigen::Index>(f)];
          if (v < -1e-9 || v > 1 + 1e-9) inside = false;
          y[static_cast<Eigen::Index>(free[f])] = std::clamp(v, 0.0, 1.0);
        }
        if (inside) best = std::min(best, value_at(y));
      }
      // next combination
      std::size_t i = need;
      while (i > 0 && pick[i - 1] == rows.size() - need + (i - 1)) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < need; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return best;
}

}  // namespace hybrid::testing
