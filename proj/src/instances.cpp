#include "hybrid/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "hybrid/random.hpp"

namespace hybrid {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::ParameterOutOfRange, what);
}

double truncated_normal(Rng& rng, double mean, double stddev, double floor) {
  for (;;) {
    const double v = rng.normal(mean, stddev);
    if (v >= floor) return v;
  }
}

}  // namespace

TaskGraph gen_forkjoin(const ForkJoinSpec& spec) {
  require(spec.phases >= 1, "fork-join needs at least one phase");
  require(spec.width >= 1, "fork-join needs width >= 1");
  require(spec.types == 2 || spec.types == 3, "fork-join supports 2 or 3 resource types");

  const double center = static_cast<double>(spec.phases);
  const double stddev = center / 4.0;
  const double floor = center / 100.0;
  const std::size_t gpu_types = spec.types - 1;
  const std::size_t slow_count =
      static_cast<std::size_t>(std::ceil(0.05 * static_cast<double>(spec.width)));

  TaskGraph g(spec.types);
  TaskId next_id = 0;

  // Builds the tasks of one phase. Phase 0 is the single start task; its
  // "parallel" set is empty.
  auto make_phase = [&](std::size_t phase, std::size_t parallel, bool has_join) {
    Rng cpu_rng = Rng::stream(spec.seed, 2 * phase);
    const std::size_t count = parallel + (has_join ? 1 : 0);
    std::vector<std::vector<double>> times(count, std::vector<double>(spec.types, 0.0));
    for (auto& t : times) t[kCpu] = truncated_normal(cpu_rng, center, stddev, floor);

    for (std::size_t gt = 1; gt <= gpu_types; ++gt) {
      Rng gpu_rng = Rng::stream(spec.seed, 2 * phase + 1 + 2 * (spec.phases + 1) * (gt - 1));
      // Partial Fisher-Yates: the first `slow_count` entries of `pick` are
      // the decelerated parallel tasks of this phase.
      std::vector<std::size_t> pick(parallel);
      std::iota(pick.begin(), pick.end(), std::size_t{0});
      const std::size_t slow = std::min(slow_count, parallel);
      for (std::size_t i = 0; i < slow; ++i) {
        const std::size_t j = i + gpu_rng.below(parallel - i);
        std::swap(pick[i], pick[j]);
      }
      std::vector<bool> decelerated(count, false);
      for (std::size_t i = 0; i < slow; ++i) decelerated[pick[i]] = true;
      for (std::size_t i = 0; i < count; ++i) {
        const double factor =
            decelerated[i] ? gpu_rng.uniform(0.1, 0.5) : gpu_rng.uniform(0.5, 50.0);
        times[i][gt] = times[i][kCpu] / factor;
      }
    }

    std::vector<TaskId> ids;
    for (std::size_t i = 0; i < count; ++i) {
      std::string label;
      if (phase == 0) {
        label = "start";
      } else if (i < parallel) {
        label = "par." + std::to_string(phase) + "." + std::to_string(i);
      } else {
        label = "join." + std::to_string(phase);
      }
      ids.push_back(g.add_task(Task(next_id++, times[i], {}, label)));
    }
    return ids;
  };

  TaskId previous = make_phase(0, 0, true).front();
  for (std::size_t phase = 1; phase <= spec.phases; ++phase) {
    const auto ids = make_phase(phase, spec.width, true);
    const TaskId join = ids.back();
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
      g.add_edge(previous, ids[i]);
      g.add_edge(ids[i], join);
    }
    previous = join;
  }
  return g;
}

Instance gen_heft_adversary(std::size_t m, std::size_t k) {
  require(m >= 1 && k >= 1, "heft adversary needs m, k >= 1");
  require(k * k <= m, "heft adversary needs k <= sqrt(m)");
  const double md = static_cast<double>(m);
  const double kd = static_cast<double>(k);
  const double r = md / (md + kd);
  const double b_gpu = kd / (md * md) * std::pow(r, md);

  TaskGraph g(2);
  TaskId id = 0;
  for (std::size_t i = 1; i <= m; ++i) {
    const double ri = std::pow(r, static_cast<double>(i));
    for (std::size_t j = 0; j < k; ++j) {
      g.add_task(Task(id++, {ri, ri}, {}, "A" + std::to_string(i)));
    }
    for (std::size_t j = 0; j < m; ++j) {
      g.add_task(Task(id++, {ri, b_gpu}, {}, "B" + std::to_string(i)));
    }
  }
  return {std::move(g), Platform({m, k})};
}

Instance gen_hlp_adversary(std::size_t m) {
  require(m >= 3, "hlp adversary needs m >= 3");
  const double md = static_cast<double>(m);
  const std::size_t set_size = 2 * m + 1;
  const double long_time = 2 * md - 1;

  TaskGraph g(2);
  TaskId id = 0;
  std::vector<TaskId> b1;
  std::vector<TaskId> b2;
  for (std::size_t j = 0; j < set_size; ++j) b1.push_back(g.add_task(Task(id++, {long_time, 1.0}, {}, "B1")));
  for (std::size_t j = 0; j < set_size; ++j) b2.push_back(g.add_task(Task(id++, {1.0, long_time}, {}, "B2")));
  g.add_task(Task(id++, {md * (2 * md + 1) / (md - 1), 0.0}, {kGpu}, "A"));
  for (TaskId u : b1) {
    for (TaskId v : b2) g.add_edge(u, v);
  }
  return {std::move(g), Platform({m, m})};
}

Instance gen_erls_adversary(std::size_t m, std::size_t k) {
  require(k >= 1 && k <= m, "erls adversary needs 1 <= k <= m");
  const double sm = std::sqrt(static_cast<double>(m));
  const double sk = std::sqrt(static_cast<double>(k));

  TaskGraph g(2);
  TaskId id = 0;
  for (std::size_t j = 0; j < k; ++j) g.add_task(Task(id++, {sm, sm}, {}, "A"));
  TaskId previous = -1;
  for (std::size_t j = 1; j <= m; ++j) {
    const TaskId b = g.add_task(Task(id++, {sm, sk}, {}, "B" + std::to_string(j)));
    if (previous >= 0) g.add_edge(previous, b);
    previous = b;
  }
  return {std::move(g), Platform({m, k})};
}

}  // namespace hybrid
