#pragma once

#include <cstdint>
#include <string>

#include "hybrid/task_graph.hpp"

namespace hybrid {

struct Instance {
  TaskGraph graph;
  Platform platform;
};

struct ForkJoinSpec {
  std::size_t phases = 1;
  std::size_t width = 1;
  std::uint64_t seed = 0;
  std::size_t types = 2;  // 2 or 3

  std::size_t task_count() const { return 1 + phases * (width + 1); }
};

/// Fork-join DAG: a start task, then `phases` rounds of `width` parallel
/// tasks closed by a join task. CPU times ~ Normal(phases, phases/4)
/// truncated below at phases/100. Each GPU type divides the CPU time by an
/// acceleration factor: ceil(5% of width) parallel tasks per phase draw it
/// from U[0.1, 0.5], every other task from U[0.5, 50].
///
/// Sub-streams of `seed`: 2*phase for CPU times of a phase (phase 0 is the
/// start task), 2*phase + 1 + 2*(phases+1)*(g-1) for GPU type g.
TaskGraph gen_forkjoin(const ForkJoinSpec& spec);

/// Independent tasks on which HEFT is far from optimal: for i = 1..m, k
/// tasks A_i with p = (r^i, r^i) and m tasks B_i with p = (r^i, k/m^2 r^m),
/// r = m / (m + k). Requires 1 <= k and k^2 <= m.
Instance gen_heft_adversary(std::size_t m, std::size_t k);

/// Instance on which rounding the relaxation then scheduling reaches
/// ratio 6 - O(1/m) on m CPUs and m GPUs: 2m+1 tasks B1 with p = (2m-1, 1),
/// 2m+1 tasks B2 with p = (1, 2m-1), every B1 preceding every B2, and a
/// CPU-only task A with p = m(2m+1)/(m-1). Ids: B1, then B2, then A.
/// Requires m >= 3.
Instance gen_hlp_adversary(std::size_t m);

/// Online instance for ER-LS: k independent tasks A with p = (sqrt m,
/// sqrt m), then a chain of m tasks B with p = (sqrt m, sqrt k). The natural
/// arrival order presents all A tasks first, then the chain.
/// Requires 1 <= k <= m.
Instance gen_erls_adversary(std::size_t m, std::size_t k);

}  // namespace hybrid
