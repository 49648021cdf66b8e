#include <gtest/gtest.h>

#include <sstream>

#include "hybrid/online.hpp"

#include "hybrid/bench.hpp"
#include "hybrid/instances.hpp"
#include "hybrid/offline.hpp"
#include "hybrid/relaxation.hpp"
#include "hybrid/simplex.hpp"
#include "support.hpp"

namespace hybrid {
namespace {

using lp::LinearProgram;
using lp::PivotRule;
using lp::RowSense;
using lp::SimplexSolver;
using lp::Status;

constexpr double kInfinity = LinearProgram<double>::infinity();

SimplexSolver<double> solver_with(PivotRule rule) {
  SimplexSolver<double>::Options o;
  o.rule = rule;
  return SimplexSolver<double>(o);
}

class BothRules : public ::testing::TestWithParam<PivotRule> {};

TEST_P(BothRules, TextbookMaximisation) {
  LinearProgram<double> p;
  const auto x = p.add_variable("x", 0, kInfinity, -3);
  const auto y = p.add_variable("y", 0, kInfinity, -5);
  p.add_row("a", {{x, 1}}, RowSense::LessEqual, 4);
  p.add_row("b", {{y, 2}}, RowSense::LessEqual, 12);
  p.add_row("c", {{x, 3}, {y, 2}}, RowSense::LessEqual, 18);
  const auto r = solver_with(GetParam()).solve(p);
  ASSERT_EQ(r.status, Status::Optimal);
  EXPECT_NEAR(r.objective, -36, 1e-9);
  EXPECT_NEAR(r.values[x], 2, 1e-9);
  EXPECT_NEAR(r.values[y], 6, 1e-9);
}

TEST_P(BothRules, EqualityAndGreaterRows) {
  LinearProgram<double> p;
  const auto x = p.add_variable("x", 0, 10, 1);
  const auto y = p.add_variable("y", 0, 10, 1);
  p.add_row("cover", {{x, 1}, {y, 1}}, RowSense::GreaterEqual, 2);
  p.add_row("same", {{x, 1}, {y, -1}}, RowSense::Equal, 0);
  const auto r = solver_with(GetParam()).solve(p);
  ASSERT_EQ(r.status, Status::Optimal);
  EXPECT_NEAR(r.objective, 2, 1e-9);
  EXPECT_NEAR(r.values[x], 1, 1e-9);
  EXPECT_FALSE(p.first_violation(r.values, 1e-7));
}

TEST_P(BothRules, UpperBoundsAndFlips) {
  LinearProgram<double> p;
  const auto x = p.add_variable("x", 1, 3, -1);
  const auto y = p.add_variable("y", 0, 2, -1);
  p.add_row("cap", {{x, 1}, {y, 1}}, RowSense::LessEqual, 4);
  const auto r = solver_with(GetParam()).solve(p);
  ASSERT_EQ(r.status, Status::Optimal);
  EXPECT_NEAR(r.objective, -4, 1e-9);
}

TEST_P(BothRules, DetectsInfeasibility) {
  LinearProgram<double> p;
  const auto x = p.add_variable("x", 0, kInfinity, 1);
  const auto y = p.add_variable("y", 0, kInfinity, 1);
  p.add_row("low", {{x, 1}, {y, 1}}, RowSense::LessEqual, 1);
  p.add_row("high", {{x, 1}, {y, 1}}, RowSense::GreaterEqual, 2);
  EXPECT_EQ(solver_with(GetParam()).solve(p).status, Status::Infeasible);
}

TEST_P(BothRules, DetectsUnboundedness) {
  LinearProgram<double> p;
  const auto x = p.add_variable("x", 0, kInfinity, -1);
  const auto y = p.add_variable("y", 0, kInfinity, 0);
  p.add_row("r", {{x, 1}, {y, -1}}, RowSense::LessEqual, 1);
  EXPECT_EQ(solver_with(GetParam()).solve(p).status, Status::Unbounded);
}

// Degenerate at the origin: the first pivots make no progress.
TEST_P(BothRules, DegenerateCyclingExample) {
  LinearProgram<double> p;
  const auto x4 = p.add_variable("x4", 0, kInfinity, -0.75);
  const auto x5 = p.add_variable("x5", 0, kInfinity, 20);
  const auto x6 = p.add_variable("x6", 0, kInfinity, -0.5);
  const auto x7 = p.add_variable("x7", 0, kInfinity, 6);
  p.add_row("r1", {{x4, 0.25}, {x5, -8}, {x6, -1}, {x7, 9}}, RowSense::LessEqual, 0);
  p.add_row("r2", {{x4, 0.5}, {x5, -12}, {x6, -0.5}, {x7, 3}}, RowSense::LessEqual, 0);
  p.add_row("r3", {{x6, 1}}, RowSense::LessEqual, 1);
  const auto r = solver_with(GetParam()).solve(p);
  ASSERT_EQ(r.status, Status::Optimal);
  EXPECT_NEAR(r.objective, -1.25, 1e-9);
}

TEST_P(BothRules, RandomProgramsAgree) {
  Rng rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    LinearProgram<double> p;
    const int n = 2 + static_cast<int>(rng.below(6));
    const int m = 1 + static_cast<int>(rng.below(6));
    for (int j = 0; j < n; ++j) p.add_variable("v" + std::to_string(j), 0, rng.uniform(1, 5), rng.uniform(-3, 3));
    for (int i = 0; i < m; ++i) {
      std::vector<std::pair<lp::Index, double>> terms;
      for (int j = 0; j < n; ++j) terms.emplace_back(j, rng.uniform(-2, 2));
      const auto sense = rng.coin() ? RowSense::LessEqual : RowSense::GreaterEqual;
      p.add_row("r" + std::to_string(i), terms, sense, rng.uniform(-1, 3));
    }
    const auto a = solver_with(GetParam()).solve(p);
    const auto b = solver_with(GetParam() == PivotRule::Bland ? PivotRule::Dantzig : PivotRule::Bland).solve(p);
    ASSERT_EQ(a.status, b.status);
    if (a.status == Status::Optimal) {
      EXPECT_NEAR(a.objective, b.objective, 1e-7);
      EXPECT_FALSE(p.first_violation(a.values, 1e-7));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Simplex, BothRules, ::testing::Values(PivotRule::Bland, PivotRule::Dantzig),
                         [](const auto& info) {
                           return std::string(info.param == PivotRule::Bland ? "Bland" : "Dantzig");
                         });

TEST(Simplex, IterationCap) {
  LinearProgram<double> p;
  const auto x = p.add_variable("x", 0, kInfinity, -3);
  const auto y = p.add_variable("y", 0, kInfinity, -5);
  p.add_row("a", {{x, 1}}, RowSense::LessEqual, 4);
  p.add_row("b", {{y, 2}}, RowSense::LessEqual, 12);
  p.add_row("c", {{x, 3}, {y, 2}}, RowSense::LessEqual, 18);
  SimplexSolver<double>::Options o;
  o.iteration_cap = 1;
  EXPECT_EQ(SimplexSolver<double>(o).solve(p).status, Status::IterationLimit);
}

TaskGraph single(std::vector<Time> p, std::vector<TypeIndex> forbidden = {}) {
  TaskGraph g(p.size());
  g.add_task(Task(0, std::move(p), std::move(forbidden)));
  return g;
}

TEST(BuildHlp, SingleTaskShape) {
  const RelaxationModel m = build_hlp(single({2, 4}), Platform({1, 1}));
  EXPECT_EQ(m.program.variables(), 3);
  EXPECT_EQ(m.program.rows(), 4);
}

TEST(BuildHlp, ForbiddenGpuFixesCpuFraction) {
  const Instance in = gen_hlp_adversary(3);
  const RelaxationModel m = build_hlp(in.graph, in.platform);
  const auto a = m.x_vars[in.graph.index_of(14)];
  EXPECT_EQ(m.program.lower(a), 1.0);
  EXPECT_EQ(m.program.upper(a), 1.0);
}

TEST(BuildHlp, EmptyGraph) {
  const RelaxationModel m = build_hlp(TaskGraph(2), Platform({2, 2}));
  EXPECT_EQ(m.program.variables(), 1);
  EXPECT_DOUBLE_EQ(solve_lp(m).objective, 0.0);
}

TEST(BuildHlp, ArityMismatch) {
  try {
    build_hlp(single({1, 1, 1}), Platform({1, 1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ArityMismatch);
  }
}

TEST(SolveLp, SmallExamples) {
  EXPECT_NEAR(solve_lp(build_hlp(single({4, 1}), Platform({1, 1}))).objective, 1, 1e-9);
  EXPECT_NEAR(solve_lp(build_hlp(single({2, 1}), Platform({1, 1}))).objective, 1, 1e-9);
  TaskGraph two(2);
  two.add_task(Task(0, {2, 2}));
  two.add_task(Task(1, {2, 2}));
  EXPECT_NEAR(solve_lp(build_hlp(two, Platform({1, 1}))).objective, 2, 1e-9);
}

TEST(SolveLp, AdversaryOptimum) {
  const Instance in = gen_hlp_adversary(3);
  const LpSolution sol = solve_lp(build_hlp(in.graph, in.platform));
  EXPECT_NEAR(sol.objective, 10.5, 1e-6);
  EXPECT_DOUBLE_EQ(sol.x(14, kCpu), 1.0);
}

TEST(SolveLp, MatchesVertexOracle) {
  Rng rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const TaskGraph g = testing::random_dag(rng, 1 + rng.below(6), rng.uniform01());
    const Platform pf({1 + rng.below(4), 1 + rng.below(3)});
    const double oracle = testing::relaxation_by_vertices(g, pf);
    EXPECT_NEAR(solve_lp(build_hlp(g, pf)).objective, oracle, 1e-6) << "trial " << trial;
  }
}


LpSolution two_type_solution(std::vector<double> cpu) {
  LpSolution s;
  s.status = Status::Optimal;
  s.x.resize(static_cast<Eigen::Index>(cpu.size()), 2);
  for (std::size_t j = 0; j < cpu.size(); ++j) {
    s.x(static_cast<Eigen::Index>(j), 0) = cpu[j];
    s.x(static_cast<Eigen::Index>(j), 1) = 1 - cpu[j];
  }
  return s;
}

TEST(RoundAllocation, TwoTypeThreshold) {
  TaskGraph g(2);
  for (TaskId id = 0; id < 3; ++id) g.add_task(Task(id, {1, 1}));
  const Allocation a = round_allocation(two_type_solution({0.5, 0.49, 1.0}), g);
  EXPECT_EQ(a.type_of, (std::vector<TypeIndex>{kCpu, kGpu, kCpu}));
}

TEST(RoundAllocation, NeverPicksForbiddenType) {
  TaskGraph g(2);
  g.add_task(Task(0, {1, 1}, {kCpu}));
  EXPECT_EQ(round_allocation(two_type_solution({0.9}), g)[0], kGpu);
}

TEST(RoundAllocation, ArgmaxTiesGoToFasterType) {
  TaskGraph g(3);
  g.add_task(Task(0, {5, 3, 9}));
  g.add_task(Task(1, {4, 4, 1}));
  g.add_task(Task(2, {1, 1, 1}));
  LpSolution s;
  s.x.resize(3, 3);
  s.x << 0.4, 0.4, 0.2,  //
      0.5, 0.5, 0.0,     //
      0.2, 0.4, 0.4;
  EXPECT_EQ(round_allocation(s, g).type_of, (std::vector<TypeIndex>{1, 0, 1}));
}

Eigen::VectorXd feasible_cpu(double eps) {
  Eigen::VectorXd x(15);
  for (int i = 0; i < 7; ++i) x[i] = 0.5;
  for (int i = 7; i < 14; ++i) x[i] = 0.5 - eps;
  x[14] = 1;
  return x;
}

Eigen::VectorXd feasible_completion(double eps) {
  Eigen::VectorXd c(15);
  for (int i = 0; i < 7; ++i) c[i] = 3;
  for (int i = 7; i < 14; ++i) c[i] = 6 + 4 * eps;
  c[14] = 10.5;
  return c;
}

TEST(InjectSolution, AcceptsFeasibleValues) {
  const Instance in = gen_hlp_adversary(3);
  const LpSolution s =
      inject_solution(in.graph, in.platform, feasible_cpu(1e-4), feasible_completion(1e-4), 10.5);
  EXPECT_EQ(s.objective, 10.5);
  EXPECT_EQ(s.x(7, kCpu), 0.5 - 1e-4);
}

TEST(InjectSolution, RejectsLambdaBelowLoad) {
  const Instance in = gen_hlp_adversary(3);
  try {
    inject_solution(in.graph, in.platform, feasible_cpu(1e-4), feasible_completion(1e-4), 10.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasibleInjection);
    EXPECT_NE(std::string(e.what()).find("horizon_14"), std::string::npos) << e.what();
  }
}

TEST(InjectSolution, AllZeroGraph) {
  TaskGraph g(2);
  g.add_task(Task(0, {0, 0}));
  const Eigen::VectorXd cpu = Eigen::VectorXd::Constant(1, 1.0);
  const Eigen::VectorXd completion = Eigen::VectorXd::Zero(1);
  const LpSolution s = inject_solution(g, Platform({1, 1}), cpu, completion, 0.0);
  EXPECT_EQ(s.objective, 0.0);
}

TEST(Qhlp, AssignmentRowsHold) {
  const TaskGraph g = gen_forkjoin({2, 20, 9, 3});
  const Platform pf({16, 2, 1});
  const LpSolution s = solve_lp(build_hlp(g, pf));
  for (Eigen::Index j = 0; j < s.x.rows(); ++j) EXPECT_NEAR(s.x.row(j).sum(), 1.0, 1e-7);
  EXPECT_GE(s.objective, critical_path_min(g) - 1e-7);
  const Allocation a = round_allocation(s, g);
  EXPECT_NO_THROW(check_allocation(g, pf, a));
}

TEST(LpFormat, ContainsAllSections) {
  std::ostringstream out;
  write_lp_format(out, build_hlp(gen_hlp_adversary(3).graph, Platform({3, 3})).program);
  const std::string text = out.str();
  for (const char* part : {"Minimize", "lambda", "Subject To", "prec_0_7:", "load_1:", "Bounds", "End"}) {
    EXPECT_NE(text.find(part), std::string::npos) << part;
  }
}

TEST(LowerBoundProperty, LambdaBetweenPathAndEverySchedule) {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const TaskGraph g = testing::random_dag(rng, 2 + rng.below(25), rng.uniform(0, 0.4));
    const Platform pf({1 + rng.below(6), 1 + rng.below(3)});
    const double lambda = solve_lp(build_hlp(g, pf)).objective;
    double max_min = 0;
    for (const Task& t : g.tasks()) max_min = std::max(max_min, t.min_time());
    EXPECT_GE(lambda, critical_path_min(g) - 1e-7);
    EXPECT_GE(lambda, max_min - 1e-7);
    for (const std::string& algo : algorithm_names()) {
      const Schedule s = run_algorithm(algo, g, pf, 3);
      EXPECT_LE(lambda, makespan(s) * (1 + 1e-9)) << algo;
    }
  }
}

}  // namespace
}  // namespace hybrid
