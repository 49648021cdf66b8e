#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "hybrid/instances.hpp"
#include "hybrid/io.hpp"
#include "hybrid/schedule.hpp"
#include "hybrid/task_graph.hpp"
#include "support.hpp"

namespace hybrid {
namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

TaskGraph chain(std::vector<std::vector<Time>> times) {
  TaskGraph g(times.front().size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    g.add_task(Task(static_cast<TaskId>(i), times[i]));
    if (i > 0) g.add_edge(static_cast<TaskId>(i - 1), static_cast<TaskId>(i));
  }
  return g;
}

TEST(Task, ForbiddenTypesAreSkipped) {
  const Task t(3, {4.0, 99.0}, {kGpu});
  EXPECT_TRUE(t.allows(kCpu));
  EXPECT_FALSE(t.allows(kGpu));
  EXPECT_EQ(t.min_time(), 4.0);
  EXPECT_EQ(t.fastest_type(), kCpu);
}

TEST(Task, FastestTypeTiesGoToLowerIndex) {
  EXPECT_EQ(Task(0, {2.0, 2.0}).fastest_type(), kCpu);
  EXPECT_EQ(Task(0, {3.0, 1.0, 1.0}).fastest_type(), TypeIndex{1});
}

TEST(Platform, RejectsDegenerateCounts) {
  EXPECT_EQ(code_of([] { Platform({4}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { Platform({4, 0}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(Platform({16, 4}).to_string(), "16,4");
  EXPECT_EQ(Platform({16, 2, 1}).total(), 19u);
}

TEST(ValidateGraph, AcceptsChain) {
  EXPECT_NO_THROW(validate_graph(chain({{1, 1}, {2, 2}}), Platform({1, 1})));
}

TEST(ValidateGraph, ReportsEachDefect) {
  const Platform pf({1, 1});
  {
    TaskGraph g = chain({{1, 1}, {1, 1}});
    g.add_edge(1, 0);
    EXPECT_EQ(code_of([&] { validate_graph(g, pf); }), ErrorCode::CycleDetected);
  }
  {
    TaskGraph g = chain({{1, 1}});
    g.add_edge(0, 7);
    EXPECT_EQ(code_of([&] { validate_graph(g, pf); }), ErrorCode::DanglingEdge);
  }
  {
    TaskGraph g = chain({{1, 1}});
    g.add_task(Task(0, {2, 2}));
    EXPECT_EQ(code_of([&] { validate_graph(g, pf); }), ErrorCode::DuplicateTask);
  }
  {
    TaskGraph g = chain({{1, 1}, {1, 1}});
    g.add_edge(0, 1);
    EXPECT_EQ(code_of([&] { validate_graph(g, pf); }), ErrorCode::DuplicateEdge);
  }
  {
    TaskGraph g(2);
    g.add_task(Task(0, {-1.5, 1}));
    EXPECT_EQ(code_of([&] { validate_graph(g, pf); }), ErrorCode::NegativeTime);
  }
  {
    TaskGraph g(2);
    g.add_task(Task(0, {1, 1, 1}));
    EXPECT_EQ(code_of([&] { validate_graph(g, pf); }), ErrorCode::ArityMismatch);
  }
  {
    TaskGraph g(2);
    g.add_task(Task(0, {1, 1}, {kCpu, kGpu}));
    EXPECT_EQ(code_of([&] { validate_graph(g, pf); }), ErrorCode::AllTypesForbidden);
  }
  {
    TaskGraph g(3);
    g.add_task(Task(0, {1, 1, 1}));
    EXPECT_EQ(code_of([&] { validate_graph(g, pf); }), ErrorCode::ArityMismatch);
  }
}

TEST(ValidateGraph, SelfLoopIsACycle) {
  TaskGraph g = chain({{1, 1}});
  g.add_edge(0, 0);
  EXPECT_EQ(code_of([&] { validate_graph_structure(g); }), ErrorCode::CycleDetected);
}

TEST(TopologicalOrder, ReadyTasksByAscendingId) {
  TaskGraph g(2);
  for (TaskId id : {5, 3, 9, 1}) g.add_task(Task(id, {1, 1}));
  g.add_edge(9, 1);
  EXPECT_EQ(topological_order(g), (std::vector<TaskId>{3, 5, 9, 1}));
}

TEST(TopologicalOrder, RespectsEveryEdgeOnRandomGraphs) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::size_t>(1 + rng.below(30));
    const TaskGraph g = testing::random_dag(rng, n, rng.uniform01());
    const auto order = topological_order(g);
    ASSERT_EQ(order.size(), n);
    std::vector<std::size_t> pos(n);
    for (std::size_t i = 0; i < n; ++i) pos[static_cast<std::size_t>(order[i])] = i;
    EXPECT_EQ(std::set<TaskId>(order.begin(), order.end()).size(), n);
    for (const Edge& e : g.edges()) {
      EXPECT_LT(pos[static_cast<std::size_t>(e.from)], pos[static_cast<std::size_t>(e.to)]);
    }
  }
}

TEST(CriticalPath, UsesMinimumTimes) {
  EXPECT_DOUBLE_EQ(critical_path_min(chain({{2, 1}, {3, 5}})), 4.0);
  TaskGraph g(2);
  g.add_task(Task(0, {7, 0}, {kGpu}));
  g.add_task(Task(1, {1, 1}));
  EXPECT_DOUBLE_EQ(critical_path_min(g), 7.0);
  EXPECT_DOUBLE_EQ(critical_path_min(TaskGraph(2)), 0.0);
}

TEST(Ranks, AllocatedRankIsLongestTail) {
  TaskGraph g(2);
  for (TaskId id = 0; id < 4; ++id) g.add_task(Task(id, {double(id + 1), 10}));
  g.add_edge(0, 1);
  g.add_edge(0, 2);
  g.add_edge(2, 3);
  const Allocation cpu{{kCpu, kCpu, kCpu, kCpu}};
  const RankTable r = compute_rank_alloc(g, cpu);
  EXPECT_DOUBLE_EQ(r[3], 4);
  EXPECT_DOUBLE_EQ(r[2], 7);
  EXPECT_DOUBLE_EQ(r[1], 2);
  EXPECT_DOUBLE_EQ(r[0], 8);
  EXPECT_EQ(priority_order(g, r), (std::vector<std::size_t>{0, 2, 3, 1}));
}

TEST(Ranks, InvariantsOnRandomGraphs) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const TaskGraph g = testing::random_dag(rng, 1 + rng.below(15), 0.3);
    Allocation alloc;
    for (std::size_t v = 0; v < g.size(); ++v) alloc.type_of.push_back(rng.coin() ? kCpu : kGpu);
    const RankTable r = compute_rank_alloc(g, alloc);
    for (const Edge& e : g.edges()) {
      const std::size_t i = g.index_of(e.from);
      const std::size_t j = g.index_of(e.to);
      EXPECT_GE(r[i], g.task(j).time_on(alloc[j]));
      EXPECT_GT(r[i], r[j]);  // all times are positive here
    }
  }
}

TEST(Ranks, AverageRankPenalisesForbiddenTypes) {
  TaskGraph g(2);
  g.add_task(Task(0, {2, 0}, {kGpu}));
  g.add_task(Task(1, {4, 2}));
  const Platform pf({3, 1});
  const RankTable r = compute_rank_avg(g, pf);
  const double penalty = 10 * (2 + 4 + 2);
  EXPECT_DOUBLE_EQ(r[0], (3 * 2 + 1 * penalty) / 4);
  EXPECT_DOUBLE_EQ(r[1], (3 * 4 + 1 * 2) / 4.0);
}

TEST(Allocation, RejectsForbiddenType) {
  TaskGraph g(2);
  g.add_task(Task(0, {1, 1}, {kGpu}));
  EXPECT_EQ(code_of([&] { check_allocation(g, Platform({1, 1}), Allocation{{kGpu}}); }),
            ErrorCode::AllocatesForbiddenType);
}

class ScheduleValidation : public ::testing::Test {
 protected:
  TaskGraph g = chain({{2, 1}, {3, 1}});
  Platform pf{std::vector<std::size_t>{1, 1}};
  Schedule ok{{{0, kCpu, 0, 0, 2}, {1, kCpu, 0, 2, 5}}};
};

TEST_F(ScheduleValidation, AcceptsValidSchedule) {
  EXPECT_NO_THROW(validate_schedule(ok, g, pf));
  EXPECT_DOUBLE_EQ(makespan(ok), 5);
}

TEST_F(ScheduleValidation, ReportsEachDefect) {
  auto with = [&](std::size_t i, auto change) {
    Schedule s = ok;
    change(s.placements[i]);
    return s;
  };
  EXPECT_EQ(code_of([&] { validate_schedule(with(1, [](Placement& p) { p.start = 1; p.finish = 4; }), g, pf); }),
            ErrorCode::PrecedenceViolation);
  EXPECT_EQ(code_of([&] { validate_schedule(with(1, [](Placement& p) { p.finish = 6; }), g, pf); }),
            ErrorCode::WrongDuration);
  EXPECT_EQ(code_of([&] { validate_schedule(with(1, [](Placement& p) { p.machine = 1; }), g, pf); }),
            ErrorCode::MachineOutOfRange);
  EXPECT_EQ(code_of([&] { validate_schedule(with(1, [](Placement& p) { p.type = 2; }), g, pf); }),
            ErrorCode::MachineOutOfRange);
  Schedule missing = ok;
  missing.placements.pop_back();
  EXPECT_EQ(code_of([&] { validate_schedule(missing, g, pf); }), ErrorCode::MissingTask);

  TaskGraph pair(2);
  pair.add_task(Task(0, {2, 2}));
  pair.add_task(Task(1, {2, 2}));
  const Schedule overlap{{{0, kCpu, 0, 0, 2}, {1, kCpu, 0, 1, 3}}};
  EXPECT_EQ(code_of([&] { validate_schedule(overlap, pair, pf); }), ErrorCode::Overlap);
}

TEST(Makespan, Examples) {
  EXPECT_DOUBLE_EQ(makespan(Schedule{{{0, 0, 0, 0, 5}}}), 5);
  EXPECT_DOUBLE_EQ(makespan(Schedule{{{0, 0, 0, 0, 3}, {1, 0, 1, 0, 7}}}), 7);
  EXPECT_EQ(code_of([] { makespan(Schedule{}); }), ErrorCode::EmptySchedule);
}

TEST(GraphIo, RoundTripIsBitExact) {
  for (std::uint64_t seed : {1u, 2u}) {
    const TaskGraph g = gen_forkjoin({2, 20, seed, 3});
    const std::string text = format_graph(g);
    const TaskGraph back = parse_graph(text);
    EXPECT_EQ(back, g);
    EXPECT_EQ(format_graph(back), text);
  }
  const Instance adv = gen_hlp_adversary(3);
  EXPECT_EQ(parse_graph(format_graph(adv.graph)), adv.graph);
  EXPECT_EQ(parse_graph(format_graph(TaskGraph(2))), TaskGraph(2));
}

TEST(GraphIo, MinusOneMeansForbidden) {
  const TaskGraph g = parse_graph(R"({"q": 2, "tasks": [{"id": 4, "p": [2.5, -1]}], "edges": []})");
  EXPECT_FALSE(g.task(0).allows(kGpu));
  EXPECT_EQ(g.task(0).time_on(kCpu), 2.5);
}

TEST(GraphIo, PositionedErrors) {
  try {
    parse_graph("{\"q\": 2,\n \"tasks\": [\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  try {
    parse_graph("{\"q\": 2,\n \"tasks\": [}\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_EQ(code_of([] { parse_graph(R"({"q": 2, "tasks": [{"p": [1, 1]}], "edges": []})"); }),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { read_graph("/nonexistent/graph.json"); }), ErrorCode::IoError);
}

TEST(PlatformText, Parses) {
  EXPECT_EQ(parse_platform("16,4"), Platform({16, 4}));
  EXPECT_EQ(parse_platform("16,2,1"), Platform({16, 2, 1}));
  EXPECT_EQ(code_of([] { parse_platform("16,x"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse_platform("16"); }), ErrorCode::InvalidArgument);
}

TEST(ScheduleIo, CsvAndJsonRoundTrip) {
  const Schedule s{{{0, 1, 0, 0, 0.1 + 0.2}, {7, 0, 3, 0.3, 1e-17 + 2}}};
  EXPECT_EQ(parse_schedule_csv(format_schedule_csv(s)), s);
  EXPECT_EQ(parse_schedule_json(format_schedule_json(s)), s);
  EXPECT_EQ(parse_schedule_csv(format_schedule_csv(Schedule{})), Schedule{});

  const auto dir = std::filesystem::temp_directory_path();
  write_schedule(s, dir / "hybridsched_test.json");
  write_schedule(s, dir / "hybridsched_test.csv");
  EXPECT_EQ(read_schedule(dir / "hybridsched_test.json"), s);
  EXPECT_EQ(read_schedule(dir / "hybridsched_test.csv"), s);
  EXPECT_EQ(code_of([] { parse_schedule_csv("task_id,type,machine,start,finish\n1,0,0,x,1\n"); }),
            ErrorCode::ParseError);
}

}  // namespace
}  // namespace hybrid
