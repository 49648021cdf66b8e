#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

#include "hybrid/schedule.hpp"
#include "hybrid/simplex.hpp"
#include "hybrid/task_graph.hpp"

namespace hybrid {

/// Linear relaxation of the allocation problem: minimize the larger of the
/// critical path and the per-type average loads over fractional allocations.
///
/// With two types each task has a single variable x_j (fraction on the CPU
/// side, 1 - x_j on the GPU side). With Q >= 3 types each task has x_{j,q}
/// plus an assignment row sum_q x_{j,q} = 1. Forbidden (task, type) pairs
/// are removed by fixing the variable bounds.
struct RelaxationModel {
  lp::LinearProgram<double> program;
  Platform platform;
  bool two_type = true;
  Eigen::MatrixXd times;                    // tasks x types, 0 where forbidden
  std::vector<std::vector<bool>> allowed;   // tasks x types
  std::vector<lp::Index> x_vars;            // two_type: one per task; else task * Q + q
  std::vector<lp::Index> completion_vars;   // one per task
  lp::Index lambda_var = 0;

  std::size_t tasks() const { return completion_vars.size(); }
  std::size_t types() const { return platform.types(); }

  /// Assemble a full variable vector from per-task fractions and completions.
  Eigen::VectorXd pack(const Eigen::MatrixXd& x, const Eigen::VectorXd& completion,
                       double lambda) const;
};

struct LpSolution {
  lp::Status status = lp::Status::Infeasible;
  Eigen::MatrixXd x;            // tasks x types; rows sum to 1
  Eigen::VectorXd completion;   // C_j per task
  double objective = 0;         // lambda
  lp::Index iterations = 0;
};

/// Solver seam so large instances can be routed to an external LP code.
class LpBackend {
 public:
  virtual ~LpBackend() = default;
  virtual lp::Result<double> solve(const lp::LinearProgram<double>& program) const = 0;
};

class BundledSimplex final : public LpBackend {
 public:
  BundledSimplex() = default;
  explicit BundledSimplex(lp::SimplexSolver<double>::Options options) : solver_(options) {}
  lp::Result<double> solve(const lp::LinearProgram<double>& program) const override {
    return solver_.solve(program);
  }

 private:
  lp::SimplexSolver<double> solver_;
};

/// Default backend used by solve_lp.
const LpBackend& default_backend();

RelaxationModel build_hlp(const TaskGraph& g, const Platform& platform);

/// Throws Infeasible, Unbounded or IterationLimit if the backend does not
/// reach an optimum.
LpSolution solve_lp(const RelaxationModel& model, const LpBackend& backend = default_backend());

/// Q = 2: CPU iff x_j >= 1/2. Q >= 3: argmax_q x_{j,q}, ties broken by the
/// smaller processing time, then by the lower type index.
Allocation round_allocation(const LpSolution& sol, const TaskGraph& g);

/// Wraps caller-provided values as a solution after checking every bound
/// and row of the model within 1e-7. Throws InfeasibleInjection naming the
/// first violated row.
LpSolution inject_solution(const TaskGraph& g, const Platform& platform, const Eigen::MatrixXd& x,
                           const Eigen::VectorXd& completion, double lambda);

/// Two-type convenience overload: `cpu_fraction` holds x_j per task.
LpSolution inject_solution(const TaskGraph& g, const Platform& platform,
                           const Eigen::VectorXd& cpu_fraction, const Eigen::VectorXd& completion,
                           double lambda);

/// CPLEX LP text rendering of a program.
void write_lp_format(std::ostream& out, const lp::LinearProgram<double>& program);

}  // namespace hybrid
