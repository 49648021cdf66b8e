#include "hybrid/relaxation.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "number_format.hpp"

namespace hybrid {

namespace {

constexpr double kInjectionTolerance = 1e-7;
constexpr double kRoundingTolerance = 1e-9;

std::string id_str(const TaskGraph& g, std::size_t v) { return std::to_string(g.task(v).id); }

using Terms = std::vector<std::pair<lp::Index, double>>;

}  // namespace

const LpBackend& default_backend() {
  static const BundledSimplex backend;
  return backend;
}

Eigen::VectorXd RelaxationModel::pack(const Eigen::MatrixXd& x, const Eigen::VectorXd& completion,
                                      double lambda) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(program.variables());
  for (std::size_t j = 0; j < tasks(); ++j) {
    const auto row = static_cast<Eigen::Index>(j);
    if (two_type) {
      v(x_vars[j]) = x(row, 0);
    } else {
      for (std::size_t q = 0; q < types(); ++q) {
        v(x_vars[j * types() + q]) = x(row, static_cast<Eigen::Index>(q));
      }
    }
    v(completion_vars[j]) = completion(row);
  }
  v(lambda_var) = lambda;
  return v;
}

RelaxationModel build_hlp(const TaskGraph& g, const Platform& platform) {
  if (g.type_count() != platform.types()) {
    throw Error(ErrorCode::ArityMismatch, "graph has " + std::to_string(g.type_count()) +
                                              " types, platform has " +
                                              std::to_string(platform.types()));
  }
  const std::size_t n = g.size();
  const std::size_t types = platform.types();
  constexpr double inf = lp::LinearProgram<double>::infinity();

  RelaxationModel model;
  model.platform = platform;
  model.two_type = types == 2;
  model.times = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(types));
  model.allowed.assign(n, std::vector<bool>(types, false));
  for (std::size_t j = 0; j < n; ++j) {
    const Task& t = g.task(j);
    if (t.arity() != types) {
      throw Error(ErrorCode::ArityMismatch, "task " + std::to_string(t.id));
    }
    for (std::size_t q = 0; q < types; ++q) {
      model.allowed[j][q] = t.allows(q);
      if (t.allows(q)) {
        model.times(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(q)) = t.proc_times[q];
      }
    }
  }
  auto& lp = model.program;

  // Variables.
  for (std::size_t j = 0; j < n; ++j) {
    if (model.two_type) {
      double lo = 0;
      double hi = 1;
      if (!model.allowed[j][kGpu]) lo = 1;
      if (!model.allowed[j][kCpu]) hi = 0;
      model.x_vars.push_back(lp.add_variable("x_" + id_str(g, j), lo, hi));
    } else {
      for (std::size_t q = 0; q < types; ++q) {
        const double hi = model.allowed[j][q] ? 1.0 : 0.0;
        model.x_vars.push_back(
            lp.add_variable("x_" + id_str(g, j) + "_" + std::to_string(q), 0, hi));
      }
    }
  }
  // Start every task on its fastest allowed type.
  for (std::size_t j = 0; j < n; ++j) {
    const TypeIndex fastest = g.task(j).fastest_type();
    if (model.two_type) {
      lp.start_at_upper(model.x_vars[j], fastest == kCpu);
    } else {
      lp.start_at_upper(model.x_vars[j * types + fastest]);
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    model.completion_vars.push_back(lp.add_variable("C_" + id_str(g, j), 0, inf));
  }
  model.lambda_var = lp.add_variable("lambda", 0, inf, 1.0);

  // Processing time of task j as (terms over x, constant).
  auto duration = [&](std::size_t j) -> std::pair<Terms, double> {
    const auto row = static_cast<Eigen::Index>(j);
    if (model.two_type) {
      const double cpu = model.times(row, 0);
      const double gpu = model.times(row, 1);
      return {{{model.x_vars[j], cpu - gpu}}, gpu};
    }
    Terms terms;
    for (std::size_t q = 0; q < types; ++q) {
      const double p = model.times(row, static_cast<Eigen::Index>(q));
      if (model.allowed[j][q] && p != 0) terms.emplace_back(model.x_vars[j * types + q], p);
    }
    return {terms, 0.0};
  };

  // Precedence and release rows.
  for (std::size_t j = 0; j < n; ++j) {
    auto [terms, constant] = duration(j);
    const auto preds = g.predecessors(j);
    if (preds.empty()) {
      Terms row = terms;
      row.emplace_back(model.completion_vars[j], -1.0);
      lp.add_row("src_" + id_str(g, j), row, lp::RowSense::LessEqual, -constant);
    }
    for (std::size_t i : preds) {
      Terms row = terms;
      row.emplace_back(model.completion_vars[i], 1.0);
      row.emplace_back(model.completion_vars[j], -1.0);
      lp.add_row("prec_" + id_str(g, i) + "_" + id_str(g, j), row, lp::RowSense::LessEqual,
                 -constant);
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    lp.add_row("horizon_" + id_str(g, j),
               {{model.completion_vars[j], 1.0}, {model.lambda_var, -1.0}},
               lp::RowSense::LessEqual, 0.0);
  }

  // Average load per type.
  if (n > 0) {
    for (std::size_t q = 0; q < types; ++q) {
      const double machines = static_cast<double>(platform.count(q));
      Terms row;
      double rhs = 0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p = model.times(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(q));
        if (p == 0) continue;
        if (!model.two_type) {
          row.emplace_back(model.x_vars[j * types + q], p / machines);
        } else if (q == kCpu) {
          row.emplace_back(model.x_vars[j], p / machines);
        } else {
          // (1 - x_j) p / k  <=  lambda
          row.emplace_back(model.x_vars[j], -p / machines);
          rhs -= p / machines;
        }
      }
      row.emplace_back(model.lambda_var, -1.0);
      lp.add_row("load_" + std::to_string(q), row, lp::RowSense::LessEqual, rhs);
    }
  }

  if (!model.two_type) {
    for (std::size_t j = 0; j < n; ++j) {
      Terms row;
      for (std::size_t q = 0; q < types; ++q) row.emplace_back(model.x_vars[j * types + q], 1.0);
      lp.add_row("assign_" + id_str(g, j), row, lp::RowSense::Equal, 1.0);
    }
  }
  return model;
}

namespace {

LpSolution unpack(const RelaxationModel& model, const Eigen::VectorXd& values) {
  const auto n = static_cast<Eigen::Index>(model.tasks());
  const auto types = static_cast<Eigen::Index>(model.types());
  LpSolution sol;
  sol.x = Eigen::MatrixXd::Zero(n, types);
  sol.completion = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto task = static_cast<std::size_t>(j);
    if (model.two_type) {
      const double cpu = values(model.x_vars[task]);
      sol.x(j, 0) = cpu;
      sol.x(j, 1) = 1.0 - cpu;
    } else {
      for (Eigen::Index q = 0; q < types; ++q) {
        sol.x(j, q) = values(model.x_vars[task * model.types() + static_cast<std::size_t>(q)]);
      }
    }
    sol.completion(j) = values(model.completion_vars[task]);
  }
  sol.objective = values(model.lambda_var);
  return sol;
}

}  // namespace

LpSolution solve_lp(const RelaxationModel& model, const LpBackend& backend) {
  const lp::Result<double> result = backend.solve(model.program);
  switch (result.status) {
    case lp::Status::Optimal: break;
    case lp::Status::Infeasible:
      throw Error(ErrorCode::Infeasible, "relaxation reported infeasible");
    case lp::Status::Unbounded:
      throw Error(ErrorCode::Unbounded, "relaxation reported unbounded");
    case lp::Status::IterationLimit:
      throw Error(ErrorCode::IterationLimit,
                  "simplex stopped after " + std::to_string(result.iterations) + " iterations");
  }
  LpSolution sol = unpack(model, result.values);
  sol.status = result.status;
  sol.objective = result.objective;
  sol.iterations = result.iterations;
  return sol;
}

Allocation round_allocation(const LpSolution& sol, const TaskGraph& g) {
  Allocation alloc;
  alloc.type_of.resize(g.size());
  const Eigen::Index types = sol.x.cols();
  for (std::size_t j = 0; j < g.size(); ++j) {
    const Task& t = g.task(j);
    const auto row = static_cast<Eigen::Index>(j);
    if (types == 2) {
      TypeIndex q = sol.x(row, 0) >= 0.5 - kRoundingTolerance ? kCpu : kGpu;
      if (!t.allows(q)) q = 1 - q;
      alloc.type_of[j] = q;
      continue;
    }
    std::optional<TypeIndex> best;
    for (TypeIndex q = 0; q < static_cast<TypeIndex>(types); ++q) {
      if (!t.allows(q)) continue;
      if (!best) {
        best = q;
        continue;
      }
      const double xq = sol.x(row, static_cast<Eigen::Index>(q));
      const double xb = sol.x(row, static_cast<Eigen::Index>(*best));
      if (xq > xb + kRoundingTolerance) {
        best = q;
      } else if (xq >= xb - kRoundingTolerance && t.proc_times[q] < t.proc_times[*best]) {
        best = q;
      }
    }
    alloc.type_of[j] = *best;
  }
  return alloc;
}

LpSolution inject_solution(const TaskGraph& g, const Platform& platform, const Eigen::MatrixXd& x,
                           const Eigen::VectorXd& completion, double lambda) {
  const RelaxationModel model = build_hlp(g, platform);
  const auto n = static_cast<Eigen::Index>(g.size());
  if (x.rows() != n || x.cols() != static_cast<Eigen::Index>(platform.types()) ||
      completion.size() != n) {
    throw Error(ErrorCode::ArityMismatch, "injected solution has the wrong shape");
  }
  if (model.two_type) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(x(j, 0) + x(j, 1) - 1.0) > kInjectionTolerance) {
        throw Error(ErrorCode::InfeasibleInjection,
                    "x_" + std::to_string(g.task(static_cast<std::size_t>(j)).id) +
                        " fractions do not sum to 1");
      }
    }
  }
  const Eigen::VectorXd values = model.pack(x, completion, lambda);
  if (auto violated = model.program.first_violation(values, kInjectionTolerance)) {
    throw Error(ErrorCode::InfeasibleInjection, "violates " + *violated);
  }
  LpSolution sol = unpack(model, values);
  sol.status = lp::Status::Optimal;
  return sol;
}

LpSolution inject_solution(const TaskGraph& g, const Platform& platform,
                           const Eigen::VectorXd& cpu_fraction, const Eigen::VectorXd& completion,
                           double lambda) {
  if (platform.types() != 2) {
    throw Error(ErrorCode::ArityMismatch, "CPU-fraction injection needs a two-type platform");
  }
  Eigen::MatrixXd x(cpu_fraction.size(), 2);
  x.col(0) = cpu_fraction;
  x.col(1) = Eigen::VectorXd::Ones(cpu_fraction.size()) - cpu_fraction;
  return inject_solution(g, platform, x, completion, lambda);
}

void write_lp_format(std::ostream& out, const lp::LinearProgram<double>& program) {
  using detail::format_number;
  auto write_terms = [&](const std::vector<std::pair<lp::Index, double>>& terms) {
    bool first = true;
    for (const auto& [var, coeff] : terms) {
      if (coeff == 0) continue;
      const bool negative = coeff < 0;
      out << (first ? (negative ? "- " : "") : (negative ? " - " : " + "));
      out << format_number(std::abs(coeff)) << ' ' << program.variable_name(var);
      first = false;
    }
    if (first) out << "0 " << (program.variables() > 0 ? program.variable_name(0) : "x");
  };

  out << "\\ allocation relaxation\nMinimize\n obj: ";
  std::vector<std::pair<lp::Index, double>> objective;
  for (lp::Index j = 0; j < program.variables(); ++j) {
    if (program.cost(j) != 0) objective.emplace_back(j, program.cost(j));
  }
  write_terms(objective);
  out << "\nSubject To\n";
  for (const auto& row : program.all_rows()) {
    out << ' ' << row.name << ": ";
    write_terms(row.terms);
    switch (row.sense) {
      case lp::RowSense::LessEqual: out << " <= "; break;
      case lp::RowSense::GreaterEqual: out << " >= "; break;
      case lp::RowSense::Equal: out << " = "; break;
    }
    out << format_number(row.rhs) << '\n';
  }
  out << "Bounds\n";
  for (lp::Index j = 0; j < program.variables(); ++j) {
    const double lo = program.lower(j);
    const double hi = program.upper(j);
    out << ' ';
    if (lo == hi) {
      out << program.variable_name(j) << " = " << format_number(lo) << '\n';
    } else if (std::isinf(hi)) {
      out << program.variable_name(j) << " >= " << format_number(lo) << '\n';
    } else {
      out << format_number(lo) << " <= " << program.variable_name(j) << " <= " << format_number(hi)
          << '\n';
    }
  }
  out << "End\n";
}

}  // namespace hybrid
