#pragma once

// Dense bounded-variable primal simplex.
//
// Problem form:   minimize  c'x
//                 subject to  a_i'x  (<=, >=, =)  b_i
//                             lower <= x <= upper
//
// Every row i gets a logical variable r_i with a_i'x + r_i = b_i, bounded
// by [0, inf) for <=, (-inf, 0] for >= and [0, 0] for = rows. The solver
// keeps the compact tableau T = B^-1 N (basic rows x nonbasic columns) and
// starts from the all-logical basis. Phase 1 minimizes the sum of bound
// violations of basic variables; phase 2 minimizes c'x.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hybrid::lp {

using Index = Eigen::Index;

enum class RowSense { LessEqual, GreaterEqual, Equal };

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

/// Pricing rule for the entering variable. Bland picks the lowest-index
/// improving column; Dantzig the steepest reduced cost, falling back to
/// Bland after a run of degenerate pivots.
enum class PivotRule { Bland, Dantzig };

template <typename Scalar = double>
class LinearProgram {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  struct Row {
    std::string name;
    std::vector<std::pair<Index, Scalar>> terms;
    RowSense sense = RowSense::LessEqual;
    Scalar rhs = 0;
  };

  static constexpr Scalar infinity() { return std::numeric_limits<Scalar>::infinity(); }

  Index add_variable(std::string name, Scalar lower, Scalar upper, Scalar cost = 0) {
    names_.push_back(std::move(name));
    lower_.push_back(lower);
    upper_.push_back(upper);
    cost_.push_back(cost);
    start_upper_.push_back(false);
    return static_cast<Index>(names_.size()) - 1;
  }

  Index add_row(std::string name, std::vector<std::pair<Index, Scalar>> terms, RowSense sense,
                Scalar rhs) {
    rows_.push_back(Row{std::move(name), std::move(terms), sense, rhs});
    return static_cast<Index>(rows_.size()) - 1;
  }

  void set_bounds(Index var, Scalar lower, Scalar upper) {
    lower_[static_cast<std::size_t>(var)] = lower;
    upper_[static_cast<std::size_t>(var)] = upper;
  }

  void set_cost(Index var, Scalar cost) { cost_[static_cast<std::size_t>(var)] = cost; }

  /// Start `var` nonbasic at its upper bound instead of its lower bound.
  void start_at_upper(Index var, bool at_upper = true) {
    start_upper_[static_cast<std::size_t>(var)] = at_upper;
  }
  bool starts_at_upper(Index var) const { return start_upper_[static_cast<std::size_t>(var)]; }

  Index variables() const { return static_cast<Index>(names_.size()); }
  Index rows() const { return static_cast<Index>(rows_.size()); }

  const Row& row(Index i) const { return rows_[static_cast<std::size_t>(i)]; }
  const std::vector<Row>& all_rows() const { return rows_; }
  const std::string& variable_name(Index j) const { return names_[static_cast<std::size_t>(j)]; }
  Scalar lower(Index j) const { return lower_[static_cast<std::size_t>(j)]; }
  Scalar upper(Index j) const { return upper_[static_cast<std::size_t>(j)]; }
  Scalar cost(Index j) const { return cost_[static_cast<std::size_t>(j)]; }

  Matrix dense_constraints() const {
    Matrix a = Matrix::Zero(rows(), variables());
    for (Index i = 0; i < rows(); ++i) {
      for (const auto& [j, coeff] : row(i).terms) a(i, j) += coeff;
    }
    return a;
  }

  Vector dense_rhs() const {
    Vector b(rows());
    for (Index i = 0; i < rows(); ++i) b(i) = row(i).rhs;
    return b;
  }

  Vector dense_cost() const {
    Vector c(variables());
    for (Index j = 0; j < variables(); ++j) c(j) = cost(j);
    return c;
  }

  Scalar row_activity(Index i, const Vector& x) const {
    Scalar sum = 0;
    for (const auto& [j, coeff] : row(i).terms) sum += coeff * x(j);
    return sum;
  }

  Scalar objective_value(const Vector& x) const { return dense_cost().dot(x); }

  /// Name of the first bound or row violated by more than `tol`, if any.
  std::optional<std::string> first_violation(const Vector& x, Scalar tol) const {
    for (Index j = 0; j < variables(); ++j) {
      if (x(j) < lower(j) - tol || x(j) > upper(j) + tol) return "bounds of " + variable_name(j);
    }
    for (Index i = 0; i < rows(); ++i) {
      const Scalar lhs = row_activity(i, x);
      const Scalar rhs = row(i).rhs;
      const bool ok = row(i).sense == RowSense::LessEqual      ? lhs <= rhs + tol
                      : row(i).sense == RowSense::GreaterEqual ? lhs >= rhs - tol
                                                               : std::abs(lhs - rhs) <= tol;
      if (!ok) return row(i).name;
    }
    return std::nullopt;
  }

 private:
  std::vector<std::string> names_;
  std::vector<Scalar> lower_;
  std::vector<Scalar> upper_;
  std::vector<Scalar> cost_;
  std::vector<bool> start_upper_;
  std::vector<Row> rows_;
};

template <typename Scalar = double>
struct Result {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Status status = Status::Infeasible;
  Vector values;
  Scalar objective = 0;
  Index iterations = 0;
};

template <typename Scalar = double>
class SimplexSolver {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  struct Options {
    Scalar feasibility_tol = Scalar(1e-7);
    Scalar optimality_tol = Scalar(1e-9);
    Scalar pivot_tol = Scalar(1e-9);
    Index iteration_cap = 0;  // 0 selects 50 * (rows + columns)
    PivotRule rule = PivotRule::Dantzig;
    Index degenerate_run = 50;  // Dantzig: degenerate pivots before Bland takes over
  };

  SimplexSolver() = default;
  explicit SimplexSolver(Options options) : options_(options) {}

  const Options& options() const { return options_; }

  Result<Scalar> solve(const LinearProgram<Scalar>& lp) const {
    Tableau t(lp, options_);
    return t.run();
  }

 private:
  Options options_;

  class Tableau {
   public:
    Tableau(const LinearProgram<Scalar>& lp, const Options& opt)
        : opt_(opt), m_(lp.rows()), n_(lp.variables()) {
      const Index total = n_ + m_;
      lower_.resize(total);
      upper_.resize(total);
      cost_ = Vector::Zero(total);
      value_ = Vector::Zero(total);
      constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
      for (Index j = 0; j < n_; ++j) {
        lower_(j) = lp.lower(j);
        upper_(j) = lp.upper(j);
        cost_(j) = lp.cost(j);
        if (lp.starts_at_upper(j) && std::isfinite(upper_(j))) {
          value_(j) = upper_(j);
        } else {
          value_(j) = std::isfinite(lower_(j)) ? lower_(j) : std::isfinite(upper_(j)) ? upper_(j) : 0;
        }
      }
      for (Index i = 0; i < m_; ++i) {
        switch (lp.row(i).sense) {
          case RowSense::LessEqual: lower_(n_ + i) = 0; upper_(n_ + i) = inf; break;
          case RowSense::GreaterEqual: lower_(n_ + i) = -inf; upper_(n_ + i) = 0; break;
          case RowSense::Equal: lower_(n_ + i) = 0; upper_(n_ + i) = 0; break;
        }
      }
      tab_ = lp.dense_constraints();
      const Vector x = value_.head(n_);
      beta_ = lp.dense_rhs() - tab_ * x;
      basic_.resize(static_cast<std::size_t>(m_));
      nonbasic_.resize(static_cast<std::size_t>(n_));
      for (Index i = 0; i < m_; ++i) basic_[static_cast<std::size_t>(i)] = n_ + i;
      for (Index j = 0; j < n_; ++j) nonbasic_[static_cast<std::size_t>(j)] = j;
      cap_ = opt.iteration_cap > 0 ? opt.iteration_cap : 50 * (m_ + n_);
    }

    Result<Scalar> run() {
      Result<Scalar> result;
      Status status = iterate(/*phase_one=*/true);
      if (status == Status::Optimal) status = iterate(/*phase_one=*/false);
      result.status = status;
      result.iterations = iterations_;
      result.values = Vector::Zero(n_);
      for (Index j = 0; j < n_; ++j) result.values(j) = value_(j);
      for (Index i = 0; i < m_; ++i) {
        const Index var = basic_[static_cast<std::size_t>(i)];
        if (var < n_) result.values(var) = beta_(i);
      }
      result.objective = cost_.head(n_).dot(result.values);
      return result;
    }

   private:
    const Options& opt_;
    Index m_;
    Index n_;
    Vector lower_, upper_, cost_;
    using RowMajor = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    Vector value_;  // authoritative for nonbasic variables
    RowMajor tab_;  // m x n, B^-1 N
    Vector beta_;   // basic values
    std::vector<Index> basic_;
    std::vector<Index> nonbasic_;
    Index iterations_ = 0;
    Index cap_ = 0;

    std::size_t idx(Index i) const { return static_cast<std::size_t>(i); }

    Scalar infeasibility(Index row) const {
      const Index var = basic_[idx(row)];
      const Scalar v = beta_(row);
      if (v < lower_(var) - opt_.feasibility_tol) return lower_(var) - v;
      if (v > upper_(var) + opt_.feasibility_tol) return v - upper_(var);
      return 0;
    }

    // Phase-1 gradient of the sum of infeasibilities w.r.t. each basic value.
    Vector phase_one_costs() const {
      Vector c = Vector::Zero(m_);
      for (Index i = 0; i < m_; ++i) {
        const Index var = basic_[idx(i)];
        if (beta_(i) < lower_(var) - opt_.feasibility_tol) c(i) = -1;
        else if (beta_(i) > upper_(var) + opt_.feasibility_tol) c(i) = 1;
      }
      return c;
    }

    bool any_infeasible() const {
      for (Index i = 0; i < m_; ++i) {
        if (infeasibility(i) > 0) return true;
      }
      return false;
    }

    // +1 if column k may increase, -1 if it may decrease, 0 if ineligible.
    int direction(Index k, Scalar d) const {
      const Index var = nonbasic_[idx(k)];
      if (lower_(var) == upper_(var)) return 0;
      const Scalar v = value_(var);
      if (d < -opt_.optimality_tol && v < upper_(var)) return 1;
      if (d > opt_.optimality_tol && v > lower_(var)) return -1;
      return 0;
    }

    Status iterate(bool phase_one) {
      Index degenerate = 0;
      for (;;) {
        if (phase_one && !any_infeasible()) return Status::Optimal;
        if (iterations_ >= cap_) return Status::IterationLimit;

        const Vector reduced = reduced_costs(phase_one);

        const bool bland = opt_.rule == PivotRule::Bland || degenerate >= opt_.degenerate_run;
        Index enter = -1;
        int dir = 0;
        Scalar best = 0;
        for (Index k = 0; k < n_; ++k) {
          const int d = direction(k, reduced(k));
          if (d == 0) continue;
          if (bland) {
            if (enter < 0 || nonbasic_[idx(k)] < nonbasic_[idx(enter)]) {
              enter = k;
              dir = d;
            }
          } else if (std::abs(reduced(k)) > best) {
            best = std::abs(reduced(k));
            enter = k;
            dir = d;
          }
        }
        if (enter < 0) return phase_one ? Status::Infeasible : Status::Optimal;

        const Index enter_var = nonbasic_[idx(enter)];
        const Vector alpha = tab_.col(enter) * Scalar(dir);

        // Ratio test. `leave_at_upper` records which bound the leaving
        // variable lands on.
        Scalar theta = std::numeric_limits<Scalar>::infinity();
        Index leave = -1;
        bool leave_at_upper = false;
        for (Index i = 0; i < m_; ++i) {
          const Scalar a = alpha(i);
          if (std::abs(a) <= opt_.pivot_tol) continue;
          const Index var = basic_[idx(i)];
          const Scalar v = beta_(i);
          const bool below = v < lower_(var) - opt_.feasibility_tol;
          const bool above = v > upper_(var) + opt_.feasibility_tol;
          Scalar limit = std::numeric_limits<Scalar>::infinity();
          bool at_upper = false;
          if (a > 0) {  // basic value decreases
            if (phase_one && below) continue;
            if (phase_one && above) {
              limit = (v - upper_(var)) / a;
              at_upper = true;
            } else if (std::isfinite(lower_(var))) {
              limit = (v - lower_(var)) / a;
            } else {
              continue;
            }
          } else {  // basic value increases
            if (phase_one && above) continue;
            if (phase_one && below) {
              limit = (lower_(var) - v) / -a;
            } else if (std::isfinite(upper_(var))) {
              limit = (upper_(var) - v) / -a;
              at_upper = true;
            } else {
              continue;
            }
          }
          limit = std::max(limit, Scalar(0));
          bool take = false;
          if (leave < 0 || limit < theta) {
            take = true;
          } else if (limit == theta) {
            take = bland ? var < basic_[idx(leave)]
                         : std::abs(a) > std::abs(alpha(leave));
          }
          if (take) {
            theta = limit;
            leave = i;
            leave_at_upper = at_upper;
          }
        }

        const Scalar span = upper_(enter_var) - lower_(enter_var);
        ++iterations_;
        if (std::isfinite(span) && span <= theta) {
          // Bound flip: entering variable crosses its whole range.
          value_(enter_var) = dir > 0 ? upper_(enter_var) : lower_(enter_var);
          beta_ -= alpha * span;
          degenerate = 0;
          continue;
        }
        if (leave < 0) return phase_one ? Status::Infeasible : Status::Unbounded;

        degenerate = theta == 0 ? degenerate + 1 : 0;
        beta_ -= alpha * theta;
        const Scalar entering_value = value_(enter_var) + Scalar(dir) * theta;
        const Index leave_var = basic_[idx(leave)];
        value_(leave_var) = leave_at_upper ? upper_(leave_var) : lower_(leave_var);
        pivot(leave, enter);
        beta_(leave) = entering_value;
        basic_[idx(leave)] = enter_var;
        nonbasic_[idx(enter)] = leave_var;
      }
    }

    // d_N = c_N - T' c_B, where only rows with a nonzero basic cost
    // contribute (phase 1: infeasible rows; phase 2: rows of costed basics).
    Vector reduced_costs(bool phase_one) const {
      Vector d(n_);
      if (phase_one) {
        d.setZero();
      } else {
        for (Index k = 0; k < n_; ++k) d(k) = cost_(nonbasic_[idx(k)]);
      }
      const Vector cb = phase_one ? phase_one_costs() : basic_costs();
      for (Index i = 0; i < m_; ++i) {
        if (cb(i) != 0) d -= cb(i) * tab_.row(i).transpose();
      }
      return d;
    }

    Vector basic_costs() const {
      Vector cb(m_);
      for (Index i = 0; i < m_; ++i) cb(i) = cost_(basic_[idx(i)]);
      return cb;
    }

    // Exchange basic row r with nonbasic column k in T = B^-1 N. The rank-1
    // update only touches rows where the pivot column is nonzero, and within
    // a row only the pivot row's nonzero columns when that row is sparse.
    void pivot(Index r, Index k) {
      const Scalar p = tab_(r, k);
      Vector col = tab_.col(k);
      Eigen::Matrix<Scalar, 1, Eigen::Dynamic> row = tab_.row(r) / p;
      row(k) = Scalar(1) / p;
      col(r) = 0;
      tab_.col(k).setZero();

      nz_cols_.clear();
      for (Index j = 0; j < n_; ++j) {
        if (row(j) != 0) nz_cols_.push_back(j);
      }
      const bool sparse_row = static_cast<Index>(nz_cols_.size()) * 4 < n_;
      for (Index i = 0; i < m_; ++i) {
        const Scalar f = col(i);
        if (f == 0) continue;
        if (sparse_row) {
          for (Index j : nz_cols_) tab_(i, j) -= f * row(j);
        } else {
          tab_.row(i) -= f * row;
        }
      }
      tab_.row(r) = row;
    }

    std::vector<Index> nz_cols_;
  };
};

}  // namespace hybrid::lp
