#pragma once

#include <chrono>
#include <limits>
#include <vector>

#include "util/error.hpp"

namespace riskdec::lp {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { Le, Ge, Eq };

struct Row {
  std::vector<double> coeffs;
  Sense sense = Sense::Le;
  double rhs = 0.0;
};

// min objective'x  s.t. rows, lower <= x <= upper. Lower bounds default to 0,
// upper bounds to +inf.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<Row> rows;
  std::vector<double> lower;
  std::vector<double> upper;

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  int add_var(double cost, double lo = 0.0, double up = kInf) {
    objective.push_back(cost);
    lower.push_back(lo);
    upper.push_back(up);
    return num_vars() - 1;
  }

  void add_row(std::vector<double> coeffs, Sense sense, double rhs) {
    rows.push_back(Row{std::move(coeffs), sense, rhs});
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

// Row duals use the convention of a minimization problem: y_i >= 0 on >= rows,
// y_i <= 0 on <= rows, free on equalities, and
//   objective == rhs'y + sum_j reduced_costs[j] * (bound value of nonbasic j).
// farkas_ray is a dual ray certifying infeasibility: sup over the variable box
// of (ray'A)x is strictly below ray'rhs.
struct LpOutcome {
  LpStatus status = LpStatus::Optimal;
  std::vector<double> primal;
  double objective = 0.0;
  std::vector<double> row_duals;
  std::vector<double> reduced_costs;
  std::vector<double> farkas_ray;
  std::vector<double> unbounded_ray;
  int iterations = 0;
};

struct SolverConfig {
  double feas_tol = 1e-9;
  double opt_tol = 1e-7;
  // 0 means "derive from problem size"
  int max_iterations = 0;
  // consecutive degenerate pivots before switching to the least-index rule
  int degeneracy_streak = 40;
  // optional wall-clock deadline; the solve aborts with a TimeLimit error
  bool has_deadline = false;
  std::chrono::steady_clock::time_point deadline{};
};

LpOutcome solve_lp(const LinearProgram& problem, const SolverConfig& config = {});

// Max over the bound box of ray'A x minus ray'rhs; a valid certificate is
// strictly negative. Exposed for tests and cut validation.
double farkas_certificate_gap(const LinearProgram& problem, const std::vector<double>& ray);

}  // namespace riskdec::lp
