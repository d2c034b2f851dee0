#include "support/oracles.hpp"

#include <cmath>

#include "risk/measures.hpp"

namespace riskdec::testing {

namespace {

bool solve_square(std::vector<std::vector<double>> a, std::vector<double> b,
                  std::vector<double>& x) {
  const int n = static_cast<int>(b.size());
  for (int c = 0; c < n; ++c) {
    int p = -1;
    double best = 1e-11;
    for (int r = c; r < n; ++r)
      if (std::fabs(a[r][c]) > best) {
        best = std::fabs(a[r][c]);
        p = r;
      }
    if (p < 0) return false;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      double f = a[r][c] / a[c][c];
      if (f == 0.0) continue;
      for (int k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  x.resize(n);
  for (int c = 0; c < n; ++c) x[c] = b[c] / a[c][c];
  return true;
}

bool feasible(const lp::LinearProgram& p, const std::vector<double>& x, double tol) {
  const int n = p.num_vars();
  for (int j = 0; j < n; ++j)
    if (x[j] < p.lower[j] - tol || x[j] > p.upper[j] + tol) return false;
  for (const auto& row : p.rows) {
    double act = 0.0;
    for (int j = 0; j < n; ++j) act += row.coeffs[j] * x[j];
    switch (row.sense) {
      case lp::Sense::Le:
        if (act > row.rhs + tol) return false;
        break;
      case lp::Sense::Ge:
        if (act < row.rhs - tol) return false;
        break;
      case lp::Sense::Eq:
        if (std::fabs(act - row.rhs) > tol) return false;
        break;
    }
  }
  return true;
}

}  // namespace

BruteForceResult brute_force_lp(const lp::LinearProgram& p, double feas_tol) {
  const int n = p.num_vars();
  BruteForceResult best;

  // candidate equalities: equality rows are always active
  struct Cand {
    std::vector<double> coeffs;
    double rhs;
    bool mandatory;
  };
  std::vector<Cand> cands;
  for (const auto& row : p.rows)
    cands.push_back({row.coeffs, row.rhs, row.sense == lp::Sense::Eq});
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(p.lower[j])) {
      std::vector<double> e(n, 0.0);
      e[j] = 1.0;
      cands.push_back({e, p.lower[j], false});
    }
    if (std::isfinite(p.upper[j]) && p.upper[j] != p.lower[j]) {
      std::vector<double> e(n, 0.0);
      e[j] = 1.0;
      cands.push_back({e, p.upper[j], false});
    }
  }
  std::vector<int> mand, opt;
  for (size_t i = 0; i < cands.size(); ++i) (cands[i].mandatory ? mand : opt).push_back(i);
  int need = n - static_cast<int>(mand.size());
  if (need < 0 || need > static_cast<int>(opt.size())) return best;

  std::vector<int> pick(need);
  for (int i = 0; i < need; ++i) pick[i] = i;
  while (true) {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (int i : mand) {
      a.push_back(cands[i].coeffs);
      b.push_back(cands[i].rhs);
    }
    for (int i = 0; i < need; ++i) {
      a.push_back(cands[opt[pick[i]]].coeffs);
      b.push_back(cands[opt[pick[i]]].rhs);
    }
    std::vector<double> x;
    if (solve_square(a, b, x) && feasible(p, x, feas_tol)) {
      double obj = 0.0;
      for (int j = 0; j < n; ++j) obj += p.objective[j] * x[j];
      if (!best.feasible || obj < best.objective) {
        best.feasible = true;
        best.objective = obj;
        best.argmin = x;
      }
    }
    if (need == 0) break;
    int i = need - 1;
    while (i >= 0 && pick[i] == static_cast<int>(opt.size()) - need + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int k = i + 1; k < need; ++k) pick[k] = pick[k - 1] + 1;
  }
  return best;
}

namespace {

bool in_c(const model::ScalarizationSet& cs, double c1) {
  if (c1 < -1e-12 || c1 > 1.0 + 1e-12) return false;
  std::vector<double> c{c1, 1.0 - c1};
  for (size_t r = 0; r < cs.d_rows.size(); ++r) {
    double lhs = cs.d_rows[r][0] * c[0] + cs.d_rows[r][1] * c[1];
    if (lhs > cs.e[r] + 1e-12) return false;
  }
  return true;
}

}  // namespace

double grid_cvar_violation(const std::vector<std::vector<double>>& outcomes,
                           const std::vector<double>& probs, const model::Benchmark& bm,
                           double alpha, const model::ScalarizationSet& cs, double step) {
  double best = -lp::kInf;
  for (double c1 = 0.0; c1 <= 1.0 + 1e-12; c1 += step) {
    if (!in_c(cs, c1)) continue;
    std::vector<double> c{c1, 1.0 - c1};
    double v = risk::cvar_alpha(risk::scalarize(outcomes, probs, c), alpha) -
               risk::cvar_alpha(risk::scalarize(bm.realizations, bm.probabilities, c), alpha);
    best = std::max(best, v);
  }
  return best;
}

double grid_ico_violation(const std::vector<std::vector<double>>& outcomes,
                          const std::vector<double>& probs, const model::Benchmark& bm,
                          const model::ScalarizationSet& cs, double step) {
  double worst = lp::kInf;
  for (int t = 0; t < bm.count(); ++t) {
    for (double c1 = 0.0; c1 <= 1.0 + 1e-12; c1 += step) {
      if (!in_c(cs, c1)) continue;
      std::vector<double> c{c1, 1.0 - c1};
      double ct_z = c[0] * bm.realizations[t][0] + c[1] * bm.realizations[t][1];
      double v =
          risk::expected_excess(risk::scalarize(bm.realizations, bm.probabilities, c), ct_z) -
          risk::expected_excess(risk::scalarize(outcomes, probs, c), ct_z);
      worst = std::min(worst, v);
    }
  }
  return -worst;
}

lp::LinearProgram extensive_form(const model::TwoStageInstance& ins) {
  const int n1 = ins.first_stage.num_vars();
  const int n2 = ins.second_stage.num_vars();
  const int S = ins.scenario_set.count();
  lp::LinearProgram prob;
  for (int j = 0; j < n1; ++j) prob.add_var(ins.first_stage.cost[j]);
  for (int j : ins.first_stage.binary_indices) prob.upper[j] = 1.0;
  for (int s = 0; s < S; ++s)
    for (int j = 0; j < n2; ++j)
      prob.add_var(ins.scenario_set.probabilities[s] * ins.second_stage.scenarios[s].q[j]);
  const int n = prob.num_vars();
  for (size_t r = 0; r < ins.first_stage.a_rows.size(); ++r) {
    std::vector<double> row(n, 0.0);
    for (int j = 0; j < n1; ++j) row[j] = ins.first_stage.a_rows[r][j];
    prob.add_row(std::move(row), lp::Sense::Le, ins.first_stage.b[r]);
  }
  for (int s = 0; s < S; ++s) {
    const auto& sc = ins.second_stage.scenarios[s];
    for (int r = 0; r < ins.second_stage.num_rows(); ++r) {
      std::vector<double> row(n, 0.0);
      for (int j = 0; j < n1; ++j) row[j] = sc.t_rows[r][j];
      for (int j = 0; j < n2; ++j) row[n1 + s * n2 + j] = sc.w_rows[r][j];
      prob.add_row(std::move(row), lp::Sense::Ge, sc.h[r]);
    }
  }
  return prob;
}

double recourse_value(const model::TwoStageInstance& ins, int s, const std::vector<double>& x) {
  const auto& sc = ins.second_stage.scenarios[s];
  lp::LinearProgram prob;
  for (int j = 0; j < ins.second_stage.num_vars(); ++j) prob.add_var(sc.q[j]);
  for (size_t r = 0; r < sc.h.size(); ++r) {
    double rhs = sc.h[r];
    for (size_t j = 0; j < x.size(); ++j) rhs -= sc.t_rows[r][j] * x[j];
    prob.add_row(sc.w_rows[r], lp::Sense::Ge, rhs);
  }
  auto out = lp::solve_lp(prob);
  if (out.status != lp::LpStatus::Optimal)
    throw Error(ErrorCode::InvalidArgument, "recourse LP not optimal");
  return out.objective;
}

}  // namespace riskdec::testing
