#include "duality/duality.hpp"

#include <cmath>

#include <json.hpp>

#include "risk/measures.hpp"
#include "risk/scalarization.hpp"
#include "util/rng.hpp"

namespace riskdec::duality {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void require_continuous(const model::TwoStageInstance& ins) {
  if (!ins.first_stage.binary_indices.empty())
    throw Error(ErrorCode::IntegralityPresent,
                "duality checks require a continuous first stage");
}

void require_zero_offsets(const model::TwoStageInstance& ins) {
  for (const auto& ps : ins.outcome_mapping.per_scenario)
    for (double o : ps.offset)
      if (o != 0.0)
        throw Error(ErrorCode::InstanceContractViolation,
                    "the dual formulation assumes outcome maps without constant offsets");
}

// recourse-feasible relaxation over (x, y_1..y_S): first-stage rows plus the
// coupling rows, risk rows dropped
lp::LinearProgram recourse_relaxation(const model::TwoStageInstance& ins) {
  const int n1 = ins.first_stage.num_vars();
  const int n2 = ins.second_stage.num_vars();
  const int S = ins.scenario_set.count();
  lp::LinearProgram prob;
  for (int j = 0; j < n1 + S * n2; ++j) prob.add_var(0.0);
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

}  // namespace

void lift_solution(const model::TwoStageInstance& ins, const std::vector<double>& x,
                   const std::vector<std::vector<double>>& y,
                   const std::vector<std::vector<double>>& c_list, std::vector<double>& eta,
                   std::vector<std::vector<double>>& w) {
  auto g = model::evaluate_outcomes(ins, x, y);
  const int L = static_cast<int>(c_list.size());
  const int S = ins.scenario_set.count();
  eta.assign(L, 0.0);
  w.assign(L, std::vector<double>(S, 0.0));
  for (int l = 0; l < L; ++l) {
    auto dist = risk::scalarize(g, ins.scenario_set.probabilities, c_list[l]);
    eta[l] = risk::var_alpha(dist, ins.risk_spec.alpha);
    for (int s = 0; s < S; ++s) w[l][s] = std::max(0.0, dist.values[s] - eta[l]);
  }
}

AssembledDual assemble_dual(const model::TwoStageInstance& ins, const DualityConfig& cfg) {
  require_continuous(ins);
  require_zero_offsets(ins);
  if (ins.risk_spec.relation != model::RiskRelation::MultivariateCVaR)
    throw Error(ErrorCode::InvalidArgument, "dual assembly covers the CVaR relation");

  auto vertex_set = scalar::cvar_scalarization_set(ins.benchmark, ins.risk_spec.scalarization);
  const auto& c_list = vertex_set.vectors;
  auto def = solver::build_def_cvar(ins, c_list);

  auto lpout = lp::solve_lp(def.mip.relaxation);
  if (lpout.status != lp::LpStatus::Optimal)
    throw Error(ErrorCode::InvalidArgument, "full-vertex DEF is not solvable to optimality");

  const int S = def.S, L = def.L, m1 = def.m1, m2 = def.m2;
  const double alpha = ins.risk_spec.alpha;

  AssembledDual out;
  out.c_list = c_list;
  out.primal_objective = lpout.objective;
  out.x.assign(lpout.primal.begin(), lpout.primal.begin() + def.n1);
  out.y.resize(S);
  for (int s = 0; s < S; ++s)
    out.y[s] = std::vector<double>(lpout.primal.begin() + def.y_index(s, 0),
                                   lpout.primal.begin() + def.y_index(s, 0) + def.n2);

  DualSolution& d = out.dual;
  d.c_atoms = c_list;
  d.lambda.resize(m1);
  for (int r = 0; r < m1; ++r) d.lambda[r] = -lpout.row_duals[def.row_first_stage(r)];
  d.mu.resize(L);
  for (int l = 0; l < L; ++l) d.mu[l] = -lpout.row_duals[def.row_risk_cvar(l)];
  d.nu.assign(S, std::vector<double>(L, 0.0));
  for (int l = 0; l < L; ++l)
    for (int s = 0; s < S; ++s)
      d.nu[s][l] = lpout.row_duals[def.row_excess_cvar(l, s)] / ins.scenario_set.probabilities[s];
  d.pi.assign(S, std::vector<double>(m2, 0.0));
  for (int s = 0; s < S; ++s)
    for (int r = 0; r < m2; ++r)
      d.pi[s][r] = lpout.row_duals[def.row_coupling(s, r)] / ins.scenario_set.probabilities[s];

  double dobj = 0.0;
  for (int l = 0; l < L; ++l)
    dobj -= d.mu[l] * risk::cvar_alpha(risk::scalarize(ins.benchmark.realizations,
                                                       ins.benchmark.probabilities, c_list[l]),
                                       alpha);
  dobj -= dot(d.lambda, ins.first_stage.b);
  for (int s = 0; s < S; ++s)
    dobj += ins.scenario_set.probabilities[s] * dot(d.pi[s], ins.second_stage.scenarios[s].h);
  d.dual_objective = dobj;

  // dual feasibility residuals
  double resid = 0.0;
  const double kappa = 1.0 / (1.0 - alpha);
  for (int l = 0; l < L; ++l) {
    double ev = 0.0;
    for (int s = 0; s < S; ++s) ev += ins.scenario_set.probabilities[s] * d.nu[s][l];
    resid = std::max(resid, std::fabs(ev - d.mu[l]));
    for (int s = 0; s < S; ++s) resid = std::max(resid, d.nu[s][l] - kappa * d.mu[l]);
    resid = std::max(resid, -d.mu[l]);
    for (int s = 0; s < S; ++s) resid = std::max(resid, -d.nu[s][l]);
  }
  for (int j = 0; j < def.n1; ++j) {
    double lhs = 0.0;
    for (int s = 0; s < S; ++s) {
      const auto& sc = ins.second_stage.scenarios[s];
      double tj = 0.0;
      for (int r = 0; r < m2; ++r) tj += d.pi[s][r] * sc.t_rows[r][j];
      double gj = 0.0;
      const auto& ps = ins.outcome_mapping.per_scenario[s];
      for (int l = 0; l < L; ++l) {
        if (d.nu[s][l] == 0.0) continue;
        double cg = 0.0;
        for (size_t i = 0; i < c_list[l].size(); ++i) cg += c_list[l][i] * ps.gbar[i][j];
        gj += d.nu[s][l] * cg;
      }
      lhs += ins.scenario_set.probabilities[s] * (tj - gj);
    }
    double rhs = ins.first_stage.cost[j];
    for (int r = 0; r < m1; ++r) rhs += d.lambda[r] * ins.first_stage.a_rows[r][j];
    resid = std::max(resid, lhs - rhs);
  }
  for (int s = 0; s < S; ++s) {
    const auto& sc = ins.second_stage.scenarios[s];
    const auto& ps = ins.outcome_mapping.per_scenario[s];
    for (int j = 0; j < def.n2; ++j) {
      double lhs = 0.0;
      for (int r = 0; r < m2; ++r) lhs += d.pi[s][r] * sc.w_rows[r][j];
      for (int l = 0; l < L; ++l) {
        if (d.nu[s][l] == 0.0) continue;
        double cg = 0.0;
        for (size_t i = 0; i < c_list[l].size(); ++i) cg += c_list[l][i] * ps.gtilde[i][j];
        lhs -= d.nu[s][l] * cg;
      }
      resid = std::max(resid, lhs - sc.q[j]);
    }
  }
  out.max_dual_feas_residual = resid;
  if (resid > cfg.dual_tol)
    throw Error(ErrorCode::NumericalFailure, "assembled dual violates the dual feasibility rows");

  // a nonbasic-looking variable with zero reduced cost signals alternative
  // optimal bases, where the assembled measures are not unique
  for (size_t j = 0; j < lpout.primal.size(); ++j)
    if (std::fabs(lpout.primal[j]) <= 1e-12 && std::fabs(lpout.reduced_costs[j]) <= 1e-12)
      out.degenerate_warning = true;

  return out;
}

SlacknessReport check_slackness(const model::TwoStageInstance& ins, const std::vector<double>& x,
                                const std::vector<std::vector<double>>& y, const DualSolution& d,
                                const DualityConfig& cfg) {
  require_zero_offsets(ins);
  const int S = ins.scenario_set.count();
  const int L = static_cast<int>(d.c_atoms.size());
  const double alpha = ins.risk_spec.alpha;
  const double kappa = 1.0 / (1.0 - alpha);
  const double mass_tol = 1e-9;

  auto g = model::evaluate_outcomes(ins, x, y);
  std::vector<risk::DiscreteDistribution> dists(L);
  std::vector<double> cvar_g(L), var_g(L), cvar_z(L);
  for (int l = 0; l < L; ++l) {
    dists[l] = risk::scalarize(g, ins.scenario_set.probabilities, d.c_atoms[l]);
    cvar_g[l] = risk::cvar_alpha(dists[l], alpha);
    var_g[l] = risk::var_alpha(dists[l], alpha);
    cvar_z[l] = risk::cvar_alpha(
        risk::scalarize(ins.benchmark.realizations, ins.benchmark.probabilities, d.c_atoms[l]),
        alpha);
  }

  SlacknessReport rep;
  rep.tolerance = cfg.dual_tol;
  auto put = [&rep](const std::string& name, double r) {
    rep.conditions.push_back({name, r});
    rep.max_residual = std::max(rep.max_residual, r);
  };

  double r1 = 0.0;
  for (int l = 0; l < L; ++l)
    if (d.mu[l] > mass_tol) r1 = std::max(r1, std::fabs(cvar_g[l] - cvar_z[l]));
  put("i_mu_support_cvar_equality", r1);

  double r2 = 0.0;
  for (int s = 0; s < S; ++s)
    for (int l = 0; l < L; ++l)
      if (d.nu[s][l] > mass_tol) r2 = std::max(r2, var_g[l] - dists[l].values[s]);
  put("ii_nu_support_upper_tail", std::max(0.0, r2));

  double r3 = 0.0;
  for (int s = 0; s < S; ++s)
    for (int l = 0; l < L; ++l)
      if (kappa * d.mu[l] - d.nu[s][l] > mass_tol)
        r3 = std::max(r3, dists[l].values[s] - var_g[l]);
  put("iii_capped_support_lower_tail", std::max(0.0, r3));

  double r4 = 0.0;
  for (size_t r = 0; r < ins.first_stage.a_rows.size(); ++r) {
    double slack = ins.first_stage.b[r] - dot(ins.first_stage.a_rows[r], x);
    r4 += d.lambda[r] * slack;
  }
  put("iv_lambda_first_stage", std::fabs(r4));

  double r5 = 0.0;
  for (int s = 0; s < S; ++s) {
    const auto& sc = ins.second_stage.scenarios[s];
    double acc = 0.0;
    for (size_t r = 0; r < sc.h.size(); ++r) {
      double act = dot(sc.t_rows[r], x) + dot(sc.w_rows[r], y[s]) - sc.h[r];
      acc += d.pi[s][r] * act;
    }
    r5 = std::max(r5, std::fabs(acc));
  }
  put("v_pi_coupling", r5);

  double r6 = 0.0;
  for (int j = 0; j < ins.first_stage.num_vars(); ++j) {
    double coef = ins.first_stage.cost[j];
    for (size_t r = 0; r < ins.first_stage.a_rows.size(); ++r)
      coef += d.lambda[r] * ins.first_stage.a_rows[r][j];
    for (int s = 0; s < S; ++s) {
      const auto& sc = ins.second_stage.scenarios[s];
      const auto& ps = ins.outcome_mapping.per_scenario[s];
      double tj = 0.0;
      for (size_t r = 0; r < sc.h.size(); ++r) tj += d.pi[s][r] * sc.t_rows[r][j];
      double gj = 0.0;
      for (int l = 0; l < L; ++l) {
        if (d.nu[s][l] == 0.0) continue;
        double cg = 0.0;
        for (size_t i = 0; i < d.c_atoms[l].size(); ++i) cg += d.c_atoms[l][i] * ps.gbar[i][j];
        gj += d.nu[s][l] * cg;
      }
      coef += ins.scenario_set.probabilities[s] * (gj - tj);
    }
    r6 += coef * x[j];
  }
  put("vi_reduced_cost_x", std::fabs(r6));

  double r7 = 0.0;
  for (int s = 0; s < S; ++s) {
    const auto& sc = ins.second_stage.scenarios[s];
    const auto& ps = ins.outcome_mapping.per_scenario[s];
    double acc = 0.0;
    for (int j = 0; j < ins.second_stage.num_vars(); ++j) {
      double coef = sc.q[j];
      for (size_t r = 0; r < sc.h.size(); ++r) coef -= d.pi[s][r] * sc.w_rows[r][j];
      for (int l = 0; l < L; ++l) {
        if (d.nu[s][l] == 0.0) continue;
        double cg = 0.0;
        for (size_t i = 0; i < d.c_atoms[l].size(); ++i) cg += d.c_atoms[l][i] * ps.gtilde[i][j];
        coef += d.nu[s][l] * cg;
      }
      acc += coef * y[s][j];
    }
    r7 = std::max(r7, std::fabs(acc));
  }
  put("vii_reduced_cost_y", r7);

  rep.pass = rep.max_residual <= cfg.dual_tol;
  return rep;
}

double lagrangian_value(const model::TwoStageInstance& ins, const std::vector<double>& x,
                        const std::vector<std::vector<double>>& y,
                        const std::vector<std::vector<double>>& c_atoms,
                        const std::vector<double>& mu) {
  double v = dot(ins.first_stage.cost, x);
  for (int s = 0; s < ins.scenario_set.count(); ++s)
    v += ins.scenario_set.probabilities[s] * dot(ins.second_stage.scenarios[s].q, y[s]);
  auto g = model::evaluate_outcomes(ins, x, y);
  const double alpha = ins.risk_spec.alpha;
  for (size_t l = 0; l < c_atoms.size(); ++l) {
    if (mu[l] == 0.0) continue;
    double cg = risk::cvar_alpha(risk::scalarize(g, ins.scenario_set.probabilities, c_atoms[l]),
                                 alpha);
    double cz = risk::cvar_alpha(
        risk::scalarize(ins.benchmark.realizations, ins.benchmark.probabilities, c_atoms[l]),
        alpha);
    v += mu[l] * (cg - cz);
  }
  return v;
}

LagrangianReport check_lagrangian_optimality(const model::TwoStageInstance& ins,
                                             const std::vector<double>& x,
                                             const std::vector<std::vector<double>>& y,
                                             const std::vector<std::vector<double>>& c_atoms,
                                             const std::vector<double>& mu, uint64_t seed,
                                             const DualityConfig& cfg) {
  require_zero_offsets(ins);
  const int S = ins.scenario_set.count();
  const int n1 = ins.first_stage.num_vars();
  const int n2 = ins.second_stage.num_vars();
  const double alpha = ins.risk_spec.alpha;

  LagrangianReport rep;
  rep.lagrangian_at_optimum = lagrangian_value(ins, x, y, c_atoms, mu);

  auto g = model::evaluate_outcomes(ins, x, y);
  double lhs = 0.0, rhs = 0.0;
  for (size_t l = 0; l < c_atoms.size(); ++l) {
    if (mu[l] == 0.0) continue;
    lhs += mu[l] * risk::cvar_alpha(
                       risk::scalarize(g, ins.scenario_set.probabilities, c_atoms[l]), alpha);
    rhs += mu[l] * risk::cvar_alpha(risk::scalarize(ins.benchmark.realizations,
                                                    ins.benchmark.probabilities, c_atoms[l]),
                                    alpha);
  }
  rep.scalarized_gap = std::fabs(lhs - rhs);

  // probe points: random-cost vertices of the recourse relaxation
  std::vector<std::pair<std::vector<double>, std::vector<std::vector<double>>>> probes;
  auto relax = recourse_relaxation(ins);
  util::Rng rng(seed);
  for (int k = 0; k < 5; ++k) {
    for (auto& cobj : relax.objective) cobj = rng.uniform(0.1, 1.0);
    auto out = lp::solve_lp(relax);
    if (out.status != lp::LpStatus::Optimal) continue;
    std::vector<double> px(out.primal.begin(), out.primal.begin() + n1);
    std::vector<std::vector<double>> py(S);
    for (int s = 0; s < S; ++s)
      py[s] = std::vector<double>(out.primal.begin() + n1 + s * n2,
                                  out.primal.begin() + n1 + (s + 1) * n2);
    probes.emplace_back(std::move(px), std::move(py));
  }
  probes.emplace_back(x, y);

  // exact minimizer of the fixed-mu Lagrangian: drop the benchmark rows from
  // the DEF and price eta/w by mu instead
  {
    auto def = solver::build_def_cvar(ins, c_atoms);
    auto& prob = def.mip.relaxation;
    prob.rows.erase(prob.rows.begin() + def.m1, prob.rows.begin() + def.m1 + def.L);
    const double kappa = 1.0 / (1.0 - alpha);
    for (int l = 0; l < def.L; ++l) {
      prob.objective[def.eta_index(l)] = mu[l];
      for (int s = 0; s < S; ++s)
        prob.objective[def.w_index_cvar(l, s)] =
            mu[l] * kappa * ins.scenario_set.probabilities[s];
    }
    auto out = lp::solve_lp(prob);
    if (out.status == lp::LpStatus::Optimal) {
      std::vector<double> px(out.primal.begin(), out.primal.begin() + n1);
      std::vector<std::vector<double>> py(S);
      for (int s = 0; s < S; ++s)
        py[s] = std::vector<double>(out.primal.begin() + def.y_index(s, 0),
                                    out.primal.begin() + def.y_index(s, 0) + n2);
      probes.emplace_back(std::move(px), std::move(py));
    }
  }

  double min_probe = lp::kInf;
  for (const auto& [px, py] : probes)
    min_probe = std::min(min_probe, lagrangian_value(ins, px, py, c_atoms, mu));
  rep.probe_slack = std::max(0.0, rep.lagrangian_at_optimum - min_probe);
  rep.pass = rep.scalarized_gap <= cfg.dual_tol && rep.probe_slack <= cfg.dual_tol;
  return rep;
}

std::string slackness_report_to_json(const SlacknessReport& slack, const LagrangianReport& lag,
                                     double primal, double dual) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["primal_objective"] = primal;
  j["dual_objective"] = dual;
  j["duality_gap"] = primal - dual;
  nlohmann::json cond = nlohmann::json::array();
  for (const auto& c : slack.conditions) cond.push_back({{"name", c.name}, {"residual", c.residual}});
  j["slackness"] = {{"conditions", std::move(cond)},
                    {"max_residual", slack.max_residual},
                    {"tolerance", slack.tolerance},
                    {"pass", slack.pass}};
  j["lagrangian"] = {{"scalarized_gap", lag.scalarized_gap},
                     {"probe_slack", lag.probe_slack},
                     {"value_at_optimum", lag.lagrangian_at_optimum},
                     {"pass", lag.pass}};
  return j.dump(2);
}

}  // namespace riskdec::duality
