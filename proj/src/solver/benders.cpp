#include "solver/benders.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "risk/measures.hpp"
#include "risk/separation.hpp"
#include "solver/def_solver.hpp"
#include "util/threading.hpp"

namespace riskdec::solver {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// c' Gbar_s (length n1) and c' Gtil_s (length n2) for one scenario
std::vector<double> c_gbar(const model::OutcomeMapping::PerScenario& ps,
                           const std::vector<double>& c, int n1) {
  std::vector<double> out(n1, 0.0);
  for (size_t i = 0; i < c.size(); ++i)
    for (int j = 0; j < n1; ++j) out[j] += c[i] * ps.gbar[i][j];
  return out;
}

std::vector<double> c_gtilde(const model::OutcomeMapping::PerScenario& ps,
                             const std::vector<double>& c, int n2) {
  std::vector<double> out(n2, 0.0);
  for (size_t i = 0; i < c.size(); ++i)
    for (int j = 0; j < n2; ++j) out[j] += c[i] * ps.gtilde[i][j];
  return out;
}

// Evaluates the cut body gamma'(h - T x) + sum beta (...) at a master point.
double cut_body_at(const Cut& cut, const MasterState& state) {
  double v = cut.rhs - dot(cut.x_coeffs, state.x);
  if (!state.eta.empty()) {
    for (int l = 0; l < cut.num_scalarizations; ++l) v -= cut.beta[l] * state.eta[l];
  }
  // w coefficients equal beta on the matching block
  if (!state.w.empty()) {
    if (state.eta.empty() && !cut.beta.empty()) {
      int L = cut.num_scalarizations;
      int T = static_cast<int>(cut.beta.size()) / std::max(1, L);
      for (int t = 0; t < T; ++t)
        for (int l = 0; l < L; ++l) v -= cut.beta[t * L + l] * state.w[l * T + t][cut.scenario];
    } else {
      for (int l = 0; l < cut.num_scalarizations; ++l)
        v -= cut.beta[l] * state.w[l][cut.scenario];
    }
  }
  return v;
}

}  // namespace

MasterBuild build_master(const model::TwoStageInstance& ins, const std::vector<Cut>& cut_pool,
                         const std::vector<std::vector<double>>& c_list, model::RiskRelation mode,
                         double alpha, double theta_lb) {
  MasterBuild mb;
  mb.n1 = ins.first_stage.num_vars();
  mb.S = ins.scenario_set.count();
  mb.L = static_cast<int>(c_list.size());
  mb.T = ins.benchmark.count();
  mb.ico = mode == model::RiskRelation::MultivariateICO;
  const bool cvar = mode == model::RiskRelation::MultivariateCVaR;

  auto& prob = mb.mip.relaxation;
  for (int j = 0; j < mb.n1; ++j) prob.add_var(ins.first_stage.cost[j]);
  for (int j : ins.first_stage.binary_indices) {
    prob.upper[j] = 1.0;
    mb.mip.binary_vars.push_back(j);
  }
  if (cvar)
    for (int l = 0; l < mb.L; ++l) prob.add_var(0.0, -lp::kInf, lp::kInf);
  int w_count = cvar ? mb.L * mb.S : (mb.ico ? mb.L * mb.T * mb.S : 0);
  for (int i = 0; i < w_count; ++i) prob.add_var(0.0);
  for (int s = 0; s < mb.S; ++s)
    prob.add_var(ins.scenario_set.probabilities[s], theta_lb, lp::kInf);

  const int n = prob.num_vars();
  for (size_t r = 0; r < ins.first_stage.a_rows.size(); ++r) {
    std::vector<double> row(n, 0.0);
    for (int j = 0; j < mb.n1; ++j) row[j] = ins.first_stage.a_rows[r][j];
    prob.add_row(std::move(row), lp::Sense::Le, ins.first_stage.b[r]);
  }

  if (cvar) {
    const double kappa = 1.0 / (1.0 - alpha);
    for (int l = 0; l < mb.L; ++l) {
      std::vector<double> row(n, 0.0);
      row[mb.eta_index(l)] = 1.0;
      for (int s = 0; s < mb.S; ++s)
        row[mb.w_index(l, s)] = kappa * ins.scenario_set.probabilities[s];
      double rhs = risk::cvar_alpha(
          risk::scalarize(ins.benchmark.realizations, ins.benchmark.probabilities, c_list[l]),
          alpha);
      prob.add_row(std::move(row), lp::Sense::Le, rhs);
    }
  } else if (mb.ico) {
    for (int l = 0; l < mb.L; ++l) {
      auto bench =
          risk::scalarize(ins.benchmark.realizations, ins.benchmark.probabilities, c_list[l]);
      for (int t = 0; t < mb.T; ++t) {
        std::vector<double> row(n, 0.0);
        for (int s = 0; s < mb.S; ++s)
          row[mb.w_index(l, t, s)] = ins.scenario_set.probabilities[s];
        double ct_zt = dot(c_list[l], ins.benchmark.realizations[t]);
        prob.add_row(std::move(row), lp::Sense::Le, risk::expected_excess(bench, ct_zt));
      }
    }
  }

  for (const Cut& cut : cut_pool) {
    if (cut.num_scalarizations > mb.L)
      throw Error(ErrorCode::MalformedProblem, "cut references scalarizations beyond the list");
    std::vector<double> row(n, 0.0);
    for (int j = 0; j < mb.n1; ++j) row[j] = cut.x_coeffs[j];
    if (cvar) {
      for (int l = 0; l < cut.num_scalarizations; ++l) {
        row[mb.eta_index(l)] = cut.beta[l];
        row[mb.w_index(l, cut.scenario)] = cut.beta[l];
      }
    } else if (mb.ico) {
      int Lg = cut.num_scalarizations;
      for (int t = 0; t < mb.T; ++t)
        for (int l = 0; l < Lg; ++l)
          row[mb.w_index(l, t, cut.scenario)] = cut.beta[t * Lg + l];
    }
    if (cut.kind == CutKind::Optimality) row[mb.theta_index(cut.scenario)] = 1.0;
    prob.add_row(std::move(row), lp::Sense::Ge, cut.rhs);
  }
  return mb;
}

SubproblemOutcome solve_subproblem(const model::TwoStageInstance& ins, int s,
                                   const MasterState& state,
                                   const std::vector<std::vector<double>>& c_list,
                                   model::RiskRelation mode, const lp::SolverConfig& lp_cfg) {
  const auto& sc = ins.second_stage.scenarios[s];
  static const model::OutcomeMapping::PerScenario kNoOutcomes{};
  const auto& ps =
      ins.outcome_mapping.per_scenario.empty() ? kNoOutcomes : ins.outcome_mapping.per_scenario[s];
  const int n2 = ins.second_stage.num_vars();
  const int m2 = ins.second_stage.num_rows();
  const int L = static_cast<int>(c_list.size());
  const int T = ins.benchmark.count();
  const bool cvar = mode == model::RiskRelation::MultivariateCVaR;
  const bool ico = mode == model::RiskRelation::MultivariateICO;

  lp::LinearProgram prob;
  for (int j = 0; j < n2; ++j) prob.add_var(sc.q[j]);

  int risk_rows = 0;
  if (cvar) {
    risk_rows = L;
    for (int l = 0; l < L; ++l) {
      auto gt = c_gtilde(ps, c_list[l], n2);
      for (double& v : gt) v = -v;
      double rhs = dot(c_gbar(ps, c_list[l], static_cast<int>(state.x.size())), state.x) +
                   dot(c_list[l], ps.offset) - state.eta[l] - state.w[l][s];
      prob.add_row(std::move(gt), lp::Sense::Ge, rhs);
    }
  } else if (ico) {
    risk_rows = T * L;
    for (int t = 0; t < T; ++t)
      for (int l = 0; l < L; ++l) {
        auto gt = c_gtilde(ps, c_list[l], n2);
        for (double& v : gt) v = -v;
        double rhs = dot(c_gbar(ps, c_list[l], static_cast<int>(state.x.size())), state.x) +
                     dot(c_list[l], ps.offset) - dot(c_list[l], ins.benchmark.realizations[t]) -
                     state.w[l * T + t][s];
        prob.add_row(std::move(gt), lp::Sense::Ge, rhs);
      }
  }

  for (int r = 0; r < m2; ++r) {
    double rhs = sc.h[r] - dot(sc.t_rows[r], state.x);
    prob.add_row(sc.w_rows[r], lp::Sense::Ge, rhs);
  }

  auto lpout = lp::solve_lp(prob, lp_cfg);
  SubproblemOutcome out;
  out.status = lpout.status;
  if (lpout.status == lp::LpStatus::Unbounded)
    throw Error(ErrorCode::InstanceContractViolation,
                "second-stage subproblem unbounded; the model promises finite recourse");
  const std::vector<double>& duals =
      lpout.status == lp::LpStatus::Optimal ? lpout.row_duals : lpout.farkas_ray;
  out.beta.assign(duals.begin(), duals.begin() + risk_rows);
  out.gamma.assign(duals.begin() + risk_rows, duals.end());
  if (lpout.status == lp::LpStatus::Optimal) {
    out.value = lpout.objective;
    out.y = std::move(lpout.primal);
  }
  return out;
}

namespace {

Cut assemble_cut(const SubproblemOutcome& sub, int s, const model::TwoStageInstance& ins,
                 const std::vector<std::vector<double>>& c_list, model::RiskRelation mode,
                 CutKind kind) {
  const auto& sc = ins.second_stage.scenarios[s];
  const int n1 = ins.first_stage.num_vars();
  const int m2 = ins.second_stage.num_rows();
  const int L = static_cast<int>(c_list.size());
  const int T = ins.benchmark.count();

  Cut cut;
  cut.kind = kind;
  cut.scenario = s;
  cut.num_scalarizations = L;
  cut.gamma = sub.gamma;
  cut.beta = sub.beta;
  cut.x_coeffs.assign(n1, 0.0);
  for (int r = 0; r < m2; ++r)
    for (int j = 0; j < n1; ++j) cut.x_coeffs[j] += sub.gamma[r] * sc.t_rows[r][j];
  cut.rhs = dot(sub.gamma, sc.h);

  if (L > 0) {
    const auto& ps = ins.outcome_mapping.per_scenario[s];
    if (mode == model::RiskRelation::MultivariateCVaR) {
      for (int l = 0; l < L; ++l) {
        auto gb = c_gbar(ps, c_list[l], n1);
        for (int j = 0; j < n1; ++j) cut.x_coeffs[j] -= sub.beta[l] * gb[j];
        cut.rhs += sub.beta[l] * dot(c_list[l], ps.offset);
      }
    } else {
      for (int t = 0; t < T; ++t)
        for (int l = 0; l < L; ++l) {
          double b = sub.beta[t * L + l];
          if (b == 0.0) continue;
          auto gb = c_gbar(ps, c_list[l], n1);
          for (int j = 0; j < n1; ++j) cut.x_coeffs[j] -= b * gb[j];
          cut.rhs += b * (dot(c_list[l], ps.offset) - dot(c_list[l], ins.benchmark.realizations[t]));
        }
    }
  }
  return cut;
}

}  // namespace

Cut make_feasibility_cut(const SubproblemOutcome& sub, int s, const model::TwoStageInstance& ins,
                         const std::vector<std::vector<double>>& c_list, model::RiskRelation mode,
                         const MasterState& state, double feas_tol) {
  Cut cut = assemble_cut(sub, s, ins, c_list, mode, CutKind::Feasibility);
  // certificate sanity: the generating point must violate the cut
  if (!(cut_body_at(cut, state) > feas_tol))
    throw Error(ErrorCode::InvalidRay, "feasibility cut does not separate the generating point");
  return cut;
}

Cut make_optimality_cut(const SubproblemOutcome& sub, int s, const model::TwoStageInstance& ins,
                        const std::vector<std::vector<double>>& c_list, model::RiskRelation mode,
                        const MasterState& state, double tightness_tol) {
  Cut cut = assemble_cut(sub, s, ins, c_list, mode, CutKind::Optimality);
  double body = cut_body_at(cut, state);
  if (std::fabs(body - sub.value) > tightness_tol * std::max(1.0, std::fabs(sub.value)))
    throw Error(ErrorCode::TightnessViolation,
                "optimality cut is not tight at the generating point");
  return cut;
}

SolveReport run_algorithm1(const model::TwoStageInstance& ins, const RunConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  auto elapsed_ms = [&t0] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  };

  SolveReport rep;
  rep.algorithm = "dcg-sd";
  rep.mode = model::relation_name(cfg.mode);
  rep.alpha = cfg.alpha;
  rep.epsilon = cfg.epsilon;
  rep.seed = cfg.seed;
  rep.instance_name = ins.name;

  model::TwoStageInstance work = ins;
  work.risk_spec.relation = cfg.mode;
  if (cfg.mode == model::RiskRelation::MultivariateCVaR) work.risk_spec.alpha = cfg.alpha;
  const bool risked = cfg.mode != model::RiskRelation::None;
  const bool cvar = cfg.mode == model::RiskRelation::MultivariateCVaR;
  const int S = work.scenario_set.count();
  const int T = work.benchmark.count();
  const double theta_lb = std::max(cfg.theta_lb, work.recourse_value_lower_bound);

  std::vector<std::vector<double>> c_list;
  scalar::ScalarizationVertexSet cvar_set;
  std::vector<scalar::ScalarizationVertexSet> ico_sets;
  if (risked) {
    c_list = initial_scalarizations(work);
    if (cvar)
      cvar_set = scalar::cvar_scalarization_set(work.benchmark, work.risk_spec.scalarization);
    else
      ico_sets = scalar::ico_scalarization_sets(work.benchmark, work.risk_spec.scalarization);
  }

  lp::SolverConfig lp_cfg;
  lp_cfg.feas_tol = cfg.feas_tol;
  lp_cfg.opt_tol = cfg.opt_tol;
  lp::MipConfig mip_cfg;
  mip_cfg.lp = lp_cfg;

  std::vector<Cut> pool;

  // optional warm start: cuts generated at a fixed first-stage plan
  if (cfg.init_cuts_from_plan && work.benchmark.has_plan) {
    const auto& plan = work.benchmark.plan;
    int J = static_cast<int>(plan.open_type.size());
    int n1 = work.first_stage.num_vars();
    if (J > 0 && (n1 - J) % J == 0) {
      int types = (n1 - J) / J;
      MasterState st;
      st.x.assign(n1, 0.0);
      for (int j = 0; j < J; ++j) {
        if (plan.open_type[j] >= 0 && plan.open_type[j] < types) st.x[j * types + plan.open_type[j]] = 1.0;
        st.x[J * types + j] = plan.stock[j];
      }
      int L = static_cast<int>(c_list.size());
      if (cvar) {
        st.eta.resize(L);
        for (int l = 0; l < L; ++l)
          st.eta[l] = risk::cvar_alpha(
              risk::scalarize(work.benchmark.realizations, work.benchmark.probabilities, c_list[l]),
              cfg.alpha);
      }
      st.w.assign(cvar ? L : L * T, std::vector<double>(S, 0.0));
      for (int s = 0; s < S; ++s) {
        auto sub = solve_subproblem(work, s, st, c_list, cfg.mode, lp_cfg);
        if (sub.status == lp::LpStatus::Optimal)
          pool.push_back(assemble_cut(sub, s, work, c_list, cfg.mode, CutKind::Optimality));
        else
          pool.push_back(assemble_cut(sub, s, work, c_list, cfg.mode, CutKind::Feasibility));
        if (cfg.cut_observer) cfg.cut_observer(pool.back());
      }
    }
  }

  double u = lp::kInf;
  std::vector<double> best_x;
  std::vector<std::vector<double>> best_y;
  double prev_master = -lp::kInf;

  for (int iter = 1; iter <= cfg.iteration_cap; ++iter) {
    if (cfg.time_limit_sec > 0 && elapsed_ms() > cfg.time_limit_sec * 1000.0) {
      rep.status = SolveStatus::TimeLimit;
      break;
    }
    MasterBuild mb = build_master(work, pool, c_list, cfg.mode, cfg.alpha, theta_lb);
    if (cfg.time_limit_sec > 0)
      mip_cfg.time_limit_sec = std::max(0.05, cfg.time_limit_sec - elapsed_ms() / 1000.0);
    lp::MipOutcome mres;
    try {
      mres = lp::solve_mip(mb.mip, mip_cfg);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TimeLimit) throw;
      rep.status = SolveStatus::TimeLimit;
      break;
    }
    if (mres.status == lp::MipStatus::Infeasible) {
      rep.status = SolveStatus::Infeasible;
      rep.wall_ms = elapsed_ms();
      return rep;
    }
    if (!mres.proven) {
      rep.status = SolveStatus::TimeLimit;
      break;
    }

    double F = mres.objective;
    if (F < prev_master - 1e-6 * std::max(1.0, std::fabs(prev_master)))
      throw Error(ErrorCode::NumericalFailure, "master objective decreased across iterations");
    prev_master = F;
    rep.lower_bound = F;

    // termination on the relative band around the upper bound
    if (std::isfinite(u) && F >= u - cfg.epsilon * std::max(1.0, std::fabs(u))) {
      rep.status = SolveStatus::Optimal;
      rep.objective = u;
      rep.upper_bound = u;
      rep.x = best_x;
      rep.y = best_y;
      rep.c_list = c_list;
      rep.wall_ms = elapsed_ms();
      return rep;
    }

    MasterState st;
    st.objective = F;
    st.x.assign(mres.primal.begin(), mres.primal.begin() + mb.n1);
    int L = static_cast<int>(c_list.size());
    if (cvar) {
      st.eta.resize(L);
      for (int l = 0; l < L; ++l) st.eta[l] = mres.primal[mb.eta_index(l)];
      st.w.assign(L, std::vector<double>(S, 0.0));
      for (int l = 0; l < L; ++l)
        for (int s = 0; s < S; ++s) st.w[l][s] = mres.primal[mb.w_index(l, s)];
    } else if (cfg.mode == model::RiskRelation::MultivariateICO) {
      st.w.assign(L * T, std::vector<double>(S, 0.0));
      for (int l = 0; l < L; ++l)
        for (int t = 0; t < T; ++t)
          for (int s = 0; s < S; ++s) st.w[l * T + t][s] = mres.primal[mb.w_index(l, t, s)];
    }
    st.theta.resize(S);
    for (int s = 0; s < S; ++s) st.theta[s] = mres.primal[mb.theta_index(s)];

    std::vector<SubproblemOutcome> subs(S);
    util::parallel_for(S, cfg.threads, [&](int s) {
      subs[s] = solve_subproblem(work, s, st, c_list, cfg.mode, lp_cfg);
    });

    int cuts_added = 0;
    bool all_feasible = true;
    for (int s = 0; s < S; ++s) {
      if (subs[s].status == lp::LpStatus::Infeasible) {
        all_feasible = false;
        pool.push_back(make_feasibility_cut(subs[s], s, work, c_list, cfg.mode, st, cfg.feas_tol));
        pool.back().iteration = iter;
        if (cfg.cut_observer) cfg.cut_observer(pool.back());
        ++cuts_added;
      } else if (st.theta[s] < subs[s].value - cfg.cut_tol) {
        pool.push_back(make_optimality_cut(subs[s], s, work, c_list, cfg.mode, st, 1e-7));
        pool.back().iteration = iter;
        if (cfg.cut_observer) cfg.cut_observer(pool.back());
        ++cuts_added;
      }
    }

    IterationRecord itrec;
    itrec.iteration = iter;
    itrec.num_scalarizations = L;
    itrec.master_objective = F;
    itrec.cuts_added = cuts_added;
    itrec.upper_bound = u;
    rep.total_cuts += cuts_added;

    if (all_feasible) {
      double violation = 0.0;
      std::vector<double> best_c;
      if (risked) {
        std::vector<std::vector<double>> y(S);
        for (int s = 0; s < S; ++s) y[s] = subs[s].y;
        auto g = model::evaluate_outcomes(work, st.x, y);
        auto sres = cvar ? sep::separate_cvar(g, work.scenario_set.probabilities, work.benchmark,
                                              cfg.alpha, cvar_set)
                         : sep::separate_ico(g, work.scenario_set.probabilities, work.benchmark,
                                             ico_sets);
        violation = sres.violation;
        if (sres.best_c) best_c = *sres.best_c;
      }
      itrec.violation = violation;

      if (violation <= cfg.sep_tol) {
        double cand = 0.0;
        for (int j = 0; j < mb.n1; ++j) cand += work.first_stage.cost[j] * st.x[j];
        for (int s = 0; s < S; ++s) cand += work.scenario_set.probabilities[s] * subs[s].value;
        if (cand < u) {
          u = cand;
          best_x = st.x;
          best_y.assign(S, {});
          for (int s = 0; s < S; ++s) best_y[s] = subs[s].y;
        }
        itrec.upper_bound = u;
        if (cuts_added == 0) {
          // master already optimal for the current relaxation and the point is
          // feasible: theta_s >= Q_s - cut_tol for all s closes the gap
          itrec.wall_ms = elapsed_ms();
          rep.iterations.push_back(itrec);
          rep.status = SolveStatus::Optimal;
          rep.objective = u;
          rep.upper_bound = u;
          rep.x = best_x;
          rep.y = best_y;
          rep.c_list = c_list;
          rep.wall_ms = elapsed_ms();
          return rep;
        }
      } else {
        for (const auto& c : c_list) {
          double dist = 0.0;
          for (size_t k = 0; k < c.size(); ++k) dist = std::max(dist, std::fabs(c[k] - best_c[k]));
          if (dist <= 1e-10)
            throw Error(ErrorCode::NumericalFailure,
                        "separation returned an already-generated vector");
        }
        c_list.push_back(best_c);
      }
    }

    itrec.wall_ms = elapsed_ms();
    rep.iterations.push_back(itrec);
  }

  if (rep.status != SolveStatus::TimeLimit) rep.status = SolveStatus::IterationLimit;
  rep.upper_bound = u;
  rep.objective = u;
  rep.x = best_x;
  rep.y = best_y;
  rep.c_list = c_list;
  rep.wall_ms = elapsed_ms();
  return rep;
}

}  // namespace riskdec::solver
