#include "solver/def_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "risk/measures.hpp"
#include "risk/separation.hpp"

namespace riskdec::solver {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// common frame: x, y variables, first-stage rows placeholder order
void add_stage_vars(DefBuild& def, const model::TwoStageInstance& ins) {
  auto& prob = def.mip.relaxation;
  for (int j = 0; j < def.n1; ++j) prob.add_var(ins.first_stage.cost[j]);
  for (int j : ins.first_stage.binary_indices) {
    prob.upper[j] = 1.0;
    def.mip.binary_vars.push_back(j);
  }
  for (int s = 0; s < def.S; ++s) {
    double p = ins.scenario_set.probabilities[s];
    const auto& q = ins.second_stage.scenarios[s].q;
    for (int j = 0; j < def.n2; ++j) prob.add_var(p * q[j]);
  }
}

void add_first_stage_rows(DefBuild& def, const model::TwoStageInstance& ins) {
  auto& prob = def.mip.relaxation;
  const int n = prob.num_vars();
  for (size_t r = 0; r < ins.first_stage.a_rows.size(); ++r) {
    std::vector<double> row(n, 0.0);
    for (int j = 0; j < def.n1; ++j) row[j] = ins.first_stage.a_rows[r][j];
    prob.add_row(std::move(row), lp::Sense::Le, ins.first_stage.b[r]);
  }
}

void add_coupling_rows(DefBuild& def, const model::TwoStageInstance& ins) {
  auto& prob = def.mip.relaxation;
  const int n = prob.num_vars();
  for (int s = 0; s < def.S; ++s) {
    const auto& sc = ins.second_stage.scenarios[s];
    for (int r = 0; r < def.m2; ++r) {
      std::vector<double> row(n, 0.0);
      for (int j = 0; j < def.n1; ++j) row[j] = sc.t_rows[r][j];
      for (int j = 0; j < def.n2; ++j) row[def.y_index(s, j)] = sc.w_rows[r][j];
      prob.add_row(std::move(row), lp::Sense::Ge, sc.h[r]);
    }
  }
}

void check_c_list(const model::TwoStageInstance& ins,
                  const std::vector<std::vector<double>>& c_list) {
  for (const auto& c : c_list)
    if (static_cast<int>(c.size()) != ins.outcome_mapping.dimension)
      throw Error(ErrorCode::MalformedProblem, "scalarization vector width differs from d");
}

}  // namespace

DefBuild build_def_cvar(const model::TwoStageInstance& ins,
                        const std::vector<std::vector<double>>& c_list) {
  check_c_list(ins, c_list);
  DefBuild def;
  def.n1 = ins.first_stage.num_vars();
  def.n2 = ins.second_stage.num_vars();
  def.m1 = static_cast<int>(ins.first_stage.a_rows.size());
  def.m2 = ins.second_stage.num_rows();
  def.S = ins.scenario_set.count();
  def.L = static_cast<int>(c_list.size());
  def.T = ins.benchmark.count();
  def.ico = false;

  auto& prob = def.mip.relaxation;
  add_stage_vars(def, ins);
  for (int l = 0; l < def.L; ++l) prob.add_var(0.0, -lp::kInf, lp::kInf);  // eta_l
  for (int l = 0; l < def.L; ++l)
    for (int s = 0; s < def.S; ++s) prob.add_var(0.0);  // w_sl >= 0

  const int n = prob.num_vars();
  const double alpha = ins.risk_spec.alpha;
  const double kappa = 1.0 / (1.0 - alpha);

  add_first_stage_rows(def, ins);

  // risk rows: eta_l + kappa * sum_s p_s w_sl <= CVaR_alpha(c_l'Z)
  for (int l = 0; l < def.L; ++l) {
    std::vector<double> row(n, 0.0);
    row[def.eta_index(l)] = 1.0;
    for (int s = 0; s < def.S; ++s)
      row[def.w_index_cvar(l, s)] = kappa * ins.scenario_set.probabilities[s];
    double rhs = risk::cvar_alpha(
        risk::scalarize(ins.benchmark.realizations, ins.benchmark.probabilities, c_list[l]), alpha);
    prob.add_row(std::move(row), lp::Sense::Le, rhs);
  }

  // excess rows: w_sl - c_l'(Gbar_s x + Gtil_s y_s) + eta_l >= c_l'offset_s
  for (int l = 0; l < def.L; ++l)
    for (int s = 0; s < def.S; ++s) {
      const auto& ps = ins.outcome_mapping.per_scenario[s];
      std::vector<double> row(n, 0.0);
      for (int j = 0; j < def.n1; ++j) {
        double v = 0.0;
        for (int i = 0; i < ins.outcome_mapping.dimension; ++i) v += c_list[l][i] * ps.gbar[i][j];
        row[j] = -v;
      }
      for (int j = 0; j < def.n2; ++j) {
        double v = 0.0;
        for (int i = 0; i < ins.outcome_mapping.dimension; ++i) v += c_list[l][i] * ps.gtilde[i][j];
        row[def.y_index(s, j)] = -v;
      }
      row[def.eta_index(l)] = 1.0;
      row[def.w_index_cvar(l, s)] = 1.0;
      prob.add_row(std::move(row), lp::Sense::Ge, dot(c_list[l], ps.offset));
    }

  add_coupling_rows(def, ins);
  return def;
}

DefBuild build_def_ico(const model::TwoStageInstance& ins,
                       const std::vector<std::vector<double>>& c_list) {
  check_c_list(ins, c_list);
  DefBuild def;
  def.n1 = ins.first_stage.num_vars();
  def.n2 = ins.second_stage.num_vars();
  def.m1 = static_cast<int>(ins.first_stage.a_rows.size());
  def.m2 = ins.second_stage.num_rows();
  def.S = ins.scenario_set.count();
  def.L = static_cast<int>(c_list.size());
  def.T = ins.benchmark.count();
  def.ico = true;

  auto& prob = def.mip.relaxation;
  add_stage_vars(def, ins);
  for (int l = 0; l < def.L; ++l)
    for (int t = 0; t < def.T; ++t)
      for (int s = 0; s < def.S; ++s) prob.add_var(0.0);  // w_slt >= 0

  const int n = prob.num_vars();
  add_first_stage_rows(def, ins);

  // relation rows: sum_s p_s w_slt <= E[c_l'Z - c_l'z_t]_+
  for (int l = 0; l < def.L; ++l) {
    auto bench = risk::scalarize(ins.benchmark.realizations, ins.benchmark.probabilities, c_list[l]);
    for (int t = 0; t < def.T; ++t) {
      std::vector<double> row(n, 0.0);
      for (int s = 0; s < def.S; ++s)
        row[def.w_index_ico(l, t, s)] = ins.scenario_set.probabilities[s];
      double ct_zt = dot(c_list[l], ins.benchmark.realizations[t]);
      prob.add_row(std::move(row), lp::Sense::Le, risk::expected_excess(bench, ct_zt));
    }
  }

  // excess rows: w_slt - c_l'(Gbar_s x + Gtil_s y_s) >= c_l'offset_s - c_l'z_t
  for (int l = 0; l < def.L; ++l)
    for (int t = 0; t < def.T; ++t)
      for (int s = 0; s < def.S; ++s) {
        const auto& ps = ins.outcome_mapping.per_scenario[s];
        std::vector<double> row(n, 0.0);
        for (int j = 0; j < def.n1; ++j) {
          double v = 0.0;
          for (int i = 0; i < ins.outcome_mapping.dimension; ++i) v += c_list[l][i] * ps.gbar[i][j];
          row[j] = -v;
        }
        for (int j = 0; j < def.n2; ++j) {
          double v = 0.0;
          for (int i = 0; i < ins.outcome_mapping.dimension; ++i) v += c_list[l][i] * ps.gtilde[i][j];
          row[def.y_index(s, j)] = -v;
        }
        row[def.w_index_ico(l, t, s)] = 1.0;
        double rhs = dot(c_list[l], ps.offset) - dot(c_list[l], ins.benchmark.realizations[t]);
        prob.add_row(std::move(row), lp::Sense::Ge, rhs);
      }

  add_coupling_rows(def, ins);
  return def;
}

std::vector<std::vector<double>> initial_scalarizations(const model::TwoStageInstance& ins) {
  scalar::EnumerationConfig cfg;
  auto verts = scalar::enumerate_vertices(scalar::build_C(ins.risk_spec.scalarization), cfg);
  if (verts.empty()) throw Error(ErrorCode::EmptyScalarizationSet, "scalarization set is empty");
  return verts;
}

SolveReport solve_dcg_def(const model::TwoStageInstance& ins, const RunConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  auto elapsed_ms = [&t0] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  };

  SolveReport rep;
  rep.algorithm = "dcg-def";
  rep.mode = model::relation_name(cfg.mode);
  rep.alpha = cfg.alpha;
  rep.epsilon = cfg.epsilon;
  rep.seed = cfg.seed;
  rep.instance_name = ins.name;

  model::TwoStageInstance work = ins;
  work.risk_spec.relation = cfg.mode;
  if (cfg.mode == model::RiskRelation::MultivariateCVaR) work.risk_spec.alpha = cfg.alpha;

  const bool risked = cfg.mode != model::RiskRelation::None;
  std::vector<std::vector<double>> c_list;
  scalar::ScalarizationVertexSet cvar_set;
  std::vector<scalar::ScalarizationVertexSet> ico_sets;
  if (risked) {
    c_list = initial_scalarizations(work);
    if (cfg.mode == model::RiskRelation::MultivariateCVaR)
      cvar_set = scalar::cvar_scalarization_set(work.benchmark, work.risk_spec.scalarization);
    else
      ico_sets = scalar::ico_scalarization_sets(work.benchmark, work.risk_spec.scalarization);
  }

  lp::MipConfig mip_cfg;
  mip_cfg.lp.feas_tol = cfg.feas_tol;
  mip_cfg.lp.opt_tol = cfg.opt_tol;

  double prev_obj = -lp::kInf;
  for (int iter = 1; iter <= cfg.iteration_cap; ++iter) {
    if (cfg.time_limit_sec > 0 && elapsed_ms() > cfg.time_limit_sec * 1000.0) {
      rep.status = SolveStatus::TimeLimit;
      rep.wall_ms = elapsed_ms();
      return rep;
    }
    DefBuild def = !risked ? build_def_cvar(work, {})
                   : cfg.mode == model::RiskRelation::MultivariateCVaR
                       ? build_def_cvar(work, c_list)
                       : build_def_ico(work, c_list);
    if (cfg.time_limit_sec > 0)
      mip_cfg.time_limit_sec = std::max(0.05, cfg.time_limit_sec - elapsed_ms() / 1000.0);
    lp::MipOutcome mip_out;
    try {
      mip_out = lp::solve_mip(def.mip, mip_cfg);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TimeLimit) throw;
      rep.status = SolveStatus::TimeLimit;
      rep.wall_ms = elapsed_ms();
      return rep;
    }
    if (mip_out.status == lp::MipStatus::Infeasible) {
      // the relaxation is already infeasible, so the full problem is too
      rep.status = SolveStatus::Infeasible;
      rep.wall_ms = elapsed_ms();
      return rep;
    }

    std::vector<double> x(mip_out.primal.begin(), mip_out.primal.begin() + def.n1);
    std::vector<std::vector<double>> y(def.S);
    for (int s = 0; s < def.S; ++s)
      y[s] = std::vector<double>(mip_out.primal.begin() + def.y_index(s, 0),
                                 mip_out.primal.begin() + def.y_index(s, 0) + def.n2);

    // relaxations only tighten as the list grows
    if (mip_out.objective < prev_obj - 1e-6)
      throw Error(ErrorCode::NumericalFailure, "DEF objective decreased as the c-list grew");
    prev_obj = mip_out.objective;

    IterationRecord it;
    it.iteration = iter;
    it.num_scalarizations = static_cast<int>(c_list.size());
    it.master_objective = mip_out.objective;
    it.upper_bound = lp::kInf;

    double violation = 0.0;
    std::vector<double> best_c;
    if (risked) {
      auto g = model::evaluate_outcomes(work, x, y);
      sep::SeparationResult sr =
          cfg.mode == model::RiskRelation::MultivariateCVaR
              ? sep::separate_cvar(g, work.scenario_set.probabilities, work.benchmark, cfg.alpha,
                                   cvar_set)
              : sep::separate_ico(g, work.scenario_set.probabilities, work.benchmark, ico_sets);
      violation = sr.violation;
      if (sr.best_c) best_c = *sr.best_c;
    }
    it.violation = violation;
    it.wall_ms = elapsed_ms();

    if (violation <= cfg.sep_tol) {
      it.upper_bound = mip_out.objective;
      rep.iterations.push_back(it);
      rep.status = SolveStatus::Optimal;
      rep.objective = mip_out.objective;
      rep.lower_bound = rep.upper_bound = mip_out.objective;
      rep.x = std::move(x);
      rep.y = std::move(y);
      rep.c_list = c_list;
      rep.wall_ms = elapsed_ms();
      return rep;
    }
    rep.iterations.push_back(it);

    // exactness of the oracle guarantees a new vector; guard regardless
    for (const auto& c : c_list) {
      double dist = 0.0;
      for (size_t k = 0; k < c.size(); ++k) dist = std::max(dist, std::fabs(c[k] - best_c[k]));
      if (dist <= 1e-10)
        throw Error(ErrorCode::NumericalFailure, "separation returned an already-generated vector");
    }
    c_list.push_back(best_c);
  }
  rep.status = SolveStatus::IterationLimit;
  rep.wall_ms = elapsed_ms();
  return rep;
}

}  // namespace riskdec::solver
