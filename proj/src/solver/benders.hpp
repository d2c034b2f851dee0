#pragma once

#include "lp/bnb.hpp"
#include "model/instance.hpp"
#include "risk/scalarization.hpp"
#include "solver/report.hpp"

namespace riskdec::solver {

enum class CutKind { Feasibility, Optimality };

// A Benders cut stored with coefficients frozen at generation time; columns
// for scalarization vectors generated later keep zero coefficients.
struct Cut {
  CutKind kind = CutKind::Optimality;
  int scenario = 0;
  int num_scalarizations = 0;  // L at generation
  int iteration = 0;
  std::vector<double> x_coeffs;  // gamma'T_s - sum beta (c'Gbar_s)
  std::vector<double> gamma;     // duals of the coupling rows
  std::vector<double> beta;      // CVaR: [l]; ICO: [t*L + l]
  double rhs = 0.0;
};

// First-stage incumbent of the relaxed master plus bookkeeping.
struct MasterState {
  std::vector<double> x;
  std::vector<double> eta;              // CVaR only, length L
  std::vector<std::vector<double>> w;   // CVaR: [l][s]; ICO: [l*T+t][s]
  std::vector<double> theta;            // per scenario
  double objective = 0.0;
  double upper_bound = 0.0;
};

struct SubproblemOutcome {
  lp::LpStatus status = lp::LpStatus::Optimal;
  double value = 0.0;                 // Q_s
  std::vector<double> y;
  std::vector<double> beta;           // duals (or ray part) of the risk rows
  std::vector<double> gamma;          // duals (or ray part) of the coupling rows
};

// Master (first stage + generated risk rows + cut pool) as a MIP over
// x | eta | w | theta.
struct MasterBuild {
  lp::MixedIntegerProgram mip;
  int n1 = 0, S = 0, L = 0, T = 0;
  bool ico = false;
  int eta_index(int l) const { return n1 + l; }
  int w_index(int l, int s) const { return n1 + (ico ? 0 : L) + l * S + s; }          // CVaR
  int w_index(int l, int t, int s) const { return n1 + (l * T + t) * S + s; }          // ICO
  int theta_index(int s) const {
    return n1 + (ico ? L * T * S : L + L * S) + s;
  }
};

MasterBuild build_master(const model::TwoStageInstance& instance, const std::vector<Cut>& cut_pool,
                         const std::vector<std::vector<double>>& c_list, model::RiskRelation mode,
                         double alpha, double theta_lb);

SubproblemOutcome solve_subproblem(const model::TwoStageInstance& instance, int scenario,
                                   const MasterState& state,
                                   const std::vector<std::vector<double>>& c_list,
                                   model::RiskRelation mode, const lp::SolverConfig& lp_config);

Cut make_feasibility_cut(const SubproblemOutcome& sub, int scenario,
                         const model::TwoStageInstance& instance,
                         const std::vector<std::vector<double>>& c_list, model::RiskRelation mode,
                         const MasterState& state, double feas_tol);

Cut make_optimality_cut(const SubproblemOutcome& sub, int scenario,
                        const model::TwoStageInstance& instance,
                        const std::vector<std::vector<double>>& c_list, model::RiskRelation mode,
                        const MasterState& state, double tightness_tol);

// Algorithm: delayed column-and-cut generation with scenario decomposition
// (the master holds x, eta, w, theta; subproblems are per-scenario LPs).
SolveReport run_algorithm1(const model::TwoStageInstance& instance, const RunConfig& config);

}  // namespace riskdec::solver
