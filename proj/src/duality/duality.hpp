#pragma once

#include <string>
#include <vector>

#include "model/instance.hpp"
#include "solver/def_solver.hpp"

namespace riskdec::duality {

// Finitely supported dual: lambda for the first-stage rows, measures mu and
// nu (per scenario) on the shared support c_atoms, and pi per scenario for
// the coupling rows.
struct DualSolution {
  std::vector<std::vector<double>> c_atoms;
  std::vector<double> mu;               // mass per atom
  std::vector<std::vector<double>> nu;  // [scenario][atom]
  std::vector<double> lambda;           // m1
  std::vector<std::vector<double>> pi;  // [scenario][m2]
  double dual_objective = 0.0;
};

struct ConditionResidual {
  std::string name;
  double residual = 0.0;
};

struct SlacknessReport {
  std::vector<ConditionResidual> conditions;
  double max_residual = 0.0;
  bool pass = false;
  double tolerance = 1e-6;
};

struct DualityConfig {
  double dual_tol = 1e-6;
};

// Lemma-style lift: eta_l = VaR_alpha of the l-th scalarized outcome,
// w_sl = [c_l'g_s - eta_l]_+ (the excess form consistent with the DEF rows).
void lift_solution(const model::TwoStageInstance& instance, const std::vector<double>& x,
                   const std::vector<std::vector<double>>& y,
                   const std::vector<std::vector<double>>& c_list, std::vector<double>& eta,
                   std::vector<std::vector<double>>& w);

// Builds the full-vertex CVaR DEF as an LP (continuous first stage required),
// solves it, and maps the row duals onto (lambda, mu, nu, pi).
struct AssembledDual {
  DualSolution dual;
  double primal_objective = 0.0;
  std::vector<double> x;
  std::vector<std::vector<double>> y;
  std::vector<std::vector<double>> c_list;
  bool degenerate_warning = false;
  double max_dual_feas_residual = 0.0;
};
AssembledDual assemble_dual(const model::TwoStageInstance& instance,
                            const DualityConfig& config = {});

// Theorem-style complementary slackness conditions (i)-(vii).
SlacknessReport check_slackness(const model::TwoStageInstance& instance,
                                const std::vector<double>& x,
                                const std::vector<std::vector<double>>& y,
                                const DualSolution& dual, const DualityConfig& config = {});

double lagrangian_value(const model::TwoStageInstance& instance, const std::vector<double>& x,
                        const std::vector<std::vector<double>>& y,
                        const std::vector<std::vector<double>>& c_atoms,
                        const std::vector<double>& mu);

struct LagrangianReport {
  double scalarized_gap = 0.0;   // |int CVaR(c'G*) dmu - int CVaR(c'Z) dmu|
  double probe_slack = 0.0;      // max over probes of L(x*,y*) - L(probe)
  double lagrangian_at_optimum = 0.0;
  bool pass = false;
};

// Probe-based necessary check of the saddle-point conditions; probes are
// vertices of the recourse-feasible relaxation (sampled by random costs), the
// primal point itself, and the exact minimizer of the fixed-mu Lagrangian LP.
LagrangianReport check_lagrangian_optimality(const model::TwoStageInstance& instance,
                                             const std::vector<double>& x,
                                             const std::vector<std::vector<double>>& y,
                                             const std::vector<std::vector<double>>& c_atoms,
                                             const std::vector<double>& mu, uint64_t seed = 7,
                                             const DualityConfig& config = {});

std::string slackness_report_to_json(const SlacknessReport& slackness,
                                     const LagrangianReport& lagrangian, double primal,
                                     double dual);

}  // namespace riskdec::duality
