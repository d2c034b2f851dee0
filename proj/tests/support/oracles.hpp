#pragma once

// Independent test oracles. Everything here recomputes expected values by
// brute force and must stay clear of the solver paths it is used to check.

#include <optional>
#include <vector>

#include "lp/simplex.hpp"
#include "model/instance.hpp"

namespace riskdec::testing {

struct BruteForceResult {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> argmin;
};

// Enumerates every candidate basic point (all n-subsets of rows and finite
// bounds treated as equalities), keeps the feasible ones, returns the best.
// Exact for problems whose feasible region is a polytope.
BruteForceResult brute_force_lp(const lp::LinearProgram& problem, double feas_tol = 1e-7);

// Dense grid over c1 in [0,1] (c2 = 1 - c1) filtered by membership in C.
double grid_cvar_violation(const std::vector<std::vector<double>>& outcomes,
                           const std::vector<double>& probs, const model::Benchmark& benchmark,
                           double alpha, const model::ScalarizationSet& c_set,
                           double step = 1e-3);

double grid_ico_violation(const std::vector<std::vector<double>>& outcomes,
                          const std::vector<double>& probs, const model::Benchmark& benchmark,
                          const model::ScalarizationSet& c_set, double step = 1e-3);

// Extensive-form (risk-neutral) LP over (x, y_1..y_S); binaries relaxed.
lp::LinearProgram extensive_form(const model::TwoStageInstance& instance);

// Optimal recourse value of scenario s at a fixed x.
double recourse_value(const model::TwoStageInstance& instance, int scenario,
                      const std::vector<double>& x);

}  // namespace riskdec::testing
