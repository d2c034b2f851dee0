#pragma once

#include "lp/bnb.hpp"
#include "model/instance.hpp"
#include "risk/scalarization.hpp"
#include "solver/report.hpp"

namespace riskdec::solver {

// Deterministic-equivalent build for a finite scalarization list. Variable
// order: x | y_0..y_{S-1} | eta (CVaR only) | w. The w block is l-major:
// CVaR (l,s), ICO (l,t,s). Row order: first-stage rows, risk rows, excess
// rows, then the per-scenario coupling rows.
struct DefBuild {
  lp::MixedIntegerProgram mip;
  int n1 = 0, n2 = 0, m1 = 0, m2 = 0, S = 0, L = 0, T = 0;
  bool ico = false;

  int x_index(int j) const { return j; }
  int y_index(int s, int j) const { return n1 + s * n2 + j; }
  int eta_index(int l) const { return n1 + S * n2 + l; }
  int w_index_cvar(int l, int s) const { return n1 + S * n2 + L + l * S + s; }
  int w_index_ico(int l, int t, int s) const { return n1 + S * n2 + (l * T + t) * S + s; }

  int row_first_stage(int r) const { return r; }
  int row_risk_cvar(int l) const { return m1 + l; }
  int row_risk_ico(int l, int t) const { return m1 + l * T + t; }
  int row_excess_cvar(int l, int s) const { return m1 + L + l * S + s; }
  int row_excess_ico(int l, int t, int s) const { return m1 + L * T + (l * T + t) * S + s; }
  int row_coupling(int s, int r) const {
    return m1 + (ico ? L * T + L * T * S : L + L * S) + s * m2 + r;
  }
};

DefBuild build_def_cvar(const model::TwoStageInstance& instance,
                        const std::vector<std::vector<double>>& c_list);
DefBuild build_def_ico(const model::TwoStageInstance& instance,
                       const std::vector<std::vector<double>>& c_list);

// Delayed cut generation on the deterministic equivalent (the first of the
// two algorithms): solve the DEF restricted to the generated scalarization
// vectors, separate, extend, repeat.
SolveReport solve_dcg_def(const model::TwoStageInstance& instance, const RunConfig& config);

// Shared helper: initial scalarization vectors (the vertices of C).
std::vector<std::vector<double>> initial_scalarizations(const model::TwoStageInstance& instance);

}  // namespace riskdec::solver
