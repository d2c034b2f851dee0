#pragma once

#include <optional>
#include <vector>

#include "lp/simplex.hpp"

namespace riskdec::lp {

struct MixedIntegerProgram {
  LinearProgram relaxation;
  std::vector<int> binary_vars;
};

enum class MipStatus { Optimal, Infeasible };

struct PruneAudit {
  double node_bound;
  double incumbent_at_prune;
};

struct MipOutcome {
  MipStatus status = MipStatus::Optimal;
  std::vector<double> primal;
  double objective = 0.0;
  long node_count = 0;
  bool proven = true;  // false only when the node limit stopped the search
  std::vector<PruneAudit> prune_audit;
};

struct MipConfig {
  SolverConfig lp;
  double int_tol = 1e-6;
  long node_limit = 1000000;
  bool collect_audit = false;
  // optional wall-clock deadline in steady_clock seconds-from-now; <=0 disables
  double time_limit_sec = 0.0;
};

// Best-bound branch and bound over solve_lp; most-fractional branching with
// lowest-index tie-breaks, so runs are deterministic.
MipOutcome solve_mip(const MixedIntegerProgram& problem, const MipConfig& config = {});

}  // namespace riskdec::lp
