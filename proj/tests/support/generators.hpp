#pragma once

// Seeded random problem generators shared by the unit and acceptance suites.

#include <cstdint>

#include "lp/simplex.hpp"
#include "model/instance.hpp"

namespace riskdec::testing {

// Bounded-box LP with mixed row senses; the feasible region (when non-empty)
// is a polytope, so the brute-force oracle applies.
lp::LinearProgram random_boxed_lp(uint64_t seed, int max_vars = 6, int max_rows = 8);

struct InstanceSpec {
  int n1 = 4;
  int num_binaries = 2;
  int n2 = 6;
  int num_scenarios = 8;
  int benchmark_size = 4;
  double alpha = 0.9;
  bool with_offsets = false;
  bool ordered_preference = true;  // C = simplex intersected with c2 >= c1
  uint64_t seed = 1;
};

// Random two-stage instance with complete recourse, compact X, outcome
// dimension 2, and a benchmark built from the x = 0 plan with enough margin
// that both the CVaR (at spec.alpha) and ICO relations admit it.
model::TwoStageInstance random_instance(const InstanceSpec& spec);

// Continuous variant for the duality suite: no binaries, zero offsets,
// compactness through explicit sum rows.
model::TwoStageInstance random_continuous_instance(uint64_t seed, int n1 = 3, int n2 = 4,
                                                   int num_scenarios = 4, int benchmark_size = 3,
                                                   double alpha = 0.8);

}  // namespace riskdec::testing
