#pragma once

#include <optional>
#include <vector>

#include "model/instance.hpp"
#include "risk/scalarization.hpp"

namespace riskdec::sep {

enum class Mode { CVaR, ICO };

// violation > 0 always means "constraint violated", in both modes.
struct SeparationResult {
  std::optional<std::vector<double>> best_c;
  double violation = 0.0;
  int evaluated_count = 0;
  Mode mode = Mode::CVaR;
  int ico_t = -1;
};

// max over the sufficient scalarization family of
//   CVaR_alpha(c'G) - CVaR_alpha(c'Z); ties broken by lexicographically
// smallest c.
SeparationResult separate_cvar(const std::vector<std::vector<double>>& outcomes,
                               const std::vector<double>& probs, const model::Benchmark& benchmark,
                               double alpha, const scalar::ScalarizationVertexSet& vertex_set);

// For each t, min over the t-th family of
//   E[c'Z - c'z_t]_+ - E[c'G - c'z_t]_+ ;
// the reported violation is the negated minimum over all t (positive means
// violated). Ties broken by smallest t, then lexicographically smallest c.
SeparationResult separate_ico(const std::vector<std::vector<double>>& outcomes,
                              const std::vector<double>& probs, const model::Benchmark& benchmark,
                              const std::vector<scalar::ScalarizationVertexSet>& vertex_sets);

// Optional exact big-M MIP route for the CVaR separation problem, usable for
// benchmarking against the vertex-set oracle. Requires equiprobable scenarios
// with (1-alpha)*|S| integral, where the tail-selection binaries are exact.
SeparationResult separate_cvar_mip(const std::vector<std::vector<double>>& outcomes,
                                   const std::vector<double>& probs,
                                   const model::Benchmark& benchmark, double alpha,
                                   const model::ScalarizationSet& c_set);

}  // namespace riskdec::sep
