#pragma once

#include <vector>

#include "util/error.hpp"

namespace riskdec::risk {

struct DiscreteDistribution {
  std::vector<double> values;
  std::vector<double> probabilities;
};

// Left-continuous quantile under the smaller-is-better convention: the
// smallest realization eta with P(V <= eta) >= alpha.
double var_alpha(const DiscreteDistribution& dist, double alpha);

// min_eta { eta + E[V - eta]_+ / (1 - alpha) }; equals the mean at alpha = 0.
double cvar_alpha(const DiscreteDistribution& dist, double alpha);

// E[V - eta]_+
double expected_excess(const DiscreteDistribution& dist, double eta);

DiscreteDistribution scalarize(const std::vector<std::vector<double>>& outcomes,
                               const std::vector<double>& probabilities,
                               const std::vector<double>& c);

}  // namespace riskdec::risk
