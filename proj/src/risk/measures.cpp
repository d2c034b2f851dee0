#include "risk/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace riskdec::risk {

namespace {

void check(const DiscreteDistribution& dist, double alpha) {
  if (dist.values.size() != dist.probabilities.size())
    throw Error(ErrorCode::MalformedProblem, "distribution value/probability length mismatch");
  if (dist.values.empty()) throw Error(ErrorCode::MalformedProblem, "empty distribution");
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw Error(ErrorCode::InvalidArgument, "alpha must lie in [0,1)");
}

std::vector<int> order_by_value(const DiscreteDistribution& dist, bool descending) {
  std::vector<int> idx(dist.values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return descending ? dist.values[a] > dist.values[b] : dist.values[a] < dist.values[b];
  });
  return idx;
}

}  // namespace

double var_alpha(const DiscreteDistribution& dist, double alpha) {
  check(dist, alpha);
  auto idx = order_by_value(dist, false);
  double cum = 0.0;
  for (int i : idx) {
    cum += dist.probabilities[i];
    if (cum >= alpha - 1e-12) return dist.values[i];
  }
  return dist.values[idx.back()];
}

double cvar_alpha(const DiscreteDistribution& dist, double alpha) {
  check(dist, alpha);
  if (alpha == 0.0) {
    double mean = 0.0;
    for (size_t i = 0; i < dist.values.size(); ++i)
      mean += dist.probabilities[i] * dist.values[i];
    return mean;
  }
  // average of the worst (largest) 1-alpha tail, boundary atom included
  // fractionally
  const double need = 1.0 - alpha;
  auto idx = order_by_value(dist, true);
  double taken = 0.0, acc = 0.0;
  for (int i : idx) {
    double p = dist.probabilities[i];
    double take = std::min(p, need - taken);
    if (take <= 0.0) break;
    acc += take * dist.values[i];
    taken += take;
    if (taken >= need - 1e-15) break;
  }
  return acc / need;
}

double expected_excess(const DiscreteDistribution& dist, double eta) {
  if (dist.values.size() != dist.probabilities.size())
    throw Error(ErrorCode::MalformedProblem, "distribution value/probability length mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < dist.values.size(); ++i) {
    double ex = dist.values[i] - eta;
    if (ex > 0.0) acc += dist.probabilities[i] * ex;
  }
  return acc;
}

DiscreteDistribution scalarize(const std::vector<std::vector<double>>& outcomes,
                               const std::vector<double>& probabilities,
                               const std::vector<double>& c) {
  if (outcomes.size() != probabilities.size())
    throw Error(ErrorCode::MalformedProblem, "outcome/probability length mismatch");
  DiscreteDistribution dist;
  dist.values.reserve(outcomes.size());
  for (const auto& g : outcomes) {
    if (g.size() != c.size())
      throw Error(ErrorCode::MalformedProblem, "scalarization dimension mismatch");
    double v = 0.0;
    for (size_t i = 0; i < c.size(); ++i) v += c[i] * g[i];
    dist.values.push_back(v);
  }
  dist.probabilities = probabilities;
  return dist;
}

}  // namespace riskdec::risk
