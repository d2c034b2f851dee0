#include "risk/separation.hpp"

#include <cmath>

#include "lp/bnb.hpp"
#include "risk/measures.hpp"

namespace riskdec::sep {

using risk::cvar_alpha;
using risk::expected_excess;
using risk::scalarize;

SeparationResult separate_cvar(const std::vector<std::vector<double>>& outcomes,
                               const std::vector<double>& probs, const model::Benchmark& bm,
                               double alpha, const scalar::ScalarizationVertexSet& vertex_set) {
  SeparationResult res;
  res.mode = Mode::CVaR;
  if (vertex_set.empty()) throw Error(ErrorCode::EmptyVertexSet, "CVaR separation needs a vertex set");
  double best = -lp::kInf;
  for (const auto& c : vertex_set.vectors) {
    double v = cvar_alpha(scalarize(outcomes, probs, c), alpha) -
               cvar_alpha(scalarize(bm.realizations, bm.probabilities, c), alpha);
    ++res.evaluated_count;
    if (v > best) {  // vectors are sorted, so first strict max is the lex-smallest
      best = v;
      res.best_c = c;
    }
  }
  res.violation = best;
  return res;
}

SeparationResult separate_ico(const std::vector<std::vector<double>>& outcomes,
                              const std::vector<double>& probs, const model::Benchmark& bm,
                              const std::vector<scalar::ScalarizationVertexSet>& vertex_sets) {
  SeparationResult res;
  res.mode = Mode::ICO;
  if (vertex_sets.empty()) throw Error(ErrorCode::EmptyVertexSet, "ICO separation needs vertex sets");
  double best_min = lp::kInf;
  for (size_t t = 0; t < vertex_sets.size(); ++t) {
    if (vertex_sets[t].empty())
      throw Error(ErrorCode::EmptyVertexSet, "ICO separation family " + std::to_string(t) + " empty");
    const auto& zt = bm.realizations[t];
    for (const auto& c : vertex_sets[t].vectors) {
      double ct_z = 0.0;
      for (size_t k = 0; k < c.size(); ++k) ct_z += c[k] * zt[k];
      double v = expected_excess(scalarize(bm.realizations, bm.probabilities, c), ct_z) -
                 expected_excess(scalarize(outcomes, probs, c), ct_z);
      ++res.evaluated_count;
      if (v < best_min) {  // smallest t first, then lex-smallest c
        best_min = v;
        res.best_c = c;
        res.ico_t = static_cast<int>(t);
      }
    }
  }
  res.violation = -best_min;
  return res;
}

SeparationResult separate_cvar_mip(const std::vector<std::vector<double>>& outcomes,
                                   const std::vector<double>& probs, const model::Benchmark& bm,
                                   double alpha, const model::ScalarizationSet& c_set) {
  const int S = static_cast<int>(outcomes.size());
  const int T = bm.count();
  const int d = c_set.dimension;
  double k_real = (1.0 - alpha) * S;
  int k = static_cast<int>(std::llround(k_real));
  if (std::fabs(k_real - k) > 1e-9 || k < 1)
    throw Error(ErrorCode::InvalidArgument,
                "MIP separation requires equiprobable scenarios with integral (1-alpha)|S|");
  for (double p : probs)
    if (std::fabs(p - 1.0 / S) > 1e-12)
      throw Error(ErrorCode::InvalidArgument, "MIP separation requires equiprobable scenarios");

  // big-M: bound on |c'g_s| over the simplex
  double big_m = 1.0;
  for (const auto& g : outcomes)
    for (double v : g) big_m = std::max(big_m, std::fabs(v));
  big_m *= 2.0;

  // variables: c (d) | theta (S) | delta (S, binary) | eta_z | wz (T)
  lp::MixedIntegerProgram mip;
  auto& prob = mip.relaxation;
  for (int i = 0; i < d; ++i) prob.add_var(0.0, 0.0, 1.0);
  int theta0 = prob.num_vars();
  for (int s = 0; s < S; ++s) prob.add_var(-1.0 / k, -lp::kInf, lp::kInf);
  int delta0 = prob.num_vars();
  for (int s = 0; s < S; ++s) mip.binary_vars.push_back(prob.add_var(0.0, 0.0, 1.0));
  int etaz = prob.add_var(1.0, -lp::kInf, lp::kInf);
  int wz0 = prob.num_vars();
  for (int i = 0; i < T; ++i) prob.add_var(bm.probabilities[i] / (1.0 - alpha));

  const int n = prob.num_vars();
  // simplex and C rows
  {
    std::vector<double> row(n, 0.0);
    for (int i = 0; i < d; ++i) row[i] = 1.0;
    prob.add_row(row, lp::Sense::Eq, 1.0);
  }
  for (size_t r = 0; r < c_set.d_rows.size(); ++r) {
    std::vector<double> row(n, 0.0);
    for (int i = 0; i < d; ++i) row[i] = c_set.d_rows[r][i];
    prob.add_row(row, lp::Sense::Le, c_set.e[r]);
  }
  // theta_s <= c'g_s + M (1 - delta_s)  and  theta_s <= M delta_s
  for (int s = 0; s < S; ++s) {
    std::vector<double> row(n, 0.0);
    for (int i = 0; i < d; ++i) row[i] = -outcomes[s][i];
    row[theta0 + s] = 1.0;
    row[delta0 + s] = big_m;
    prob.add_row(row, lp::Sense::Le, big_m);
    std::vector<double> row2(n, 0.0);
    row2[theta0 + s] = 1.0;
    row2[delta0 + s] = -big_m;
    prob.add_row(row2, lp::Sense::Le, 0.0);
  }
  // exactly k tail scenarios
  {
    std::vector<double> row(n, 0.0);
    for (int s = 0; s < S; ++s) row[delta0 + s] = 1.0;
    prob.add_row(row, lp::Sense::Eq, static_cast<double>(k));
  }
  // benchmark side: wz_i >= c'z_i - eta_z
  for (int i = 0; i < T; ++i) {
    std::vector<double> row(n, 0.0);
    for (int kk = 0; kk < d; ++kk) row[kk] = bm.realizations[i][kk];
    row[etaz] = -1.0;
    row[wz0 + i] = -1.0;
    prob.add_row(row, lp::Sense::Le, 0.0);
  }

  auto out = lp::solve_mip(mip);
  SeparationResult res;
  res.mode = Mode::CVaR;
  if (out.status != lp::MipStatus::Optimal)
    throw Error(ErrorCode::NumericalFailure, "MIP separation did not solve");
  res.violation = -out.objective;
  res.best_c = std::vector<double>(out.primal.begin(), out.primal.begin() + d);
  res.evaluated_count = static_cast<int>(out.node_count);
  return res;
}

}  // namespace riskdec::sep
