#pragma once

#include <string>
#include <vector>

#include "model/instance.hpp"

namespace riskdec::scalar {

// H-representation with all inequalities normalized to a'v <= rhs plus
// explicit equality rows.
struct PolyhedronH {
  int dim = 0;
  std::vector<std::vector<double>> ineq_rows;
  std::vector<double> ineq_rhs;
  std::vector<std::vector<double>> eq_rows;
  std::vector<double> eq_rhs;

  void add_ineq(std::vector<double> row, double rhs) {
    ineq_rows.push_back(std::move(row));
    ineq_rhs.push_back(rhs);
  }
  void add_eq(std::vector<double> row, double rhs) {
    eq_rows.push_back(std::move(row));
    eq_rhs.push_back(rhs);
  }
};

struct ScalarizationVertexSet {
  std::vector<std::vector<double>> vectors;
  std::string source;  // "P" or "P_t:<t>" or "C"
  bool empty() const { return vectors.empty(); }
};

// Polyhedron over (c, eta, w): rows of C, w_i >= eta - c'z_i, w >= 0.
PolyhedronH build_P(const model::Benchmark& benchmark, const model::ScalarizationSet& c_set);

// Polyhedron over (c, w): rows of C, w_i >= c'z_i - c'z_t, w >= 0.
PolyhedronH build_P_t(const model::Benchmark& benchmark, const model::ScalarizationSet& c_set, int t);

// The scalarization set itself, over c.
PolyhedronH build_C(const model::ScalarizationSet& c_set);

struct EnumerationConfig {
  int dimension_cap = 15;
  double feas_tol = 1e-9;
  double dedup_tol = 1e-8;
  bool check_pointed = true;
};

// Exhaustive basis enumeration: all dim-sized active sets built from the
// equality rows plus inequality subsets. Exact at desk scale.
std::vector<std::vector<double>> enumerate_vertices(const PolyhedronH& poly,
                                                    const EnumerationConfig& config = {});

ScalarizationVertexSet project_scalarizations(const std::vector<std::vector<double>>& vertices,
                                              int d, const model::ScalarizationSet& c_set,
                                              std::string source, double dedup_tol = 1e-8);

// Production builders for the finite sufficient scalarization family. Small
// benchmarks go through full vertex enumeration of P / P_t; for d == 2 the
// same projected set is computed directly from the vertices of C plus the
// crossing points { c : c'z_i = c'z_j } without materializing the
// (d+1+|T|)-dimensional polyhedron, which keeps large benchmarks exact.
ScalarizationVertexSet cvar_scalarization_set(const model::Benchmark& benchmark,
                                              const model::ScalarizationSet& c_set,
                                              const EnumerationConfig& config = {});
std::vector<ScalarizationVertexSet> ico_scalarization_sets(const model::Benchmark& benchmark,
                                                           const model::ScalarizationSet& c_set,
                                                           const EnumerationConfig& config = {});

}  // namespace riskdec::scalar
