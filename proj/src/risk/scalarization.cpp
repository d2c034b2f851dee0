#include "risk/scalarization.hpp"

#include <algorithm>
#include <cmath>

#include "lp/simplex.hpp"

namespace riskdec::scalar {

namespace {

// Solve a dim x dim dense system in place; returns false when singular.
bool solve_square(std::vector<std::vector<double>> a, std::vector<double> b,
                  std::vector<double>& x) {
  const int n = static_cast<int>(b.size());
  for (int c = 0; c < n; ++c) {
    int p = -1;
    double best = 1e-10;
    for (int r = c; r < n; ++r)
      if (std::fabs(a[r][c]) > best) {
        best = std::fabs(a[r][c]);
        p = r;
      }
    if (p < 0) return false;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    double inv = 1.0 / a[c][c];
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      double f = a[r][c] * inv;
      if (f == 0.0) continue;
      for (int k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  x.resize(n);
  for (int c = 0; c < n; ++c) x[c] = b[c] / a[c][c];
  return true;
}

bool feasible_point(const PolyhedronH& poly, const std::vector<double>& v, double tol) {
  for (size_t r = 0; r < poly.ineq_rows.size(); ++r) {
    double lhs = 0.0;
    for (int k = 0; k < poly.dim; ++k) lhs += poly.ineq_rows[r][k] * v[k];
    if (lhs > poly.ineq_rhs[r] + tol) return false;
  }
  for (size_t r = 0; r < poly.eq_rows.size(); ++r) {
    double lhs = 0.0;
    for (int k = 0; k < poly.dim; ++k) lhs += poly.eq_rows[r][k] * v[k];
    if (std::fabs(lhs - poly.eq_rhs[r]) > tol) return false;
  }
  return true;
}

void dedup_sorted(std::vector<std::vector<double>>& pts, double tol) {
  std::sort(pts.begin(), pts.end());
  std::vector<std::vector<double>> kept;
  for (auto& p : pts) {
    bool dup = false;
    for (const auto& q : kept) {
      double dist = 0.0;
      for (size_t k = 0; k < p.size(); ++k) dist = std::max(dist, std::fabs(p[k] - q[k]));
      if (dist <= tol) {
        dup = true;
        break;
      }
    }
    if (!dup) kept.push_back(std::move(p));
  }
  pts = std::move(kept);
}

// Nonzero direction of the lineality space, if one exists: for each
// coordinate, maximize/minimize d_k subject to all rows homogeneous-equal and
// |d| <= 1 componentwise.
bool has_lineality_direction(const PolyhedronH& poly) {
  lp::LinearProgram prob;
  for (int k = 0; k < poly.dim; ++k) prob.add_var(0.0, -1.0, 1.0);
  for (const auto& row : poly.ineq_rows) prob.add_row(row, lp::Sense::Eq, 0.0);
  for (const auto& row : poly.eq_rows) prob.add_row(row, lp::Sense::Eq, 0.0);
  for (int k = 0; k < poly.dim; ++k) {
    for (double sign : {1.0, -1.0}) {
      for (int j = 0; j < poly.dim; ++j) prob.objective[j] = j == k ? -sign : 0.0;
      auto res = lp::solve_lp(prob);
      if (res.status == lp::LpStatus::Optimal && -res.objective > 1e-7) return true;
    }
  }
  return false;
}

bool inside_c(const model::ScalarizationSet& cs, const std::vector<double>& c, double tol) {
  double sum = 0.0;
  for (double v : c) {
    if (v < -tol) return false;
    sum += v;
  }
  if (std::fabs(sum - 1.0) > tol) return false;
  for (size_t r = 0; r < cs.d_rows.size(); ++r) {
    double lhs = 0.0;
    for (int k = 0; k < cs.dimension; ++k) lhs += cs.d_rows[r][k] * c[k];
    if (lhs > cs.e[r] + tol) return false;
  }
  return true;
}

void append_c_rows(PolyhedronH& poly, const model::ScalarizationSet& cs) {
  const int d = cs.dimension;
  std::vector<double> simplex(poly.dim, 0.0);
  for (int k = 0; k < d; ++k) simplex[k] = 1.0;
  poly.add_eq(simplex, 1.0);
  for (int k = 0; k < d; ++k) {
    std::vector<double> row(poly.dim, 0.0);
    row[k] = -1.0;
    poly.add_ineq(std::move(row), 0.0);  // c_k >= 0
  }
  for (size_t r = 0; r < cs.d_rows.size(); ++r) {
    std::vector<double> row(poly.dim, 0.0);
    for (int k = 0; k < d; ++k) row[k] = cs.d_rows[r][k];
    poly.add_ineq(std::move(row), cs.e[r]);
  }
}

std::vector<std::vector<double>> c_vertices(const model::ScalarizationSet& cs,
                                            const EnumerationConfig& cfg) {
  auto poly = build_C(cs);
  auto verts = enumerate_vertices(poly, cfg);
  if (verts.empty()) throw Error(ErrorCode::EmptyScalarizationSet, "scalarization set is empty");
  return verts;
}

// c on the segment c_2 = 1 - c_1 where a'c == b'c, restricted to C.
void add_crossings_2d(const model::ScalarizationSet& cs, const std::vector<double>& a,
                      const std::vector<double>& b, std::vector<std::vector<double>>& out) {
  // (a1 - b1) c1 + (a2 - b2)(1 - c1) = 0
  double d1 = a[0] - b[0], d2 = a[1] - b[1];
  double denom = d1 - d2;
  if (std::fabs(denom) < 1e-13) return;  // parallel scalarizations, no crossing
  double c1 = -d2 / denom;
  std::vector<double> c{c1, 1.0 - c1};
  if (inside_c(cs, c, 1e-9)) out.push_back(std::move(c));
}

}  // namespace

PolyhedronH build_C(const model::ScalarizationSet& cs) {
  if (cs.dimension < 1) throw Error(ErrorCode::EmptyScalarizationSet, "scalarization dimension < 1");
  PolyhedronH poly;
  poly.dim = cs.dimension;
  append_c_rows(poly, cs);
  return poly;
}

PolyhedronH build_P(const model::Benchmark& bm, const model::ScalarizationSet& cs) {
  const int d = cs.dimension;
  const int T = bm.count();
  PolyhedronH poly;
  poly.dim = d + 1 + T;  // (c, eta, w)
  append_c_rows(poly, cs);
  for (int i = 0; i < T; ++i) {
    // w_i >= eta - c'z_i   ->   eta - c'z_i - w_i <= 0
    std::vector<double> row(poly.dim, 0.0);
    for (int k = 0; k < d; ++k) row[k] = -bm.realizations[i][k];
    row[d] = 1.0;
    row[d + 1 + i] = -1.0;
    poly.add_ineq(std::move(row), 0.0);
    std::vector<double> pos(poly.dim, 0.0);
    pos[d + 1 + i] = -1.0;
    poly.add_ineq(std::move(pos), 0.0);  // w_i >= 0
  }
  return poly;
}

PolyhedronH build_P_t(const model::Benchmark& bm, const model::ScalarizationSet& cs, int t) {
  const int d = cs.dimension;
  const int T = bm.count();
  if (t < 0 || t >= T) throw Error(ErrorCode::InvalidArgument, "benchmark index out of range");
  PolyhedronH poly;
  poly.dim = d + T;  // (c, w)
  append_c_rows(poly, cs);
  for (int i = 0; i < T; ++i) {
    // w_i >= c'z_i - c'z_t  ->  c'(z_i - z_t) - w_i <= 0
    std::vector<double> row(poly.dim, 0.0);
    for (int k = 0; k < d; ++k) row[k] = bm.realizations[i][k] - bm.realizations[t][k];
    row[d + i] = -1.0;
    poly.add_ineq(std::move(row), 0.0);
    std::vector<double> pos(poly.dim, 0.0);
    pos[d + i] = -1.0;
    poly.add_ineq(std::move(pos), 0.0);
  }
  return poly;
}

std::vector<std::vector<double>> enumerate_vertices(const PolyhedronH& poly,
                                                    const EnumerationConfig& cfg) {
  const int dim = poly.dim;
  if (dim > cfg.dimension_cap)
    throw Error(ErrorCode::DimensionCapExceeded,
                "vertex enumeration dimension " + std::to_string(dim) + " exceeds cap " +
                    std::to_string(cfg.dimension_cap));
  if (cfg.check_pointed && has_lineality_direction(poly))
    throw Error(ErrorCode::NotPointed, "polyhedron contains a line");

  const int ne = static_cast<int>(poly.eq_rows.size());
  const int ni = static_cast<int>(poly.ineq_rows.size());
  const int need = dim - ne;
  std::vector<std::vector<double>> verts;
  if (need < 0 || need > ni) return verts;

  std::vector<int> pick(need);
  for (int i = 0; i < need; ++i) pick[i] = i;
  std::vector<std::vector<double>> a(dim);
  std::vector<double> b(dim);
  while (true) {
    for (int r = 0; r < ne; ++r) {
      a[r] = poly.eq_rows[r];
      b[r] = poly.eq_rhs[r];
    }
    for (int r = 0; r < need; ++r) {
      a[ne + r] = poly.ineq_rows[pick[r]];
      b[ne + r] = poly.ineq_rhs[pick[r]];
    }
    std::vector<double> v;
    if (solve_square(a, b, v) && feasible_point(poly, v, cfg.feas_tol)) verts.push_back(std::move(v));

    // next combination
    int i = need - 1;
    while (i >= 0 && pick[i] == ni - need + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int k = i + 1; k < need; ++k) pick[k] = pick[k - 1] + 1;
  }
  dedup_sorted(verts, cfg.dedup_tol);
  return verts;
}

ScalarizationVertexSet project_scalarizations(const std::vector<std::vector<double>>& vertices,
                                              int d, const model::ScalarizationSet& c_set,
                                              std::string source, double dedup_tol) {
  std::vector<std::vector<double>> projected;
  for (const auto& v : vertices) {
    std::vector<double> c(v.begin(), v.begin() + d);
    if (inside_c(c_set, c, 1e-9)) projected.push_back(std::move(c));
  }
  dedup_sorted(projected, dedup_tol);
  ScalarizationVertexSet out;
  out.vectors = std::move(projected);
  out.source = std::move(source);
  return out;
}

// Above this many benchmark atoms the d = 2 crossing construction takes over
// from full enumeration; both produce the same projected set.
constexpr int kAnalytic2dThreshold = 8;

ScalarizationVertexSet cvar_scalarization_set(const model::Benchmark& bm,
                                              const model::ScalarizationSet& cs,
                                              const EnumerationConfig& cfg) {
  const int d = cs.dimension;
  const int T = bm.count();
  if (T == 0) throw Error(ErrorCode::EmptyVertexSet, "benchmark has no realizations");
  if (d + 1 + T <= cfg.dimension_cap && !(d == 2 && T > kAnalytic2dThreshold)) {
    auto verts = enumerate_vertices(build_P(bm, cs), cfg);
    return project_scalarizations(verts, d, cs, "P", cfg.dedup_tol);
  }
  if (d != 2)
    throw Error(ErrorCode::DimensionCapExceeded,
                "benchmark too large for vertex enumeration and d != 2");
  auto pts = c_vertices(cs, cfg);
  for (int i = 0; i < T; ++i)
    for (int j = i + 1; j < T; ++j)
      add_crossings_2d(cs, bm.realizations[i], bm.realizations[j], pts);
  dedup_sorted(pts, cfg.dedup_tol);
  ScalarizationVertexSet out;
  out.vectors = std::move(pts);
  out.source = "P";
  return out;
}

std::vector<ScalarizationVertexSet> ico_scalarization_sets(const model::Benchmark& bm,
                                                           const model::ScalarizationSet& cs,
                                                           const EnumerationConfig& cfg) {
  const int d = cs.dimension;
  const int T = bm.count();
  if (T == 0) throw Error(ErrorCode::EmptyVertexSet, "benchmark has no realizations");
  std::vector<ScalarizationVertexSet> sets(T);
  if (d + T <= cfg.dimension_cap && !(d == 2 && T > kAnalytic2dThreshold)) {
    for (int t = 0; t < T; ++t) {
      auto verts = enumerate_vertices(build_P_t(bm, cs, t), cfg);
      sets[t] = project_scalarizations(verts, d, cs, "P_t:" + std::to_string(t), cfg.dedup_tol);
    }
    return sets;
  }
  if (d != 2)
    throw Error(ErrorCode::DimensionCapExceeded,
                "benchmark too large for vertex enumeration and d != 2");
  auto base = c_vertices(cs, cfg);
  for (int t = 0; t < T; ++t) {
    auto pts = base;
    for (int i = 0; i < T; ++i) {
      if (i == t) continue;
      add_crossings_2d(cs, bm.realizations[i], bm.realizations[t], pts);
    }
    dedup_sorted(pts, cfg.dedup_tol);
    sets[t].vectors = std::move(pts);
    sets[t].source = "P_t:" + std::to_string(t);
  }
  return sets;
}

}  // namespace riskdec::scalar
