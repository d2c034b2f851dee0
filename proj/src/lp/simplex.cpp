// Bounded-variable revised simplex with a dense explicit basis inverse.
//
// Phase 1 minimizes the total value of artificial columns added for rows whose
// slack-basis start violates the slack bounds; its optimal multipliers are the
// Farkas certificate when the residual infeasibility is positive. Phase 2 runs
// the same pivoting core on the original costs. Anti-cycling: after a streak
// of degenerate pivots the pricing and ratio tie-breaks switch to the
// least-index rule until a nondegenerate step is made.
//
// The explicit inverse is refreshed on a pivot-count schedule and whenever the
// consistency watchdog detects drift; if a refreshed inverse reveals that the
// basis lost primal feasibility, the whole solve restarts once with tighter
// refresh intervals.

#include "lp/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace riskdec::lp {

namespace {

constexpr double kPivotTol = 1e-8;
constexpr double kDualTol = 1e-9;
constexpr double kDegenStep = 1e-11;

enum class VarState : unsigned char { Basic, AtLower, AtUpper, FreeZero };

// thrown internally when numerics degrade beyond in-place repair
struct RestartSignal {};

struct Tuning {
  int recompute_every = 32;
  int reinvert_every = 0;  // 0: derive from m
};

struct Tableau {
  int n = 0;  // structural
  int m = 0;  // rows
  int num_art = 0;

  // structural columns, CSC
  std::vector<int> col_start, col_row;
  std::vector<double> col_val;
  // artificial columns: one optional per row
  std::vector<int> art_row;
  std::vector<double> art_sign;

  std::vector<double> lo, up;  // per column (structural, slack, artificial)
  std::vector<double> rhs;

  std::vector<int> basis;        // m column indices
  std::vector<VarState> state;   // per column
  std::vector<double> xb;        // basic values
  std::vector<double> binv;      // dense m*m, row-major
  std::vector<double> reduced_rhs;

  int total_cols() const { return n + m + num_art; }
  double* binv_row(int r) { return binv.data() + static_cast<size_t>(r) * m; }

  bool is_artificial(int j) const { return j >= n + m; }

  double column_dot(int j, const std::vector<double>& y) const {
    if (j < n) {
      double s = 0.0;
      for (int k = col_start[j]; k < col_start[j + 1]; ++k) s += col_val[k] * y[col_row[k]];
      return s;
    }
    if (j < n + m) return y[j - n];
    return art_sign[j - n - m] * y[art_row[j - n - m]];
  }

  // alpha = Binv * column(j)
  void ftran(int j, std::vector<double>& alpha) {
    alpha.assign(m, 0.0);
    if (j < n) {
      for (int k = 0; k < m; ++k) {
        const double* brow = binv.data() + static_cast<size_t>(k) * m;
        double s = 0.0;
        for (int u = col_start[j]; u < col_start[j + 1]; ++u) s += col_val[u] * brow[col_row[u]];
        alpha[k] = s;
      }
    } else if (j < n + m) {
      int i = j - n;
      for (int r = 0; r < m; ++r) alpha[r] = binv[static_cast<size_t>(r) * m + i];
    } else {
      int a = j - n - m;
      int i = art_row[a];
      double v = art_sign[a];
      for (int r = 0; r < m; ++r) alpha[r] = v * binv[static_cast<size_t>(r) * m + i];
    }
  }

  // y = Binv^T * cb
  void btran(const std::vector<double>& cb, std::vector<double>& y) const {
    y.assign(m, 0.0);
    for (int r = 0; r < m; ++r) {
      double c = cb[r];
      if (c == 0.0) continue;
      const double* brow = binv.data() + static_cast<size_t>(r) * m;
      for (int k = 0; k < m; ++k) y[k] += c * brow[k];
    }
  }

  double bound_value(int j) const {
    switch (state[j]) {
      case VarState::AtLower: return lo[j];
      case VarState::AtUpper: return up[j];
      default: return 0.0;
    }
  }

  void recompute_basics() {
    reduced_rhs = rhs;
    for (int j = 0; j < total_cols(); ++j) {
      if (state[j] == VarState::Basic) continue;
      double v = bound_value(j);
      if (v == 0.0) continue;
      if (j < n) {
        for (int k = col_start[j]; k < col_start[j + 1]; ++k)
          reduced_rhs[col_row[k]] -= v * col_val[k];
      } else if (j < n + m) {
        reduced_rhs[j - n] -= v;
      } else {
        reduced_rhs[art_row[j - n - m]] -= v * art_sign[j - n - m];
      }
    }
    for (int k = 0; k < m; ++k) {
      const double* brow = binv.data() + static_cast<size_t>(k) * m;
      double s = 0.0;
      for (int i = 0; i < m; ++i) s += brow[i] * reduced_rhs[i];
      xb[k] = s;
    }
  }

  // ||B xb - reduced_rhs||_inf / scale; grows when the updated inverse drifts
  double consistency_error() const {
    std::vector<double> acc(m, 0.0);
    double scale = 1.0;
    for (int k = 0; k < m; ++k) {
      int j = basis[k];
      double v = xb[k];
      if (v == 0.0) continue;
      if (j < n) {
        for (int u = col_start[j]; u < col_start[j + 1]; ++u) acc[col_row[u]] += v * col_val[u];
      } else if (j < n + m) {
        acc[j - n] += v;
      } else {
        acc[art_row[j - n - m]] += v * art_sign[j - n - m];
      }
    }
    double err = 0.0;
    for (int i = 0; i < m; ++i) {
      err = std::max(err, std::fabs(acc[i] - reduced_rhs[i]));
      scale = std::max(scale, std::fabs(reduced_rhs[i]));
    }
    return err / scale;
  }

  double max_basic_bound_violation() const {
    double v = 0.0;
    for (int k = 0; k < m; ++k) {
      int j = basis[k];
      v = std::max(v, std::max(lo[j] - xb[k], xb[k] - up[j]));
    }
    return v;
  }

  // Rebuild the inverse from the current basis by Gauss-Jordan.
  void reinvert() {
    std::vector<double> b(static_cast<size_t>(m) * m, 0.0);
    for (int k = 0; k < m; ++k) {
      int j = basis[k];
      if (j < n) {
        for (int t = col_start[j]; t < col_start[j + 1]; ++t)
          b[static_cast<size_t>(col_row[t]) * m + k] = col_val[t];
      } else if (j < n + m) {
        b[static_cast<size_t>(j - n) * m + k] = 1.0;
      } else {
        b[static_cast<size_t>(art_row[j - n - m]) * m + k] = art_sign[j - n - m];
      }
    }
    binv.assign(static_cast<size_t>(m) * m, 0.0);
    for (int k = 0; k < m; ++k) binv[static_cast<size_t>(k) * m + k] = 1.0;
    for (int c = 0; c < m; ++c) {
      int p = -1;
      double best = 0.0;
      for (int r = c; r < m; ++r) {
        double v = std::fabs(b[static_cast<size_t>(r) * m + c]);
        if (v > best) {
          best = v;
          p = r;
        }
      }
      if (p < 0 || best < 1e-12) throw RestartSignal{};
      if (p != c) {
        for (int k = 0; k < m; ++k) {
          std::swap(b[static_cast<size_t>(p) * m + k], b[static_cast<size_t>(c) * m + k]);
          std::swap(binv[static_cast<size_t>(p) * m + k], binv[static_cast<size_t>(c) * m + k]);
        }
      }
      double inv = 1.0 / b[static_cast<size_t>(c) * m + c];
      for (int k = 0; k < m; ++k) {
        b[static_cast<size_t>(c) * m + k] *= inv;
        binv[static_cast<size_t>(c) * m + k] *= inv;
      }
      for (int r = 0; r < m; ++r) {
        if (r == c) continue;
        double f = b[static_cast<size_t>(r) * m + c];
        if (f == 0.0) continue;
        double* br = b.data() + static_cast<size_t>(r) * m;
        double* bc = b.data() + static_cast<size_t>(c) * m;
        double* ir = binv.data() + static_cast<size_t>(r) * m;
        double* ic = binv.data() + static_cast<size_t>(c) * m;
        for (int k = 0; k < m; ++k) {
          br[k] -= f * bc[k];
          ir[k] -= f * ic[k];
        }
      }
    }
  }
};

void validate_problem(const LinearProgram& p) {
  const int n = p.num_vars();
  if (static_cast<int>(p.lower.size()) != n || static_cast<int>(p.upper.size()) != n)
    throw Error(ErrorCode::MalformedProblem, "variable bound arrays do not match variable count");
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(p.objective[j]))
      throw Error(ErrorCode::MalformedProblem, "non-finite objective coefficient");
    if (p.lower[j] > p.upper[j])
      throw Error(ErrorCode::MalformedProblem, "lower bound above upper bound");
    if (std::isnan(p.lower[j]) || std::isnan(p.upper[j]))
      throw Error(ErrorCode::MalformedProblem, "NaN bound");
  }
  for (const Row& row : p.rows) {
    if (static_cast<int>(row.coeffs.size()) != n)
      throw Error(ErrorCode::MalformedProblem, "row width does not match variable count");
    if (!std::isfinite(row.rhs)) throw Error(ErrorCode::MalformedProblem, "non-finite rhs");
    for (double v : row.coeffs)
      if (!std::isfinite(v)) throw Error(ErrorCode::MalformedProblem, "non-finite row coefficient");
  }
}

enum class CoreResult { Optimal, Unbounded };

struct Core {
  Tableau& t;
  const SolverConfig& cfg;
  const Tuning& tune;
  int& iter_count;
  int max_iter;
  int reinvert_every;
  int degen_streak = 0;
  int pivots_since_reinvert = 0;
  double tolerated_infeas = 0.0;  // bound slop inherited from phase 1
  std::vector<double> y, alpha, cb;

  Core(Tableau& tab, const SolverConfig& c, const Tuning& tn, int& iters, int cap)
      : t(tab), cfg(c), tune(tn), iter_count(iters), max_iter(cap) {
    reinvert_every = tn.reinvert_every > 0 ? tn.reinvert_every : std::max(100, t.m);
  }

  void load_basis_costs(const std::vector<double>& cost) {
    cb.resize(t.m);
    for (int k = 0; k < t.m; ++k) cb[k] = cost[t.basis[k]];
  }

  void refresh(bool force) {
    t.recompute_basics();
    if (force || t.consistency_error() > 1e-9) {
      t.reinvert();
      t.recompute_basics();
      pivots_since_reinvert = 0;
    }
    double scale = 1.0;
    for (int k = 0; k < t.m; ++k) scale = std::max(scale, std::fabs(t.xb[k]));
    if (t.max_basic_bound_violation() > tolerated_infeas + 1e-6 * scale) throw RestartSignal{};
  }

  // Returns entering column, or -1 at optimality. dir_out is +1/-1.
  int price(const std::vector<double>& cost, bool bland, int& dir_out) {
    t.btran(cb, y);
    int best_j = -1, best_dir = 0;
    double best_score = kDualTol;
    int cols = t.total_cols();
    for (int j = 0; j < cols; ++j) {
      if (t.state[j] == VarState::Basic) continue;
      if (t.lo[j] == t.up[j]) continue;  // fixed
      double d = cost[j] - t.column_dot(j, y);
      int dir = 0;
      if (t.state[j] == VarState::AtLower && d < -kDualTol) dir = 1;
      else if (t.state[j] == VarState::AtUpper && d > kDualTol) dir = -1;
      else if (t.state[j] == VarState::FreeZero && std::fabs(d) > kDualTol) dir = d < 0 ? 1 : -1;
      if (dir == 0) continue;
      if (bland) {
        dir_out = dir;
        return j;
      }
      double score = std::fabs(d);
      if (score > best_score) {
        best_score = score;
        best_j = j;
        best_dir = dir;
      }
    }
    dir_out = best_dir;
    return best_j;
  }

  CoreResult run(const std::vector<double>& cost, bool allow_unbounded, int* unbounded_col,
                 int* unbounded_dir) {
    load_basis_costs(cost);
    bool bland = false;
    int since_recompute = 0;
    int reinversions_without_pivot = 0;
    while (true) {
      if (++iter_count > max_iter)
        throw Error(ErrorCode::NumericalFailure,
                    "simplex iteration limit exceeded (cycling not resolved)");
      if (++since_recompute >= tune.recompute_every) {
        if (cfg.has_deadline && std::chrono::steady_clock::now() > cfg.deadline)
          throw Error(ErrorCode::TimeLimit, "lp solve hit the wall-clock deadline");
        refresh(false);
        since_recompute = 0;
      }
      int dir = 0;
      int q = price(cost, bland, dir);
      if (q < 0) {
        // accept optimality only against a trustworthy inverse
        refresh(false);
        if (t.consistency_error() > 1e-9) {
          if (++reinversions_without_pivot > 3)
            throw Error(ErrorCode::NumericalFailure, "basis inverse unrecoverable at optimum");
          continue;
        }
        return CoreResult::Optimal;
      }

      t.ftran(q, alpha);

      // Ratio test. A basic variable blocks at the first bound met in its
      // direction of travel; a basic sitting beyond a bound therefore stops
      // at that bound instead of sweeping through the whole range.
      double own_range = t.up[q] - t.lo[q];  // inf allowed
      double best_t = own_range;
      int block = -1;  // basis slot, -1 means entering bound flip
      bool block_at_upper = false;
      for (int k = 0; k < t.m; ++k) {
        double a = dir * alpha[k];
        int bj = t.basis[k];
        double step;
        bool at_upper;
        if (a > kPivotTol) {  // moving down
          double bound = t.xb[k] > t.up[bj] ? t.up[bj] : t.lo[bj];
          at_upper = t.xb[k] > t.up[bj];
          if (bound == -kInf) continue;
          step = (t.xb[k] - bound) / a;
        } else if (a < -kPivotTol) {  // moving up
          double bound = t.xb[k] < t.lo[bj] ? t.lo[bj] : t.up[bj];
          at_upper = !(t.xb[k] < t.lo[bj]);
          if (bound == kInf) continue;
          step = (t.xb[k] - bound) / a;
        } else {
          continue;
        }
        if (step < 0.0) step = 0.0;
        if (step < best_t - 1e-12) {
          best_t = step;
          block = k;
          block_at_upper = at_upper;
        } else if (block >= 0 && step <= best_t + 1e-12) {
          // tie: least index under Bland, otherwise biggest pivot for stability
          if (bland ? (t.basis[k] < t.basis[block])
                    : (std::fabs(alpha[k]) > std::fabs(alpha[block]))) {
            best_t = std::min(best_t, step);
            block = k;
            block_at_upper = at_upper;
          }
        }
      }

      if (block < 0 && !(own_range < kInf)) {
        if (!allow_unbounded)
          throw Error(ErrorCode::NumericalFailure, "phase-1 objective unbounded");
        if (unbounded_col) *unbounded_col = q;
        if (unbounded_dir) *unbounded_dir = dir;
        return CoreResult::Unbounded;
      }

      double step = block < 0 ? own_range : best_t;
      if (step > 0.0) {
        for (int k = 0; k < t.m; ++k) t.xb[k] -= step * dir * alpha[k];
      }

      if (block < 0) {
        // bound flip, basis unchanged
        t.state[q] = t.state[q] == VarState::AtLower ? VarState::AtUpper : VarState::AtLower;
        degen_streak = 0;
        continue;
      }

      double piv = alpha[block];
      if (std::fabs(piv) < kPivotTol) {
        // refresh and retry the whole iteration against a clean inverse
        if (++reinversions_without_pivot > 3)
          throw Error(ErrorCode::NumericalFailure, "tiny pivot persists after reinversion");
        refresh(true);
        continue;
      }
      reinversions_without_pivot = 0;

      int leaving = t.basis[block];
      double entering_value = t.bound_value(q) + dir * step;
      t.state[leaving] = block_at_upper ? VarState::AtUpper : VarState::AtLower;
      if (t.lo[leaving] == t.up[leaving]) t.state[leaving] = VarState::AtLower;
      t.state[q] = VarState::Basic;
      t.basis[block] = q;

      // Binv <- E * Binv
      double* prow = t.binv_row(block);
      double inv = 1.0 / piv;
      for (int k = 0; k < t.m; ++k) prow[k] *= inv;
      for (int r = 0; r < t.m; ++r) {
        if (r == block) continue;
        double f = alpha[r];
        if (f == 0.0) continue;
        double* row = t.binv_row(r);
        for (int k = 0; k < t.m; ++k) row[k] -= f * prow[k];
      }
      t.xb[block] = entering_value;
      cb[block] = cost[q];

      if (++pivots_since_reinvert >= reinvert_every) {
        refresh(true);
        since_recompute = 0;
      }

      if (step <= kDegenStep) {
        if (++degen_streak > cfg.degeneracy_streak) bland = true;
      } else {
        degen_streak = 0;
        bland = false;
      }
    }
  }
};

LpOutcome solve_attempt(const LinearProgram& p, const SolverConfig& cfg, const Tuning& tune) {
  const int n = p.num_vars();
  const int m = p.num_rows();

  LpOutcome out;
  if (m == 0 && n == 0) {
    out.status = LpStatus::Optimal;
    return out;
  }

  Tableau t;
  t.n = n;
  t.m = m;
  t.lo.reserve(n + m);
  t.up.reserve(n + m);
  t.lo.assign(p.lower.begin(), p.lower.end());
  t.up.assign(p.upper.begin(), p.upper.end());
  t.rhs.resize(m);

  // structural columns in CSC
  t.col_start.assign(n + 1, 0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (p.rows[i].coeffs[j] != 0.0) ++t.col_start[j + 1];
  for (int j = 0; j < n; ++j) t.col_start[j + 1] += t.col_start[j];
  t.col_row.resize(t.col_start[n]);
  t.col_val.resize(t.col_start[n]);
  {
    std::vector<int> fill(t.col_start.begin(), t.col_start.end() - 1);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) {
        double v = p.rows[i].coeffs[j];
        if (v != 0.0) {
          t.col_row[fill[j]] = i;
          t.col_val[fill[j]] = v;
          ++fill[j];
        }
      }
  }

  // slack bounds encode the row senses
  for (int i = 0; i < m; ++i) {
    t.rhs[i] = p.rows[i].rhs;
    switch (p.rows[i].sense) {
      case Sense::Le: t.lo.push_back(0.0); t.up.push_back(kInf); break;
      case Sense::Ge: t.lo.push_back(-kInf); t.up.push_back(0.0); break;
      case Sense::Eq: t.lo.push_back(0.0); t.up.push_back(0.0); break;
    }
  }

  t.state.assign(n + m, VarState::AtLower);
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(t.lo[j])) t.state[j] = VarState::AtLower;
    else if (std::isfinite(t.up[j])) t.state[j] = VarState::AtUpper;
    else t.state[j] = VarState::FreeZero;
  }

  // slack start values
  std::vector<double> activity(m, 0.0);
  for (int j = 0; j < n; ++j) {
    double v = t.state[j] == VarState::AtLower ? t.lo[j]
               : t.state[j] == VarState::AtUpper ? t.up[j]
                                                 : 0.0;
    if (v == 0.0) continue;
    for (int k = t.col_start[j]; k < t.col_start[j + 1]; ++k)
      activity[t.col_row[k]] += v * t.col_val[k];
  }

  t.basis.resize(m);
  t.xb.assign(m, 0.0);
  double bscale = 1.0;
  for (int i = 0; i < m; ++i) bscale = std::max(bscale, std::fabs(t.rhs[i]));
  const double start_tol = cfg.feas_tol * bscale;

  for (int i = 0; i < m; ++i) {
    int sj = n + i;
    double sval = t.rhs[i] - activity[i];
    if (sval >= t.lo[sj] - start_tol && sval <= t.up[sj] + start_tol) {
      t.basis[i] = sj;
      t.state[sj] = VarState::Basic;
      t.xb[i] = sval;
    } else {
      double sbar = sval < t.lo[sj] ? t.lo[sj] : t.up[sj];
      t.state[sj] = sval < t.lo[sj] ? VarState::AtLower : VarState::AtUpper;
      double resid = sval - sbar;
      t.art_row.push_back(i);
      t.art_sign.push_back(resid >= 0 ? 1.0 : -1.0);
      t.lo.push_back(0.0);
      t.up.push_back(kInf);
      t.state.push_back(VarState::Basic);
      int aj = n + m + t.num_art;
      ++t.num_art;
      t.basis[i] = aj;
      t.xb[i] = std::fabs(resid);
    }
  }

  // initial inverse: basis columns are unit vectors up to artificial signs
  t.binv.assign(static_cast<size_t>(m) * m, 0.0);
  for (int i = 0; i < m; ++i) {
    double coef = t.basis[i] < n + m ? 1.0 : t.art_sign[t.basis[i] - n - m];
    t.binv[static_cast<size_t>(i) * m + i] = 1.0 / coef;
  }
  t.recompute_basics();

  const int cap = cfg.max_iterations > 0 ? cfg.max_iterations : 50 * (m + n) + 10000;
  Core core(t, cfg, tune, out.iterations, cap);

  if (t.num_art > 0) {
    std::vector<double> cost1(t.total_cols(), 0.0);
    for (int a = 0; a < t.num_art; ++a) cost1[n + m + a] = 1.0;
    core.run(cost1, false, nullptr, nullptr);
    t.recompute_basics();

    double infeas = 0.0;
    for (int k = 0; k < m; ++k)
      if (t.is_artificial(t.basis[k])) infeas += std::fabs(t.xb[k]);

    if (infeas > cfg.feas_tol * std::max(1.0, bscale) * 10.0) {
      // Farkas ray from the phase-1 multipliers
      std::vector<double> cb1(m);
      for (int k = 0; k < m; ++k) cb1[k] = cost1[t.basis[k]];
      std::vector<double> y;
      t.btran(cb1, y);
      double norm = 0.0;
      for (double v : y) norm = std::max(norm, std::fabs(v));
      if (norm > 0)
        for (double& v : y) v /= norm;
      double gap = farkas_certificate_gap(p, y);
      if (!(gap < -cfg.feas_tol))
        throw Error(ErrorCode::NumericalFailure, "phase-1 certificate failed validation");
      out.status = LpStatus::Infeasible;
      out.farkas_ray = std::move(y);
      return out;
    }

    // pin artificials at zero; pivot basic ones out where a pivot exists
    for (int a = 0; a < t.num_art; ++a) {
      int aj = n + m + a;
      t.lo[aj] = t.up[aj] = 0.0;
    }
    for (int k = 0; k < m; ++k) {
      int bj = t.basis[k];
      if (!t.is_artificial(bj)) continue;
      const double* brow = t.binv_row(k);
      int repl = -1;
      double best = 1e-7;
      for (int j = 0; j < n + m; ++j) {
        if (t.state[j] == VarState::Basic || t.lo[j] == t.up[j]) continue;
        double piv;
        if (j < n) {
          piv = 0.0;
          for (int u = t.col_start[j]; u < t.col_start[j + 1]; ++u)
            piv += t.col_val[u] * brow[t.col_row[u]];
        } else {
          piv = brow[j - n];
        }
        if (std::fabs(piv) > best) {
          best = std::fabs(piv);
          repl = j;
        }
      }
      if (repl >= 0) {
        core.alpha.assign(m, 0.0);
        t.ftran(repl, core.alpha);
        double piv = core.alpha[k];
        double* prow = t.binv_row(k);
        double inv = 1.0 / piv;
        for (int c = 0; c < m; ++c) prow[c] *= inv;
        for (int r = 0; r < m; ++r) {
          if (r == k) continue;
          double f = core.alpha[r];
          if (f == 0.0) continue;
          double* row = t.binv_row(r);
          for (int c = 0; c < m; ++c) row[c] -= f * prow[c];
        }
        t.state[bj] = VarState::AtLower;
        t.state[repl] = VarState::Basic;
        t.basis[k] = repl;
        t.recompute_basics();
      }
    }
    t.recompute_basics();
    core.tolerated_infeas = t.max_basic_bound_violation();
  }

  // phase 2
  std::vector<double> cost(t.total_cols(), 0.0);
  for (int j = 0; j < n; ++j) cost[j] = p.objective[j];
  int ub_col = -1, ub_dir = 0;
  CoreResult res = core.run(cost, true, &ub_col, &ub_dir);

  if (res == CoreResult::Unbounded) {
    out.status = LpStatus::Unbounded;
    out.objective = -kInf;
    std::vector<double> ray(n, 0.0);
    if (ub_col < n) ray[ub_col] = ub_dir;
    std::vector<double> alpha;
    t.ftran(ub_col, alpha);
    for (int k = 0; k < m; ++k) {
      int bj = t.basis[k];
      if (bj < n) ray[bj] = -ub_dir * alpha[k];
    }
    out.unbounded_ray = std::move(ray);
    return out;
  }

  t.recompute_basics();

  out.status = LpStatus::Optimal;
  out.primal.assign(n, 0.0);
  for (int j = 0; j < n; ++j)
    if (t.state[j] != VarState::Basic) out.primal[j] = t.bound_value(j);
  for (int k = 0; k < m; ++k)
    if (t.basis[k] < n) out.primal[t.basis[k]] = t.xb[k];

  double obj = 0.0;
  for (int j = 0; j < n; ++j) obj += p.objective[j] * out.primal[j];
  out.objective = obj;

  std::vector<double> cb(m);
  for (int k = 0; k < m; ++k) cb[k] = cost[t.basis[k]];
  t.btran(cb, out.row_duals);

  out.reduced_costs.assign(n, 0.0);
  for (int j = 0; j < n; ++j) out.reduced_costs[j] = p.objective[j] - t.column_dot(j, out.row_duals);

  // final feasibility recheck against the original data
  double maxviol = 0.0;
  for (int i = 0; i < m; ++i) {
    double act = 0.0;
    for (int j = 0; j < n; ++j) act += p.rows[i].coeffs[j] * out.primal[j];
    double v = 0.0;
    switch (p.rows[i].sense) {
      case Sense::Le: v = act - p.rows[i].rhs; break;
      case Sense::Ge: v = p.rows[i].rhs - act; break;
      case Sense::Eq: v = std::fabs(act - p.rows[i].rhs); break;
    }
    maxviol = std::max(maxviol, v);
  }
  if (maxviol > 1e-6 * std::max(1.0, bscale)) throw RestartSignal{};

  return out;
}

}  // namespace

double farkas_certificate_gap(const LinearProgram& p, const std::vector<double>& ray) {
  const int n = p.num_vars();
  const int m = p.num_rows();
  const double tol = 1e-9;
  if (static_cast<int>(ray.size()) != m) return kInf;
  for (int i = 0; i < m; ++i) {
    if (p.rows[i].sense == Sense::Ge && ray[i] < -tol) return kInf;
    if (p.rows[i].sense == Sense::Le && ray[i] > tol) return kInf;
  }
  double ytb = 0.0;
  for (int i = 0; i < m; ++i) ytb += ray[i] * p.rows[i].rhs;
  double sup = 0.0;
  for (int j = 0; j < n; ++j) {
    double w = 0.0;
    for (int i = 0; i < m; ++i) w += ray[i] * p.rows[i].coeffs[j];
    if (std::fabs(w) <= tol) continue;
    double bound = w > 0 ? p.upper[j] : p.lower[j];
    if (!std::isfinite(bound)) return kInf;
    sup += w * bound;
  }
  return sup - ytb;
}

namespace {

// Power-of-two equilibration: exact in floating point, so the scaled problem
// and the unscaled solution incur no rounding beyond the solve itself.
double pow2_scale(double max_abs) {
  if (!(max_abs > 0.0)) return 1.0;
  return std::exp2(-std::round(std::log2(max_abs)));
}

}  // namespace

LpOutcome solve_lp(const LinearProgram& p, const SolverConfig& cfg) {
  validate_problem(p);
  const int n = p.num_vars();
  const int m = p.num_rows();

  std::vector<double> row_scale(m, 1.0), col_scale(n, 1.0);
  for (int i = 0; i < m; ++i) {
    double mx = 0.0;
    for (double v : p.rows[i].coeffs) mx = std::max(mx, std::fabs(v));
    row_scale[i] = pow2_scale(mx);
  }
  for (int j = 0; j < n; ++j) {
    double mx = 0.0;
    for (int i = 0; i < m; ++i) mx = std::max(mx, std::fabs(row_scale[i] * p.rows[i].coeffs[j]));
    col_scale[j] = pow2_scale(mx);
  }

  LinearProgram scaled;
  scaled.objective.resize(n);
  scaled.lower.resize(n);
  scaled.upper.resize(n);
  for (int j = 0; j < n; ++j) {
    scaled.objective[j] = p.objective[j] * col_scale[j];
    scaled.lower[j] = p.lower[j] / col_scale[j];
    scaled.upper[j] = p.upper[j] / col_scale[j];
  }
  scaled.rows.resize(m);
  for (int i = 0; i < m; ++i) {
    scaled.rows[i].sense = p.rows[i].sense;
    scaled.rows[i].rhs = p.rows[i].rhs * row_scale[i];
    scaled.rows[i].coeffs.resize(n);
    for (int j = 0; j < n; ++j)
      scaled.rows[i].coeffs[j] = p.rows[i].coeffs[j] * row_scale[i] * col_scale[j];
  }

  Tuning tune;
  LpOutcome out;
  try {
    out = solve_attempt(scaled, cfg, tune);
  } catch (const RestartSignal&) {
    // tighter refresh cadence; one retry before giving up
    tune.recompute_every = 8;
    tune.reinvert_every = 30;
    try {
      out = solve_attempt(scaled, cfg, tune);
    } catch (const RestartSignal&) {
      throw Error(ErrorCode::NumericalFailure,
                  "basis numerics failed twice; problem too ill-conditioned");
    }
  }

  if (out.status == LpStatus::Optimal) {
    for (int j = 0; j < n; ++j) {
      out.primal[j] *= col_scale[j];
      out.reduced_costs[j] /= col_scale[j];
    }
    for (int i = 0; i < m; ++i) out.row_duals[i] *= row_scale[i];
    double obj = 0.0;
    for (int j = 0; j < n; ++j) obj += p.objective[j] * out.primal[j];
    out.objective = obj;
  } else if (out.status == LpStatus::Infeasible) {
    for (int i = 0; i < m; ++i) out.farkas_ray[i] *= row_scale[i];
    double norm = 0.0;
    for (double v : out.farkas_ray) norm = std::max(norm, std::fabs(v));
    if (norm > 0)
      for (double& v : out.farkas_ray) v /= norm;
    if (!(farkas_certificate_gap(p, out.farkas_ray) < -cfg.feas_tol))
      throw Error(ErrorCode::NumericalFailure, "certificate lost validity after unscaling");
  } else if (out.status == LpStatus::Unbounded) {
    for (int j = 0; j < n && j < static_cast<int>(out.unbounded_ray.size()); ++j)
      out.unbounded_ray[j] *= col_scale[j];
  }
  return out;
}

}  // namespace riskdec::lp
