#include "lp/bnb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <queue>

namespace riskdec::lp {

namespace {

struct Node {
  std::vector<std::pair<int, double>> fixed_lower;  // (var, new lower)
  std::vector<std::pair<int, double>> fixed_upper;
  double bound;  // parent LP objective, a valid lower bound
  long id;
};

struct NodeOrder {
  bool operator()(const std::shared_ptr<Node>& a, const std::shared_ptr<Node>& b) const {
    if (a->bound != b->bound) return a->bound > b->bound;  // min-heap on bound
    return a->id > b->id;
  }
};

}  // namespace

MipOutcome solve_mip(const MixedIntegerProgram& problem, const MipConfig& cfg) {
  const int n = problem.relaxation.num_vars();
  for (int j : problem.binary_vars) {
    if (j < 0 || j >= n)
      throw Error(ErrorCode::MalformedProblem, "binary index out of range");
    if (problem.relaxation.lower[j] < -cfg.int_tol || problem.relaxation.upper[j] > 1.0 + cfg.int_tol)
      throw Error(ErrorCode::MalformedProblem, "binary variable bounds outside [0,1]");
  }

  MipOutcome out;
  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(cfg.time_limit_sec));
  const bool timed = cfg.time_limit_sec > 0.0;

  std::priority_queue<std::shared_ptr<Node>, std::vector<std::shared_ptr<Node>>, NodeOrder> open;
  long next_id = 0;
  open.push(std::make_shared<Node>(Node{{}, {}, -kInf, next_id++}));

  bool have_incumbent = false;
  double incumbent_obj = kInf;
  std::vector<double> incumbent;

  LinearProgram lp = problem.relaxation;

  while (!open.empty()) {
    if (out.node_count >= cfg.node_limit || (timed && std::chrono::steady_clock::now() > deadline)) {
      if (!have_incumbent)
        throw Error(cfg.node_limit <= out.node_count ? ErrorCode::NodeLimitExceeded
                                                     : ErrorCode::TimeLimit,
                    "search stopped before finding any integer-feasible solution");
      out.proven = false;
      break;
    }
    auto node = open.top();
    open.pop();

    if (have_incumbent && node->bound >= incumbent_obj - 1e-9) {
      if (cfg.collect_audit) out.prune_audit.push_back({node->bound, incumbent_obj});
      continue;
    }

    ++out.node_count;
    for (auto& [j, v] : node->fixed_lower) lp.lower[j] = v;
    for (auto& [j, v] : node->fixed_upper) lp.upper[j] = v;
    SolverConfig lp_cfg = cfg.lp;
    if (timed && !lp_cfg.has_deadline) {
      lp_cfg.has_deadline = true;
      lp_cfg.deadline = deadline;
    }
    LpOutcome rel;
    bool infeasible_bounds = false;
    for (int j : problem.binary_vars)
      if (lp.lower[j] > lp.upper[j]) infeasible_bounds = true;
    bool node_timed_out = false;
    if (!infeasible_bounds) {
      try {
        rel = solve_lp(lp, lp_cfg);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::TimeLimit) throw;
        node_timed_out = true;
      }
    }
    // restore
    for (auto& [j, v] : node->fixed_lower) lp.lower[j] = problem.relaxation.lower[j];
    for (auto& [j, v] : node->fixed_upper) lp.upper[j] = problem.relaxation.upper[j];

    if (node_timed_out) {
      if (!have_incumbent)
        throw Error(ErrorCode::TimeLimit, "node relaxation hit the wall-clock deadline");
      out.proven = false;
      break;
    }
    if (infeasible_bounds || rel.status == LpStatus::Infeasible) continue;
    if (rel.status == LpStatus::Unbounded)
      throw Error(ErrorCode::UnboundedProblem, "LP relaxation is unbounded");

    if (have_incumbent && rel.objective >= incumbent_obj - 1e-9) {
      if (cfg.collect_audit) out.prune_audit.push_back({rel.objective, incumbent_obj});
      continue;
    }

    // most fractional binary, lowest index on ties
    int branch_var = -1;
    double best_frac = cfg.int_tol;
    for (int j : problem.binary_vars) {
      double frac = std::min(rel.primal[j], 1.0 - rel.primal[j]);
      frac = std::max(frac, 0.0);
      if (frac > best_frac) {
        best_frac = frac;
        branch_var = j;
      }
    }

    if (branch_var < 0) {
      if (rel.objective < incumbent_obj) {
        incumbent_obj = rel.objective;
        incumbent = rel.primal;
        have_incumbent = true;
      }
      continue;
    }

    auto down = std::make_shared<Node>(*node);
    down->bound = rel.objective;
    down->id = next_id++;
    down->fixed_upper.emplace_back(branch_var, 0.0);
    auto up = std::make_shared<Node>(*node);
    up->bound = rel.objective;
    up->id = next_id++;
    up->fixed_lower.emplace_back(branch_var, 1.0);
    open.push(std::move(down));
    open.push(std::move(up));
  }

  if (!have_incumbent) {
    out.status = MipStatus::Infeasible;
    return out;
  }
  out.status = MipStatus::Optimal;
  out.primal = std::move(incumbent);
  out.objective = incumbent_obj;
  return out;
}

}  // namespace riskdec::lp
