// Batch front end: generate relief instances, solve with either delayed cut
// generation algorithm, verify solutions against the separation oracles, and
// run the duality checker.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "duality/duality.hpp"
#include "model/instance.hpp"
#include "relief/relief.hpp"
#include "risk/measures.hpp"
#include "risk/separation.hpp"
#include "solver/benders.hpp"
#include "solver/def_solver.hpp"
#include "util/text.hpp"

using namespace riskdec;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitLimit = 3;
constexpr int kExitNumerical = 4;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ParseError:
    case ErrorCode::SchemaVersionMismatch:
    case ErrorCode::MalformedProblem:
    case ErrorCode::InvalidArgument:
    case ErrorCode::IntegralityPresent:
    case ErrorCode::EmptyScalarizationSet:
    case ErrorCode::InstanceContractViolation:
      return kExitInput;
    case ErrorCode::IterationLimit:
    case ErrorCode::TimeLimit:
    case ErrorCode::NodeLimitExceeded:
    case ErrorCode::DimensionCapExceeded:
      return kExitLimit;
    default:
      return kExitNumerical;
  }
}

model::RiskSpec ordered_preference_spec(const std::string& mode, double alpha) {
  model::RiskSpec rs;
  rs.relation = model::relation_from_name(mode);
  rs.alpha = alpha;
  rs.scalarization.dimension = 2;
  rs.scalarization.d_rows = {{1.0, -1.0}};  // c2 >= c1: responsiveness weighted at least equally
  rs.scalarization.e = {0.0};
  return rs;
}

struct GenerateArgs {
  int nodes = 5;
  int facilities = 3;
  int types = 2;
  int scenarios = 10;
  uint64_t seed = 1;
  double tau = 45.0;
  double alpha = 0.95;
  std::string mode = "cvar";
  std::string out;
  std::string network_file;
  std::string plan_file;
  std::string save_network;
};

int cmd_generate(const GenerateArgs& a) {
  relief::ReliefNetwork net = a.network_file.empty()
                                  ? relief::make_demo_network(a.nodes, a.facilities, a.types,
                                                              a.seed, a.tau)
                                  : relief::load_network(a.network_file);
  auto scen = relief::generate_scenarios(net, a.seed, a.scenarios);
  relief::ReliefPlan plan =
      a.plan_file.empty() ? relief::default_benchmark_plan(net) : relief::load_plan(a.plan_file);

  auto ins = relief::build_relief_instance(net, scen, ordered_preference_spec(a.mode, a.alpha));
  ins.benchmark = relief::build_benchmark(net, scen, plan);
  ins.name = net.name + "-s" + std::to_string(a.scenarios) + "-seed" + std::to_string(a.seed);

  auto report = model::validate(ins);
  if (!report.ok()) {
    for (const auto& issue : report.issues)
      std::cerr << "validation " << issue.code << ": " << issue.message << "\n";
    return kExitInput;
  }
  model::save_instance(ins, a.out);
  if (!a.save_network.empty()) relief::save_network(net, a.save_network);
  std::cout << "wrote " << a.out << " (|I|=" << net.num_nodes() << " |J|=" << net.num_facilities()
            << " |S|=" << a.scenarios << " seed=" << a.seed << ")\n";
  return kExitOk;
}

struct SolveArgs {
  std::string instance;
  std::string algorithm = "dcg-sd";
  std::string mode;  // empty: use the instance risk spec
  double alpha = -1.0;
  double epsilon = 1e-10;
  double sep_tol = 1e-8;
  int iteration_cap = 500;
  int threads = 1;
  double time_limit = 0.0;
  double theta_lb = -1e9;
  bool init_cuts = false;
  uint64_t seed = 0;
  std::string out;
  std::string trace;
};

int cmd_solve(const SolveArgs& a) {
  std::vector<std::string> warnings;
  auto ins = model::load_instance(a.instance, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  auto vrep = model::validate(ins);
  if (!vrep.ok()) {
    for (const auto& issue : vrep.issues)
      std::cerr << "validation " << issue.code << ": " << issue.message << "\n";
    return kExitInput;
  }

  solver::RunConfig cfg;
  cfg.algorithm = a.algorithm;
  cfg.mode = a.mode.empty() ? ins.risk_spec.relation : model::relation_from_name(a.mode);
  cfg.alpha = a.alpha >= 0.0 ? a.alpha : ins.risk_spec.alpha;
  cfg.epsilon = a.epsilon;
  cfg.sep_tol = a.sep_tol;
  cfg.iteration_cap = a.iteration_cap;
  cfg.threads = a.threads;
  cfg.time_limit_sec = a.time_limit;
  cfg.theta_lb = a.theta_lb;
  cfg.init_cuts_from_plan = a.init_cuts;
  cfg.seed = a.seed;
  if (cfg.mode == model::RiskRelation::MultivariateCVaR && !(cfg.alpha >= 0.0 && cfg.alpha < 1.0)) {
    std::cerr << "alpha in [0,1) required for cvar mode\n";
    return kExitInput;
  }

  solver::SolveReport rep = a.algorithm == "dcg-def" ? solver::solve_dcg_def(ins, cfg)
                                                     : solver::run_algorithm1(ins, cfg);
  if (!a.out.empty()) solver::write_report(rep, cfg, a.out);
  if (!a.trace.empty()) solver::write_trace_csv(rep, a.trace);
  std::cout << solver::format_table(rep);

  if (rep.status == solver::SolveStatus::TimeLimit ||
      rep.status == solver::SolveStatus::IterationLimit) {
    // relative gap between incumbent and bound, as a percentage
    double zip = rep.upper_bound, zlp = rep.lower_bound;
    double gap = std::isfinite(zip) && zip != 0.0 ? 100.0 * std::fabs(zip - zlp) / std::fabs(zip)
                                                  : std::numeric_limits<double>::infinity();
    std::cout << "stopped at limit, relative gap [%] = " << util::num12(gap) << "\n";
    return kExitLimit;
  }
  return kExitOk;
}

struct VerifyArgs {
  std::string instance;
  std::string report;
  double grid_step = 1e-3;
  double tol = 1e-6;
};

int cmd_verify(const VerifyArgs& a) {
  auto ins = model::load_instance(a.instance);
  auto rep = solver::report_from_json_file(a.report);
  bool ok = true;
  auto check = [&ok](const std::string& name, bool pass, double value) {
    std::cout << (pass ? "[ ok ] " : "[FAIL] ") << name << " = " << util::num12(value) << "\n";
    ok = ok && pass;
  };

  if (rep.status != solver::SolveStatus::Optimal) {
    std::cout << "report status is '" << solver::status_name(rep.status)
              << "'; nothing to verify\n";
    return kExitOk;
  }

  // objective recomputation
  double obj = 0.0;
  for (size_t j = 0; j < rep.x.size(); ++j) obj += ins.first_stage.cost[j] * rep.x[j];
  for (int s = 0; s < ins.scenario_set.count(); ++s)
    for (size_t j = 0; j < rep.y[s].size(); ++j)
      obj += ins.scenario_set.probabilities[s] * ins.second_stage.scenarios[s].q[j] * rep.y[s][j];
  check("objective_recomputation", std::fabs(obj - rep.objective) <= a.tol,
        std::fabs(obj - rep.objective));

  // first-stage feasibility
  double fsviol = 0.0;
  for (size_t r = 0; r < ins.first_stage.a_rows.size(); ++r) {
    double act = 0.0;
    for (size_t j = 0; j < rep.x.size(); ++j) act += ins.first_stage.a_rows[r][j] * rep.x[j];
    fsviol = std::max(fsviol, act - ins.first_stage.b[r]);
  }
  check("first_stage_feasibility", fsviol <= a.tol, fsviol);

  // recourse feasibility per scenario
  double rviol = 0.0;
  for (int s = 0; s < ins.scenario_set.count(); ++s) {
    const auto& sc = ins.second_stage.scenarios[s];
    for (size_t r = 0; r < sc.h.size(); ++r) {
      double act = 0.0;
      for (size_t j = 0; j < rep.x.size(); ++j) act += sc.t_rows[r][j] * rep.x[j];
      for (size_t j = 0; j < rep.y[s].size(); ++j) act += sc.w_rows[r][j] * rep.y[s][j];
      rviol = std::max(rviol, sc.h[r] - act);
    }
  }
  check("recourse_feasibility", rviol <= a.tol, rviol);

  auto mode = model::relation_from_name(rep.mode);
  if (mode != model::RiskRelation::None) {
    auto g = model::evaluate_outcomes(ins, rep.x, rep.y);
    if (mode == model::RiskRelation::MultivariateCVaR) {
      auto vset = scalar::cvar_scalarization_set(ins.benchmark, ins.risk_spec.scalarization);
      auto sres = sep::separate_cvar(g, ins.scenario_set.probabilities, ins.benchmark, rep.alpha,
                                     vset);
      check("vertex_oracle_violation", sres.violation <= a.tol, sres.violation);
      double best = -1e300;
      for (double c1 = 0.0; c1 <= 1.0 + 1e-12; c1 += a.grid_step) {
        std::vector<double> c{c1, 1.0 - c1};
        bool inside = true;
        for (size_t r = 0; r < ins.risk_spec.scalarization.d_rows.size(); ++r) {
          double lhs = 0.0;
          for (int k = 0; k < 2; ++k) lhs += ins.risk_spec.scalarization.d_rows[r][k] * c[k];
          if (lhs > ins.risk_spec.scalarization.e[r] + 1e-12) inside = false;
        }
        if (!inside) continue;
        double v = risk::cvar_alpha(risk::scalarize(g, ins.scenario_set.probabilities, c),
                                    rep.alpha) -
                   risk::cvar_alpha(risk::scalarize(ins.benchmark.realizations,
                                                    ins.benchmark.probabilities, c),
                                    rep.alpha);
        best = std::max(best, v);
      }
      check("grid_oracle_violation", best <= a.tol, best);
    } else {
      auto isets = scalar::ico_scalarization_sets(ins.benchmark, ins.risk_spec.scalarization);
      auto sres = sep::separate_ico(g, ins.scenario_set.probabilities, ins.benchmark, isets);
      check("vertex_oracle_violation", sres.violation <= a.tol, sres.violation);
    }
  } else {
    std::cout << "risk-neutral report: separation checks skipped\n";
  }

  std::cout << (ok ? "verify: PASS\n" : "verify: FAIL\n");
  return ok ? kExitOk : kExitInput;
}

struct DualityArgs {
  std::string instance;
  std::string out;
  double tol = 1e-6;
};

int cmd_duality(const DualityArgs& a) {
  auto ins = model::load_instance(a.instance);
  duality::DualityConfig cfg;
  cfg.dual_tol = a.tol;
  auto ad = duality::assemble_dual(ins, cfg);
  auto slack = duality::check_slackness(ins, ad.x, ad.y, ad.dual, cfg);
  auto lag = duality::check_lagrangian_optimality(ins, ad.x, ad.y, ad.dual.c_atoms, ad.dual.mu,
                                                  7, cfg);
  auto text = duality::slackness_report_to_json(slack, lag, ad.primal_objective,
                                                ad.dual.dual_objective);
  if (!a.out.empty()) {
    std::ofstream out(a.out);
    out << text << '\n';
  }
  std::cout << "primal = " << util::num12(ad.primal_objective)
            << "  dual = " << util::num12(ad.dual.dual_objective)
            << "  gap = " << util::num12(ad.primal_objective - ad.dual.dual_objective) << "\n";
  for (const auto& cond : slack.conditions)
    std::cout << "  " << cond.name << " residual = " << util::num12(cond.residual) << "\n";
  std::cout << "  lagrangian scalarized gap = " << util::num12(lag.scalarized_gap)
            << ", probe slack = " << util::num12(lag.probe_slack) << "\n";
  if (ad.degenerate_warning)
    std::cout << "  note: alternative optimal bases detected; measures are not unique\n";
  bool gap_ok = std::fabs(ad.primal_objective - ad.dual.dual_objective) <= a.tol;
  bool pass = slack.pass && lag.pass && gap_ok;
  std::cout << (pass ? "duality: PASS\n" : "duality: FAIL\n");
  return pass ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-stage stochastic programs with multivariate risk constraints"};
  app.require_subcommand(1);

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "build a relief instance file");
  gen->add_option("--nodes", ga.nodes, "demand nodes")->check(CLI::PositiveNumber);
  gen->add_option("--facilities", ga.facilities, "candidate facilities");
  gen->add_option("--types", ga.types, "facility types");
  gen->add_option("--scenarios", ga.scenarios, "scenario count")->check(CLI::PositiveNumber);
  gen->add_option("--seed", ga.seed, "generator seed");
  gen->add_option("--tau", ga.tau, "coverage threshold (minutes)");
  gen->add_option("--alpha", ga.alpha, "confidence level");
  gen->add_option("--mode", ga.mode, "risk relation: cvar|ico|none");
  gen->add_option("--out", ga.out, "output instance file")->required();
  gen->add_option("--network", ga.network_file, "network JSON instead of the demo generator");
  gen->add_option("--benchmark-plan", ga.plan_file, "plan JSON for the benchmark decision");
  gen->add_option("--save-network", ga.save_network, "also write the network JSON");

  SolveArgs sa;
  auto* sol = app.add_subcommand("solve", "run a decomposition algorithm");
  sol->add_option("--instance", sa.instance, "instance file")->required();
  sol->add_option("--algorithm", sa.algorithm, "dcg-def | dcg-sd")
      ->check(CLI::IsMember({"dcg-def", "dcg-sd"}));
  sol->add_option("--mode", sa.mode, "override risk relation: cvar|ico|none");
  sol->add_option("--alpha", sa.alpha, "override confidence level");
  sol->add_option("--epsilon", sa.epsilon, "outer optimality tolerance");
  sol->add_option("--sep-tol", sa.sep_tol, "separation violation threshold");
  sol->add_option("--iter-cap", sa.iteration_cap, "outer iteration cap");
  sol->add_option("--threads", sa.threads, "subproblem worker cap");
  sol->add_option("--time-limit", sa.time_limit, "wall-clock budget in seconds");
  sol->add_option("--theta-lb", sa.theta_lb, "recourse value lower bound");
  sol->add_flag("--init-cuts", sa.init_cuts, "seed the cut pool from the benchmark plan");
  sol->add_option("--seed", sa.seed, "seed echoed into the report");
  sol->add_option("--out", sa.out, "report JSON path");
  sol->add_option("--trace", sa.trace, "iteration trace CSV path");

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "re-check a solve report");
  ver->add_option("--instance", va.instance, "instance file")->required();
  ver->add_option("--report", va.report, "report JSON")->required();
  ver->add_option("--grid-step", va.grid_step, "grid oracle step");
  ver->add_option("--tol", va.tol, "verification tolerance");

  DualityArgs da;
  auto* dua = app.add_subcommand("duality", "assemble and check the dual (continuous instances)");
  dua->add_option("--instance", da.instance, "instance file")->required();
  dua->add_option("--out", da.out, "report JSON path");
  dua->add_option("--tol", da.tol, "dual tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*gen) return cmd_generate(ga);
    if (*sol) return cmd_solve(sa);
    if (*ver) return cmd_verify(va);
    if (*dua) return cmd_duality(da);
  } catch (const Error& e) {
    std::cerr << error_code_name(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitInput;
}
