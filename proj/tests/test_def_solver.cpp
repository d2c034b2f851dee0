#include <doctest.h>

#include <cmath>

#include "risk/measures.hpp"
#include "solver/def_solver.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace riskdec;

namespace {

solver::RunConfig cvar_config(double alpha) {
  solver::RunConfig cfg;
  cfg.mode = model::RiskRelation::MultivariateCVaR;
  cfg.alpha = alpha;
  return cfg;
}

// DEF restricted to an explicit list, solved in one shot
double def_objective(const model::TwoStageInstance& ins,
                     const std::vector<std::vector<double>>& c_list, bool ico) {
  auto def = ico ? solver::build_def_ico(ins, c_list) : solver::build_def_cvar(ins, c_list);
  auto out = lp::solve_mip(def.mip);
  REQUIRE(out.status == lp::MipStatus::Optimal);
  return out.objective;
}

}  // namespace

TEST_CASE("empty list reduces to the risk-neutral extensive form") {
  testing::InstanceSpec spec;
  spec.seed = 21;
  spec.num_binaries = 0;
  auto ins = testing::random_instance(spec);
  auto def = solver::build_def_cvar(ins, {});
  CHECK(def.mip.relaxation.num_vars() ==
        ins.first_stage.num_vars() + ins.scenario_set.count() * ins.second_stage.num_vars());
  auto lpv = lp::solve_lp(testing::extensive_form(ins));
  auto defv = lp::solve_lp(def.mip.relaxation);
  REQUIRE(lpv.status == lp::LpStatus::Optimal);
  CHECK(defv.objective == doctest::Approx(lpv.objective).epsilon(1e-10));
}

TEST_CASE("row and variable counts for one c, one scenario, one atom") {
  testing::InstanceSpec spec;
  spec.seed = 22;
  spec.num_scenarios = 1;
  spec.benchmark_size = 1;
  spec.num_binaries = 0;
  auto ins = testing::random_instance(spec);
  std::vector<std::vector<double>> cl{{0.4, 0.6}};
  auto def = solver::build_def_cvar(ins, cl);
  int base_rows = static_cast<int>(ins.first_stage.a_rows.size()) + ins.second_stage.num_rows();
  CHECK(def.mip.relaxation.num_rows() == base_rows + 1 + 1);  // one risk, one excess
  // eta + w added
  CHECK(def.mip.relaxation.num_vars() ==
        ins.first_stage.num_vars() + ins.second_stage.num_vars() + 1 + 1);

  auto dico = solver::build_def_ico(ins, cl);
  CHECK(dico.mip.relaxation.num_rows() == base_rows + 1 + 1);
  CHECK(dico.mip.relaxation.num_vars() ==
        ins.first_stage.num_vars() + ins.second_stage.num_vars() + 1);
}

TEST_CASE("ico with a single benchmark atom forces almost-sure dominance") {
  testing::InstanceSpec spec;
  spec.seed = 23;
  spec.num_scenarios = 4;
  spec.benchmark_size = 1;
  spec.num_binaries = 0;
  auto ins = testing::random_instance(spec);
  std::vector<std::vector<double>> cl{{0.5, 0.5}};
  auto def = solver::build_def_ico(ins, cl);
  auto out = lp::solve_lp(def.mip.relaxation);
  REQUIRE(out.status == lp::LpStatus::Optimal);
  // z has one atom: relation demands E[ c'G - c'z_1 ]_+ <= 0
  std::vector<double> x(out.primal.begin(), out.primal.begin() + def.n1);
  std::vector<std::vector<double>> y(def.S);
  for (int s = 0; s < def.S; ++s)
    y[s] = std::vector<double>(out.primal.begin() + def.y_index(s, 0),
                               out.primal.begin() + def.y_index(s, 0) + def.n2);
  auto g = model::evaluate_outcomes(ins, x, y);
  double cz = 0.5 * (ins.benchmark.realizations[0][0] + ins.benchmark.realizations[0][1]);
  auto dist = risk::scalarize(g, ins.scenario_set.probabilities, cl[0]);
  CHECK(risk::expected_excess(dist, cz) <= 1e-7);
}

TEST_CASE("dcg-def equals the one-shot full-vertex def") {
  for (uint64_t seed = 130; seed < 140; ++seed) {
    testing::InstanceSpec spec;
    spec.seed = seed;
    spec.num_scenarios = 8;
    spec.benchmark_size = 3;
    spec.num_binaries = 2;
    spec.alpha = 0.9;
    auto ins = testing::random_instance(spec);

    auto cfg = cvar_config(0.9);
    auto rep = solver::solve_dcg_def(ins, cfg);
    REQUIRE_MESSAGE(rep.status == solver::SolveStatus::Optimal, "seed ", seed);

    auto vset = scalar::cvar_scalarization_set(ins.benchmark, ins.risk_spec.scalarization);
    double full = def_objective(ins, vset.vectors, false);
    CHECK_MESSAGE(std::fabs(rep.objective - full) <= 1e-6, "seed ", seed, " dcg ", rep.objective,
                  " full ", full);

    // generated scalarization count within the finite family
    CHECK(rep.c_list.size() <= vset.vectors.size());
  }
}

TEST_CASE("restriction objective is monotone in the scalarization list") {
  testing::InstanceSpec spec;
  spec.seed = 141;
  spec.num_scenarios = 6;
  spec.num_binaries = 0;
  auto ins = testing::random_instance(spec);
  auto vset = scalar::cvar_scalarization_set(ins.benchmark, ins.risk_spec.scalarization);
  double prev = -1e300;
  std::vector<std::vector<double>> cl;
  for (const auto& c : vset.vectors) {
    cl.push_back(c);
    double obj = def_objective(ins, cl, false);
    CHECK(obj >= prev - 1e-9);
    prev = obj;
  }
}

TEST_CASE("relation none solves in a single iteration") {
  testing::InstanceSpec spec;
  spec.seed = 142;
  auto ins = testing::random_instance(spec);
  solver::RunConfig cfg;
  cfg.mode = model::RiskRelation::None;
  auto rep = solver::solve_dcg_def(ins, cfg);
  REQUIRE(rep.status == solver::SolveStatus::Optimal);
  CHECK(rep.iterations.size() == 1);
  CHECK(rep.c_list.empty());
}

TEST_CASE("dcg-def in ico mode equals the full-vertex ico def") {
  for (uint64_t seed = 150; seed < 156; ++seed) {
    testing::InstanceSpec spec;
    spec.seed = seed;
    spec.num_scenarios = 6;
    spec.benchmark_size = 3;
    spec.num_binaries = 1;
    auto ins = testing::random_instance(spec);

    solver::RunConfig cfg;
    cfg.mode = model::RiskRelation::MultivariateICO;
    auto rep = solver::solve_dcg_def(ins, cfg);
    REQUIRE_MESSAGE(rep.status == solver::SolveStatus::Optimal, "seed ", seed);

    // union of the per-t families
    auto isets = scalar::ico_scalarization_sets(ins.benchmark, ins.risk_spec.scalarization);
    std::vector<std::vector<double>> all;
    for (const auto& vs : isets)
      for (const auto& c : vs.vectors) all.push_back(c);
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    double full = def_objective(ins, all, true);
    CHECK_MESSAGE(std::fabs(rep.objective - full) <= 1e-6, "seed ", seed);
  }
}

TEST_CASE("full-vertex ico def is at least as restrictive as the cvar def") {
  for (uint64_t seed = 160; seed < 165; ++seed) {
    testing::InstanceSpec spec;
    spec.seed = seed;
    spec.num_scenarios = 5;
    spec.benchmark_size = 3;
    spec.num_binaries = 0;
    spec.alpha = 0.9;
    auto ins = testing::random_instance(spec);
    solver::RunConfig ccfg = cvar_config(0.9);
    auto cvar_rep = solver::solve_dcg_def(ins, ccfg);
    solver::RunConfig icfg;
    icfg.mode = model::RiskRelation::MultivariateICO;
    auto ico_rep = solver::solve_dcg_def(ins, icfg);
    if (cvar_rep.status == solver::SolveStatus::Optimal &&
        ico_rep.status == solver::SolveStatus::Optimal)
      CHECK_MESSAGE(ico_rep.objective >= cvar_rep.objective - 1e-8, "seed ", seed);
  }
}
