#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "model/instance.hpp"

namespace riskdec::relief {

struct ReliefNetwork {
  struct Node {
    double px = 0.0, py = 0.0;  // planar coordinates
    double base_demand = 0.0;   // supply units
  };
  std::string name;
  std::vector<Node> nodes;            // demand nodes I
  std::vector<int> facility_nodes;    // J as indices into nodes, J subseteq I
  std::vector<double> type_capacities;             // K_l, strictly increasing
  std::vector<std::vector<double>> fixed_costs;    // F[j][l]
  std::vector<double> unit_acquisition;            // a[j]
  double coverage_minutes = 0.0;                   // tau
  double minutes_per_unit_distance = 1.0;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_facilities() const { return static_cast<int>(facility_nodes.size()); }
  int num_types() const { return static_cast<int>(type_capacities.size()); }
};

struct ReliefScenario {
  std::vector<double> demands;                     // per node
  std::vector<std::vector<double>> travel_minutes; // |I| x |I|, symmetric
  std::vector<std::vector<double>> ship_costs;     // |J| x |I|
  std::vector<double> undamaged_fraction;          // per facility j, in [0,1]
  double shortage_penalty = 0.0;
  int epicenter = 0;
  int severity_tier = 0;
};

struct GeneratorOptions {
  int severity_tiers = 4;
  int force_tier = -1;  // >= 0 pins the severity tier (tier 0 = no disaster)
  double demand_surge = 2.0;
  double damage_factor = 0.8;
  double congestion_factor = 1.0;
  double penalty_base = 50.0;
  double penalty_surge = 1.5;
  double ship_cost_per_minute = 0.12;
};

struct ReliefPlan {
  std::vector<int> open_type;  // per facility node: type index or -1
  std::vector<double> stock;   // R_j
};

std::vector<ReliefScenario> generate_scenarios(const ReliefNetwork& network, uint64_t seed,
                                               int count, const GeneratorOptions& options = {});

// Assembles the two-stage instance: first stage (x_jl, R_j), second stage per
// scenario (y_ji, u_i, u_max), outcome dimension 2 (max shortage proportion
// and scaled average travel time score). Demand nodes without any covering
// facility in some scenario are reported as warnings (shortage-only nodes).
model::TwoStageInstance build_relief_instance(const ReliefNetwork& network,
                                              const std::vector<ReliefScenario>& scenarios,
                                              const model::RiskSpec& risk_spec,
                                              std::vector<std::string>* warnings = nullptr);

// Solves the second stage under the fixed plan for every scenario and records
// the two outcome measures; T = S with the scenario probabilities.
model::Benchmark build_benchmark(const ReliefNetwork& network,
                                 const std::vector<ReliefScenario>& scenarios,
                                 const ReliefPlan& plan);

// First-stage vector (x_jl, R_j) for a plan; validates the plan invariants.
std::vector<double> plan_to_first_stage(const ReliefNetwork& network, const ReliefPlan& plan);

// Per-scenario optimal second-stage objective and outcome vector under a plan.
struct PlanEvaluation {
  double cost = 0.0;
  std::vector<double> outcome;
  std::vector<double> y;
};
PlanEvaluation evaluate_plan_scenario(const model::TwoStageInstance& instance, int scenario,
                                      const std::vector<double>& first_stage);

ReliefNetwork make_demo_network(int num_nodes, int num_facilities, int num_types, uint64_t seed,
                                double coverage_minutes = 45.0);

// The reference benchmark decision: the largest facility type stocked to
// capacity at every other candidate node.
ReliefPlan default_benchmark_plan(const ReliefNetwork& network);

void save_network(const ReliefNetwork& network, const std::filesystem::path& path);
ReliefNetwork load_network(const std::filesystem::path& path);
void save_plan(const ReliefPlan& plan, const std::filesystem::path& path);
ReliefPlan load_plan(const std::filesystem::path& path);

}  // namespace riskdec::relief
