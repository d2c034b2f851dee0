#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "util/error.hpp"

namespace riskdec::model {

struct ScenarioSet {
  std::vector<double> probabilities;
  int count() const { return static_cast<int>(probabilities.size()); }
};

// X = { x >= 0 : A x <= b, x_j binary for j in binary_indices }
struct FirstStageData {
  std::vector<double> cost;
  std::vector<std::vector<double>> a_rows;
  std::vector<double> b;
  std::vector<int> binary_indices;
  int num_vars() const { return static_cast<int>(cost.size()); }
};

struct ScenarioRecourse {
  std::vector<double> q;
  std::vector<std::vector<double>> t_rows;  // m2 x n1
  std::vector<std::vector<double>> w_rows;  // m2 x n2
  std::vector<double> h;                    // T x + W y >= h
};

struct SecondStageData {
  std::vector<ScenarioRecourse> scenarios;
  int num_vars() const { return scenarios.empty() ? 0 : static_cast<int>(scenarios[0].q.size()); }
  int num_rows() const { return scenarios.empty() ? 0 : static_cast<int>(scenarios[0].h.size()); }
};

// g_s^i(x, y) = gbar_s^i . x + gtilde_s^i . y + offset_s^i
struct OutcomeMapping {
  int dimension = 0;
  struct PerScenario {
    std::vector<std::vector<double>> gbar;    // d x n1
    std::vector<std::vector<double>> gtilde;  // d x n2
    std::vector<double> offset;               // d
  };
  std::vector<PerScenario> per_scenario;
};

struct ReliefPlanRef {
  std::vector<int> open_type;  // per candidate facility: type index or -1
  std::vector<double> stock;
};

struct Benchmark {
  std::vector<std::vector<double>> realizations;  // |T| x d
  std::vector<double> probabilities;              // |T|
  // optional provenance: the plan the realizations were expanded from
  bool has_plan = false;
  ReliefPlanRef plan;
  int count() const { return static_cast<int>(realizations.size()); }
};

enum class RiskRelation { MultivariateCVaR, MultivariateICO, None };

// C = { c >= 0 : sum c_i = 1, D c <= e }
struct ScalarizationSet {
  int dimension = 0;
  std::vector<std::vector<double>> d_rows;
  std::vector<double> e;
};

struct RiskSpec {
  RiskRelation relation = RiskRelation::None;
  double alpha = 0.0;
  ScalarizationSet scalarization;
};

struct TwoStageInstance {
  std::string name;
  ScenarioSet scenario_set;
  FirstStageData first_stage;
  SecondStageData second_stage;
  OutcomeMapping outcome_mapping;
  Benchmark benchmark;
  RiskSpec risk_spec;
  // known lower bound on the per-scenario recourse value (used by the
  // decomposition master); conservative default
  double recourse_value_lower_bound = -1e9;
};

struct ValidationIssue {
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  bool has(const std::string& code) const;
};

// Pure and total: collects every violation instead of aborting. Includes the
// first-stage feasibility solve and the scalarization-set emptiness check.
ValidationReport validate(const TwoStageInstance& instance);

TwoStageInstance load_instance(const std::filesystem::path& path,
                               std::vector<std::string>* warnings = nullptr);
void save_instance(const TwoStageInstance& instance, const std::filesystem::path& path);

std::string to_json_string(const TwoStageInstance& instance);
TwoStageInstance from_json_string(const std::string& text,
                                  std::vector<std::string>* warnings = nullptr);

const char* relation_name(RiskRelation r);
RiskRelation relation_from_name(const std::string& s);

// Outcome vectors g_s(x, y_s) for every scenario.
std::vector<std::vector<double>> evaluate_outcomes(const TwoStageInstance& instance,
                                                   const std::vector<double>& x,
                                                   const std::vector<std::vector<double>>& y);

}  // namespace riskdec::model
