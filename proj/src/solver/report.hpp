#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "model/instance.hpp"

namespace riskdec::solver {

struct Cut;

struct RunConfig {
  std::string algorithm = "dcg-sd";  // dcg-def | dcg-sd
  model::RiskRelation mode = model::RiskRelation::None;
  double alpha = 0.95;
  double epsilon = 1e-10;   // relative optimality band of the outer loop
  double sep_tol = 1e-8;    // separation violation threshold
  double cut_tol = 1e-7;    // theta vs subproblem value gate
  double feas_tol = 1e-9;
  double opt_tol = 1e-7;
  double theta_lb = -1e9;   // overridden by the instance hint when tighter
  int iteration_cap = 500;
  int threads = 1;
  double time_limit_sec = 0.0;  // <= 0: none
  uint64_t seed = 0;            // echoed into reports
  bool init_cuts_from_plan = false;  // seed the cut pool from the benchmark plan
  // observer invoked for every cut entering the pool (audits, tests)
  std::function<void(const Cut&)> cut_observer;
};

struct IterationRecord {
  int iteration = 0;
  int num_scalarizations = 0;  // L
  double master_objective = 0.0;
  double upper_bound = 0.0;
  double violation = 0.0;
  int cuts_added = 0;
  double wall_ms = 0.0;
};

enum class SolveStatus { Optimal, Infeasible, IterationLimit, TimeLimit };

struct SolveReport {
  SolveStatus status = SolveStatus::Optimal;
  double objective = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  std::vector<double> x;
  std::vector<std::vector<double>> y;
  std::vector<std::vector<double>> c_list;
  std::vector<IterationRecord> iterations;
  std::string algorithm;
  std::string mode;
  double alpha = 0.0;
  double epsilon = 0.0;
  uint64_t seed = 0;
  std::string instance_name;
  double wall_ms = 0.0;
  long total_cuts = 0;
};

const char* status_name(SolveStatus s);

std::string report_to_json(const SolveReport& report, const RunConfig& config);
SolveReport report_from_json_file(const std::filesystem::path& path);
void write_report(const SolveReport& report, const RunConfig& config,
                  const std::filesystem::path& path);
void write_trace_csv(const SolveReport& report, const std::filesystem::path& path);

// Human-readable iteration table, 12 significant digits.
std::string format_table(const SolveReport& report);

}  // namespace riskdec::solver
