#include "solver/report.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "util/text.hpp"

namespace riskdec::solver {

using nlohmann::json;

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::IterationLimit: return "iteration_limit";
    case SolveStatus::TimeLimit: return "time_limit";
  }
  return "unknown";
}

static SolveStatus status_from_name(const std::string& s) {
  if (s == "optimal") return SolveStatus::Optimal;
  if (s == "infeasible") return SolveStatus::Infeasible;
  if (s == "iteration_limit") return SolveStatus::IterationLimit;
  if (s == "time_limit") return SolveStatus::TimeLimit;
  throw Error(ErrorCode::ParseError, "unknown solve status '" + s + "'");
}

std::string report_to_json(const SolveReport& r, const RunConfig& cfg) {
  json j;
  j["schema_version"] = 1;
  j["status"] = status_name(r.status);
  j["objective"] = r.objective;
  j["lower_bound"] = r.lower_bound;
  j["upper_bound"] = r.upper_bound;
  j["x"] = r.x;
  json jy = json::array();
  for (const auto& ys : r.y) jy.push_back(ys);
  j["y"] = std::move(jy);
  json jc = json::array();
  for (const auto& c : r.c_list) jc.push_back(c);
  j["c_list"] = std::move(jc);
  json ji = json::array();
  for (const auto& it : r.iterations)
    ji.push_back({{"iteration", it.iteration},
                  {"L", it.num_scalarizations},
                  {"master_objective", it.master_objective},
                  {"upper_bound", it.upper_bound},
                  {"violation", it.violation},
                  {"cuts_added", it.cuts_added},
                  {"wall_ms", it.wall_ms}});
  j["iterations"] = std::move(ji);
  j["algorithm"] = r.algorithm;
  j["mode"] = r.mode;
  j["alpha"] = r.alpha;
  j["epsilon"] = r.epsilon;
  j["seed"] = r.seed;
  j["instance"] = r.instance_name;
  j["wall_ms"] = r.wall_ms;
  j["total_cuts"] = r.total_cuts;
  j["config"] = {{"algorithm", cfg.algorithm},
                 {"mode", model::relation_name(cfg.mode)},
                 {"alpha", cfg.alpha},
                 {"epsilon", cfg.epsilon},
                 {"sep_tol", cfg.sep_tol},
                 {"cut_tol", cfg.cut_tol},
                 {"feas_tol", cfg.feas_tol},
                 {"opt_tol", cfg.opt_tol},
                 {"theta_lb", cfg.theta_lb},
                 {"iteration_cap", cfg.iteration_cap},
                 {"threads", cfg.threads},
                 {"time_limit_sec", cfg.time_limit_sec},
                 {"seed", cfg.seed}};
  return j.dump(2);
}

SolveReport report_from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("report parse failed: ") + e.what());
  }
  SolveReport r;
  try {
    r.status = status_from_name(j.at("status").get<std::string>());
    r.objective = j.at("objective").get<double>();
    r.lower_bound = j.value("lower_bound", 0.0);
    r.upper_bound = j.value("upper_bound", 0.0);
    r.x = j.at("x").get<std::vector<double>>();
    for (const auto& ys : j.at("y")) r.y.push_back(ys.get<std::vector<double>>());
    for (const auto& c : j.at("c_list")) r.c_list.push_back(c.get<std::vector<double>>());
    r.algorithm = j.value("algorithm", "");
    r.mode = j.value("mode", "none");
    r.alpha = j.value("alpha", 0.0);
    r.epsilon = j.value("epsilon", 0.0);
    r.seed = j.value("seed", 0ULL);
    r.instance_name = j.value("instance", "");
    r.wall_ms = j.value("wall_ms", 0.0);
    r.total_cuts = j.value("total_cuts", 0L);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("report structure invalid: ") + e.what());
  }
  return r;
}

void write_report(const SolveReport& r, const RunConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  out << report_to_json(r, cfg) << '\n';
}

void write_trace_csv(const SolveReport& r, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  out << "iteration,L,master_objective,upper_bound,cuts_added,violation,wall_ms\n";
  for (const auto& it : r.iterations)
    out << it.iteration << ',' << it.num_scalarizations << ',' << util::num12(it.master_objective)
        << ',' << util::num12(it.upper_bound) << ',' << it.cuts_added << ','
        << util::num12(it.violation) << ',' << util::num12(it.wall_ms) << '\n';
}

std::string format_table(const SolveReport& r) {
  std::ostringstream os;
  os << "algorithm=" << r.algorithm << " mode=" << r.mode << " status=" << status_name(r.status)
     << " objective=" << util::num12(r.objective) << "\n";
  os << "iter\tL\tmaster\tupper\tviolation\tcuts\twall_ms\n";
  for (const auto& it : r.iterations)
    os << it.iteration << '\t' << it.num_scalarizations << '\t' << util::num12(it.master_objective)
       << '\t' << util::num12(it.upper_bound) << '\t' << util::num12(it.violation) << '\t'
       << it.cuts_added << '\t' << util::num12(it.wall_ms) << '\n';
  return os.str();
}

}  // namespace riskdec::solver
