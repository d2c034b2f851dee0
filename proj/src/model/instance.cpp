#include "model/instance.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lp/bnb.hpp"
#include "lp/simplex.hpp"

namespace riskdec::model {

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;
constexpr double kProbTol = 1e-12;

json matrix_to_json(const std::vector<std::vector<double>>& m) {
  json j = json::array();
  for (const auto& row : m) j.push_back(row);
  return j;
}

std::vector<std::vector<double>> matrix_from_json(const json& j) {
  std::vector<std::vector<double>> m;
  for (const auto& row : j) m.push_back(row.get<std::vector<double>>());
  return m;
}

void warn_unknown_fields(const json& obj, const std::set<std::string>& known,
                         const std::string& where, std::vector<std::string>* warnings) {
  if (!warnings || !obj.is_object()) return;
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key()))
      warnings->push_back("unknown field '" + it.key() + "' in " + where + " (ignored)");
}

bool finite_all(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

bool finite_all(const std::vector<std::vector<double>>& m) {
  for (const auto& r : m)
    if (!finite_all(r)) return false;
  return true;
}

}  // namespace

bool ValidationReport::has(const std::string& code) const {
  for (const auto& i : issues)
    if (i.code == code) return true;
  return false;
}

const char* relation_name(RiskRelation r) {
  switch (r) {
    case RiskRelation::MultivariateCVaR: return "cvar";
    case RiskRelation::MultivariateICO: return "ico";
    case RiskRelation::None: return "none";
  }
  return "none";
}

RiskRelation relation_from_name(const std::string& s) {
  if (s == "cvar") return RiskRelation::MultivariateCVaR;
  if (s == "ico") return RiskRelation::MultivariateICO;
  if (s == "none") return RiskRelation::None;
  throw Error(ErrorCode::ParseError, "unknown risk relation '" + s + "'");
}

ValidationReport validate(const TwoStageInstance& ins) {
  ValidationReport rep;
  auto add = [&rep](const std::string& code, const std::string& msg) {
    rep.issues.push_back({code, msg});
  };

  const int n1 = ins.first_stage.num_vars();
  const int n2 = ins.second_stage.num_vars();
  const int m2 = ins.second_stage.num_rows();
  const int S = ins.scenario_set.count();
  const int d = ins.outcome_mapping.dimension;

  // probabilities
  if (S == 0) add("NO_SCENARIOS", "scenario set is empty");
  double psum = 0.0;
  for (double p : ins.scenario_set.probabilities) {
    if (!(p > 0.0)) add("PROB_NONPOS", "scenario probability not strictly positive");
    psum += p;
  }
  if (S > 0 && std::fabs(psum - 1.0) > kProbTol)
    add("PROB_SUM", "scenario probabilities sum to " + std::to_string(psum));

  // first stage
  if (ins.first_stage.a_rows.size() != ins.first_stage.b.size())
    add("FIRST_STAGE_DIM", "A row count differs from b length");
  for (const auto& row : ins.first_stage.a_rows)
    if (static_cast<int>(row.size()) != n1) add("FIRST_STAGE_DIM", "A row width differs from n1");
  if (!finite_all(ins.first_stage.cost) || !finite_all(ins.first_stage.a_rows) ||
      !finite_all(ins.first_stage.b))
    add("NONFINITE", "non-finite first-stage data");
  for (int j : ins.first_stage.binary_indices)
    if (j < 0 || j >= n1) add("BINARY_RANGE", "binary index out of range");

  // second stage
  if (static_cast<int>(ins.second_stage.scenarios.size()) != S)
    add("SECOND_STAGE_DIM", "scenario recourse count differs from |S|");
  for (const auto& sc : ins.second_stage.scenarios) {
    if (static_cast<int>(sc.q.size()) != n2 || static_cast<int>(sc.h.size()) != m2 ||
        static_cast<int>(sc.t_rows.size()) != m2 || static_cast<int>(sc.w_rows.size()) != m2) {
      add("SECOND_STAGE_DIM", "scenario recourse dimensions are not uniform");
      continue;
    }
    for (const auto& r : sc.t_rows)
      if (static_cast<int>(r.size()) != n1) add("SECOND_STAGE_DIM", "T row width differs from n1");
    for (const auto& r : sc.w_rows)
      if (static_cast<int>(r.size()) != n2) add("SECOND_STAGE_DIM", "W row width differs from n2");
    if (!finite_all(sc.q) || !finite_all(sc.t_rows) || !finite_all(sc.w_rows) || !finite_all(sc.h))
      add("NONFINITE", "non-finite second-stage data");
  }

  // outcome mapping
  if (ins.risk_spec.relation != RiskRelation::None || !ins.outcome_mapping.per_scenario.empty()) {
    if (d < 1) add("OUTCOME_DIM", "outcome dimension must be >= 1");
    if (static_cast<int>(ins.outcome_mapping.per_scenario.size()) != S)
      add("OUTCOME_DIM", "outcome mapping scenario count differs from |S|");
    for (const auto& ps : ins.outcome_mapping.per_scenario) {
      if (static_cast<int>(ps.gbar.size()) != d || static_cast<int>(ps.gtilde.size()) != d ||
          static_cast<int>(ps.offset.size()) != d) {
        add("OUTCOME_DIM", "outcome mapping criterion count differs from d");
        continue;
      }
      for (const auto& r : ps.gbar)
        if (static_cast<int>(r.size()) != n1) add("OUTCOME_DIM", "gbar width differs from n1");
      for (const auto& r : ps.gtilde)
        if (static_cast<int>(r.size()) != n2) add("OUTCOME_DIM", "gtilde width differs from n2");
    }
  }

  // benchmark
  if (ins.risk_spec.relation != RiskRelation::None) {
    if (ins.benchmark.count() == 0) {
      add(ins.benchmark.has_plan ? "BENCHMARK_UNEXPANDED" : "BENCHMARK_EMPTY",
          ins.benchmark.has_plan ? "benchmark given as a plan reference; expand it before solving"
                                 : "risk relation requires a benchmark");
    } else {
      if (ins.benchmark.realizations.size() != ins.benchmark.probabilities.size())
        add("BENCHMARK_DIM", "benchmark realization and probability counts differ");
      double bsum = 0.0;
      for (double p : ins.benchmark.probabilities) {
        if (!(p > 0.0)) add("PROB_NONPOS", "benchmark probability not strictly positive");
        bsum += p;
      }
      if (std::fabs(bsum - 1.0) > kProbTol)
        add("PROB_SUM", "benchmark probabilities sum to " + std::to_string(bsum));
      for (const auto& z : ins.benchmark.realizations)
        if (static_cast<int>(z.size()) != d) add("BENCHMARK_DIM", "benchmark realization width differs from d");
    }

    if (!(ins.risk_spec.alpha >= 0.0 && ins.risk_spec.alpha < 1.0) &&
        ins.risk_spec.relation == RiskRelation::MultivariateCVaR)
      add("ALPHA_RANGE", "alpha must lie in [0,1)");

    // scalarization set: C intersected with the unit simplex must be non-empty
    const auto& cs = ins.risk_spec.scalarization;
    if (cs.dimension != d) add("SCALARIZATION_DIM", "scalarization dimension differs from d");
    if (cs.d_rows.size() != cs.e.size()) add("SCALARIZATION_DIM", "D rows differ from e length");
    bool dims_ok = cs.dimension == d && cs.d_rows.size() == cs.e.size();
    for (const auto& r : cs.d_rows)
      if (static_cast<int>(r.size()) != cs.dimension) {
        add("SCALARIZATION_DIM", "D row width differs from dimension");
        dims_ok = false;
      }
    if (dims_ok && d >= 1) {
      try {
        lp::LinearProgram feas;
        for (int i = 0; i < d; ++i) feas.add_var(0.0, 0.0, 1.0);
        feas.add_row(std::vector<double>(d, 1.0), lp::Sense::Eq, 1.0);
        for (size_t r = 0; r < cs.d_rows.size(); ++r) feas.add_row(cs.d_rows[r], lp::Sense::Le, cs.e[r]);
        if (lp::solve_lp(feas).status != lp::LpStatus::Optimal)
          add("EMPTY_SCALARIZATION", "scalarization set has no point on the unit simplex");
      } catch (const std::exception& e) {
        add("EMPTY_SCALARIZATION", std::string("scalarization feasibility check failed: ") + e.what());
      }
    }
  }

  // X non-empty (with integrality)
  if (rep.issues.empty()) {
    try {
      lp::MixedIntegerProgram mip;
      for (int j = 0; j < n1; ++j) mip.relaxation.add_var(0.0);
      for (int j : ins.first_stage.binary_indices) mip.relaxation.upper[j] = 1.0;
      for (size_t r = 0; r < ins.first_stage.a_rows.size(); ++r)
        mip.relaxation.add_row(ins.first_stage.a_rows[r], lp::Sense::Le, ins.first_stage.b[r]);
      mip.binary_vars = ins.first_stage.binary_indices;
      if (lp::solve_mip(mip).status != lp::MipStatus::Optimal)
        add("EMPTY_FIRST_STAGE", "the first-stage feasible set X is empty");
    } catch (const std::exception& e) {
      add("EMPTY_FIRST_STAGE", std::string("first-stage feasibility solve failed: ") + e.what());
    }
  }

  return rep;
}

std::string to_json_string(const TwoStageInstance& ins) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = ins.name;
  j["scenarios"] = {{"probabilities", ins.scenario_set.probabilities}};
  j["first_stage"] = {{"cost", ins.first_stage.cost},
                      {"a_rows", matrix_to_json(ins.first_stage.a_rows)},
                      {"b", ins.first_stage.b},
                      {"binary_indices", ins.first_stage.binary_indices}};
  json jss = json::array();
  for (const auto& sc : ins.second_stage.scenarios)
    jss.push_back({{"q", sc.q},
                   {"t_rows", matrix_to_json(sc.t_rows)},
                   {"w_rows", matrix_to_json(sc.w_rows)},
                   {"h", sc.h}});
  j["second_stage"] = std::move(jss);
  json jom = json::array();
  for (const auto& ps : ins.outcome_mapping.per_scenario)
    jom.push_back({{"gbar", matrix_to_json(ps.gbar)},
                   {"gtilde", matrix_to_json(ps.gtilde)},
                   {"offset", ps.offset}});
  j["outcome_mapping"] = {{"dimension", ins.outcome_mapping.dimension}, {"per_scenario", std::move(jom)}};
  json jb = {{"realizations", matrix_to_json(ins.benchmark.realizations)},
             {"probabilities", ins.benchmark.probabilities}};
  if (ins.benchmark.has_plan)
    jb["plan"] = {{"open_type", ins.benchmark.plan.open_type}, {"stock", ins.benchmark.plan.stock}};
  j["benchmark"] = std::move(jb);
  j["risk"] = {{"relation", relation_name(ins.risk_spec.relation)},
               {"alpha", ins.risk_spec.alpha},
               {"scalarization", {{"dimension", ins.risk_spec.scalarization.dimension},
                                   {"d_rows", matrix_to_json(ins.risk_spec.scalarization.d_rows)},
                                   {"e", ins.risk_spec.scalarization.e}}}};
  j["recourse_value_lower_bound"] = ins.recourse_value_lower_bound;
  return j.dump(2);
}

TwoStageInstance from_json_string(const std::string& text, std::vector<std::string>* warnings) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("instance JSON parse failed: ") + e.what());
  }
  try {
    if (!j.contains("schema_version"))
      throw Error(ErrorCode::ParseError, "missing schema_version");
    if (j["schema_version"].get<int>() != kSchemaVersion)
      throw Error(ErrorCode::SchemaVersionMismatch,
                  "unsupported instance schema_version " + j["schema_version"].dump());

    warn_unknown_fields(j,
                        {"schema_version", "name", "scenarios", "first_stage", "second_stage",
                         "outcome_mapping", "benchmark", "risk", "recourse_value_lower_bound"},
                        "instance", warnings);

    TwoStageInstance ins;
    ins.name = j.value("name", "");
    ins.scenario_set.probabilities = j.at("scenarios").at("probabilities").get<std::vector<double>>();

    const json& fs = j.at("first_stage");
    warn_unknown_fields(fs, {"cost", "a_rows", "b", "binary_indices"}, "first_stage", warnings);
    ins.first_stage.cost = fs.at("cost").get<std::vector<double>>();
    ins.first_stage.a_rows = matrix_from_json(fs.at("a_rows"));
    ins.first_stage.b = fs.at("b").get<std::vector<double>>();
    ins.first_stage.binary_indices = fs.at("binary_indices").get<std::vector<int>>();

    for (const json& sc : j.at("second_stage")) {
      ScenarioRecourse r;
      r.q = sc.at("q").get<std::vector<double>>();
      r.t_rows = matrix_from_json(sc.at("t_rows"));
      r.w_rows = matrix_from_json(sc.at("w_rows"));
      r.h = sc.at("h").get<std::vector<double>>();
      ins.second_stage.scenarios.push_back(std::move(r));
    }

    const json& om = j.at("outcome_mapping");
    ins.outcome_mapping.dimension = om.at("dimension").get<int>();
    for (const json& ps : om.at("per_scenario")) {
      OutcomeMapping::PerScenario p;
      p.gbar = matrix_from_json(ps.at("gbar"));
      p.gtilde = matrix_from_json(ps.at("gtilde"));
      p.offset = ps.at("offset").get<std::vector<double>>();
      ins.outcome_mapping.per_scenario.push_back(std::move(p));
    }

    const json& bm = j.at("benchmark");
    warn_unknown_fields(bm, {"realizations", "probabilities", "plan"}, "benchmark", warnings);
    // literal realizations, a plan reference to expand later, or both
    if (bm.contains("realizations")) ins.benchmark.realizations = matrix_from_json(bm["realizations"]);
    if (bm.contains("probabilities"))
      ins.benchmark.probabilities = bm["probabilities"].get<std::vector<double>>();
    if (bm.contains("plan")) {
      ins.benchmark.has_plan = true;
      ins.benchmark.plan.open_type = bm["plan"].at("open_type").get<std::vector<int>>();
      ins.benchmark.plan.stock = bm["plan"].at("stock").get<std::vector<double>>();
    }

    const json& rs = j.at("risk");
    ins.risk_spec.relation = relation_from_name(rs.at("relation").get<std::string>());
    ins.risk_spec.alpha = rs.at("alpha").get<double>();
    const json& cs = rs.at("scalarization");
    ins.risk_spec.scalarization.dimension = cs.at("dimension").get<int>();
    ins.risk_spec.scalarization.d_rows = matrix_from_json(cs.at("d_rows"));
    ins.risk_spec.scalarization.e = cs.at("e").get<std::vector<double>>();

    ins.recourse_value_lower_bound = j.value("recourse_value_lower_bound", -1e9);
    return ins;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("instance JSON structure invalid: ") + e.what());
  }
}

TwoStageInstance load_instance(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_string(ss.str(), warnings);
}

void save_instance(const TwoStageInstance& ins, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  out << to_json_string(ins) << '\n';
}

std::vector<std::vector<double>> evaluate_outcomes(const TwoStageInstance& ins,
                                                   const std::vector<double>& x,
                                                   const std::vector<std::vector<double>>& y) {
  const int S = ins.scenario_set.count();
  const int d = ins.outcome_mapping.dimension;
  std::vector<std::vector<double>> g(S, std::vector<double>(d, 0.0));
  for (int s = 0; s < S; ++s) {
    const auto& ps = ins.outcome_mapping.per_scenario[s];
    for (int i = 0; i < d; ++i) {
      double v = ps.offset[i];
      for (size_t j = 0; j < x.size(); ++j) v += ps.gbar[i][j] * x[j];
      for (size_t j = 0; j < y[s].size(); ++j) v += ps.gtilde[i][j] * y[s][j];
      g[s][i] = v;
    }
  }
  return g;
}

}  // namespace riskdec::model
