#include "relief/relief.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "lp/simplex.hpp"
#include "util/rng.hpp"

namespace riskdec::relief {

using nlohmann::json;

namespace {

double distance(const ReliefNetwork::Node& a, const ReliefNetwork::Node& b) {
  return std::hypot(a.px - b.px, a.py - b.py);
}

// delivery pairs (facility j, node i) with i != location(j); fixed across
// scenarios so every scenario has the same variable layout
std::vector<std::pair<int, int>> delivery_pairs(const ReliefNetwork& net) {
  std::vector<std::pair<int, int>> pairs;
  for (int j = 0; j < net.num_facilities(); ++j)
    for (int i = 0; i < net.num_nodes(); ++i)
      if (i != net.facility_nodes[j]) pairs.emplace_back(j, i);
  return pairs;
}

void check_network(const ReliefNetwork& net) {
  if (net.nodes.empty()) throw Error(ErrorCode::MalformedProblem, "network has no nodes");
  if (net.facility_nodes.empty())
    throw Error(ErrorCode::MalformedProblem, "network has no candidate facilities");
  for (int j : net.facility_nodes)
    if (j < 0 || j >= net.num_nodes())
      throw Error(ErrorCode::MalformedProblem, "facility node index out of range");
  for (int l = 1; l < net.num_types(); ++l)
    if (!(net.type_capacities[l] > net.type_capacities[l - 1]))
      throw Error(ErrorCode::MalformedProblem, "type capacities must be strictly increasing");
  if (!(net.coverage_minutes > 0))
    throw Error(ErrorCode::MalformedProblem, "coverage threshold must be positive");
  if (static_cast<int>(net.fixed_costs.size()) != net.num_facilities() ||
      static_cast<int>(net.unit_acquisition.size()) != net.num_facilities())
    throw Error(ErrorCode::MalformedProblem, "facility cost arrays do not match J");
}

}  // namespace

std::vector<ReliefScenario> generate_scenarios(const ReliefNetwork& net, uint64_t seed, int count,
                                               const GeneratorOptions& opt) {
  check_network(net);
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "scenario count must be >= 1");
  const int I = net.num_nodes();
  const int J = net.num_facilities();

  double diameter = 1.0;
  for (int a = 0; a < I; ++a)
    for (int b = a + 1; b < I; ++b) diameter = std::max(diameter, distance(net.nodes[a], net.nodes[b]));
  const double reach = 0.6 * diameter + 1e-9;

  util::Rng rng(seed);
  std::vector<ReliefScenario> out;
  out.reserve(count);
  for (int s = 0; s < count; ++s) {
    ReliefScenario sc;
    sc.epicenter = rng.uniform_int(I);
    int tier = rng.uniform_int(std::max(1, opt.severity_tiers));
    if (opt.force_tier >= 0) tier = opt.force_tier;
    sc.severity_tier = tier;
    double sev = opt.severity_tiers > 1 ? static_cast<double>(tier) / (opt.severity_tiers - 1) : 0.0;

    std::vector<double> prox(I);
    for (int i = 0; i < I; ++i) {
      double dd = distance(net.nodes[i], net.nodes[sc.epicenter]);
      prox[i] = std::max(0.0, 1.0 - dd / reach);
    }

    sc.demands.resize(I);
    for (int i = 0; i < I; ++i) {
      double jitter = 0.8 + 0.4 * rng.uniform();
      sc.demands[i] = net.nodes[i].base_demand * (1.0 + opt.demand_surge * sev * prox[i] * jitter);
    }
    sc.undamaged_fraction.resize(J);
    for (int j = 0; j < J; ++j) {
      double jitter = 0.7 + 0.6 * rng.uniform();
      double g = 1.0 - opt.damage_factor * sev * prox[net.facility_nodes[j]] * jitter;
      sc.undamaged_fraction[j] = std::clamp(g, 0.0, 1.0);
    }
    sc.travel_minutes.assign(I, std::vector<double>(I, 0.0));
    for (int a = 0; a < I; ++a)
      for (int b = a + 1; b < I; ++b) {
        double base = distance(net.nodes[a], net.nodes[b]) * net.minutes_per_unit_distance;
        double inflate = 1.0 + opt.congestion_factor * sev * std::max(prox[a], prox[b]);
        sc.travel_minutes[a][b] = sc.travel_minutes[b][a] = base * inflate;
      }
    sc.shortage_penalty = opt.penalty_base * (1.0 + opt.penalty_surge * sev);
    sc.ship_costs.assign(J, std::vector<double>(I, 0.0));
    for (int j = 0; j < J; ++j)
      for (int i = 0; i < I; ++i)
        sc.ship_costs[j][i] = opt.ship_cost_per_minute * sc.travel_minutes[net.facility_nodes[j]][i];
    out.push_back(std::move(sc));
  }
  return out;
}

model::TwoStageInstance build_relief_instance(const ReliefNetwork& net,
                                              const std::vector<ReliefScenario>& scenarios,
                                              const model::RiskSpec& risk_spec,
                                              std::vector<std::string>* warnings) {
  check_network(net);
  if (scenarios.empty()) throw Error(ErrorCode::InvalidArgument, "no scenarios");
  const int I = net.num_nodes();
  const int J = net.num_facilities();
  const int Lt = net.num_types();
  const int S = static_cast<int>(scenarios.size());
  const auto pairs = delivery_pairs(net);
  const int P = static_cast<int>(pairs.size());

  model::TwoStageInstance ins;
  ins.name = net.name.empty() ? "relief" : net.name;
  ins.scenario_set.probabilities.assign(S, 1.0 / S);
  ins.risk_spec = risk_spec;
  ins.recourse_value_lower_bound = 0.0;  // all second-stage costs are nonnegative

  // first stage: x_jl (binary, index j*Lt+l) then R_j
  const int n1 = J * Lt + J;
  ins.first_stage.cost.resize(n1);
  for (int j = 0; j < J; ++j)
    for (int l = 0; l < Lt; ++l) ins.first_stage.cost[j * Lt + l] = net.fixed_costs[j][l];
  for (int j = 0; j < J; ++j) ins.first_stage.cost[J * Lt + j] = net.unit_acquisition[j];
  for (int j = 0; j < J * Lt; ++j) ins.first_stage.binary_indices.push_back(j);
  for (int j = 0; j < J; ++j) {  // at most one facility per node
    std::vector<double> row(n1, 0.0);
    for (int l = 0; l < Lt; ++l) row[j * Lt + l] = 1.0;
    ins.first_stage.a_rows.push_back(std::move(row));
    ins.first_stage.b.push_back(1.0);
  }
  for (int j = 0; j < J; ++j) {  // stock within opened capacity
    std::vector<double> row(n1, 0.0);
    row[J * Lt + j] = 1.0;
    for (int l = 0; l < Lt; ++l) row[j * Lt + l] = -net.type_capacities[l];
    ins.first_stage.a_rows.push_back(std::move(row));
    ins.first_stage.b.push_back(0.0);
  }

  // second stage: y_(j,i) for pairs | u_i | u_max
  const int n2 = P + I + 1;
  const int u0 = P;
  const int umax = P + I;

  ins.outcome_mapping.dimension = 2;
  for (int s = 0; s < S; ++s) {
    const ReliefScenario& sc = scenarios[s];
    model::ScenarioRecourse r;
    r.q.assign(n2, 0.0);
    for (int p = 0; p < P; ++p) r.q[p] = sc.ship_costs[pairs[p].first][pairs[p].second];
    for (int i = 0; i < I; ++i) r.q[u0 + i] = sc.shortage_penalty;

    auto covered = [&](int j, int i) {
      return sc.travel_minutes[net.facility_nodes[j]][i] <= net.coverage_minutes;
    };

    auto add_row = [&](std::vector<double> t, std::vector<double> w, double h) {
      r.t_rows.push_back(std::move(t));
      r.w_rows.push_back(std::move(w));
      r.h.push_back(h);
    };

    std::vector<bool> is_facility(I, false);
    for (int j = 0; j < J; ++j) is_facility[net.facility_nodes[j]] = true;

    if (warnings) {
      for (int i = 0; i < I; ++i) {
        if (is_facility[i]) continue;
        bool reachable = false;
        for (int j = 0; j < J && !reachable; ++j) reachable = covered(j, i);
        if (!reachable)
          warnings->push_back("IsolatedDemandNode: node " + std::to_string(i) + " in scenario " +
                              std::to_string(s) + " has no covering facility");
      }
    }

    // shortage balance at pure demand nodes: u_i + sum_j y_ji >= d_i
    for (int i = 0; i < I; ++i) {
      if (is_facility[i]) continue;
      std::vector<double> w(n2, 0.0);
      w[u0 + i] = 1.0;
      for (int p = 0; p < P; ++p)
        if (pairs[p].second == i) w[p] = 1.0;
      add_row(std::vector<double>(n1, 0.0), std::move(w), sc.demands[i]);
    }
    // shortage balance at facility nodes:
    //   u_f - outflow + gamma_j R_j + inflow >= d_f
    for (int j = 0; j < J; ++j) {
      int f = net.facility_nodes[j];
      std::vector<double> t(n1, 0.0), w(n2, 0.0);
      w[u0 + f] = 1.0;
      t[J * Lt + j] = sc.undamaged_fraction[j];
      for (int p = 0; p < P; ++p) {
        if (pairs[p].first == j) w[p] -= 1.0;       // shipped out of f
        if (pairs[p].second == f) w[p] += 1.0;      // delivered into f
      }
      add_row(std::move(t), std::move(w), sc.demands[f]);
    }
    // outflow cap: gamma_j R_j - sum_out y >= 0
    for (int j = 0; j < J; ++j) {
      std::vector<double> t(n1, 0.0), w(n2, 0.0);
      t[J * Lt + j] = sc.undamaged_fraction[j];
      for (int p = 0; p < P; ++p)
        if (pairs[p].first == j) w[p] = -1.0;
      add_row(std::move(t), std::move(w), 0.0);
    }
    // no deliveries into an opened facility node:
    //   -sum_in y - d_f sum_l x_jl >= -d_f
    for (int j = 0; j < J; ++j) {
      int f = net.facility_nodes[j];
      std::vector<double> t(n1, 0.0), w(n2, 0.0);
      for (int l = 0; l < Lt; ++l) t[j * Lt + l] = -sc.demands[f];
      for (int p = 0; p < P; ++p)
        if (pairs[p].second == f) w[p] = -1.0;
      add_row(std::move(t), std::move(w), -sc.demands[f]);
    }
    // max shortage proportion: u_max - u_i/d_i >= 0 (skipped as trivial when
    // d_i = 0, where u_i is already forced to zero cost-wise)
    for (int i = 0; i < I; ++i) {
      std::vector<double> w(n2, 0.0);
      w[umax] = 1.0;
      if (sc.demands[i] > 0.0) w[u0 + i] = -1.0 / sc.demands[i];
      add_row(std::vector<double>(n1, 0.0), std::move(w), 0.0);
    }
    // coverage: y_ji <= d_i when the pair is within the travel threshold,
    // otherwise y_ji = 0
    for (int p = 0; p < P; ++p) {
      std::vector<double> w(n2, 0.0);
      w[p] = -1.0;
      double cap = covered(pairs[p].first, pairs[p].second) ? sc.demands[pairs[p].second] : 0.0;
      add_row(std::vector<double>(n1, 0.0), std::move(w), -cap);
    }
    ins.second_stage.scenarios.push_back(std::move(r));

    // outcome mapping: g1 = u_max, g2 = scaled average travel time score
    model::OutcomeMapping::PerScenario om;
    om.gbar.assign(2, std::vector<double>(n1, 0.0));
    om.gtilde.assign(2, std::vector<double>(n2, 0.0));
    om.offset.assign(2, 0.0);
    om.gtilde[0][umax] = 1.0;
    double denom = 0.0;
    for (int i = 0; i < I; ++i) {
      if (!(sc.demands[i] > 0.0)) continue;
      double worst = 0.0;
      for (int j = 0; j < J; ++j)
        if (net.facility_nodes[j] != i && covered(j, i))
          worst = std::max(worst, sc.travel_minutes[i][net.facility_nodes[j]]);
      denom += worst;  // nodes with no covering facility contribute nothing
    }
    if (denom > 0.0) {
      for (int p = 0; p < P; ++p) {
        int i = pairs[p].second;
        if (!(sc.demands[i] > 0.0) || !covered(pairs[p].first, i)) continue;
        om.gtilde[1][p] =
            sc.travel_minutes[i][net.facility_nodes[pairs[p].first]] / (sc.demands[i] * denom);
      }
    }
    ins.outcome_mapping.per_scenario.push_back(std::move(om));
  }
  return ins;
}

std::vector<double> plan_to_first_stage(const ReliefNetwork& net, const ReliefPlan& plan) {
  check_network(net);
  const int J = net.num_facilities();
  const int Lt = net.num_types();
  if (static_cast<int>(plan.open_type.size()) != J || static_cast<int>(plan.stock.size()) != J)
    throw Error(ErrorCode::MalformedProblem, "plan arrays do not match the facility count");
  std::vector<double> x(J * Lt + J, 0.0);
  for (int j = 0; j < J; ++j) {
    int l = plan.open_type[j];
    double cap = 0.0;
    if (l >= 0) {
      if (l >= Lt) throw Error(ErrorCode::MalformedProblem, "plan facility type out of range");
      x[j * Lt + l] = 1.0;
      cap = net.type_capacities[l];
    }
    if (plan.stock[j] < -1e-12 || plan.stock[j] > cap + 1e-9)
      throw Error(ErrorCode::MalformedProblem, "plan stock exceeds opened capacity");
    x[J * Lt + j] = std::max(0.0, plan.stock[j]);
  }
  return x;
}

PlanEvaluation evaluate_plan_scenario(const model::TwoStageInstance& ins, int s,
                                      const std::vector<double>& x) {
  const auto& sc = ins.second_stage.scenarios[s];
  const int n2 = ins.second_stage.num_vars();
  lp::LinearProgram prob;
  for (int j = 0; j < n2; ++j) prob.add_var(sc.q[j]);
  for (size_t r = 0; r < sc.h.size(); ++r) {
    double rhs = sc.h[r];
    for (size_t j = 0; j < x.size(); ++j) rhs -= sc.t_rows[r][j] * x[j];
    prob.add_row(sc.w_rows[r], lp::Sense::Ge, rhs);
  }
  auto out = lp::solve_lp(prob);
  if (out.status != lp::LpStatus::Optimal)
    throw Error(ErrorCode::InstanceContractViolation,
                "second stage under a fixed plan must be feasible (shortage absorbs demand)");
  PlanEvaluation ev;
  ev.cost = out.objective;
  ev.y = std::move(out.primal);
  const auto& om = ins.outcome_mapping.per_scenario[s];
  ev.outcome.assign(ins.outcome_mapping.dimension, 0.0);
  for (int i = 0; i < ins.outcome_mapping.dimension; ++i) {
    double v = om.offset[i];
    for (size_t j = 0; j < x.size(); ++j) v += om.gbar[i][j] * x[j];
    for (int j = 0; j < n2; ++j) v += om.gtilde[i][j] * ev.y[j];
    ev.outcome[i] = v;
  }
  return ev;
}

model::Benchmark build_benchmark(const ReliefNetwork& net,
                                 const std::vector<ReliefScenario>& scenarios,
                                 const ReliefPlan& plan) {
  model::RiskSpec none;
  none.relation = model::RiskRelation::None;
  none.scalarization.dimension = 2;
  auto ins = build_relief_instance(net, scenarios, none);
  auto x = plan_to_first_stage(net, plan);

  model::Benchmark bm;
  const int S = static_cast<int>(scenarios.size());
  for (int s = 0; s < S; ++s) {
    auto ev = evaluate_plan_scenario(ins, s, x);
    bm.realizations.push_back(ev.outcome);
    bm.probabilities.push_back(ins.scenario_set.probabilities[s]);
  }
  bm.has_plan = true;
  bm.plan.open_type = plan.open_type;
  bm.plan.stock = plan.stock;
  return bm;
}

ReliefNetwork make_demo_network(int num_nodes, int num_facilities, int num_types, uint64_t seed,
                                double coverage_minutes) {
  if (num_nodes < 2 || num_facilities < 1 || num_facilities > num_nodes || num_types < 1)
    throw Error(ErrorCode::InvalidArgument, "bad demo network shape");
  util::Rng rng(seed);
  ReliefNetwork net;
  net.name = "relief-demo";
  net.coverage_minutes = coverage_minutes;
  net.minutes_per_unit_distance = 1.0;
  for (int i = 0; i < num_nodes; ++i) {
    ReliefNetwork::Node nd;
    nd.px = rng.uniform(0.0, 100.0);
    nd.py = rng.uniform(0.0, 100.0);
    nd.base_demand = rng.uniform(20.0, 80.0);
    net.nodes.push_back(nd);
  }
  for (int j = 0; j < num_facilities; ++j)
    net.facility_nodes.push_back(j * num_nodes / num_facilities);

  // capacities anchored at the 5394-unit top size
  static const double kSizes[3] = {500.0, 2000.0, 5394.0};
  std::vector<double> caps;
  for (int l = 0; l < num_types; ++l) {
    int from_top = num_types - 1 - l;
    caps.push_back(from_top < 3 ? kSizes[2 - from_top] : kSizes[0] / (1 << (from_top - 2)));
  }
  std::sort(caps.begin(), caps.end());
  net.type_capacities = caps;

  for (int j = 0; j < num_facilities; ++j) {
    std::vector<double> f;
    for (double k : caps) f.push_back(40.0 + 0.09 * k);
    net.fixed_costs.push_back(std::move(f));
    net.unit_acquisition.push_back(0.35);
  }
  return net;
}

void save_network(const ReliefNetwork& net, const std::filesystem::path& path) {
  json j;
  j["schema_version"] = 1;
  j["name"] = net.name;
  json nodes = json::array();
  for (const auto& nd : net.nodes)
    nodes.push_back({{"x", nd.px}, {"y", nd.py}, {"base_demand", nd.base_demand}});
  j["nodes"] = std::move(nodes);
  j["facility_nodes"] = net.facility_nodes;
  j["type_capacities"] = net.type_capacities;
  json f = json::array();
  for (const auto& row : net.fixed_costs) f.push_back(row);
  j["fixed_costs"] = std::move(f);
  j["unit_acquisition"] = net.unit_acquisition;
  j["coverage_minutes"] = net.coverage_minutes;
  j["minutes_per_unit_distance"] = net.minutes_per_unit_distance;
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

ReliefNetwork load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  json j;
  try {
    in >> j;
    ReliefNetwork net;
    net.name = j.value("name", "relief");
    for (const auto& nd : j.at("nodes")) {
      ReliefNetwork::Node n;
      n.px = nd.at("x").get<double>();
      n.py = nd.at("y").get<double>();
      n.base_demand = nd.at("base_demand").get<double>();
      net.nodes.push_back(n);
    }
    net.facility_nodes = j.at("facility_nodes").get<std::vector<int>>();
    net.type_capacities = j.at("type_capacities").get<std::vector<double>>();
    for (const auto& row : j.at("fixed_costs")) net.fixed_costs.push_back(row.get<std::vector<double>>());
    net.unit_acquisition = j.at("unit_acquisition").get<std::vector<double>>();
    net.coverage_minutes = j.at("coverage_minutes").get<double>();
    net.minutes_per_unit_distance = j.value("minutes_per_unit_distance", 1.0);
    check_network(net);
    return net;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("network JSON invalid: ") + e.what());
  }
}

void save_plan(const ReliefPlan& plan, const std::filesystem::path& path) {
  json j;
  j["schema_version"] = 1;
  j["open_type"] = plan.open_type;
  j["stock"] = plan.stock;
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

ReliefPlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  json j;
  try {
    in >> j;
    ReliefPlan plan;
    plan.open_type = j.at("open_type").get<std::vector<int>>();
    plan.stock = j.at("stock").get<std::vector<double>>();
    return plan;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("plan JSON invalid: ") + e.what());
  }
}

ReliefPlan default_benchmark_plan(const ReliefNetwork& net) {
  // single large facility stocked to capacity at every other candidate node
  ReliefPlan plan;
  const int J = net.num_facilities();
  const int top = net.num_types() - 1;
  plan.open_type.assign(J, -1);
  plan.stock.assign(J, 0.0);
  for (int j = 0; j < J; j += 2) {
    plan.open_type[j] = top;
    plan.stock[j] = net.type_capacities[top];
  }
  return plan;
}

}  // namespace riskdec::relief
