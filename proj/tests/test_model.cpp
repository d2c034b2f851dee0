#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "model/instance.hpp"
#include "support/generators.hpp"

using namespace riskdec;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("riskdec_test_" + name);
}

}  // namespace

TEST_CASE("validate accepts a sound instance") {
  testing::InstanceSpec spec;
  spec.seed = 5;
  auto ins = testing::random_instance(spec);
  auto rep = model::validate(ins);
  std::string first = rep.issues.empty() ? "" : rep.issues[0].code;
  CHECK_MESSAGE(rep.ok(), first);
}

TEST_CASE("probability sum violations are reported") {
  testing::InstanceSpec spec;
  spec.seed = 6;
  auto ins = testing::random_instance(spec);
  ins.scenario_set.probabilities[0] += 0.1;
  auto rep = model::validate(ins);
  CHECK(rep.has("PROB_SUM"));
}

TEST_CASE("empty scalarization set is reported") {
  testing::InstanceSpec spec;
  spec.seed = 7;
  auto ins = testing::random_instance(spec);
  ins.risk_spec.scalarization.d_rows = {{-1.0, 0.0}};  // c1 >= 2, impossible on the simplex
  ins.risk_spec.scalarization.e = {-2.0};
  auto rep = model::validate(ins);
  CHECK(rep.has("EMPTY_SCALARIZATION"));
}

TEST_CASE("validate is total on malformed content") {
  model::TwoStageInstance ins;  // everything empty
  auto rep = model::validate(ins);
  CHECK_FALSE(rep.ok());
}

TEST_CASE("round trip bit-exact over a randomized corpus") {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    testing::InstanceSpec spec;
    spec.seed = seed;
    spec.num_scenarios = 3 + static_cast<int>(seed % 5);
    spec.with_offsets = seed % 2 == 0;
    auto ins = testing::random_instance(spec);
    auto path = temp_file("roundtrip.json");
    model::save_instance(ins, path);
    auto back = model::load_instance(path);
    CHECK(back.name == ins.name);
    CHECK(back.scenario_set.probabilities == ins.scenario_set.probabilities);
    CHECK(back.first_stage.cost == ins.first_stage.cost);
    CHECK(back.first_stage.a_rows == ins.first_stage.a_rows);
    CHECK(back.first_stage.b == ins.first_stage.b);
    CHECK(back.first_stage.binary_indices == ins.first_stage.binary_indices);
    REQUIRE(back.second_stage.scenarios.size() == ins.second_stage.scenarios.size());
    for (size_t s = 0; s < ins.second_stage.scenarios.size(); ++s) {
      CHECK(back.second_stage.scenarios[s].q == ins.second_stage.scenarios[s].q);
      CHECK(back.second_stage.scenarios[s].t_rows == ins.second_stage.scenarios[s].t_rows);
      CHECK(back.second_stage.scenarios[s].w_rows == ins.second_stage.scenarios[s].w_rows);
      CHECK(back.second_stage.scenarios[s].h == ins.second_stage.scenarios[s].h);
    }
    for (size_t s = 0; s < ins.outcome_mapping.per_scenario.size(); ++s) {
      CHECK(back.outcome_mapping.per_scenario[s].gbar == ins.outcome_mapping.per_scenario[s].gbar);
      CHECK(back.outcome_mapping.per_scenario[s].gtilde ==
            ins.outcome_mapping.per_scenario[s].gtilde);
      CHECK(back.outcome_mapping.per_scenario[s].offset ==
            ins.outcome_mapping.per_scenario[s].offset);
    }
    CHECK(back.benchmark.realizations == ins.benchmark.realizations);
    CHECK(back.benchmark.probabilities == ins.benchmark.probabilities);
    CHECK(back.risk_spec.alpha == ins.risk_spec.alpha);
    CHECK(back.risk_spec.scalarization.d_rows == ins.risk_spec.scalarization.d_rows);
    std::filesystem::remove(path);
  }
}

TEST_CASE("truncated file raises a parse error") {
  testing::InstanceSpec spec;
  spec.seed = 9;
  auto ins = testing::random_instance(spec);
  auto text = model::to_json_string(ins);
  auto path = temp_file("truncated.json");
  {
    std::ofstream out(path);
    out << text.substr(0, text.size() / 2);
  }
  CHECK_THROWS_AS(model::load_instance(path), Error);
  std::filesystem::remove(path);
}

TEST_CASE("unknown extra fields load with a warning") {
  testing::InstanceSpec spec;
  spec.seed = 10;
  auto ins = testing::random_instance(spec);
  auto text = model::to_json_string(ins);
  text.insert(text.find_first_of('{') + 1, "\n  \"future_field\": 42,");
  std::vector<std::string> warnings;
  auto back = model::from_json_string(text, &warnings);
  CHECK(back.name == ins.name);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("future_field") != std::string::npos);
}

TEST_CASE("schema version mismatch is its own error") {
  testing::InstanceSpec spec;
  spec.seed = 11;
  auto ins = testing::random_instance(spec);
  auto text = model::to_json_string(ins);
  auto pos = text.find("\"schema_version\": 1");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 19, "\"schema_version\": 9");
  try {
    model::from_json_string(text);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaVersionMismatch);
  }
}
