#include "advgd/config.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>

#include "advgd/experiment.hpp"

namespace fs = std::filesystem;
using advgd::AttackMode;
using advgd::ConfigError;
using advgd::ExperimentConfig;
using advgd::GraphConfig;
using advgd::InitSpec;
using advgd::load_experiment_config;
using advgd::ObjectiveConfig;
using advgd::parse_experiment_config;
using nlohmann::json;

namespace {

json base_config() {
  return json{
      {"name", "unit"},
      {"graph", {{"kind", "complete"}, {"n", 4}}},
      {"objective", {{"kind", "paper_quadratic"}, {"n", 4}, {"p", 1}}},
      {"attack",
       {{"mode", "cooperative_fixed"}, {"adversaries", {1, 3}}, {"low", 0.0}, {"high", 1.0},
        {"seed", 5}}},
      {"alpha", 0.6},
      {"iterations", 10},
      {"init", {{"kind", "uniform"}, {"low", -1.0}, {"high", 1.0}}},
      {"replications", 2},
      {"base_seed", 9},
      {"outputs", {{"csv", "out.csv"}, {"summary", "out.json"}, {"plot", "out.svg"}}},
  };
}

}  // namespace

TEST(Config, ParsesFullConfig) {
  const ExperimentConfig cfg = parse_experiment_config(base_config());
  EXPECT_EQ(cfg.name, "unit");
  EXPECT_EQ(cfg.graph.kind, GraphConfig::Kind::complete);
  EXPECT_EQ(cfg.graph.n, 4);
  EXPECT_EQ(cfg.objective.kind, ObjectiveConfig::Kind::paper_quadratic);
  EXPECT_EQ(cfg.objective.p, 1);
  EXPECT_EQ(cfg.attack.mode, AttackMode::cooperative_fixed);
  const std::vector<int> expected_adv{0, 2};  // converted to 0-based
  EXPECT_EQ(cfg.attack.adversaries, expected_adv);
  EXPECT_DOUBLE_EQ(cfg.alpha, 0.6);
  EXPECT_EQ(cfg.iterations, 10);
  EXPECT_EQ(cfg.init.kind, InitSpec::Kind::uniform);
  EXPECT_EQ(cfg.replications, 2);
  EXPECT_EQ(cfg.base_seed, 9u);
  EXPECT_EQ(cfg.outputs.csv, fs::path("out.csv"));
  ASSERT_TRUE(cfg.outputs.plot.has_value());
}

TEST(Config, DefaultsApplied) {
  json j = base_config();
  j.erase("replications");
  j.erase("base_seed");
  j["attack"] = {{"mode", "none"}};
  j["outputs"].erase("plot");
  const ExperimentConfig cfg = parse_experiment_config(j);
  EXPECT_EQ(cfg.replications, 1);
  EXPECT_EQ(cfg.base_seed, 0u);
  EXPECT_EQ(cfg.attack.mode, AttackMode::none);
  EXPECT_TRUE(cfg.attack.adversaries.empty());
  EXPECT_DOUBLE_EQ(cfg.attack.dist_low, 0.0);
  EXPECT_DOUBLE_EQ(cfg.attack.dist_high, 1.0);
  EXPECT_FALSE(cfg.outputs.plot.has_value());
}

TEST(Config, UnknownKeysRejectedEverywhere) {
  for (const char* where : {"", "graph", "objective", "attack", "init", "outputs"}) {
    json j = base_config();
    if (std::string(where).empty())
      j["extra"] = 1;
    else
      j[where]["extra"] = 1;
    EXPECT_THROW(parse_experiment_config(j), ConfigError) << "block: " << where;
  }
}

TEST(Config, MissingRequiredKeysRejected) {
  for (const char* key : {"name", "graph", "objective", "attack", "alpha", "iterations", "init",
                          "outputs"}) {
    json j = base_config();
    j.erase(key);
    EXPECT_THROW(parse_experiment_config(j), ConfigError) << "key: " << key;
  }
  json no_mode = base_config();
  no_mode["attack"].erase("mode");
  EXPECT_THROW(parse_experiment_config(no_mode), ConfigError);
  json no_csv = base_config();
  no_csv["outputs"].erase("csv");
  EXPECT_THROW(parse_experiment_config(no_csv), ConfigError);
}

TEST(Config, TypeErrorsRejected) {
  json bad_alpha = base_config();
  bad_alpha["alpha"] = "fast";
  EXPECT_THROW(parse_experiment_config(bad_alpha), ConfigError);

  json float_n = base_config();
  float_n["graph"]["n"] = 4.5;
  EXPECT_THROW(parse_experiment_config(float_n), ConfigError);

  json bad_name = base_config();
  bad_name["name"] = 7;
  EXPECT_THROW(parse_experiment_config(bad_name), ConfigError);

  json negative_seed = base_config();
  negative_seed["base_seed"] = -1;
  EXPECT_THROW(parse_experiment_config(negative_seed), ConfigError);
}

TEST(Config, RangeErrorsRejected) {
  const auto expect_throw = [](json j) { EXPECT_THROW(parse_experiment_config(j), ConfigError); };

  json j = base_config();
  j["alpha"] = 0.0;
  expect_throw(j);
  j = base_config();
  j["iterations"] = -1;
  expect_throw(j);
  j = base_config();
  j["replications"] = 0;
  expect_throw(j);
  j = base_config();
  j["attack"]["adversaries"] = {0};  // config indices are 1-based
  expect_throw(j);
  j = base_config();
  j["attack"]["adversaries"] = {5};
  expect_throw(j);
  j = base_config();
  j["attack"]["adversaries"] = {1, 1};
  expect_throw(j);
  j = base_config();
  j["attack"]["high"] = -1.0;  // low >= high
  expect_throw(j);
  j = base_config();
  j["init"]["low"] = 2.0;
  expect_throw(j);
  j = base_config();
  j["attack"]["mode"] = "sneaky";
  expect_throw(j);
  j = base_config();
  j["graph"]["kind"] = "torus";
  expect_throw(j);
  j = base_config();
  j["init"]["kind"] = "constant";
  expect_throw(j);
}

TEST(Config, AdversariesMustMatchMode) {
  json none_with_agents = base_config();
  none_with_agents["attack"] = {{"mode", "none"}, {"adversaries", {1}}};
  EXPECT_THROW(parse_experiment_config(none_with_agents), ConfigError);

  json coop_without_agents = base_config();
  coop_without_agents["attack"] = {{"mode", "cooperative_fixed"}};
  EXPECT_THROW(parse_experiment_config(coop_without_agents), ConfigError);
}

TEST(Config, FixedEpsilonValidation) {
  json j = base_config();
  j["attack"]["fixed_epsilon"] = {0.5};
  const ExperimentConfig cfg = parse_experiment_config(j);
  ASSERT_TRUE(cfg.attack.fixed_epsilon.has_value());
  EXPECT_DOUBLE_EQ((*cfg.attack.fixed_epsilon)(0), 0.5);

  j["attack"]["fixed_epsilon"] = {0.5, 0.5};  // p = 1
  EXPECT_THROW(parse_experiment_config(j), ConfigError);

  json per_step = base_config();
  per_step["attack"]["mode"] = "independent_per_step";
  per_step["attack"]["fixed_epsilon"] = {0.5};
  EXPECT_THROW(parse_experiment_config(per_step), ConfigError);
}

TEST(Config, RandomGraphBlock) {
  json j = base_config();
  j["graph"] = {{"kind", "random"}, {"n", 6}, {"edge_prob", 0.5}, {"seed", 7}};
  j["objective"]["n"] = 6;
  const ExperimentConfig cfg = parse_experiment_config(j);
  EXPECT_EQ(cfg.graph.kind, GraphConfig::Kind::random);
  EXPECT_DOUBLE_EQ(cfg.graph.edge_prob, 0.5);
  EXPECT_EQ(cfg.graph.seed, 7u);

  j["graph"]["edge_prob"] = 0.0;
  EXPECT_THROW(parse_experiment_config(j), ConfigError);
  j["graph"]["edge_prob"] = 1.5;
  EXPECT_THROW(parse_experiment_config(j), ConfigError);
  j["graph"] = {{"kind", "random"}, {"n", 6}};  // edge_prob and seed required
  EXPECT_THROW(parse_experiment_config(j), ConfigError);
}

TEST(Config, ExplicitGraphBlock) {
  json j = base_config();
  j["graph"] = {{"kind", "explicit"}, {"n", 3},
                {"edges", json::array({{1, 2}, {2, 3}})}};
  j["objective"]["n"] = 3;
  j["attack"]["adversaries"] = {1};
  const ExperimentConfig cfg = parse_experiment_config(j);
  ASSERT_EQ(cfg.graph.edges.size(), 2u);
  EXPECT_EQ(cfg.graph.edges[0], (std::pair<int, int>{0, 1}));  // 0-based internally

  j["graph"]["edges"] = json::array({{1, 1}});
  EXPECT_THROW(parse_experiment_config(j), ConfigError);  // self-loop
  j["graph"]["edges"] = json::array({{0, 1}});
  EXPECT_THROW(parse_experiment_config(j), ConfigError);  // 1-based indexing
  j["graph"]["edges"] = json::array({{1, 2, 3}});
  EXPECT_THROW(parse_experiment_config(j), ConfigError);  // not a pair
}

TEST(Config, ExplicitObjectiveBlock) {
  json j = base_config();
  j["graph"]["n"] = 2;
  j["attack"]["adversaries"] = {1};
  j["objective"] = {{"kind", "explicit"},
                    {"locals", json::array({
                                   {{"A", {{2.0}}}, {"b", {1.0}}},
                                   {{"A", {{4.0}}}, {"b", {-1.0}}},
                               })}};
  const ExperimentConfig cfg = parse_experiment_config(j);
  EXPECT_EQ(cfg.objective.kind, ObjectiveConfig::Kind::explicit_locals);
  EXPECT_EQ(cfg.objective.n, 2);
  EXPECT_EQ(cfg.objective.p, 1);
  EXPECT_DOUBLE_EQ(cfg.objective.locals[1].A(0, 0), 4.0);

  json mismatch = j;
  mismatch["graph"]["n"] = 3;
  EXPECT_THROW(parse_experiment_config(mismatch), ConfigError);  // locals vs graph n

  json ragged = j;
  ragged["objective"]["locals"][0]["A"] = {{1.0, 0.0}};
  EXPECT_THROW(parse_experiment_config(ragged), ConfigError);  // non-square A
}

TEST(Config, ExplicitInitBlock) {
  json j = base_config();
  j["init"] = {{"kind", "explicit"},
               {"values", json::array({{0.1}, {0.2}, {0.3}, {0.4}})}};
  const ExperimentConfig cfg = parse_experiment_config(j);
  EXPECT_EQ(cfg.init.kind, InitSpec::Kind::explicit_values);
  ASSERT_EQ(cfg.init.values.size(), 4u);
  EXPECT_DOUBLE_EQ(cfg.init.values[3](0), 0.4);

  j["init"]["values"] = json::array({{0.1}, {0.2}});  // wrong agent count
  EXPECT_THROW(parse_experiment_config(j), ConfigError);
  j["init"]["values"] = json::array({{0.1, 0.2}, {0.2, 0.3}, {0.3, 0.4}, {0.4, 0.5}});
  EXPECT_THROW(parse_experiment_config(j), ConfigError);  // wrong dimension
}

TEST(Config, LoadFromFileAndDiagnostics) {
  const fs::path dir = fs::temp_directory_path() / "advgd_config_test";
  fs::create_directories(dir);

  const fs::path good = dir / "good.json";
  std::ofstream(good) << base_config().dump(2);
  const ExperimentConfig cfg = load_experiment_config(good);
  EXPECT_EQ(cfg.name, "unit");

  EXPECT_THROW(load_experiment_config(dir / "missing.json"), ConfigError);

  const fs::path broken = dir / "broken.json";
  std::ofstream(broken) << "{ not json";
  try {
    load_experiment_config(broken);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& err) {
    EXPECT_NE(std::string(err.what()).find("broken.json"), std::string::npos);
  }
}

TEST(Config, EchoRoundTrips) {
  // the summary's config echo must itself parse back to the same config
  const ExperimentConfig cfg = parse_experiment_config(base_config());
  const nlohmann::json echo = advgd::config_to_json(cfg);
  const ExperimentConfig again = parse_experiment_config(echo);
  EXPECT_EQ(advgd::config_to_json(again).dump(2), echo.dump(2));
}
