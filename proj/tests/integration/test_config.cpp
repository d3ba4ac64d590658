#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "returnrec/experiment.hpp"

using namespace returnrec;

TEST_CASE("config text parses key = value lines with comments") {
  const auto kv = parse_config_text(
      "# experiment\n"
      "seed = 9\n"
      "defense=return\n"
      "\n"
      "k_list = 5, 10\n");
  CHECK(kv.at("seed") == "9");
  CHECK(kv.at("defense") == "return");
  CHECK(kv.at("k_list") == "5, 10");
  CHECK_THROWS_AS(parse_config_text("just words\n"), ConfigError);
}

TEST_CASE("apply_config_kv covers every key and rejects unknowns") {
  ExperimentConfig cfg;
  for (const auto& [key, value] : config_to_kv(ExperimentConfig{})) {
    if (value.empty()) continue;  // path-like keys default to empty
    CHECK_NOTHROW(apply_config_kv(cfg, key, value));
  }
  CHECK_THROWS_AS(apply_config_kv(cfg, "no_such_key", "1"), ConfigError);
  CHECK_THROWS_AS(apply_config_kv(cfg, "seed", "abc"), ConfigError);
  CHECK_THROWS_AS(apply_config_kv(cfg, "victim_split", "maybe"), ConfigError);
  CHECK_THROWS_AS(apply_config_kv(cfg, "k_list", "5,,10"), ConfigError);
}

TEST_CASE("file values override defaults and are overridden by flags") {
  ExperimentConfig cfg;  // defaults
  CHECK(cfg.seed == 42);
  CHECK(cfg.ensemble_m == 10);
  CHECK(cfg.count_mean == 3.5);
  CHECK(cfg.count_spread == 0.5);
  CHECK(cfg.attack_delta == 3);
  CHECK(cfg.rd_count == 3);
  CHECK(cfg.k_list == std::vector<int>{5, 10});

  // "file" layer
  apply_config_kv(cfg, "seed", "7");
  apply_config_kv(cfg, "defense", "rd");
  // "flag" layer wins by being applied last
  apply_config_kv(cfg, "seed", "8");
  CHECK(cfg.seed == 8);
  CHECK(cfg.defense == "rd");
}

TEST_CASE("validation pins the documented domains") {
  const auto tmp = std::filesystem::temp_directory_path() /
                   "returnrec_cfg_probe.txt";
  std::ofstream(tmp) << "1\t1,2\n";

  ExperimentConfig cfg;
  cfg.database = tmp.string();
  CHECK_NOTHROW(validate_config(cfg));

  SUBCASE("missing database") {
    cfg.database = "/no/such/file";
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  }
  SUBCASE("k_list must ascend") {
    cfg.k_list = {10, 5};
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  }
  SUBCASE("k_list must not be empty") {
    cfg.k_list = {};
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  }
  SUBCASE("unknown defense") {
    cfg.defense = "magic";
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  }
  SUBCASE("remote needs an endpoint") {
    cfg.recommender = "remote";
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  }
  SUBCASE("fractions bounded") {
    cfg.inject_fraction = 1.5;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  }
  SUBCASE("benign impact needs a defense") {
    cfg.benign_impact = true;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  }
  std::filesystem::remove(tmp);
}
