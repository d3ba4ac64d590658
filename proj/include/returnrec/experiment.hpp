#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "returnrec/attack.hpp"
#include "returnrec/ensemble.hpp"
#include "returnrec/eval.hpp"

namespace returnrec {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat experiment configuration. Every key exists in the config file format
// (key = value lines, '#' comments) and as a CLI flag; precedence is
// flags > file > defaults.
struct ExperimentConfig {
  std::string database;     // interaction log used as the external database
  std::string eval;         // evaluation log; empty means "use database"
  std::string graph_cache;  // optional graph file to load from / save to
  std::string report = "report.csv";
  std::string manifest;     // empty means "<report>.manifest.json"

  std::uint64_t seed = 42;
  int workers = 1;
  std::vector<int> k_list = {5, 10};

  std::string recommender = "reference";  // reference | remote
  std::string endpoint;                   // remote base URL
  int timeout_ms = 5000;
  bool victim_split = false;  // train victim and defense on disjoint halves

  std::string attack = "random";  // random | greedy
  int attack_delta = 3;
  int attack_budget = 32;

  // none | return | return_rop | return_rr | return_no_ens | rd | rde
  std::string defense = "none";
  int ensemble_m = 10;
  double count_mean = 3.5;
  double count_spread = 0.5;
  std::string vote = "borda";  // borda | plurality
  int clamp_min = 1;
  int rd_count = 3;

  int max_hop = 0;         // 0 = longest database sequence - 1
  int victim_max_hop = 0;  // reference victim's hop window; 0 = max_hop

  // External-database quality degradation, applied before graph building.
  double inject_fraction = 0;  // fraction of database users perturbed
  double delete_fraction = 0;  // fraction of each sequence deleted

  bool benign_impact = false;  // also purify benign profiles and report
  bool log_edits = false;      // dump per-user edit logs into the manifest
};

// Key-by-key assignment used by the file loader, the manifest loader and
// the CLI flag layer. Unknown keys and unparsable values raise ConfigError.
void apply_config_kv(ExperimentConfig& cfg, const std::string& key,
                     const std::string& value);
std::map<std::string, std::string> config_to_kv(const ExperimentConfig& cfg);

std::map<std::string, std::string> parse_config_text(std::string_view text);
ExperimentConfig load_config_file(const std::string& path);

// Reads the resolved config back out of a run manifest.
ExperimentConfig config_from_manifest(const std::string& path);

void validate_config(const ExperimentConfig& cfg);

struct RunResult {
  std::vector<ReportRow> rows;
  std::string csv;
  std::string manifest_json;
  bool attack_effective = true;
  std::size_t users_evaluated = 0;
  std::size_t users_skipped = 0;
};

// End-to-end protocol: per evaluation user, benign recommendation ->
// attack insertion -> attacked recommendation -> configured defense ->
// aggregated metrics. The defense sees only the attacked profile and the
// collaborative graph, never the attack's inserted positions. Per-user work
// is distributed over cfg.workers threads; output is independent of the
// worker count.
RunResult run_experiment(const ExperimentConfig& cfg);

// Database-quality transforms (seeded, used by run/build-graph).
InteractionDataset degrade_database(const InteractionDataset& db,
                                    double inject_fraction,
                                    double delete_fraction, int attack_delta,
                                    std::uint32_t n_items, std::uint64_t seed);

// Leave-one-out hygiene: truncates the final item of every database row
// whose user appears in the evaluation set, so held-out targets never reach
// the graphs through their own history. Rows reduced to nothing are dropped.
InteractionDataset holdout_truncate(const InteractionDataset& db,
                                    const InteractionDataset& eval_ds);

}  // namespace returnrec
