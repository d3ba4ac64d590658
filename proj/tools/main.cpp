#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "returnrec/attack.hpp"
#include "returnrec/experiment.hpp"
#include "returnrec/remote.hpp"
#include "returnrec/synth.hpp"

namespace {

using returnrec::ConfigError;
using returnrec::ExperimentConfig;
using json = nlohmann::json;

// Config flags collect (key, value) overrides; they are applied after the
// config file / manifest so precedence is flags > file > defaults.
struct Overrides {
  std::vector<std::pair<std::string, std::string>> kvs;
};

std::string flag_name(const std::string& key) {
  std::string name = "--" + key;
  for (char& c : name)
    if (c == '_') c = '-';
  return name;
}

void add_value_flag(CLI::App* cmd, Overrides& overrides, const std::string& key,
                    const std::string& help) {
  cmd->add_option_function<std::string>(
      flag_name(key),
      [&overrides, key](const std::string& value) {
        overrides.kvs.emplace_back(key, value);
      },
      help);
}

void add_bool_flag(CLI::App* cmd, Overrides& overrides, const std::string& key,
                   const std::string& help) {
  cmd->add_flag_callback(
      flag_name(key),
      [&overrides, key] { overrides.kvs.emplace_back(key, "true"); }, help);
}

void add_experiment_flags(CLI::App* cmd, Overrides& overrides) {
  add_value_flag(cmd, overrides, "database", "interaction log used as the external database");
  add_value_flag(cmd, overrides, "eval", "evaluation interaction log (default: the database)");
  add_value_flag(cmd, overrides, "graph_cache", "graph file to load from / save to");
  add_value_flag(cmd, overrides, "report", "output report CSV path");
  add_value_flag(cmd, overrides, "manifest", "output manifest path (default: <report>.manifest.json)");
  add_value_flag(cmd, overrides, "seed", "run seed");
  add_value_flag(cmd, overrides, "workers", "worker thread count");
  add_value_flag(cmd, overrides, "k_list", "comma-separated cutoffs, ascending (default 5,10)");
  add_value_flag(cmd, overrides, "recommender", "reference | remote");
  add_value_flag(cmd, overrides, "endpoint", "remote recommender base URL");
  add_value_flag(cmd, overrides, "timeout_ms", "remote request timeout");
  add_bool_flag(cmd, overrides, "victim_split", "train victim and defense on disjoint database halves");
  add_value_flag(cmd, overrides, "attack", "random | greedy");
  add_value_flag(cmd, overrides, "attack_delta", "number of inserted perturbations");
  add_value_flag(cmd, overrides, "attack_budget", "greedy candidate budget per insertion");
  add_value_flag(cmd, overrides, "defense", "none | return | return_rop | return_rr | return_no_ens | rd | rde");
  add_value_flag(cmd, overrides, "ensemble_m", "number of purified prompts");
  add_value_flag(cmd, overrides, "count_mean", "purification-count mean");
  add_value_flag(cmd, overrides, "count_spread", "purification-count standard deviation");
  add_value_flag(cmd, overrides, "vote", "borda | plurality");
  add_value_flag(cmd, overrides, "clamp_min", "lower clamp for sampled purification counts");
  add_value_flag(cmd, overrides, "rd_count", "deletions per prompt for rd/rde");
  add_value_flag(cmd, overrides, "max_hop", "graph hop cap (0 = longest database sequence - 1)");
  add_value_flag(cmd, overrides, "victim_max_hop", "reference victim hop window (0 = max_hop)");
  add_value_flag(cmd, overrides, "inject_fraction", "fraction of database users perturbed before graph building");
  add_value_flag(cmd, overrides, "delete_fraction", "fraction of each database sequence deleted before graph building");
  add_bool_flag(cmd, overrides, "benign_impact", "also purify benign profiles and report impact diagnostics");
  add_bool_flag(cmd, overrides, "log_edits", "dump per-user edit logs into the manifest");
}

ExperimentConfig resolve_config(const std::string& config_path,
                                const std::string& manifest_path,
                                const Overrides& overrides) {
  if (!config_path.empty() && !manifest_path.empty())
    throw ConfigError("--config and --from-manifest are mutually exclusive");
  ExperimentConfig cfg;
  if (!manifest_path.empty()) cfg = returnrec::config_from_manifest(manifest_path);
  if (!config_path.empty()) cfg = returnrec::load_config_file(config_path);
  for (const auto& [key, value] : overrides.kvs)
    returnrec::apply_config_kv(cfg, key, value);
  return cfg;
}

void write_file(const std::string& path, const std::string& content) {
  if (auto parent = std::filesystem::path(path).parent_path();
      !parent.empty())
    std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string manifest_path_for(const ExperimentConfig& cfg) {
  return cfg.manifest.empty() ? cfg.report + ".manifest.json" : cfg.manifest;
}

int cmd_run(const ExperimentConfig& cfg) {
  returnrec::RunResult result = returnrec::run_experiment(cfg);
  write_file(cfg.report, result.csv);
  write_file(manifest_path_for(cfg), result.manifest_json);
  std::cout << "report: " << cfg.report << "\n"
            << "manifest: " << manifest_path_for(cfg) << "\n"
            << "users evaluated: " << result.users_evaluated
            << " (skipped " << result.users_skipped << ")\n";
  if (!result.attack_effective)
    std::cerr << "warning: attack did not reduce the hit ratio; defense "
                 "results are vacuous\n";
  return 0;
}

int cmd_build_graph(const ExperimentConfig& cfg, const std::string& out_path) {
  if (cfg.database.empty()) throw ConfigError("database path is required");
  if (!std::filesystem::exists(cfg.database))
    throw ConfigError("database file does not exist: " + cfg.database);
  auto db = returnrec::load_interactions(cfg.database);
  if (db.sequences.empty()) throw ConfigError("database is empty");
  std::uint32_t n_items = returnrec::build_catalog(db).n_items;
  std::size_t longest = 0;
  for (const auto& seq : db.sequences)
    longest = std::max(longest, seq.items.size());
  const int max_hop =
      cfg.max_hop > 0 ? cfg.max_hop
                      : static_cast<int>(std::max<std::size_t>(longest, 2) - 1);
  if (!cfg.eval.empty()) {
    if (!std::filesystem::exists(cfg.eval))
      throw ConfigError("eval file does not exist: " + cfg.eval);
    auto eval_ds = returnrec::load_interactions(cfg.eval);
    if (!eval_ds.sequences.empty()) {
      n_items = std::max(n_items, returnrec::build_catalog(eval_ds).n_items);
      // Same leave-one-out hygiene as `run`, so a graph built with the
      // evaluation file declared matches the graph `run` would build.
      db = returnrec::holdout_truncate(db, eval_ds);
      if (db.sequences.empty()) throw ConfigError("database is empty");
    }
  }

  auto source = returnrec::degrade_database(db, cfg.inject_fraction,
                                            cfg.delete_fraction,
                                            cfg.attack_delta, n_items,
                                            cfg.seed);
  auto graph = returnrec::MultiHopGraph::build(source, max_hop, n_items);
  const std::string text = graph.serialize();
  write_file(out_path, text);

  char checksum[32];
  std::snprintf(checksum, sizeof(checksum), "fnv1a64:%016llx",
                static_cast<unsigned long long>(returnrec::fnv1a64(text)));
  json manifest;
  manifest["command"] = "build-graph";
  manifest["config"] = returnrec::config_to_kv(cfg);
  manifest["graph"] = {{"path", out_path},
                       {"n_items", graph.n_items()},
                       {"max_hop", graph.max_hop()},
                       {"checksum", checksum}};
  write_file(out_path + ".manifest.json", manifest.dump(2) + "\n");
  std::cout << "graph: " << out_path << " (" << checksum << ")\n";
  return 0;
}

int cmd_synth(const returnrec::SynthParams& params, const std::string& out) {
  auto ds = returnrec::synth_dataset(params);
  returnrec::save_interactions(ds, out);
  json manifest;
  manifest["command"] = "synth";
  manifest["params"] = {{"n_users", params.n_users},
                        {"n_items", params.n_items},
                        {"n_clusters", params.n_clusters},
                        {"len_min", params.len_min},
                        {"len_max", params.len_max},
                        {"cross_cluster_noise", params.cross_cluster_noise},
                        {"seed", params.seed}};
  write_file(out + ".manifest.json", manifest.dump(2) + "\n");
  std::cout << "dataset: " << out << " (" << ds.sequences.size()
            << " users)\n";
  return 0;
}

int cmd_attack(const ExperimentConfig& cfg, const std::string& out) {
  if (cfg.database.empty()) throw ConfigError("database path is required");
  returnrec::validate_config(cfg);
  auto db = returnrec::load_interactions(cfg.database);
  auto eval_ds = cfg.eval.empty() ? db : returnrec::load_interactions(cfg.eval);
  if (db.sequences.empty() || eval_ds.sequences.empty())
    throw ConfigError("empty dataset");
  const std::uint32_t n_items =
      std::max(returnrec::build_catalog(db).n_items,
               returnrec::build_catalog(eval_ds).n_items);
  auto holdout = returnrec::holdout_last(eval_ds);

  returnrec::AttackSpec spec;
  spec.delta = cfg.attack_delta;
  spec.kind = cfg.attack == "greedy" ? returnrec::AttackKind::greedy
                                     : returnrec::AttackKind::random;
  spec.candidate_budget = cfg.attack_budget;
  spec.seed = cfg.seed;

  std::shared_ptr<const returnrec::Recommender> victim;
  if (spec.kind == returnrec::AttackKind::greedy) {
    std::size_t longest = 0;
    for (const auto& seq : db.sequences)
      longest = std::max(longest, seq.items.size());
    const int max_hop =
        cfg.max_hop > 0
            ? cfg.max_hop
            : static_cast<int>(std::max<std::size_t>(longest, 2) - 1);
    if (cfg.recommender == "remote")
      victim = std::make_shared<const returnrec::RemoteRecommender>(
          cfg.endpoint, n_items, cfg.timeout_ms);
    else
      victim = std::make_shared<const returnrec::ReferenceRecommender>(
          returnrec::ReferenceRecommender::train(db, max_hop, n_items));
  }

  // Emits attacked profiles with the held-out target re-appended, so the
  // output is a valid interaction log: running holdout on it recovers the
  // (attacked profile, target) pairs.
  returnrec::InteractionDataset out_ds;
  for (const auto& pair : holdout.pairs) {
    returnrec::AttackedProfile attacked;
    if (spec.kind == returnrec::AttackKind::random)
      attacked = returnrec::random_attack(pair.profile, spec, n_items, pair.user);
    else
      attacked = returnrec::greedy_attack(pair.profile, spec, *victim,
                                          pair.target, cfg.k_list.back(),
                                          n_items, pair.user);
    returnrec::InteractionSequence seq;
    seq.user = pair.user;
    seq.items = std::move(attacked.items);
    seq.items.push_back(pair.target);
    out_ds.sequences.push_back(std::move(seq));
  }
  returnrec::save_interactions(out_ds, out);

  json manifest;
  manifest["command"] = "attack";
  manifest["config"] = returnrec::config_to_kv(cfg);
  manifest["counts"] = {{"attacked_users", out_ds.sequences.size()},
                        {"skipped_users", holdout.skipped}};
  write_file(out + ".manifest.json", manifest.dump(2) + "\n");
  std::cout << "attacked dataset: " << out << " (" << out_ds.sequences.size()
            << " users)\n";
  return 0;
}

int cmd_report(const std::vector<std::string>& inputs,
               const std::string& out) {
  std::string merged =
      "source,condition,method,k,hit,ndcg,a_hit,a_ndcg,d_hit,d_ndcg\n";
  std::cout << std::left << std::setw(18) << "source" << std::setw(10)
            << "condition" << std::setw(16) << "method" << std::setw(4) << "k"
            << std::setw(10) << "hit" << std::setw(10) << "ndcg"
            << std::setw(10) << "d_hit" << std::setw(10) << "d_ndcg" << "\n";
  for (const auto& path : inputs) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open report " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string source = std::filesystem::path(path).stem().string();
    auto rows = returnrec::parse_report_csv(buf.str());
    std::string body = returnrec::format_report_csv(rows);
    body.erase(0, body.find('\n') + 1);  // drop the per-file header
    std::istringstream lines(body);
    std::string line;
    while (std::getline(lines, line)) merged += source + "," + line + "\n";

    auto cell = [](const std::optional<double>& v) {
      if (!v) return std::string("-");
      char b[32];
      std::snprintf(b, sizeof(b), "%.4f", *v);
      return std::string(b);
    };
    for (const auto& row : rows) {
      std::cout << std::left << std::setw(18) << source << std::setw(10)
                << row.condition << std::setw(16) << row.method << std::setw(4)
                << row.k << std::setw(10) << cell(row.hit) << std::setw(10)
                << cell(row.ndcg) << std::setw(10) << cell(row.d_hit)
                << std::setw(10) << cell(row.d_ndcg) << "\n";
    }
  }
  if (!out.empty()) write_file(out, merged);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Retrieval-augmented purification toolkit for sequential "
               "recommenders: builds item co-occurrence graphs, attacks and "
               "defends interaction profiles, and reports the metrics."};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand(
      "run", "Run the benign/attacked/defended evaluation pipeline");
  std::string run_config, run_manifest;
  Overrides run_overrides;
  run->add_option("--config", run_config, "config file (key = value lines)");
  run->add_option("--from-manifest", run_manifest,
                  "reproduce a previous run from its manifest");
  add_experiment_flags(run, run_overrides);

  // build-graph
  auto* build = app.add_subcommand(
      "build-graph", "Build and save the multi-hop co-occurrence graph");
  std::string build_config, build_out;
  Overrides build_overrides;
  build->add_option("--config", build_config, "config file");
  build->add_option("--out", build_out, "output graph path")->required();
  add_experiment_flags(build, build_overrides);

  // synth
  auto* synth = app.add_subcommand(
      "synth", "Generate a clustered synthetic interaction dataset");
  returnrec::SynthParams params;
  std::string synth_out;
  synth->add_option("--users", params.n_users, "number of users");
  synth->add_option("--items", params.n_items, "number of items");
  synth->add_option("--clusters", params.n_clusters, "number of clusters");
  synth->add_option("--len-min", params.len_min, "minimum sequence length");
  synth->add_option("--len-max", params.len_max, "maximum sequence length");
  synth->add_option("--noise", params.cross_cluster_noise,
                    "cross-cluster item probability");
  synth->add_option("--seed", params.seed, "generator seed");
  synth->add_option("--out", synth_out, "output dataset path")->required();

  // attack
  auto* attack = app.add_subcommand(
      "attack", "Emit an attacked copy of the evaluation dataset");
  std::string attack_config, attack_out;
  Overrides attack_overrides;
  attack->add_option("--config", attack_config, "config file");
  attack->add_option("--out", attack_out, "output dataset path")->required();
  add_experiment_flags(attack, attack_overrides);

  // report
  auto* report = app.add_subcommand(
      "report", "Merge report CSVs into one comparison table");
  std::vector<std::string> report_inputs;
  std::string report_out;
  report->add_option("inputs", report_inputs, "report CSV files")->required();
  report->add_option("--out", report_out, "merged CSV output path");

  try {
    app.parse(argc, argv);
    if (run->parsed())
      return cmd_run(resolve_config(run_config, run_manifest, run_overrides));
    if (build->parsed())
      return cmd_build_graph(resolve_config(build_config, "", build_overrides),
                             build_out);
    if (synth->parsed()) return cmd_synth(params, synth_out);
    if (attack->parsed())
      return cmd_attack(resolve_config(attack_config, "", attack_overrides),
                        attack_out);
    if (report->parsed()) return cmd_report(report_inputs, report_out);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const returnrec::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
