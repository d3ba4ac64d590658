#include "returnrec/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "returnrec/positioning.hpp"
#include "returnrec/remote.hpp"
#include "returnrec/synth.hpp"

namespace returnrec {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

std::int64_t ms_since(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() -
                                                               start)
      .count();
}

std::size_t longest_sequence(const InteractionDataset& ds) {
  std::size_t longest = 0;
  for (const auto& seq : ds.sequences)
    longest = std::max(longest, seq.items.size());
  return longest;
}

EnsembleVariant variant_for_defense(const std::string& defense) {
  if (defense == "return") return EnsembleVariant::full;
  if (defense == "return_rop") return EnsembleVariant::rop;
  if (defense == "return_rr") return EnsembleVariant::rr;
  if (defense == "return_no_ens") return EnsembleVariant::no_ens;
  throw ConfigError("defense '" + defense + "' is not an ensemble variant");
}

std::string describe_edits(const PurifiedProfile& prompt) {
  std::string out = "edits:";
  for (const auto& edit : prompt.edits) {
    out += " [pos " + std::to_string(edit.position) +
           (edit.action == EditAction::deleted
                ? " deleted " + std::to_string(edit.original)
                : " replaced " + std::to_string(edit.original) + " with " +
                      std::to_string(edit.replacement)) +
           "]";
  }
  if (prompt.edits.empty()) out += " none";
  return out;
}

struct UserOutcome {
  RecommendationList benign;
  RecommendationList attacked;
  RecommendationList defended;
  RecommendationList defended_benign;
  std::size_t edits_deleted = 0;
  std::size_t edits_replaced = 0;
  json edit_log;  // populated only when log_edits is on
};

}  // namespace

InteractionDataset holdout_truncate(const InteractionDataset& db,
                                    const InteractionDataset& eval_ds) {
  InteractionDataset out = db;
  bool emptied = false;
  for (auto& seq : out.sequences) {
    if (eval_ds.find(seq.user) == nullptr) continue;
    if (seq.items.size() >= 2) {
      seq.items.pop_back();
    } else {
      seq.items.clear();
      emptied = true;
    }
  }
  if (emptied)
    std::erase_if(out.sequences, [](const InteractionSequence& seq) {
      return seq.items.empty();
    });
  return out;
}

InteractionDataset degrade_database(const InteractionDataset& db,
                                    double inject_fraction,
                                    double delete_fraction, int attack_delta,
                                    std::uint32_t n_items,
                                    std::uint64_t seed) {
  InteractionDataset out = db;
  if (inject_fraction > 0) {
    AttackSpec spec;
    spec.delta = attack_delta;
    spec.kind = AttackKind::random;
    spec.seed = derive_seed(seed, stream::db_inject, 1);
    for (auto& seq : out.sequences) {
      Rng gate(derive_seed(seed, stream::db_inject, seq.user));
      if (gate.uniform01() >= inject_fraction) continue;
      seq.items = random_attack(seq.items, spec, n_items, seq.user).items;
    }
  }
  if (delete_fraction > 0) {
    for (auto& seq : out.sequences) {
      std::size_t count = static_cast<std::size_t>(
          std::llround(delete_fraction * static_cast<double>(seq.items.size())));
      // Keep at least one interaction so the sequence stays valid.
      count = std::min(count, seq.items.size() - 1);
      if (count == 0) continue;
      Rng rng(derive_seed(seed, stream::db_delete, seq.user));
      seq.items = baseline_rd(seq.items, count, rng).items;
    }
  }
  return out;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const auto t_total = Clock::now();
  json timings;

  // Load corpora.
  auto t_phase = Clock::now();
  InteractionDataset db = load_interactions(cfg.database);
  db.role = DatasetRole::external_database;
  InteractionDataset eval_ds =
      cfg.eval.empty() ? db : load_interactions(cfg.eval);
  eval_ds.role = DatasetRole::evaluation_set;
  if (db.sequences.empty()) throw ConfigError("database is empty");
  if (eval_ds.sequences.empty()) throw ConfigError("evaluation set is empty");

  const std::uint32_t n_items =
      std::max(build_catalog(db).n_items, build_catalog(eval_ds).n_items);
  HoldoutResult holdout = holdout_last(eval_ds);
  if (holdout.pairs.empty())
    throw std::runtime_error("no evaluable users after holdout");
  timings["load_ms"] = ms_since(t_phase);

  const int max_hop =
      cfg.max_hop > 0
          ? cfg.max_hop
          : static_cast<int>(std::max<std::size_t>(longest_sequence(db), 2) - 1);

  InteractionDataset training = holdout_truncate(db, eval_ds);
  if (training.sequences.empty())
    throw std::runtime_error("database is empty after holdout truncation");

  // Victim/defense data split; database-quality degradation touches only
  // the defense side.
  InteractionDataset victim_src = training;
  InteractionDataset defense_src = training;
  if (cfg.victim_split) {
    if (training.sequences.size() < 2)
      throw ConfigError("victim_split needs at least two database users");
    victim_src.sequences.clear();
    defense_src.sequences.clear();
    for (std::size_t i = 0; i < training.sequences.size(); ++i)
      (i % 2 == 0 ? victim_src : defense_src)
          .sequences.push_back(training.sequences[i]);
  }
  if (cfg.inject_fraction > 0 || cfg.delete_fraction > 0)
    defense_src = degrade_database(defense_src, cfg.inject_fraction,
                                   cfg.delete_fraction, cfg.attack_delta,
                                   n_items, cfg.seed);

  // Defense graph: load from cache when available, otherwise build (and
  // fill the cache when a path is configured).
  t_phase = Clock::now();
  std::string graph_source = "built";
  std::shared_ptr<const MultiHopGraph> defense_graph;
  if (!cfg.graph_cache.empty() && std::filesystem::exists(cfg.graph_cache)) {
    defense_graph = std::make_shared<const MultiHopGraph>(
        MultiHopGraph::load(cfg.graph_cache));
    graph_source = "loaded";
    if (defense_graph->n_items() < n_items)
      throw ConfigError("cached graph covers " +
                        std::to_string(defense_graph->n_items()) +
                        " items but the corpora need " +
                        std::to_string(n_items));
  } else {
    defense_graph = std::make_shared<const MultiHopGraph>(
        MultiHopGraph::build(defense_src, max_hop, n_items));
    if (!cfg.graph_cache.empty()) defense_graph->save(cfg.graph_cache);
  }
  const std::string graph_text = defense_graph->serialize();
  char checksum[32];
  std::snprintf(checksum, sizeof(checksum), "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(graph_text)));
  timings["graph_ms"] = ms_since(t_phase);

  // The ablation graph replaces the real one for every positioning and
  // denoising query, but keeps its shape.
  std::shared_ptr<const MultiHopGraph> purify_graph = defense_graph;
  if (cfg.defense == "return_rop")
    purify_graph = std::make_shared<const MultiHopGraph>(
        make_random_graph_like(*defense_graph, cfg.seed));

  // Victim recommender.
  t_phase = Clock::now();
  const int victim_max_hop =
      cfg.victim_max_hop > 0 ? cfg.victim_max_hop : max_hop;
  std::shared_ptr<const Recommender> victim;
  if (cfg.recommender == "reference") {
    victim = std::make_shared<const ReferenceRecommender>(
        ReferenceRecommender::train(victim_src, victim_max_hop, n_items));
  } else {
    auto remote = std::make_shared<const RemoteRecommender>(
        cfg.endpoint, n_items, cfg.timeout_ms);
    // Honor the handle's declared in-flight limit regardless of workers.
    victim = std::make_shared<const ThrottledRecommender>(
        remote, remote->max_in_flight());
  }
  timings["victim_ms"] = ms_since(t_phase);

  const int kmax = cfg.k_list.back();
  const bool ensemble_defense = cfg.defense.rfind("return", 0) == 0;
  const bool has_defense = cfg.defense != "none";

  AttackSpec attack_spec;
  attack_spec.delta = cfg.attack_delta;
  attack_spec.kind =
      cfg.attack == "greedy" ? AttackKind::greedy : AttackKind::random;
  attack_spec.candidate_budget = cfg.attack_budget;
  attack_spec.seed = cfg.seed;

  EnsembleConfig ecfg;
  ecfg.m = cfg.ensemble_m;
  ecfg.count_mean = cfg.count_mean;
  ecfg.count_spread = cfg.count_spread;
  ecfg.k = kmax;
  ecfg.variant = ensemble_defense ? variant_for_defense(cfg.defense)
                                  : EnsembleVariant::full;
  ecfg.seed = cfg.seed;
  ecfg.vote = cfg.vote == "plurality" ? VoteRule::plurality : VoteRule::borda;
  ecfg.clamp_min = cfg.clamp_min;

  auto defend = [&](UserId user, std::span<const ItemId> items,
                    UserOutcome& outcome,
                    bool record_edits) -> RecommendationList {
    if (ensemble_defense) {
      EnsembleTrace trace;
      RecommendationList list = ensemble_recommend(
          *victim, *purify_graph, items, ecfg, user, &trace);
      for (const auto& prompt : trace.prompts) {
        for (const auto& edit : prompt.edits) {
          if (edit.action == EditAction::deleted)
            ++outcome.edits_deleted;
          else
            ++outcome.edits_replaced;
        }
      }
      if (record_edits) {
        json prompts = json::array();
        for (const auto& prompt : trace.prompts) {
          json edits = json::array();
          for (const auto& edit : prompt.edits) {
            json entry;
            entry["position"] = edit.position;
            entry["action"] =
                edit.action == EditAction::deleted ? "deleted" : "replaced";
            entry["original"] = edit.original;
            if (edit.action == EditAction::replaced)
              entry["replacement"] = edit.replacement;
            edits.push_back(std::move(entry));
          }
          prompts.push_back(std::move(edits));
        }
        outcome.edit_log = std::move(prompts);
      }
      return list;
    }
    const std::size_t count =
        std::min<std::size_t>(static_cast<std::size_t>(cfg.rd_count),
                              items.size());
    Rng rng(derive_seed(cfg.seed, stream::rd, user));
    if (cfg.defense == "rd") {
      PurifiedProfile cleansed = baseline_rd(items, count, rng);
      outcome.edits_deleted += cleansed.edits.size();
      return victim->recommend(user, cleansed.items, kmax);
    }
    // rde
    outcome.edits_deleted += count * static_cast<std::size_t>(cfg.ensemble_m);
    return baseline_rde(*victim, user, items, cfg.ensemble_m, count, rng,
                        kmax, ecfg.vote);
  };

  auto process = [&](const EvaluationPair& pair) -> UserOutcome {
    UserOutcome outcome;
    std::string phase = "benign recommendation";
    try {
      outcome.benign = victim->recommend(pair.user, pair.profile, kmax);

      phase = "attack";
      AttackedProfile attacked;
      if (attack_spec.kind == AttackKind::random)
        attacked = random_attack(pair.profile, attack_spec, n_items, pair.user);
      else
        attacked = greedy_attack(pair.profile, attack_spec, *victim,
                                 pair.target, kmax, n_items, pair.user);

      phase = "attacked recommendation";
      outcome.attacked = victim->recommend(pair.user, attacked.items, kmax);

      if (has_defense) {
        phase = "defense";
        outcome.defended =
            defend(pair.user, attacked.items, outcome, cfg.log_edits);
        if (cfg.benign_impact) {
          phase = "benign-impact defense";
          UserOutcome scratch;
          outcome.defended_benign =
              defend(pair.user, pair.profile, scratch, false);
        }
      }
      return outcome;
    } catch (const EnsembleQueryError& e) {
      throw std::runtime_error("user " + std::to_string(pair.user) +
                               ", phase " + phase + ": " + e.what() + "; " +
                               describe_edits(e.prompt()));
    } catch (const std::exception& e) {
      throw std::runtime_error("user " + std::to_string(pair.user) +
                               ", phase " + phase + ": " + e.what());
    }
  };

  // Worker pool; outcomes land in per-user slots so aggregation order (and
  // therefore the CSV) is independent of scheduling.
  t_phase = Clock::now();
  std::vector<UserOutcome> outcomes(holdout.pairs.size());
  {
    const std::size_t n_workers = std::min<std::size_t>(
        static_cast<std::size_t>(cfg.workers), holdout.pairs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
      while (!failed.load()) {
        const std::size_t i = next.fetch_add(1);
        if (i >= holdout.pairs.size()) break;
        try {
          outcomes[i] = process(holdout.pairs[i]);
        } catch (...) {
          std::lock_guard<std::mutex> guard(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    };
    if (n_workers <= 1) {
      worker();
    } else {
      std::vector<std::thread> threads;
      for (std::size_t w = 0; w < n_workers; ++w)
        threads.emplace_back(worker);
      for (auto& thread : threads) thread.join();
    }
    if (error) std::rethrow_exception(error);
  }
  timings["eval_ms"] = ms_since(t_phase);

  // Aggregate in user order.
  RunResult result;
  result.users_evaluated = holdout.pairs.size();
  result.users_skipped = holdout.skipped;

  const double n_users = static_cast<double>(holdout.pairs.size());
  json debug_ratio;
  for (int k : cfg.k_list) {
    double hit_b = 0, ndcg_b = 0, hit_a = 0, ndcg_a = 0, hit_d = 0, ndcg_d = 0;
    for (std::size_t i = 0; i < holdout.pairs.size(); ++i) {
      const ItemId target = holdout.pairs[i].target;
      hit_b += hit_at_k(outcomes[i].benign, target, k);
      ndcg_b += ndcg_at_k(outcomes[i].benign, target, k);
      hit_a += hit_at_k(outcomes[i].attacked, target, k);
      ndcg_a += ndcg_at_k(outcomes[i].attacked, target, k);
      if (has_defense) {
        hit_d += hit_at_k(outcomes[i].defended, target, k);
        ndcg_d += ndcg_at_k(outcomes[i].defended, target, k);
      }
    }
    hit_b /= n_users;
    ndcg_b /= n_users;
    hit_a /= n_users;
    ndcg_a /= n_users;

    ReportRow benign_row{"benign", "none", k, hit_b, ndcg_b,
                         std::nullopt, std::nullopt, std::nullopt,
                         std::nullopt};
    result.rows.push_back(benign_row);

    const std::optional<double> a_hit = attack_degradation(hit_b, hit_a);
    const std::optional<double> a_ndcg = attack_degradation(ndcg_b, ndcg_a);
    ReportRow attacked_row{"attacked", "none", k, hit_a, ndcg_a,
                           a_hit, a_ndcg, std::nullopt, std::nullopt};
    if (a_hit) attacked_row.d_hit = 0.0;
    if (a_ndcg) attacked_row.d_ndcg = 0.0;
    result.rows.push_back(attacked_row);

    if (has_defense) {
      hit_d /= n_users;
      ndcg_d /= n_users;
      const std::optional<double> ad_hit = attack_degradation(hit_b, hit_d);
      const std::optional<double> ad_ndcg = attack_degradation(ndcg_b, ndcg_d);
      ReportRow defended_row{"defended", cfg.defense, k, hit_d, ndcg_d,
                             ad_hit, ad_ndcg, std::nullopt, std::nullopt};
      if (a_hit && ad_hit && *a_hit != 0.0) {
        defended_row.d_hit = defense_gain(*a_hit, *ad_hit);
        debug_ratio["hit@" + std::to_string(k)] = *ad_hit / *a_hit - 1.0;
      }
      if (a_ndcg && ad_ndcg && *a_ndcg != 0.0) {
        defended_row.d_ndcg = defense_gain(*a_ndcg, *ad_ndcg);
        debug_ratio["ndcg@" + std::to_string(k)] = *ad_ndcg / *a_ndcg - 1.0;
      }
      result.rows.push_back(defended_row);
    }

    if (k == cfg.k_list.front()) result.attack_effective = hit_a < hit_b;
  }
  result.csv = format_report_csv(result.rows);

  // Manifest.
  json manifest;
  manifest["command"] = "run";
  manifest["config"] = config_to_kv(cfg);
  manifest["versions"] = {{"returnrec", "0.1.0"},
                          {"graph_format", "v1"},
                          {"report_format", "v1"}};
  manifest["graph"] = {{"n_items", defense_graph->n_items()},
                       {"max_hop", defense_graph->max_hop()},
                       {"checksum", checksum},
                       {"source", graph_source}};
  manifest["counts"] = {{"database_users", db.sequences.size()},
                        {"eval_users", holdout.pairs.size()},
                        {"skipped_users", holdout.skipped}};
  manifest["attack_effective"] = result.attack_effective;
  json warnings = json::array();
  if (holdout.skipped > 0)
    warnings.push_back(std::to_string(holdout.skipped) +
                       " users skipped (single interaction)");
  if (!result.attack_effective)
    warnings.push_back(
        "attack did not reduce the hit ratio; defense results are vacuous");

  if (has_defense) {
    std::size_t total_deleted = 0, total_replaced = 0;
    for (const auto& outcome : outcomes) {
      total_deleted += outcome.edits_deleted;
      total_replaced += outcome.edits_replaced;
    }
    manifest["edits"] = {{"deleted", total_deleted},
                         {"replaced", total_replaced}};
    if (!debug_ratio.empty())
      manifest["debug"] = {{"defense_gain_raw_ratio", debug_ratio}};
    if (cfg.log_edits) {
      json log = json::object();
      for (std::size_t i = 0; i < holdout.pairs.size(); ++i)
        log[std::to_string(holdout.pairs[i].user)] = outcomes[i].edit_log;
      manifest["edit_log"] = std::move(log);
    }
  }

  if (cfg.benign_impact && has_defense) {
    std::vector<RecommendationList> benign_lists, defended_lists;
    benign_lists.reserve(outcomes.size());
    defended_lists.reserve(outcomes.size());
    for (const auto& outcome : outcomes) {
      benign_lists.push_back(outcome.benign);
      defended_lists.push_back(outcome.defended_benign);
    }
    const BenignImpact impact = benign_impact(benign_lists, defended_lists);
    manifest["benign_impact"] = {{"jaccard", impact.jaccard},
                                 {"common_ratio", impact.common_ratio},
                                 {"entropy_benign", impact.entropy_first},
                                 {"entropy_defended", impact.entropy_second}};
  }

  manifest["warnings"] = std::move(warnings);
  timings["total_ms"] = ms_since(t_total);
  manifest["timings_ms"] = std::move(timings);
  result.manifest_json = manifest.dump(2) + "\n";
  return result;
}

}  // namespace returnrec
