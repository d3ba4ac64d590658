#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "returnrec/attack.hpp"
#include "returnrec/dataset.hpp"
#include "returnrec/denoising.hpp"
#include "returnrec/ensemble.hpp"
#include "returnrec/eval.hpp"
#include "returnrec/graph.hpp"
#include "returnrec/positioning.hpp"
#include "returnrec/recsys.hpp"
#include "returnrec/rng.hpp"
#include "returnrec/synth.hpp"

namespace py = pybind11;
using namespace returnrec;

namespace {

InteractionDataset dataset_from_dict(
    const std::map<UserId, std::vector<ItemId>>& sequences) {
  InteractionDataset ds;
  for (const auto& [user, items] : sequences) {
    if (items.empty())
      throw std::invalid_argument("sequences must not be empty");
    ds.sequences.push_back({user, items});
  }
  return ds;
}

py::list edits_to_py(const std::vector<ProfileEdit>& edits) {
  py::list out;
  for (const auto& edit : edits) {
    py::dict entry;
    entry["position"] = edit.position;
    entry["action"] =
        edit.action == EditAction::deleted ? "deleted" : "replaced";
    entry["original"] = edit.original;
    if (edit.action == EditAction::replaced)
      entry["replacement"] = edit.replacement;
    out.append(entry);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Collaborative-graph purification toolkit for sequential recommenders";

  py::class_<InteractionDataset>(m, "Dataset")
      .def(py::init(&dataset_from_dict), py::arg("sequences"),
           "Build a dataset from {user_id: [item_id, ...]}")
      .def_static("parse", &parse_interactions, py::arg("text"))
      .def_static(
          "load",
          [](const std::string& path) { return load_interactions(path); },
          py::arg("path"))
      .def("save",
           [](const InteractionDataset& ds, const std::string& path) {
             save_interactions(ds, path);
           },
           py::arg("path"))
      .def("format", &format_interactions)
      .def("users",
           [](const InteractionDataset& ds) {
             std::vector<UserId> users;
             for (const auto& seq : ds.sequences) users.push_back(seq.user);
             return users;
           })
      .def("items",
           [](const InteractionDataset& ds, UserId user) {
             const auto* seq = ds.find(user);
             if (!seq) throw py::key_error("unknown user");
             return seq->items;
           },
           py::arg("user"))
      .def("__len__",
           [](const InteractionDataset& ds) { return ds.sequences.size(); })
      .def("__eq__", [](const InteractionDataset& a,
                        const InteractionDataset& b) { return a == b; });

  m.def(
      "build_catalog",
      [](const InteractionDataset& ds) { return build_catalog(ds).n_items; },
      py::arg("dataset"), "Catalog size: max item id + 1");

  m.def(
      "holdout_last",
      [](const InteractionDataset& ds) {
        const HoldoutResult result = holdout_last(ds);
        py::list pairs;
        for (const auto& pair : result.pairs)
          pairs.append(py::make_tuple(pair.user, pair.profile, pair.target));
        return py::make_tuple(pairs, result.skipped);
      },
      py::arg("dataset"),
      "Leave-one-out split: ([(user, profile, target), ...], skipped)");

  py::class_<MultiHopGraph>(m, "Graph")
      .def_static("build", &MultiHopGraph::build, py::arg("dataset"),
                  py::arg("max_hop"), py::arg("n_items") = 0)
      .def_static(
          "load",
          [](const std::string& path) { return MultiHopGraph::load(path); },
          py::arg("path"))
      .def("save",
           [](const MultiHopGraph& g, const std::string& path) {
             g.save(path);
           },
           py::arg("path"))
      .def("serialize", &MultiHopGraph::serialize)
      .def("co_count", &MultiHopGraph::co_count, py::arg("a"), py::arg("b"),
           py::arg("hop"))
      .def("row_sum", &MultiHopGraph::row_sum, py::arg("a"), py::arg("hop"))
      .def_property_readonly("max_hop", &MultiHopGraph::max_hop)
      .def_property_readonly("n_items", &MultiHopGraph::n_items)
      .def("__eq__", [](const MultiHopGraph& a, const MultiHopGraph& b) {
        return a == b;
      });

  m.def(
      "pair_score",
      [](const MultiHopGraph& g, const std::vector<ItemId>& profile,
         std::size_t i, std::size_t j) {
        return pair_score(g, profile, i, j);
      },
      py::arg("graph"), py::arg("profile"), py::arg("i"), py::arg("j"));

  m.def(
      "occurrence_profile",
      [](const MultiHopGraph& g, const std::vector<ItemId>& profile) {
        return occurrence_profile(g, profile);
      },
      py::arg("graph"), py::arg("profile"));

  m.def(
      "select_targets",
      [](const std::vector<double>& occurrence, std::size_t n) {
        return select_targets(occurrence, n);
      },
      py::arg("occurrence"), py::arg("n"));

  m.def(
      "choose_replacement",
      [](const MultiHopGraph& g, const std::vector<ItemId>& profile,
         const std::vector<double>& occurrence, std::size_t target,
         std::optional<std::vector<std::size_t>> targets)
          -> std::optional<ItemId> {
        std::vector<std::size_t> scope =
            targets.value_or(std::vector<std::size_t>{target});
        return choose_replacement(g, profile, occurrence, target, scope);
      },
      py::arg("graph"), py::arg("profile"), py::arg("occurrence"),
      py::arg("target"), py::arg("targets") = std::nullopt);

  m.def(
      "purify_profile",
      [](const MultiHopGraph& g, const std::vector<ItemId>& profile,
         const std::vector<double>& occurrence, std::size_t n,
         bool delete_only) {
        const PurifiedProfile out = purify_profile(
            g, profile, occurrence, n,
            delete_only ? PurifyVariant::delete_only : PurifyVariant::full);
        return py::make_tuple(out.items, edits_to_py(out.edits));
      },
      py::arg("graph"), py::arg("profile"), py::arg("occurrence"),
      py::arg("n"), py::arg("delete_only") = false,
      "Purify a profile; returns (items, edits)");

  py::class_<Recommender, std::shared_ptr<Recommender>>(m, "Recommender");

  py::class_<ReferenceRecommender, Recommender,
             std::shared_ptr<ReferenceRecommender>>(m, "ReferenceRecommender")
      .def_static("train", &ReferenceRecommender::train, py::arg("dataset"),
                  py::arg("max_hop"), py::arg("n_items") = 0)
      .def(
          "recommend",
          [](const ReferenceRecommender& rec, UserId user,
             const std::vector<ItemId>& profile, int k) {
            return rec.recommend(user, profile, k);
          },
          py::arg("user"), py::arg("profile"), py::arg("k"));

  py::class_<EnsembleConfig>(m, "EnsembleConfig")
      .def(py::init([](int m_, double count_mean, double count_spread, int k,
                       const std::string& variant, std::uint64_t seed,
                       const std::string& vote, int clamp_min) {
             EnsembleConfig cfg;
             cfg.m = m_;
             cfg.count_mean = count_mean;
             cfg.count_spread = count_spread;
             cfg.k = k;
             if (variant == "return") cfg.variant = EnsembleVariant::full;
             else if (variant == "rop") cfg.variant = EnsembleVariant::rop;
             else if (variant == "rr") cfg.variant = EnsembleVariant::rr;
             else if (variant == "no_ens") cfg.variant = EnsembleVariant::no_ens;
             else throw std::invalid_argument("unknown variant " + variant);
             cfg.seed = seed;
             if (vote == "borda") cfg.vote = VoteRule::borda;
             else if (vote == "plurality") cfg.vote = VoteRule::plurality;
             else throw std::invalid_argument("unknown vote rule " + vote);
             cfg.clamp_min = clamp_min;
             return cfg;
           }),
           py::arg("m") = 10, py::arg("count_mean") = 3.5,
           py::arg("count_spread") = 0.5, py::arg("k") = 10,
           py::arg("variant") = "return", py::arg("seed") = 0,
           py::arg("vote") = "borda", py::arg("clamp_min") = 1)
      .def_readwrite("m", &EnsembleConfig::m)
      .def_readwrite("count_mean", &EnsembleConfig::count_mean)
      .def_readwrite("count_spread", &EnsembleConfig::count_spread)
      .def_readwrite("k", &EnsembleConfig::k)
      .def_readwrite("seed", &EnsembleConfig::seed)
      .def_readwrite("clamp_min", &EnsembleConfig::clamp_min);

  m.def(
      "ensemble_recommend",
      [](const Recommender& rec, const MultiHopGraph& g,
         const std::vector<ItemId>& profile, const EnsembleConfig& cfg,
         UserId user) {
        return ensemble_recommend(rec, g, profile, cfg, user);
      },
      py::arg("recommender"), py::arg("graph"), py::arg("profile"),
      py::arg("config"), py::arg("user"));

  m.def(
      "borda_vote",
      [](const std::vector<RecommendationList>& lists, int k) {
        return borda_vote(lists, k);
      },
      py::arg("lists"), py::arg("k"));

  m.def("make_random_graph_like", &make_random_graph_like, py::arg("graph"),
        py::arg("seed"));

  m.def(
      "random_attack",
      [](const std::vector<ItemId>& profile, int delta, std::uint64_t seed,
         std::uint32_t n_items, UserId user) {
        AttackSpec spec;
        spec.delta = delta;
        spec.seed = seed;
        const AttackedProfile out = random_attack(profile, spec, n_items, user);
        return py::make_tuple(out.items, out.inserted_positions);
      },
      py::arg("profile"), py::arg("delta"), py::arg("seed"),
      py::arg("n_items"), py::arg("user") = 0);

  m.def(
      "greedy_attack",
      [](const std::vector<ItemId>& profile, int delta, int budget,
         std::uint64_t seed, const Recommender& victim, ItemId target, int k,
         std::uint32_t n_items, UserId user) {
        AttackSpec spec;
        spec.delta = delta;
        spec.kind = AttackKind::greedy;
        spec.candidate_budget = budget;
        spec.seed = seed;
        const AttackedProfile out =
            greedy_attack(profile, spec, victim, target, k, n_items, user);
        return py::make_tuple(out.items, out.inserted_positions);
      },
      py::arg("profile"), py::arg("delta"), py::arg("budget"), py::arg("seed"),
      py::arg("victim"), py::arg("target"), py::arg("k"), py::arg("n_items"),
      py::arg("user") = 0);

  m.def(
      "hit_at_k",
      [](const std::vector<ItemId>& list, ItemId target, int k) {
        return hit_at_k(list, target, k);
      },
      py::arg("list"), py::arg("target"), py::arg("k"));
  m.def(
      "ndcg_at_k",
      [](const std::vector<ItemId>& list, ItemId target, int k) {
        return ndcg_at_k(list, target, k);
      },
      py::arg("list"), py::arg("target"), py::arg("k"));
  m.def("attack_degradation", &attack_degradation, py::arg("benign"),
        py::arg("attacked"));
  m.def("defense_gain", &defense_gain, py::arg("undefended"),
        py::arg("defended"));

  m.def(
      "benign_impact",
      [](const std::vector<RecommendationList>& first,
         const std::vector<RecommendationList>& second) {
        const BenignImpact impact = benign_impact(first, second);
        py::dict out;
        out["jaccard"] = impact.jaccard;
        out["common_ratio"] = impact.common_ratio;
        out["entropy_first"] = impact.entropy_first;
        out["entropy_second"] = impact.entropy_second;
        return out;
      },
      py::arg("first"), py::arg("second"));

  m.def(
      "synth_dataset",
      [](std::size_t n_users, std::size_t n_items, std::size_t n_clusters,
         std::size_t len_min, std::size_t len_max, double noise,
         std::uint64_t seed) {
        SynthParams params;
        params.n_users = n_users;
        params.n_items = n_items;
        params.n_clusters = n_clusters;
        params.len_min = len_min;
        params.len_max = len_max;
        params.cross_cluster_noise = noise;
        params.seed = seed;
        return synth_dataset(params);
      },
      py::arg("n_users") = 500, py::arg("n_items") = 200,
      py::arg("n_clusters") = 4, py::arg("len_min") = 6,
      py::arg("len_max") = 12, py::arg("noise") = 0.1, py::arg("seed") = 0);

  m.attr("__version__") = "0.1.0";
}
