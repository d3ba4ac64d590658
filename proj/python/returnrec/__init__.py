"""Collaborative-graph purification toolkit for sequential recommenders.

The heavy lifting lives in the C++ extension; this package re-exports it.
"""

from returnrec._core import (  # noqa: F401
    Dataset,
    EnsembleConfig,
    Graph,
    Recommender,
    ReferenceRecommender,
    attack_degradation,
    benign_impact,
    borda_vote,
    build_catalog,
    choose_replacement,
    defense_gain,
    ensemble_recommend,
    greedy_attack,
    hit_at_k,
    holdout_last,
    make_random_graph_like,
    ndcg_at_k,
    occurrence_profile,
    pair_score,
    purify_profile,
    random_attack,
    select_targets,
    synth_dataset,
    __version__,
)

__all__ = [
    "Dataset",
    "EnsembleConfig",
    "Graph",
    "Recommender",
    "ReferenceRecommender",
    "attack_degradation",
    "benign_impact",
    "borda_vote",
    "build_catalog",
    "choose_replacement",
    "defense_gain",
    "ensemble_recommend",
    "greedy_attack",
    "hit_at_k",
    "holdout_last",
    "make_random_graph_like",
    "ndcg_at_k",
    "occurrence_profile",
    "pair_score",
    "purify_profile",
    "random_attack",
    "select_targets",
    "synth_dataset",
]
