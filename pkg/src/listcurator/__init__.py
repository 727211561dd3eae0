"""Multi-view user recommendation and evaluation toolkit for curating topical
user lists from social-network data."""

from .aggregate import ScorePanel, build_panel, dominant_singular_triple, svd_aggregate
from .corpus import (
    Dataset,
    DatasetError,
    EdgeList,
    ListRecord,
    Tweet,
    UserRecord,
    dataset_stats,
    derive_interaction_edges,
    load_dataset,
    save_dataset,
    validate,
)
from .evaluate import (
    AGGREGATE,
    CohesionEntry,
    CohesionReport,
    CVConfig,
    EvalReport,
    choose_folds,
    cohesion,
    cohesion_report,
    corrected_cohesion,
    cross_validate,
    medal_tables,
    precision_recall,
    spearman,
)
from .expand import expand_candidates
from .recommend import CentroidRecommender, Ranking, centroid, rank
from .synth import PRESETS, SynthConfig, generate, preset
from .text import tokenize
from .views import (
    CONTENT_CRITERIA,
    CRITERIA,
    DEFAULT_CRITERIA,
    NETWORK_CRITERIA,
    FeatureSpace,
    ProfileMatrix,
    ProfileVectorizer,
    build_profile,
    build_view,
    check_criterion,
    cosine,
    tfidf,
)

__version__ = "0.1.0"

__all__ = [
    "AGGREGATE",
    "CONTENT_CRITERIA",
    "CRITERIA",
    "CVConfig",
    "CentroidRecommender",
    "CohesionEntry",
    "CohesionReport",
    "Dataset",
    "DatasetError",
    "DEFAULT_CRITERIA",
    "EdgeList",
    "EvalReport",
    "FeatureSpace",
    "ListRecord",
    "NETWORK_CRITERIA",
    "PRESETS",
    "ProfileMatrix",
    "ProfileVectorizer",
    "Ranking",
    "ScorePanel",
    "SynthConfig",
    "Tweet",
    "UserRecord",
    "build_panel",
    "build_profile",
    "build_view",
    "centroid",
    "check_criterion",
    "choose_folds",
    "cohesion",
    "cohesion_report",
    "corrected_cohesion",
    "cosine",
    "cross_validate",
    "dataset_stats",
    "derive_interaction_edges",
    "dominant_singular_triple",
    "expand_candidates",
    "generate",
    "load_dataset",
    "medal_tables",
    "precision_recall",
    "preset",
    "rank",
    "save_dataset",
    "spearman",
    "svd_aggregate",
    "tfidf",
    "tokenize",
    "validate",
]
