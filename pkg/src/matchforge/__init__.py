"""Learned transformation-cost matching of job offers and applicant profiles."""

__version__ = "0.1.0"

from .bm25 import Bm25Params, bm25_score, build_index, rank_bm25, tokenize
from .dataset import Dataset, validate_dataset
from .distance import brute_force_distance, category_distance, unit_edit_distance
from .errors import (
    ConceptLookupError,
    ConfigError,
    GenerationError,
    InputError,
    MatchforgeError,
    OracleRefusal,
    ParseError,
)
from .evaluation import ComparisonReport, compare_methods
from .learning import TrainConfig, TrainReport, cross_validate, objective, perturb, train
from .model import (
    ApplicantProfile,
    CategoryCosts,
    CostModel,
    EditScript,
    Item,
    JobOffer,
    Ranking,
    SolvedCase,
)
from .scoring import explain, rank_candidates, transformation_cost
from .stats import MonteCarlo, permutation_p_value, spearman_rho
from .synthetic import DomainStats, generate_synthetic_dataset, load_domain_stats
from .taxonomy import (
    NOT_SUBSTITUTABLE,
    UNREACHABLE,
    Substitutable,
    TaxonomyGraph,
    load_taxonomy,
    replacement_cost,
    shortest_path_len,
    toy_taxonomy,
)

__all__ = [
    "__version__",
    "Bm25Params",
    "bm25_score",
    "build_index",
    "rank_bm25",
    "tokenize",
    "Dataset",
    "validate_dataset",
    "brute_force_distance",
    "category_distance",
    "unit_edit_distance",
    "ConceptLookupError",
    "ConfigError",
    "GenerationError",
    "InputError",
    "MatchforgeError",
    "OracleRefusal",
    "ParseError",
    "ComparisonReport",
    "compare_methods",
    "TrainConfig",
    "TrainReport",
    "cross_validate",
    "objective",
    "perturb",
    "train",
    "ApplicantProfile",
    "CategoryCosts",
    "CostModel",
    "EditScript",
    "Item",
    "JobOffer",
    "Ranking",
    "SolvedCase",
    "explain",
    "rank_candidates",
    "transformation_cost",
    "MonteCarlo",
    "permutation_p_value",
    "spearman_rho",
    "DomainStats",
    "generate_synthetic_dataset",
    "load_domain_stats",
    "NOT_SUBSTITUTABLE",
    "UNREACHABLE",
    "Substitutable",
    "TaxonomyGraph",
    "load_taxonomy",
    "replacement_cost",
    "shortest_path_len",
    "toy_taxonomy",
]
