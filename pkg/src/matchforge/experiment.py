"""End-to-end synthetic experiment: generate, train, evaluate on held-out cases."""

from __future__ import annotations

import time
from dataclasses import dataclass

from .bm25 import Bm25Params
from .evaluation import DEFAULT_ALPHA, compare_methods
from .learning import Evaluator, TrainConfig, train
from .synthetic import default_truth_model, generate_synthetic_dataset, load_domain_stats
from .taxonomy import toy_taxonomy

PIPELINE_CONFIG = TrainConfig(max_iters=1500, restarts=4, initial_step=0.5, step_shrink=0.5)


def derive_seeds(seed):
    """Subordinate seeds for the train set, test set and the optimiser."""
    return 2 * seed + 1, 2 * seed + 2, seed


@dataclass
class ExperimentResult:
    train_data: object
    test_data: object
    report: object
    test_rho: float
    comparison: object
    seconds: float


def run_synthetic_experiment(seed=0, n_offers=6, n_candidates=8, stats=None, graph=None,
                             truth_model=None, config=None, bm25_params=Bm25Params(),
                             alpha=DEFAULT_ALPHA, jobs=1, tail_swaps=0) -> ExperimentResult:
    start = time.perf_counter()
    graph = graph or toy_taxonomy()
    graph.precompute()
    stats = stats or load_domain_stats()
    truth_model = truth_model or default_truth_model()
    train_seed, test_seed, opt_seed = derive_seeds(seed)
    config = config or TrainConfig(**{**PIPELINE_CONFIG.__dict__, "rng_seed": opt_seed})
    train_data = generate_synthetic_dataset(stats, graph, truth_model, n_offers, n_candidates,
                                            train_seed, tail_swaps, id_prefix="train-")
    test_data = generate_synthetic_dataset(stats, graph, truth_model, n_offers, n_candidates,
                                           test_seed, tail_swaps, id_prefix="test-")
    report = train(train_data.cases, train_data.offers, train_data.profiles, graph, config,
                   truth_model.path_cutoff, truth_model.weight_scheme, jobs)
    test_ev = Evaluator(test_data.cases, test_data.offers, test_data.profiles, graph,
                        truth_model.path_cutoff, truth_model.weight_scheme)
    test_rho = test_ev.objective(report.best_model)
    comparison = compare_methods(test_data.offers, test_data.profiles, test_data.cases,
                                 report.best_model, graph, bm25_params, alpha,
                                 training_case_ids=[c.offer_id for c in train_data.cases], seed=seed)
    return ExperimentResult(train_data, test_data, report, test_rho, comparison,
                            time.perf_counter() - start)
