"""Fitting cost-model parameters to expert rankings.

The objective (mean Spearman rho between model and expert rankings over
solved cases) is piecewise constant in the parameters, so the search is a
derivative-free random-restart greedy coordinate search with step decay.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .distance import CategoryProblem, order_by_cost
from .errors import ConfigError, InputError
from .model import MULTIPLICATIVE, CategoryCosts, CostModel
from .stats import rho_from_d2

log = logging.getLogger(__name__)

INIT_RANGE = (0.1, 2.0)
INIT_DC_RANGE = (-1.0, 2.0)
_CACHE_LIMIT = 256


@dataclass(frozen=True)
class TrainConfig:
    max_iters: int = 2000
    restarts: int = 4
    initial_step: float = 0.5
    step_shrink: float = 0.5
    target_rho: float = 1.0
    rng_seed: int = 0

    def __post_init__(self):
        if int(self.max_iters) != self.max_iters or self.max_iters < 0:
            raise ConfigError("max_iters must be a non-negative integer")
        if int(self.restarts) != self.restarts or self.restarts < 1:
            raise ConfigError("restarts must be a positive integer")
        if not self.initial_step > 0:
            raise ConfigError("initial_step must be positive")
        if not 0.0 < self.step_shrink < 1.0:
            raise ConfigError("step_shrink must lie in (0, 1)")
        if not -1.0 <= self.target_rho <= 1.0:
            raise ConfigError("target_rho must lie in [-1, 1]")


@dataclass
class TrainReport:
    best_model: CostModel
    best_rho: float
    objective_history: list
    per_case_rho: dict
    converged: bool
    iterations: int
    best_restart: int
    restart_rhos: list = field(default_factory=list)

    def metadata(self, config: TrainConfig, case_ids=()) -> dict:
        return {
            "seed": config.rng_seed,
            "iterations": self.iterations,
            "restarts": config.restarts,
            "max_iters": config.max_iters,
            "final_rho": self.best_rho,
            "converged": self.converged,
            "training_cases": list(case_ids),
        }


class Evaluator:
    """Objective evaluation over a fixed set of solved cases.

    Path-length matrices are built once. Costs are cached per category and
    parameter triple, so a move that changes one category reuses the
    totals of every other category.
    """

    def __init__(self, cases, offers, profiles, graph, path_cutoff=4, weight_scheme=MULTIPLICATIVE):
        if not cases:
            raise InputError("no solved cases given")
        offer_map = {o.id: o for o in offers}
        profile_map = {p.id: p for p in profiles}
        self.path_cutoff = path_cutoff
        self.weight_scheme = weight_scheme
        self.case_ids = []
        self.expert_orders = []
        self._slices = []
        self._tiebreak = []
        problems = {}
        start = 0
        for case in cases:
            ids = list(case.expert_ranking)
            if len(ids) < 2:
                raise InputError(f"case {case.offer_id}: needs at least 2 candidates")
            if len(set(ids)) != len(ids):
                raise InputError(f"case {case.offer_id}: duplicate candidates")
            try:
                offer = offer_map[case.offer_id]
                cands = [profile_map[pid] for pid in ids]
            except KeyError as exc:
                raise InputError(f"case {case.offer_id}: unknown id {exc.args[0]!r}") from None
            for prof in cands:
                for cat in set(offer.items) | set(prof.items):
                    problems.setdefault(cat, {})[start] = CategoryProblem(
                        offer.category_items(cat), prof.category_items(cat), graph, path_cutoff
                    )
                start += 1
            self.case_ids.append(case.offer_id)
            self.expert_orders.append(ids)
            n = len(ids)
            self._slices.append(slice(start - n, start))
            # rank of each candidate's id among the case's ids, for id tie-breaks
            self._tiebreak.append(np.argsort(np.argsort(np.array(ids, dtype=object))).astype(np.int64))
        self.n_rows = start
        self.categories = sorted(problems)
        self._problems = {cat: sorted(rows.items()) for cat, rows in problems.items()}
        self._cache = {cat: {} for cat in self.categories}

    def _category_ticks(self, cat, costs: CategoryCosts):
        key = (costs.alpha, costs.ic, costs.dc)
        cache = self._cache[cat]
        hit = cache.get(key)
        if hit is None:
            hit = np.zeros(self.n_rows, dtype=np.int64)
            for row, problem in self._problems[cat]:
                hit[row] = problem.cost_ticks(costs, self.weight_scheme)
            if len(cache) >= _CACHE_LIMIT:
                cache.pop(next(iter(cache)))
            cache[key] = hit
        return hit

    def candidate_ticks(self, model: CostModel):
        if model.path_cutoff != self.path_cutoff or model.weight_scheme != self.weight_scheme:
            raise ConfigError("model cutoff/scheme differ from the evaluator's")
        total = np.zeros(self.n_rows, dtype=np.int64)
        for cat in self.categories:
            total += self._category_ticks(cat, model.costs(cat))
        return total

    def case_rhos(self, model: CostModel) -> np.ndarray:
        total = self.candidate_ticks(model)
        rhos = np.empty(len(self._slices))
        for k, (sl, tie) in enumerate(zip(self._slices, self._tiebreak)):
            ticks = total[sl]
            n = len(ticks)
            predicted = order_by_cost(ticks, tie)
            pred_rank = np.empty(n, dtype=np.int64)
            pred_rank[predicted] = np.arange(n)
            d2 = int(((pred_rank - np.arange(n)) ** 2).sum())
            rhos[k] = rho_from_d2(d2, n)
        return rhos

    def objective(self, model: CostModel) -> float:
        return float(self.case_rhos(model).mean())

    def per_case(self, model: CostModel) -> dict:
        return dict(zip(self.case_ids, (float(r) for r in self.case_rhos(model))))


def objective(model: CostModel, cases, offers, profiles, graph) -> float:
    """Mean Spearman rho between model rankings and expert rankings."""
    ev = Evaluator(cases, offers, profiles, graph, model.path_cutoff, model.weight_scheme)
    return ev.objective(model)


def perturb(model: CostModel, step: float, rng) -> CostModel:
    """Shift one uniformly chosen parameter by +/- step; alpha and ic clamp at 0."""
    if step < 0:
        raise ConfigError("step must be non-negative")
    keys = model.parameter_keys()
    key = keys[int(rng.integers(len(keys)))]
    sign = 1.0 if rng.integers(2) else -1.0
    value = model.get(key) + sign * step
    if key[1] != "dc":
        value = max(value, 0.0)
    return model.replace(key, value)


def random_model(categories, rng, path_cutoff=4, weight_scheme=MULTIPLICATIVE) -> CostModel:
    cats = {}
    for cat in sorted(categories):
        alpha, ic = rng.uniform(*INIT_RANGE, size=2)
        dc = rng.uniform(*INIT_DC_RANGE)
        cats[cat] = CategoryCosts(float(alpha), float(ic), float(dc))
    return CostModel(cats, path_cutoff, weight_scheme)


@dataclass
class _RestartResult:
    index: int
    model: CostModel
    rho: float
    iterations: int
    history: list


def _run_restart(evaluator: Evaluator, config: TrainConfig, index: int) -> _RestartResult:
    rng = np.random.default_rng(config.rng_seed + index)
    current = random_model(evaluator.categories, rng, evaluator.path_cutoff, evaluator.weight_scheme)
    best = evaluator.objective(current)
    history = [(0, best)]
    round_len = 2 * len(current.parameter_keys())
    step = config.initial_step
    rejected = 0
    it = 0
    while it < config.max_iters and best < config.target_rho:
        candidate = perturb(current, step, rng)
        it += 1
        value = evaluator.objective(candidate)
        if value > best:
            current, best = candidate, value
            history.append((it, best))
            rejected = 0
        else:
            rejected += 1
            if rejected >= round_len:
                step *= config.step_shrink
                rejected = 0
    log.debug("restart %d: rho=%.4f after %d iterations", index, best, it)
    return _RestartResult(index, current, best, it, history)


def train(cases, offers, profiles, graph, config: TrainConfig = TrainConfig(),
          path_cutoff=4, weight_scheme=MULTIPLICATIVE, jobs=1, evaluator=None) -> TrainReport:
    """Random-restart greedy search for the cost model that best reproduces expert rankings.

    Each restart ``r`` draws its own generator from ``rng_seed + r``, so the
    result does not depend on ``jobs``.
    """
    if not cases:
        raise InputError("cannot train on an empty case list")
    ev = evaluator or Evaluator(cases, offers, profiles, graph, path_cutoff, weight_scheme)
    indices = range(config.restarts)
    if jobs > 1 and config.restarts > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, config.restarts)) as pool:
            results = list(pool.map(_run_restart, [ev] * config.restarts, [config] * config.restarts, indices))
    else:
        results = [_run_restart(ev, config, r) for r in indices]

    winner = max(results, key=lambda res: (res.rho, -res.index))
    history = []
    offset = 0
    best_so_far = -np.inf
    for res in results:
        for it, rho in res.history:
            if rho > best_so_far:
                best_so_far = rho
                history.append((offset + it, rho))
        offset += res.iterations
    return TrainReport(
        best_model=winner.model,
        best_rho=winner.rho,
        objective_history=history,
        per_case_rho=ev.per_case(winner.model),
        converged=winner.rho >= config.target_rho,
        iterations=offset,
        best_restart=winner.index,
        restart_rhos=[res.rho for res in results],
    )


@dataclass(frozen=True)
class FoldResult:
    fold: int
    train_rho: float
    test_rho: float
    test_case_ids: tuple
    test_case_rho: dict


def cross_validate(cases, offers, profiles, graph, config: TrainConfig, folds: int,
                   path_cutoff=4, weight_scheme=MULTIPLICATIVE, jobs=1) -> list:
    """k-fold evaluation; case ``i`` is held out in fold ``i % k``."""
    if not 2 <= folds <= len(cases):
        raise InputError(f"folds must be in [2, {len(cases)}], got {folds}")
    out = []
    for k in range(folds):
        test = [c for i, c in enumerate(cases) if i % folds == k]
        train_cases = [c for i, c in enumerate(cases) if i % folds != k]
        report = train(train_cases, offers, profiles, graph, config, path_cutoff, weight_scheme, jobs)
        test_ev = Evaluator(test, offers, profiles, graph, path_cutoff, weight_scheme)
        per_case = test_ev.per_case(report.best_model)
        out.append(
            FoldResult(k, report.best_rho, float(np.mean(list(per_case.values()))),
                       tuple(c.offer_id for c in test), per_case)
        )
    return out
