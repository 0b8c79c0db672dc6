"""Spearman rank correlation and permutation p-values for strict total orders."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import InputError

EXACT_LIMIT = 8
_MC_CHUNK = 20000


def _positions(order):
    pos = {}
    for i, x in enumerate(order):
        if x in pos:
            raise InputError(f"duplicate id {x!r} in ranking")
        pos[x] = i
    return pos


def squared_rank_difference(order_a, order_b) -> int:
    """Sum of squared rank differences between two orders over the same ids."""
    pa, pb = _positions(order_a), _positions(order_b)
    if pa.keys() != pb.keys():
        raise InputError("rankings must cover the same ids")
    if len(pa) < 2:
        raise InputError("spearman correlation needs at least 2 items")
    return sum((pa[x] - pb[x]) ** 2 for x in pa)


def rho_from_d2(d2, n) -> float:
    return 1.0 - 6.0 * d2 / (n * (n * n - 1))


def spearman_rho(order_a, order_b) -> float:
    """Spearman's rho between two strict total orders (best first) over one id set."""
    d2 = squared_rank_difference(order_a, order_b)
    return rho_from_d2(d2, len(order_a))


def _d2_threshold(rho_obs, n) -> float:
    # permutations with rho >= rho_obs are exactly those with d2 <= this
    return (1.0 - rho_obs) * n * (n * n - 1) / 6.0 + 1e-9


@lru_cache(maxsize=None)
def _d2_distribution(n):
    """Sorted d2 values and their counts over all n! permutations."""
    ref = np.arange(n)
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    d2 = ((perms - ref) ** 2).sum(axis=1)
    values, counts = np.unique(d2, return_counts=True)
    return values, counts


def exact_p_value(rho_obs, n) -> Fraction:
    """One-sided exact p = #{perm : rho(perm) >= rho_obs} / n!."""
    if n < 2:
        raise InputError("need n >= 2")
    if n > EXACT_LIMIT:
        raise InputError(f"exact enumeration refused for n={n} > {EXACT_LIMIT}; use Monte Carlo")
    values, counts = _d2_distribution(n)
    hits = int(counts[values <= _d2_threshold(rho_obs, n)].sum())
    return Fraction(hits, math.factorial(n))


@dataclass(frozen=True)
class MonteCarlo:
    samples: int = 100_000
    seed: int = 0


EXACT = "exact"


def permutation_p_value(rho_obs, n, mode=EXACT) -> float:
    """One-sided permutation p-value for an observed Spearman rho.

    ``mode`` is ``"exact"`` (full enumeration, n <= 8) or a :class:`MonteCarlo`
    instance. The Monte Carlo estimate counts the observed ordering once in
    both numerator and denominator, so it is never zero.
    """
    if n < 2:
        raise InputError("need n >= 2")
    if mode == EXACT:
        return float(exact_p_value(rho_obs, n))
    if not isinstance(mode, MonteCarlo):
        raise InputError(f"unknown p-value mode {mode!r}")
    if mode.samples < 1:
        raise InputError("Monte Carlo needs at least one sample")
    rng = np.random.default_rng(mode.seed)
    threshold = _d2_threshold(rho_obs, n)
    ref = np.arange(n)
    hits = 0
    remaining = mode.samples
    while remaining:
        m = min(remaining, _MC_CHUNK)
        perms = rng.permuted(np.tile(ref, (m, 1)), axis=1)
        hits += int((((perms - ref) ** 2).sum(axis=1) <= threshold).sum())
        remaining -= m
    return (hits + 1) / (mode.samples + 1)


def p_value_for(rho_obs, n, mc_samples=100_000, seed=0) -> float:
    """Exact when enumeration is feasible, Monte Carlo otherwise."""
    if n <= EXACT_LIMIT:
        return permutation_p_value(rho_obs, n)
    return permutation_p_value(rho_obs, n, MonteCarlo(mc_samples, seed))
