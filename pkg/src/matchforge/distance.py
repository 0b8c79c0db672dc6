"""Minimum-cost transformation between a profile's and an offer's item sets.

Item order carries no meaning, so the distance is an assignment problem:
each offer item is either matched/substituted by one profile item or
inserted, and each leftover profile item is deleted. The padded square
cost matrix is::

                 profile items        insertion slots
    offer items  [ substitution    |  diag(insert)  ]
    del. slots   [ diag(delete)    |  0             ]

Operation costs are quantised to integer multiples of ``TICK`` (2**-30)
before any summation. Every route below (scipy's solver, the exact
integer Hungarian used for edit scripts, and the brute-force oracle) then
works on identical integers, so their totals agree bit for bit.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ConfigError, OracleRefusal
from .model import (
    ADDITIVE,
    DELETE,
    INSERT,
    MATCH,
    SUBSTITUTE,
    CategoryCosts,
    CostModel,
    EditOp,
    EditScript,
)
from .taxonomy import TaxonomyGraph, substitution_path

TICK_BITS = 30
TICK = 2.0 ** -TICK_BITS
_SCALE = 2.0 ** TICK_BITS
# keeps any padded-matrix total below 2**53 so float64 solvers stay exact
MAX_OP_TICKS = 2 ** 46
BRUTE_FORCE_LIMIT = 6


def to_ticks(x: float) -> int:
    t = round(x * _SCALE)
    if abs(t) > MAX_OP_TICKS:
        raise ConfigError(f"operation cost {x!r} exceeds the supported magnitude")
    return t


def from_ticks(t: int) -> float:
    return t * TICK


# Costs closer than this are treated as tied when ranking. The relative part
# absorbs float noise in the parameters; the absolute floor absorbs per-op
# rounding to the tick grid, which does not scale with the costs.
TIE_RTOL = 1e-6
TIE_ATOL_TICKS = 64


def order_by_cost(ticks, tiebreak) -> np.ndarray:
    """Indices sorting ``ticks`` ascending, with near-equal runs ordered by ``tiebreak``.

    Consecutive sorted values within tolerance chain into one tie group.
    """
    ticks = np.asarray(ticks, dtype=np.int64)
    tiebreak = np.asarray(tiebreak)
    first = np.lexsort((tiebreak, ticks))
    if len(ticks) < 2:
        return first
    tol = max(TIE_RTOL * float(np.abs(ticks).max()), TIE_ATOL_TICKS)
    group = np.concatenate(([0], np.cumsum(np.diff(ticks[first]) > tol)))
    return first[np.lexsort((tiebreak[first], group))]


def insert_cost(costs: CategoryCosts, weight: float, scheme: str) -> float:
    if scheme == ADDITIVE:
        return (costs.ic + weight) - 1.0
    return costs.ic * weight


def substitute_cost(costs: CategoryCosts, path_length: int, weight: float, scheme: str) -> float:
    if path_length == 0:
        return 0.0
    base = costs.alpha * path_length
    if scheme == ADDITIVE:
        return (base + weight) - 1.0
    return base * weight


def unit_edit_distance(seq_a, seq_b) -> int:
    """Classic unit-cost edit distance between two sequences."""
    a, b = list(seq_a), list(seq_b)
    prev = list(range(len(b) + 1))
    for i in range(1, len(a) + 1):
        cur = [i] + [0] * len(b)
        for j in range(1, len(b) + 1):
            cur[j] = min(
                prev[j] + 1,
                cur[j - 1] + 1,
                prev[j - 1] + (a[i - 1] != b[j - 1]),
            )
        prev = cur
    return prev[-1]


def _sorted_items(items):
    return sorted(items, key=lambda it: (it.concept, it.weight))


class CategoryProblem:
    """Model-independent part of one (offer, profile, category) instance.

    Path lengths depend only on the taxonomy and the path cutoff, so they
    are computed once and reused for every candidate cost model.
    """

    __slots__ = ("offer_concepts", "weights", "profile_concepts", "paths", "cutoff")

    def __init__(self, offer_items, profile_items, graph: TaxonomyGraph, cutoff: int):
        offer = _sorted_items(offer_items)
        profile = _sorted_items(profile_items)
        self.offer_concepts = [it.concept for it in offer]
        self.weights = np.array([it.weight for it in offer], dtype=float)
        self.profile_concepts = [it.concept for it in profile]
        self.cutoff = cutoff
        paths = np.full((len(offer), len(profile)), -1, dtype=np.int64)
        for i, a in enumerate(self.offer_concepts):
            for j, b in enumerate(self.profile_concepts):
                d = substitution_path(graph, a, b, cutoff)
                if d is not None:
                    paths[i, j] = d
        self.paths = paths

    @property
    def shape(self):
        return len(self.offer_concepts), len(self.profile_concepts)

    def _tick_array(self, x):
        t = np.rint(np.asarray(x, dtype=float) * _SCALE)
        if t.size and np.abs(t).max() > MAX_OP_TICKS:
            raise ConfigError("operation cost exceeds the supported magnitude")
        return t

    def insert_ticks(self, costs, scheme):
        if scheme == ADDITIVE:
            return self._tick_array((costs.ic + self.weights) - 1.0)
        return self._tick_array(costs.ic * self.weights)

    def substitute_ticks(self, costs, scheme):
        """Tick matrix for offer/profile pairs; ``inf`` where not substitutable."""
        base = costs.alpha * self.paths
        w = self.weights[:, None]
        raw = (base + w) - 1.0 if scheme == ADDITIVE else base * w
        raw = np.where(self.paths == 0, 0.0, raw)
        ticks = self._tick_array(raw)
        return np.where(self.paths < 0, np.inf, ticks)

    def cost_ticks(self, costs: CategoryCosts, scheme: str) -> int:
        """Optimal total in ticks, via scipy's rectangular assignment solver."""
        n, p = self.shape
        dc = to_ticks(costs.dc)
        if n == 0:
            return p * dc
        ins = self.insert_ticks(costs, scheme)
        if p == 0:
            return int(ins.sum())
        size = n + p
        mat = np.full((size, size), np.inf)
        mat[:n, :p] = self.substitute_ticks(costs, scheme)
        mat[np.arange(n), p + np.arange(n)] = ins
        mat[n + np.arange(p), np.arange(p)] = dc
        mat[n:, p:] = 0.0
        rows, cols = linear_sum_assignment(mat)
        return int(mat[rows, cols].sum())


def _hungarian(a):
    """Exact min-cost perfect assignment on a square matrix of Python ints.

    Shortest-augmenting-path formulation with row/column potentials;
    returns the column assigned to each row.
    """
    n = len(a)
    inf = float("inf")
    u = [0] * (n + 1)
    v = [0] * (n + 1)
    p = [0] * (n + 1)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            row = a[i0 - 1]
            delta = inf
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = row[j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    assignment = [0] * n
    for j in range(1, n + 1):
        if p[j]:
            assignment[p[j] - 1] = j - 1
    return assignment


def _scripted_assignment(problem: CategoryProblem, costs: CategoryCosts, scheme: str):
    """Optimal assignment with the documented tie-break among equal-cost scripts.

    Ties prefer more matches, then more substitutions, then the
    lexicographically smallest assignment over concept-sorted items. All
    four criteria are folded into one integer key per cell.
    """
    n, p = problem.shape
    size = n + p
    ins = problem.insert_ticks(costs, scheme)
    sub = problem.substitute_ticks(costs, scheme) if n and p else np.empty((n, p))
    dc = to_ticks(costs.dc)

    lex_base = size + 1
    lex_unit = [lex_base ** (size - 1 - r) for r in range(size)]
    sub_w = lex_base ** size
    match_w = (size + 1) * sub_w
    tick_w = (size + 1) * match_w

    grid = [[None] * size for _ in range(size)]
    for i in range(n):
        for j in range(p):
            if np.isfinite(sub[i, j]):
                is_match = problem.paths[i, j] == 0
                bonus = match_w if is_match else sub_w
                grid[i][j] = int(sub[i, j]) * tick_w - bonus + j * lex_unit[i]
        grid[i][p + i] = int(ins[i]) * tick_w + (p + i) * lex_unit[i]
    for j in range(p):
        grid[n + j][j] = dc * tick_w + j * lex_unit[n + j]
        for k in range(n):
            grid[n + j][p + k] = (p + k) * lex_unit[n + j]

    finite = sum(abs(x) for row in grid for x in row if x is not None)
    big = 2 * finite + 1
    cells = [[big if x is None else x for x in row] for row in grid]
    return _hungarian(cells), ins, sub, dc


def category_distance(offer_items, profile_items, model: CostModel, graph: TaxonomyGraph, category):
    """Minimal transformation cost of a profile's category items into the offer's.

    Returns ``(cost, EditScript)``; the script's summed operation costs
    equal ``cost`` exactly.
    """
    costs = model.costs(category)
    scheme = model.weight_scheme
    problem = CategoryProblem(offer_items, profile_items, graph, model.path_cutoff)
    n, p = problem.shape
    assignment, ins, sub, dc = _scripted_assignment(problem, costs, scheme)

    ops = []
    for i in range(n):
        a = problem.offer_concepts[i]
        w = float(problem.weights[i])
        j = assignment[i]
        if j < p:
            b = problem.profile_concepts[j]
            length = int(problem.paths[i, j])
            kind = MATCH if length == 0 else SUBSTITUTE
            ops.append(EditOp(kind, from_ticks(int(sub[i, j])), a, b, length, w))
        else:
            ops.append(EditOp(INSERT, from_ticks(int(ins[i])), a, None, None, w))
    for j in range(p):
        if assignment[n + j] < p:
            ops.append(EditOp(DELETE, from_ticks(dc), None, problem.profile_concepts[j]))
    script = EditScript(ops)
    return script.cost, script


def category_cost(offer_items, profile_items, model: CostModel, graph: TaxonomyGraph, category) -> float:
    """Cost-only variant of :func:`category_distance` (no script, no tie-break)."""
    costs = model.costs(category)
    problem = CategoryProblem(offer_items, profile_items, graph, model.path_cutoff)
    return from_ticks(problem.cost_ticks(costs, model.weight_scheme))


def brute_force_distance(offer_items, profile_items, model: CostModel, graph: TaxonomyGraph, category) -> float:
    """Exhaustive minimum over every partial pairing; verification oracle only."""
    offer = list(offer_items)
    profile = list(profile_items)
    if len(offer) > BRUTE_FORCE_LIMIT or len(profile) > BRUTE_FORCE_LIMIT:
        raise OracleRefusal(
            f"brute force limited to {BRUTE_FORCE_LIMIT} items per side, "
            f"got {len(offer)} and {len(profile)}"
        )
    costs = model.costs(category)
    scheme = model.weight_scheme
    dc = to_ticks(costs.dc)

    pair_cost = {}
    for i, it in enumerate(offer):
        for j, pr in enumerate(profile):
            length = substitution_path(graph, it.concept, pr.concept, model.path_cutoff)
            if length is not None:
                pair_cost[i, j] = to_ticks(substitute_cost(costs, length, it.weight, scheme))
    ins = [to_ticks(insert_cost(costs, it.weight, scheme)) for it in offer]

    best = None
    p = len(profile)
    # each offer item picks a distinct profile index or None (= insert)
    for choice in itertools.product([None, *range(p)], repeat=len(offer)):
        taken = [j for j in choice if j is not None]
        if len(taken) != len(set(taken)):
            continue
        total = 0
        feasible = True
        for i, j in enumerate(choice):
            if j is None:
                total += ins[i]
            elif (i, j) in pair_cost:
                total += pair_cost[i, j]
            else:
                feasible = False
                break
        if not feasible:
            continue
        total += (p - len(taken)) * dc
        if best is None or total < best:
            best = total
    return from_ticks(best)
