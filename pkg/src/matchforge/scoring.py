"""Total transformation cost, candidate ranking and explanation traces."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .distance import CategoryProblem, category_distance, from_ticks, order_by_cost, to_ticks
from .errors import InputError
from .model import (
    ASCENDING_COST,
    DELETE,
    INSERT,
    MATCH,
    SUBSTITUTE,
    CostModel,
    RankEntry,
    Ranking,
)
from .taxonomy import TaxonomyGraph


def scored_categories(offer, profile) -> list:
    return sorted(set(offer.items) | set(profile.items))


@dataclass(frozen=True)
class CostBreakdown:
    rc_sum: float
    ic_sum: float
    dc_sum: float

    @property
    def total(self) -> float:
        return from_ticks(to_ticks(self.rc_sum) + to_ticks(self.ic_sum) + to_ticks(self.dc_sum))


@dataclass(frozen=True)
class TransformationCost:
    total: float
    breakdown: dict
    scripts: dict


def transformation_cost(offer, profile, model: CostModel, graph: TaxonomyGraph) -> TransformationCost:
    """Sum of per-category minimal transformation costs, with scripts.

    Categories present only in the profile still contribute deletions.
    """
    breakdown, scripts = {}, {}
    total_ticks = 0
    for cat in scored_categories(offer, profile):
        cost, script = category_distance(
            offer.category_items(cat), profile.category_items(cat), model, graph, cat
        )
        sums = {"rc": 0, "ic": 0, "dc": 0}
        for op in script:
            key = "ic" if op.kind == INSERT else "dc" if op.kind == DELETE else "rc"
            sums[key] += to_ticks(op.cost)
        breakdown[cat] = CostBreakdown(*(from_ticks(sums[k]) for k in ("rc", "ic", "dc")))
        scripts[cat] = script
        total_ticks += to_ticks(cost)
    return TransformationCost(from_ticks(total_ticks), breakdown, scripts)


def total_cost(offer, profile, model: CostModel, graph: TaxonomyGraph) -> float:
    """Same total as :func:`transformation_cost` without building scripts."""
    ticks = 0
    for cat in scored_categories(offer, profile):
        problem = CategoryProblem(
            offer.category_items(cat), profile.category_items(cat), graph, model.path_cutoff
        )
        ticks += problem.cost_ticks(model.costs(cat), model.weight_scheme)
    return from_ticks(ticks)


def ranking_from_costs(costs: dict) -> Ranking:
    """Ascending-cost ranking; equal (or tick-noise-close) costs fall back to profile id order."""
    ids = sorted(costs)
    idx = order_by_cost([to_ticks(costs[i]) for i in ids], np.arange(len(ids)))
    return Ranking(
        [RankEntry(r, ids[i], costs[ids[i]]) for r, i in enumerate(idx, start=1)],
        ASCENDING_COST,
    )


def rank_candidates(offer, profiles, model: CostModel, graph: TaxonomyGraph) -> Ranking:
    if not profiles:
        raise InputError("cannot rank an empty profile list")
    return ranking_from_costs({p.id: total_cost(offer, p, model, graph) for p in profiles})


@dataclass(frozen=True)
class TraceRecord:
    category: str
    kind: str
    offer_concept: str
    profile_concept: str
    path_length: int
    unit_cost: float
    weight: float
    cost: float

    def as_dict(self):
        return {
            "category": self.category,
            "kind": self.kind,
            "offer_concept": self.offer_concept,
            "profile_concept": self.profile_concept,
            "path_length": self.path_length,
            "unit_cost": self.unit_cost,
            "weight": self.weight,
            "cost": self.cost,
        }


@dataclass(frozen=True)
class Explanation:
    offer_id: str
    profile_id: str
    weight_scheme: str
    records: tuple
    subtotals: dict
    total: float

    def to_json(self) -> str:
        doc = {
            "offer_id": self.offer_id,
            "profile_id": self.profile_id,
            "weight_scheme": self.weight_scheme,
            "operations": [r.as_dict() for r in self.records],
            "subtotals": self.subtotals,
            "total": self.total,
        }
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"

    def to_text(self, labels=None) -> str:
        labels = labels or {}

        def name(cid):
            if cid is None:
                return "-"
            lab = labels.get(cid)
            return f"{cid} ({lab})" if lab and lab != cid else cid

        lines = [f"offer {self.offer_id} <- profile {self.profile_id}  [{self.weight_scheme} weighting]"]
        for cat, subtotal in self.subtotals.items():
            lines.append(f"  {cat}:")
            for r in (r for r in self.records if r.category == cat):
                if r.kind in (MATCH, SUBSTITUTE):
                    what = f"{name(r.profile_concept)} -> {name(r.offer_concept)}"
                elif r.kind == INSERT:
                    what = f"acquire {name(r.offer_concept)}"
                else:
                    what = f"surplus {name(r.profile_concept)}"
                plen = "" if r.path_length is None else f" path={r.path_length}"
                wt = "" if r.weight is None else f" weight={r.weight:g}"
                lines.append(
                    f"    {r.kind:<10} {what}{plen} unit={format_cost(r.unit_cost)}{wt} cost={format_cost(r.cost)}"
                )
            lines.append(f"    subtotal {format_cost(subtotal)}")
        lines.append(f"  total {format_cost(self.total)}")
        return "\n".join(lines) + "\n"


def format_cost(x: float) -> str:
    return f"{x:.6f}"


def explain(offer, profile, model: CostModel, graph: TaxonomyGraph) -> Explanation:
    """Operation-level trace of the minimal transformation, grouped by category."""
    tc = transformation_cost(offer, profile, model, graph)
    records, subtotals = [], {}
    for cat, script in tc.scripts.items():
        costs = model.costs(cat)
        for op in script:
            if op.kind == INSERT:
                unit = costs.ic
            elif op.kind == DELETE:
                unit = costs.dc
            else:
                unit = costs.alpha * op.path_length
            records.append(
                TraceRecord(cat, op.kind, op.offer_concept, op.profile_concept, op.path_length, unit, op.weight, op.cost)
            )
        subtotals[cat] = tc.breakdown[cat].total
    return Explanation(offer.id, profile.id, model.weight_scheme, tuple(records), subtotals, tc.total)
