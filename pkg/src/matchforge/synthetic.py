"""Seeded synthetic offers/profiles/cases calibrated to per-domain item-count statistics.

Counts per category are drawn from a normal distribution with the given
mean and variance, rounded to the nearest integer and clamped at zero.
Expert rankings come from a known "truth" cost model, which makes the
synthetic expert perfectly consistent unless tail noise is requested.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .dataset import Dataset
from .errors import GenerationError, ParseError
from .model import (
    EDUCATION,
    LANGUAGES,
    SKILLS,
    ApplicantProfile,
    CategoryCosts,
    CostModel,
    Item,
    JobOffer,
    SolvedCase,
)
from .scoring import rank_candidates


@dataclass(frozen=True)
class CountStats:
    mean: float
    variance: float

    def __post_init__(self):
        if self.mean < 0 or self.variance < 0:
            raise ParseError("count mean and variance must be >= 0")


@dataclass(frozen=True)
class CategoryStats:
    requested: CountStats
    offered: CountStats


@dataclass(frozen=True)
class DomainStats:
    categories: dict

    def to_json(self) -> dict:
        return {
            cat: {
                "requested": {"mean": s.requested.mean, "variance": s.requested.variance},
                "offered": {"mean": s.offered.mean, "variance": s.offered.variance},
            }
            for cat, s in self.categories.items()
        }


def parse_domain_stats(doc) -> dict:
    try:
        return {
            domain: DomainStats({
                cat: CategoryStats(CountStats(**v["requested"]), CountStats(**v["offered"]))
                for cat, v in cats.items()
            })
            for domain, cats in doc.items()
        }
    except (KeyError, TypeError, AttributeError) as exc:
        raise ParseError(f"malformed domain statistics: {exc}") from None


def load_domain_stats(path=None) -> dict:
    """Load per-domain count statistics; the bundled recruitment sample when ``path`` is None."""
    if path is None:
        text = resources.files("matchforge.data").joinpath("domain_stats.json").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return parse_domain_stats(json.loads(text))


def default_truth_model(path_cutoff=4) -> CostModel:
    """Hidden model used to label synthetic cases."""
    return CostModel(
        {
            SKILLS: CategoryCosts(alpha=0.6, ic=2.0, dc=0.3),
            EDUCATION: CategoryCosts(alpha=1.2, ic=3.5, dc=0.5),
            LANGUAGES: CategoryCosts(alpha=0.8, ic=1.5, dc=-0.2),
        },
        path_cutoff=path_cutoff,
    )


def draw_counts(stats: CountStats, size, rng) -> np.ndarray:
    x = rng.normal(stats.mean, math.sqrt(stats.variance), size=size)
    return np.maximum(np.rint(x), 0).astype(np.int64)


def _sample_items(vocab, count, category, rng, owner):
    if count > len(vocab):
        raise GenerationError(
            f"{owner}: {count} {category} items requested but vocabulary has only {len(vocab)}"
        )
    picked = rng.choice(len(vocab), size=count, replace=False)
    return [Item(vocab[i], category) for i in sorted(picked)]


def _swap_tail(order, swaps, rng):
    order = list(order)
    lo = len(order) // 2
    for _ in range(swaps):
        if len(order) - lo < 2:
            break
        i = int(rng.integers(lo, len(order) - 1))
        order[i], order[i + 1] = order[i + 1], order[i]
    return order


def generate_synthetic_dataset(stats: dict, taxonomy, truth_model: CostModel, n_offers: int,
                               n_profiles_per_offer: int, seed: int, tail_swaps: int = 0,
                               id_prefix: str = "") -> Dataset:
    """Generate ``n_offers`` solved cases per domain, each with its own candidates.

    ``tail_swaps`` random adjacent swaps in the lower half of each expert
    ranking imitate experts who order unsuitable candidates carelessly.
    """
    if n_offers < 0 or n_profiles_per_offer < 0:
        raise GenerationError("counts must be non-negative")
    if n_offers and n_profiles_per_offer < 2:
        raise GenerationError("each solved case needs at least 2 candidates")
    rng = np.random.default_rng(seed)
    offers, profiles, cases = [], [], []
    for domain, dstats in stats.items():
        vocab = {}
        for cat in dstats.categories:
            vocab[cat] = taxonomy.vocabulary(cat)
        for k in range(n_offers):
            oid = f"{id_prefix}{domain.lower()}-{k + 1:02d}"
            items = {}
            for cat, cs in dstats.categories.items():
                count = int(draw_counts(cs.requested, 1, rng)[0])
                items[cat] = _sample_items(vocab[cat], count, cat, rng, oid)
            offer = JobOffer(oid, domain, items)
            cands = []
            for j in range(n_profiles_per_offer):
                pid = f"{oid}-c{j + 1}"
                pitems = {}
                for cat, cs in dstats.categories.items():
                    count = int(draw_counts(cs.offered, 1, rng)[0])
                    pitems[cat] = _sample_items(vocab[cat], count, cat, rng, pid)
                cands.append(ApplicantProfile(pid, pitems))
            ranking = rank_candidates(offer, cands, truth_model, taxonomy).order
            if tail_swaps:
                ranking = _swap_tail(ranking, tail_swaps, rng)
            offers.append(offer)
            profiles.extend(cands)
            cases.append(SolvedCase(oid, ranking))
    return Dataset(offers, profiles, cases)


def count_summary(dataset: Dataset) -> dict:
    """Mean/variance of item counts per domain and category, requested and offered."""
    by_offer = dataset.offer_map()
    rows = {}
    for case in dataset.cases:
        offer = by_offer[case.offer_id]
        d = rows.setdefault(offer.domain_tag, {})
        for cat, seq in offer.items.items():
            d.setdefault(cat, ([], []))[0].append(len(seq))
    prof = dataset.profile_map()
    for case in dataset.cases:
        d = rows[by_offer[case.offer_id].domain_tag]
        for pid in case.expert_ranking:
            for cat, seq in prof[pid].items.items():
                d.setdefault(cat, ([], []))[1].append(len(seq))
    out = {}
    for domain, cats in rows.items():
        out[domain] = {
            cat: {
                "requested": (float(np.mean(r)) if r else 0.0, float(np.var(r)) if r else 0.0),
                "offered": (float(np.mean(o)) if o else 0.0, float(np.var(o)) if o else 0.0),
            }
            for cat, (r, o) in cats.items()
        }
    return out
