"""Domain types: items, offers, profiles, solved cases, cost models, rankings.

All types are frozen dataclasses. Containers inside them (item maps) are
normalised to tuples on construction and must not be mutated afterwards.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .errors import ConfigError

SKILLS = "skills"
EDUCATION = "education"
LANGUAGES = "languages"
CORE_CATEGORIES = (SKILLS, EDUCATION, LANGUAGES)

MULTIPLICATIVE = "multiplicative"
ADDITIVE = "additive"
WEIGHT_SCHEMES = (MULTIPLICATIVE, ADDITIVE)

ASCENDING_COST = "ascending_cost"
DESCENDING_SCORE = "descending_score"

_CATEGORY_RE = re.compile(r"^[a-z][a-z0-9_]*$")


def is_valid_category(token) -> bool:
    return isinstance(token, str) and bool(_CATEGORY_RE.match(token))


@dataclass(frozen=True)
class Item:
    concept: str
    category: str
    weight: float = 1.0

    def __post_init__(self):
        if not isinstance(self.concept, str) or not self.concept:
            raise ValueError("item concept must be a non-empty string")
        w = float(self.weight)
        if not math.isfinite(w) or w < 0:
            raise ValueError(f"item weight must be finite and >= 0, got {self.weight!r}")
        object.__setattr__(self, "weight", w)


def _freeze_items(items: Mapping[str, Iterable[Item]]) -> dict:
    return {cat: tuple(seq) for cat, seq in items.items()}


@dataclass(frozen=True)
class JobOffer:
    id: str
    domain_tag: str
    items: Mapping[str, tuple] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "items", _freeze_items(self.items))

    def category_items(self, category: str) -> tuple:
        return self.items.get(category, ())


@dataclass(frozen=True)
class ApplicantProfile:
    """A candidate's offered items. Item weights are carried but never used."""

    id: str
    items: Mapping[str, tuple] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "items", _freeze_items(self.items))

    def category_items(self, category: str) -> tuple:
        return self.items.get(category, ())


@dataclass(frozen=True)
class SolvedCase:
    """An expert's total order over candidates for one offer, best first."""

    offer_id: str
    expert_ranking: tuple
    scores: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "expert_ranking", tuple(self.expert_ranking))
        if self.scores is not None:
            object.__setattr__(self, "scores", tuple(float(s) for s in self.scores))

    @property
    def case_id(self) -> str:
        return self.offer_id


@dataclass(frozen=True)
class CategoryCosts:
    alpha: float
    ic: float
    dc: float

    def __post_init__(self):
        for name in ("alpha", "ic", "dc"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ConfigError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if self.alpha < 0:
            raise ConfigError(f"alpha must be >= 0, got {self.alpha}")
        if self.ic < 0:
            raise ConfigError(f"ic must be >= 0, got {self.ic}")


PARAMETER_FIELDS = ("alpha", "ic", "dc")


@dataclass(frozen=True)
class CostModel:
    """Per-category replacement/insertion/deletion costs plus weighting scheme.

    ``path_cutoff`` is the longest taxonomy path (in edges) that still counts
    as a substitution; longer or unreachable pairs must be inserted/deleted.
    """

    categories: Mapping[str, CategoryCosts]
    path_cutoff: int = 4
    weight_scheme: str = MULTIPLICATIVE

    def __post_init__(self):
        object.__setattr__(self, "categories", dict(self.categories))
        if int(self.path_cutoff) != self.path_cutoff or self.path_cutoff < 1:
            raise ConfigError(f"path_cutoff must be a positive integer, got {self.path_cutoff!r}")
        object.__setattr__(self, "path_cutoff", int(self.path_cutoff))
        if self.weight_scheme not in WEIGHT_SCHEMES:
            raise ConfigError(f"unknown weight scheme {self.weight_scheme!r}")
        for cat in self.categories:
            if not is_valid_category(cat):
                raise ConfigError(f"invalid category token {cat!r}")

    def costs(self, category: str) -> CategoryCosts:
        try:
            return self.categories[category]
        except KeyError:
            raise ConfigError(f"cost model has no entry for category {category!r}") from None

    def parameter_keys(self) -> list:
        """Stable list of ``(category, field)`` pairs for every tunable parameter."""
        return [(cat, f) for cat in sorted(self.categories) for f in PARAMETER_FIELDS]

    def get(self, key) -> float:
        cat, name = key
        return getattr(self.costs(cat), name)

    def replace(self, key, value: float) -> "CostModel":
        cat, name = key
        old = self.costs(cat)
        values = {f: getattr(old, f) for f in PARAMETER_FIELDS}
        values[name] = value
        cats = dict(self.categories)
        cats[cat] = CategoryCosts(**values)
        return CostModel(cats, self.path_cutoff, self.weight_scheme)

    def scaled(self, factor: float) -> "CostModel":
        if factor <= 0:
            raise ConfigError("scale factor must be positive")
        cats = {
            cat: CategoryCosts(c.alpha * factor, c.ic * factor, c.dc * factor)
            for cat, c in self.categories.items()
        }
        return CostModel(cats, self.path_cutoff, self.weight_scheme)


@dataclass(frozen=True)
class RankEntry:
    rank: int
    profile_id: str
    value: float


@dataclass(frozen=True)
class Ranking:
    entries: tuple
    direction: str = ASCENDING_COST

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    @property
    def order(self) -> list:
        return [e.profile_id for e in self.entries]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


MATCH = "match"
SUBSTITUTE = "substitute"
INSERT = "insert"
DELETE = "delete"


@dataclass(frozen=True)
class EditOp:
    kind: str
    cost: float
    offer_concept: Optional[str] = None
    profile_concept: Optional[str] = None
    path_length: Optional[int] = None
    weight: Optional[float] = None


@dataclass(frozen=True)
class EditScript:
    ops: tuple

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))

    @property
    def cost(self) -> float:
        return math.fsum(op.cost for op in self.ops)

    def count(self, kind: str) -> int:
        return sum(1 for op in self.ops if op.kind == kind)

    def __iter__(self):
        return iter(self.ops)

    def __len__(self):
        return len(self.ops)
