"""JSON reading/writing for offers, profiles, cases and models, plus validation."""

from __future__ import annotations

import json
import os
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InputError, ParseError
from .model import (
    ApplicantProfile,
    CategoryCosts,
    CostModel,
    Item,
    JobOffer,
    SolvedCase,
    is_valid_category,
)

OFFERS_FILE = "offers.json"
PROFILES_FILE = "profiles.json"
CASES_FILE = "cases.json"
MODEL_FILE = "model.json"


def _items_to_json(items):
    return {
        cat: [{"concept": it.concept, "category": it.category, "weight": it.weight} for it in seq]
        for cat, seq in items.items()
    }


def _items_from_json(obj, owner):
    if not isinstance(obj, dict):
        raise ParseError(f"{owner}: 'items' must be an object keyed by category")
    out = {}
    for cat, seq in obj.items():
        if not isinstance(seq, list):
            raise ParseError(f"{owner}: items[{cat!r}] must be a list")
        parsed = []
        for raw in seq:
            if isinstance(raw, str):
                raw = {"concept": raw}
            try:
                parsed.append(Item(raw["concept"], raw.get("category", cat), raw.get("weight", 1.0)))
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"{owner}: bad item {raw!r}: {exc}") from None
        out[cat] = parsed
    return out


def offer_to_json(offer: JobOffer) -> dict:
    return {"id": offer.id, "domain_tag": offer.domain_tag, "items": _items_to_json(offer.items)}


def offer_from_json(obj) -> JobOffer:
    try:
        oid = obj["id"]
        return JobOffer(oid, obj.get("domain_tag", ""), _items_from_json(obj.get("items", {}), f"offer {oid}"))
    except (KeyError, TypeError, AttributeError) as exc:
        raise ParseError(f"malformed offer record: {exc}") from None


def profile_to_json(profile: ApplicantProfile) -> dict:
    return {"id": profile.id, "items": _items_to_json(profile.items)}


def profile_from_json(obj) -> ApplicantProfile:
    try:
        pid = obj["id"]
        return ApplicantProfile(pid, _items_from_json(obj.get("items", {}), f"profile {pid}"))
    except (KeyError, TypeError, AttributeError) as exc:
        raise ParseError(f"malformed profile record: {exc}") from None


def case_to_json(case: SolvedCase) -> dict:
    out = {"offer_id": case.offer_id, "expert_ranking": list(case.expert_ranking)}
    if case.scores is not None:
        out["scores"] = list(case.scores)
    return out


def case_from_json(obj) -> SolvedCase:
    try:
        return SolvedCase(obj["offer_id"], obj["expert_ranking"], obj.get("scores"))
    except (KeyError, TypeError, AttributeError, ValueError) as exc:
        raise ParseError(f"malformed case record: {exc}") from None


def model_to_json(model: CostModel, metadata=None) -> dict:
    out = {
        "categories": {
            cat: {"alpha": c.alpha, "ic": c.ic, "dc": c.dc}
            for cat, c in sorted(model.categories.items())
        },
        "path_cutoff": model.path_cutoff,
        "weight_scheme": model.weight_scheme,
    }
    if metadata is not None:
        out["metadata"] = metadata
    return out


def model_from_json(obj) -> CostModel:
    try:
        cats = {cat: CategoryCosts(v["alpha"], v["ic"], v["dc"]) for cat, v in obj["categories"].items()}
        return CostModel(cats, obj.get("path_cutoff", 4), obj.get("weight_scheme", "multiplicative"))
    except (KeyError, TypeError, AttributeError) as exc:
        raise ParseError(f"malformed model document: {exc}") from None


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc.msg}", exc.lineno) from None


def _read_list(path, parse):
    doc = _read_json(path)
    if not isinstance(doc, list):
        raise ParseError(f"{path}: expected a JSON array at top level")
    return [parse(rec) for rec in doc]


def load_offers(path):
    return _read_list(path, offer_from_json)


def load_profiles(path):
    return _read_list(path, profile_from_json)


def load_cases(path):
    return _read_list(path, case_from_json)


def load_model(path):
    doc = _read_json(path)
    return model_from_json(doc), doc.get("metadata", {})


def write_json(path, obj):
    Path(path).write_text(dumps(obj), encoding="utf-8")


@dataclass
class Dataset:
    offers: list
    profiles: list
    cases: list

    def offer_map(self) -> dict:
        return {o.id: o for o in self.offers}

    def profile_map(self) -> dict:
        return {p.id: p for p in self.profiles}

    def save(self, directory):
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        write_json(directory / OFFERS_FILE, [offer_to_json(o) for o in self.offers])
        write_json(directory / PROFILES_FILE, [profile_to_json(p) for p in self.profiles])
        write_json(directory / CASES_FILE, [case_to_json(c) for c in self.cases])

    @classmethod
    def load(cls, directory):
        directory = Path(directory)
        return cls(
            load_offers(directory / OFFERS_FILE),
            load_profiles(directory / PROFILES_FILE),
            load_cases(directory / CASES_FILE),
        )


def default_data_dir():
    return os.environ.get("MATCHFORGE_DATA_DIR")


ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True, order=True)
class Finding:
    severity: str
    code: str
    message: str

    def __str__(self):
        return f"{self.severity}: {self.code}: {self.message}"


@dataclass
class ValidationReport:
    findings: list = field(default_factory=list)

    @property
    def errors(self):
        return [f for f in self.findings if f.severity == ERROR]

    @property
    def warnings(self):
        return [f for f in self.findings if f.severity == WARNING]

    @property
    def ok(self) -> bool:
        return not self.errors

    def __bool__(self):
        return bool(self.findings)

    def __len__(self):
        return len(self.findings)

    def __iter__(self):
        return iter(self.findings)

    def render(self) -> str:
        if not self.findings:
            return "dataset is well-formed"
        return "\n".join(str(f) for f in self.findings)


def _check_items(kind, owner_id, items, taxonomy, report, weights_meaningful):
    for cat, seq in items.items():
        if not is_valid_category(cat):
            report.append(Finding(ERROR, "unknown-category", f"{kind} {owner_id}: invalid category key {cat!r}"))
        counts = Counter(it.concept for it in seq)
        for concept, n in sorted(counts.items()):
            if n > 1:
                report.append(
                    Finding(ERROR, "duplicate-concept", f"{kind} {owner_id}: concept {concept!r} repeated in {cat!r}")
                )
        for it in seq:
            if it.category != cat:
                report.append(
                    Finding(
                        ERROR,
                        "category-mismatch",
                        f"{kind} {owner_id}: item {it.concept!r} declares category {it.category!r} under key {cat!r}",
                    )
                )
            if not weights_meaningful and it.weight != 1.0:
                report.append(
                    Finding(WARNING, "ignored-weight", f"{kind} {owner_id}: weight on {it.concept!r} is ignored")
                )
            if taxonomy is not None and it.concept not in taxonomy:
                report.append(
                    Finding(WARNING, "concept-not-in-taxonomy", f"{kind} {owner_id}: {it.concept!r} absent from taxonomy")
                )


def validate_dataset(offers, profiles, cases, taxonomy=None) -> ValidationReport:
    """Collect every structural problem in a dataset; never raises.

    Findings are sorted, so the report does not depend on input order.
    """
    found = []
    offer_ids = Counter(o.id for o in offers)
    profile_ids = Counter(p.id for p in profiles)
    for oid, n in offer_ids.items():
        if n > 1:
            found.append(Finding(ERROR, "duplicate-id", f"offer id {oid!r} appears {n} times"))
    for pid, n in profile_ids.items():
        if n > 1:
            found.append(Finding(ERROR, "duplicate-id", f"profile id {pid!r} appears {n} times"))

    for o in offers:
        _check_items("offer", o.id, o.items, taxonomy, found, True)
    for p in profiles:
        _check_items("profile", p.id, p.items, taxonomy, found, False)

    case_offers = Counter(c.offer_id for c in cases)
    for oid, n in case_offers.items():
        if n > 1:
            found.append(Finding(ERROR, "duplicate-case", f"offer {oid!r} has {n} solved cases"))
    for c in cases:
        if c.offer_id not in offer_ids:
            found.append(Finding(ERROR, "dangling-id", f"case references unknown offer {c.offer_id!r}"))
        ranking = c.expert_ranking
        if len(ranking) < 2:
            found.append(Finding(ERROR, "short-ranking", f"case {c.offer_id}: fewer than 2 candidates"))
        dup = sorted(pid for pid, n in Counter(ranking).items() if n > 1)
        for pid in dup:
            found.append(Finding(ERROR, "duplicate-id", f"case {c.offer_id}: profile {pid!r} ranked twice"))
        for pid in sorted(set(ranking)):
            if pid not in profile_ids:
                found.append(Finding(ERROR, "dangling-id", f"case {c.offer_id}: unknown profile {pid!r}"))
        if c.scores is not None:
            if len(c.scores) != len(ranking):
                found.append(Finding(ERROR, "score-length", f"case {c.offer_id}: scores and ranking differ in length"))
            elif any(b > a for a, b in zip(c.scores, c.scores[1:])):
                found.append(Finding(ERROR, "score-order", f"case {c.offer_id}: scores are not non-increasing"))

    return ValidationReport(sorted(set(found)))


def require_valid(dataset: Dataset, taxonomy=None):
    report = validate_dataset(dataset.offers, dataset.profiles, dataset.cases, taxonomy)
    if not report.ok:
        raise InputError("dataset failed validation:\n" + report.render())
    return report
