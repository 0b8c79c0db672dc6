"""Method comparison against expert rankings, with significance flags and report output."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from .bm25 import Bm25Params, rank_bm25
from .errors import InputError
from .scoring import rank_candidates
from .stats import p_value_for, spearman_rho

DEFAULT_ALPHA = 5.0e-2


@dataclass(frozen=True)
class CaseComparison:
    domain: str
    case_id: str
    n: int
    rho_approach: float
    rho_baseline: float
    p_approach: float
    p_baseline: float
    alpha: float

    @property
    def significant(self) -> bool:
        return self.p_approach < self.alpha

    @property
    def significant_baseline(self) -> bool:
        return self.p_baseline < self.alpha

    @property
    def outcome(self) -> str:
        if self.rho_approach > self.rho_baseline:
            return "win"
        if self.rho_approach < self.rho_baseline:
            return "loss"
        return "tie"


@dataclass
class ComparisonReport:
    cases: list
    alpha: float = DEFAULT_ALPHA
    metadata: dict = field(default_factory=dict)

    @property
    def wins(self) -> int:
        return sum(c.outcome == "win" for c in self.cases)

    @property
    def losses(self) -> int:
        return sum(c.outcome == "loss" for c in self.cases)

    @property
    def ties(self) -> int:
        return sum(c.outcome == "tie" for c in self.cases)

    def mean_rho(self, baseline=False) -> float:
        vals = [c.rho_baseline if baseline else c.rho_approach for c in self.cases]
        return sum(vals) / len(vals) if vals else float("nan")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["domain", "case_id", "n", "rho_oa", "rho_bs", "p_oa", "p_bs",
                    "significant_oa", "significant_bs", "outcome"])
        for c in self.cases:
            w.writerow([c.domain, c.case_id, c.n, repr(c.rho_approach), repr(c.rho_baseline),
                        repr(c.p_approach), repr(c.p_baseline),
                        int(c.significant), int(c.significant_baseline), c.outcome])
        return buf.getvalue()

    def to_text(self) -> str:
        """Domains as rows, cases as columns; p-values at or above alpha get an asterisk."""
        by_domain = {}
        for c in self.cases:
            by_domain.setdefault(c.domain, []).append(c)
        width = max((len(v) for v in by_domain.values()), default=0)
        lines = []
        for title, get_p in (("approach (oa)", lambda c: c.p_approach),
                             ("baseline (bs)", lambda c: c.p_baseline)):
            lines.append(f"p-values, {title}; * marks p >= {self.alpha:g}")
            header = ["domain".ljust(12)] + [f"case{i + 1}".rjust(11) for i in range(width)]
            lines.append(" ".join(header))
            for domain, rows in by_domain.items():
                cells = []
                for c in rows:
                    p = get_p(c)
                    cells.append((f"{p:.2e}" + ("*" if p >= self.alpha else " ")).rjust(11))
                lines.append(" ".join([domain.ljust(12)] + cells))
            lines.append("")
        lines.append("rho per case (oa / bs)")
        for domain, rows in by_domain.items():
            cells = [f"{c.rho_approach:+.3f}/{c.rho_baseline:+.3f}".rjust(15) for c in rows]
            lines.append(" ".join([domain.ljust(12)] + cells))
        lines.append("")
        lines.append(
            f"approach vs baseline: {self.wins} wins, {self.losses} losses, {self.ties} ties "
            f"of {len(self.cases)} cases; mean rho {self.mean_rho():.3f} vs {self.mean_rho(True):.3f}"
        )
        overlap = self.metadata.get("train_test_overlap")
        if overlap:
            lines.append(f"WARNING: {len(overlap)} test case(s) also used for training: {', '.join(overlap)}")
        return "\n".join(lines) + "\n"


def compare_methods(offers, profiles, cases_test, trained_model, graph, bm25_params=Bm25Params(),
                    alpha=DEFAULT_ALPHA, training_case_ids=(), mc_samples=100_000, seed=0) -> ComparisonReport:
    """Score the trained model and BM25 against expert rankings, case by case."""
    if not cases_test:
        raise InputError("no test cases to evaluate")
    offer_map = {o.id: o for o in offers}
    profile_map = {p.id: p for p in profiles}
    rows = []
    for k, case in enumerate(cases_test):
        try:
            offer = offer_map[case.offer_id]
            cands = [profile_map[pid] for pid in case.expert_ranking]
        except KeyError as exc:
            raise InputError(f"case {case.offer_id}: unknown id {exc.args[0]!r}") from None
        expert = list(case.expert_ranking)
        n = len(expert)
        oa = rank_candidates(offer, cands, trained_model, graph).order
        bs = rank_bm25(offer, cands, bm25_params, labels=graph).order
        rho_oa = spearman_rho(oa, expert)
        rho_bs = spearman_rho(bs, expert)
        rows.append(CaseComparison(
            offer.domain_tag, case.offer_id, n, rho_oa, rho_bs,
            p_value_for(rho_oa, n, mc_samples, seed + 2 * k),
            p_value_for(rho_bs, n, mc_samples, seed + 2 * k + 1),
            alpha,
        ))
    overlap = sorted(set(training_case_ids) & {c.offer_id for c in cases_test})
    meta = {"train_test_overlap": overlap, "bm25": {"k1": bm25_params.k1, "b": bm25_params.b}}
    return ComparisonReport(rows, alpha, meta)
