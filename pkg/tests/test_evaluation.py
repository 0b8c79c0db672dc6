import csv
import io
from fractions import Fraction

import pytest

from matchforge.bm25 import rank_bm25
from matchforge.errors import InputError
from matchforge.evaluation import CaseComparison, ComparisonReport, compare_methods
from matchforge.model import SolvedCase
from matchforge.scoring import rank_candidates
from matchforge.synthetic import default_truth_model, generate_synthetic_dataset, load_domain_stats


@pytest.fixture(scope="module")
def data(graph):
    return generate_synthetic_dataset(load_domain_stats(), graph, default_truth_model(), 1, 8, seed=2)


def _row(case_id, a, b, p=0.01):
    return CaseComparison("IT", case_id, 8, a, b, p, p, 0.05)


def test_outcomes():
    assert _row("x", 0.9, 0.1).outcome == "win"
    assert _row("x", 0.1, 0.9).outcome == "loss"
    assert _row("x", 0.5, 0.5).outcome == "tie"
    assert _row("x", 0.5, 0.5, p=0.05).significant is False


def test_truth_model_wins_everywhere(data, graph):
    report = compare_methods(data.offers, data.profiles, data.cases, default_truth_model(), graph)
    assert report.wins + report.losses + report.ties == len(data.cases) == 4
    assert all(r.rho_approach == 1.0 for r in report.cases)
    assert all(r.p_approach == pytest.approx(float(Fraction(1, 40320))) for r in report.cases)
    assert report.mean_rho() == 1.0


def test_all_ties_when_experts_follow_bm25(data, graph):
    pmap, omap = data.profile_map(), data.offer_map()
    cases = [SolvedCase(c.offer_id, rank_bm25(omap[c.offer_id], [pmap[p] for p in c.expert_ranking],
                                              labels=graph).order) for c in data.cases]
    # a model that ranks exactly like BM25 does not exist in general, so compare BM25 with itself
    report = compare_methods(data.offers, data.profiles, cases, default_truth_model(), graph)
    assert all(r.rho_baseline == 1.0 for r in report.cases)
    assert report.losses + report.ties == len(cases)


def test_csv_and_text(data, graph):
    report = compare_methods(data.offers, data.profiles, data.cases, default_truth_model(), graph,
                             training_case_ids=[data.cases[0].offer_id])
    rows = list(csv.DictReader(io.StringIO(report.to_csv())))
    assert len(rows) == 4 and {"case_id", "rho_oa", "rho_bs", "p_oa", "p_bs", "outcome"} <= set(rows[0])
    text = report.to_text()
    assert "WARNING: 1 test case(s) also used for training" in text
    assert report.metadata["train_test_overlap"] == [data.cases[0].offer_id]


def test_insignificant_marked():
    report = ComparisonReport([_row("a", 0.2, 0.1, p=0.4)])
    assert "*" in report.to_text()


def test_empty_and_unknown(data, graph):
    with pytest.raises(InputError):
        compare_methods(data.offers, data.profiles, [], default_truth_model(), graph)
    with pytest.raises(InputError):
        compare_methods(data.offers, data.profiles, [SolvedCase("nope", ["a", "b"])],
                        default_truth_model(), graph)


def test_model_ranking_used(data, graph):
    model = default_truth_model().scaled(3.0)
    report = compare_methods(data.offers, data.profiles, data.cases, model, graph)
    pmap, omap = data.profile_map(), data.offer_map()
    for row, case in zip(report.cases, data.cases):
        order = rank_candidates(omap[case.offer_id], [pmap[p] for p in case.expert_ranking], model, graph).order
        assert (row.rho_approach == 1.0) == (order == list(case.expert_ranking))
