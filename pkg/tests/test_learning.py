import numpy as np
import pytest

from matchforge.errors import ConfigError, InputError
from matchforge.learning import (
    Evaluator,
    TrainConfig,
    cross_validate,
    objective,
    perturb,
    random_model,
    train,
)
from matchforge.model import CategoryCosts, CostModel, SolvedCase
from matchforge.scoring import rank_candidates
from matchforge.synthetic import default_truth_model, generate_synthetic_dataset, load_domain_stats


def _model():
    return CostModel({c: CategoryCosts(0.8, 1.5, 0.4) for c in ("skills", "education", "languages")})


def _model_orders(toy_dataset, graph, model):
    offers, profiles, cases = toy_dataset
    pmap = {p.id: p for p in profiles}
    omap = {o.id: o for o in offers}
    return [rank_candidates(omap[c.offer_id], [pmap[p] for p in c.expert_ranking], model, graph).order
            for c in cases]


@pytest.fixture(scope="module")
def synth(graph):
    return generate_synthetic_dataset(load_domain_stats(), graph, default_truth_model(), 2, 8, seed=11,
                                      id_prefix="t-")


class TestObjective:
    def test_perfect_and_reversed(self, toy_dataset, graph):
        offers, profiles, _ = toy_dataset
        orders = _model_orders(toy_dataset, graph, _model())
        perfect = [SolvedCase(o.id, c) for o, c in zip(offers, orders)]
        assert objective(_model(), perfect, offers, profiles, graph) == 1.0
        reversed_ = [SolvedCase(o.id, c[::-1]) for o, c in zip(offers, orders)]
        assert objective(_model(), reversed_, offers, profiles, graph) == -1.0

    def test_mean_of_cases(self, toy_dataset, graph):
        offers, profiles, _ = toy_dataset
        o1, o2 = _model_orders(toy_dataset, graph, _model())
        one_swap = [o1[0], o1[2], o1[1]]  # rho 0.5 at n = 3
        cases = [SolvedCase("o1", one_swap), SolvedCase("o2", o2)]
        assert objective(_model(), cases, offers, profiles, graph) == pytest.approx(0.75)

    def test_case_with_one_candidate(self, toy_dataset, graph):
        offers, profiles, _ = toy_dataset
        with pytest.raises(InputError):
            objective(_model(), [SolvedCase("o1", ["p1"])], offers, profiles, graph)

    def test_evaluator_agrees_with_ranking(self, synth, graph):
        ev = Evaluator(synth.cases, synth.offers, synth.profiles, graph)
        rng = np.random.default_rng(0)
        pmap, omap = synth.profile_map(), synth.offer_map()
        for _ in range(5):
            model = random_model(["education", "languages", "skills"], rng)
            per_case = ev.per_case(model)
            for case in synth.cases:
                cands = [pmap[p] for p in case.expert_ranking]
                order = rank_candidates(omap[case.offer_id], cands, model, graph).order
                from matchforge.stats import spearman_rho
                assert per_case[case.offer_id] == pytest.approx(spearman_rho(order, case.expert_ranking),
                                                                abs=1e-12)


class TestPerturb:
    def test_zero_step_is_identity(self):
        rng = np.random.default_rng(0)
        assert perturb(_model(), 0.0, rng) == _model()

    def test_changes_exactly_one_parameter(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            new = perturb(_model(), 0.25, rng)
            diffs = [k for k in _model().parameter_keys() if new.get(k) != _model().get(k)]
            assert len(diffs) == 1 and abs(new.get(diffs[0]) - _model().get(diffs[0])) == 0.25

    def test_seeded(self):
        a = perturb(_model(), 0.3, np.random.default_rng(8))
        b = perturb(_model(), 0.3, np.random.default_rng(8))
        assert a == b

    def test_clamps_alpha_and_ic_not_dc(self):
        m = CostModel({"skills": CategoryCosts(0.1, 0.1, 0.1)})
        seen = set()
        rng = np.random.default_rng(1)
        for _ in range(60):
            new = perturb(m, 0.5, rng)
            for key in m.parameter_keys():
                if new.get(key) != m.get(key):
                    seen.add((key[1], new.get(key)))
        assert ("alpha", 0.0) in seen and ("ic", 0.0) in seen and ("dc", -0.4) in seen

    def test_negative_step(self):
        with pytest.raises(ConfigError):
            perturb(_model(), -1.0, np.random.default_rng(0))


class TestTrain:
    def test_config_validation(self):
        for bad in ({"max_iters": -1}, {"restarts": 0}, {"initial_step": 0}, {"step_shrink": 1.0},
                    {"target_rho": 1.5}):
            with pytest.raises(ConfigError):
                TrainConfig(**bad)

    def test_zero_budget_returns_initial_model(self, synth, graph):
        cfg = TrainConfig(max_iters=0, restarts=1, rng_seed=3)
        report = train(synth.cases, synth.offers, synth.profiles, graph, cfg)
        expected = random_model(["education", "languages", "skills"], np.random.default_rng(3))
        assert report.best_model == expected and report.iterations == 0

    def test_reproducible(self, synth, graph):
        cfg = TrainConfig(max_iters=60, restarts=2, rng_seed=4)
        a = train(synth.cases, synth.offers, synth.profiles, graph, cfg)
        b = train(synth.cases, synth.offers, synth.profiles, graph, cfg)
        assert a.best_model == b.best_model and a.objective_history == b.objective_history

    def test_history_non_decreasing_and_bounded(self, synth, graph):
        cfg = TrainConfig(max_iters=80, restarts=3, rng_seed=1)
        report = train(synth.cases, synth.offers, synth.profiles, graph, cfg)
        rhos = [r for _, r in report.objective_history]
        its = [i for i, _ in report.objective_history]
        assert rhos == sorted(rhos) and its == sorted(its)
        assert rhos[-1] == report.best_rho <= 1.0
        assert report.best_rho == max(report.restart_rhos)
        assert report.per_case_rho.keys() == {c.offer_id for c in synth.cases}

    def test_target_stops_early(self, synth, graph):
        cfg = TrainConfig(max_iters=500, restarts=1, target_rho=-1.0)
        report = train(synth.cases, synth.offers, synth.profiles, graph, cfg)
        assert report.iterations == 0 and report.converged

    def test_empty_cases(self, synth, graph):
        with pytest.raises(InputError):
            train([], synth.offers, synth.profiles, graph)

    def test_parallel_matches_serial(self, synth, graph):
        cfg = TrainConfig(max_iters=40, restarts=2, rng_seed=9)
        a = train(synth.cases, synth.offers, synth.profiles, graph, cfg, jobs=1)
        b = train(synth.cases, synth.offers, synth.profiles, graph, cfg, jobs=2)
        assert a.best_model == b.best_model and a.best_rho == b.best_rho


class TestCrossValidate:
    def test_fold_bounds(self, synth, graph):
        cfg = TrainConfig(max_iters=0, restarts=1)
        for k in (1, len(synth.cases) + 1):
            with pytest.raises(InputError):
                cross_validate(synth.cases, synth.offers, synth.profiles, graph, cfg, k)

    def test_leave_one_out_partition(self, synth, graph):
        cfg = TrainConfig(max_iters=0, restarts=1)
        folds = cross_validate(synth.cases, synth.offers, synth.profiles, graph, cfg, len(synth.cases))
        held = [cid for f in folds for cid in f.test_case_ids]
        assert sorted(held) == sorted(c.offer_id for c in synth.cases)
        assert all(len(f.test_case_ids) == 1 for f in folds)

    @pytest.mark.slow
    def test_shuffled_labels_give_no_signal(self, synth, graph):
        rng = np.random.default_rng(0)
        shuffled = [SolvedCase(c.offer_id, list(rng.permutation(c.expert_ranking))) for c in synth.cases]
        cfg = TrainConfig(max_iters=150, restarts=2)
        folds = cross_validate(shuffled, synth.offers, synth.profiles, graph, cfg, 4)
        mean_test = float(np.mean([f.test_rho for f in folds]))
        assert abs(mean_test) < 0.4

    @pytest.mark.slow
    def test_recovers_truth_on_held_out_cases(self, graph):
        data = generate_synthetic_dataset(load_domain_stats(), graph, default_truth_model(), 6, 8, seed=11)
        cfg = TrainConfig(max_iters=400, restarts=4)
        folds = cross_validate(data.cases, data.offers, data.profiles, graph, cfg, 2)
        assert np.mean([f.test_rho for f in folds]) >= 0.9
