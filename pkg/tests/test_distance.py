import itertools
import random
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matchforge.distance import (
    TICK,
    brute_force_distance,
    category_cost,
    category_distance,
    unit_edit_distance,
)
from matchforge.errors import ConfigError, OracleRefusal
from matchforge.model import CategoryCosts, CostModel, Item
from matchforge.taxonomy import load_taxonomy

from conftest import skills, unit_model


def literal_recurrence(a, b):
    """Edit distance evaluated straight from the max/min recurrence, memoised."""

    @lru_cache(maxsize=None)
    def d(i, j):
        if min(i, j) == 0:
            return max(i, j)
        return min(d(i - 1, j) + 1, d(i, j - 1) + 1, d(i - 1, j - 1) + (a[i - 1] != b[j - 1]))

    return d(len(a), len(b))


def random_instance(rng, vocab, max_items=5, weights=True):
    scheme = rng.choice(["multiplicative", "additive"])
    model = CostModel(
        {"skills": CategoryCosts(rng.uniform(0, 2), rng.uniform(0, 2), rng.uniform(-1.5, 2))},
        path_cutoff=rng.randint(1, 5),
        weight_scheme=scheme,
    )
    offer = [
        Item(c, "skills", rng.choice([1.0, 2.0, rng.uniform(0, 3)]) if weights else 1.0)
        for c in rng.sample(vocab, rng.randint(0, max_items))
    ]
    profile = [Item(c, "skills") for c in rng.sample(vocab, rng.randint(0, max_items))]
    return offer, profile, model


class TestUnitEditDistance:
    def test_empty_side(self):
        assert unit_edit_distance([], ["a", "b", "c"]) == 3
        assert unit_edit_distance(["a", "b"], []) == 2

    def test_identity(self):
        assert unit_edit_distance(list("abc"), list("abc")) == 0

    def test_kitten_sitting(self):
        a, b = list("kitten"), list("sitting")
        assert literal_recurrence(tuple(a), tuple(b)) == 3
        assert unit_edit_distance(a, b) == 3

    @given(st.lists(st.sampled_from("abcd"), max_size=7), st.lists(st.sampled_from("abcd"), max_size=7))
    def test_matches_literal_recurrence(self, a, b):
        assert unit_edit_distance(a, b) == literal_recurrence(tuple(a), tuple(b))


class TestCategoryDistance:
    def test_identity(self, graph):
        items = skills("java", "sql", "python")
        cost, script = category_distance(items, list(reversed(items)), unit_model(4), graph, "skills")
        assert cost == 0.0
        assert [op.kind for op in script] == ["match"] * 3

    def test_five_item_pattern(self, graph, five_item_instance):
        offer, profile, model = five_item_instance
        cost, script = category_distance(offer, profile, model, graph, "skills")
        assert cost == 5.0
        counts = {k: script.count(k) for k in ("insert", "substitute", "delete", "match")}
        assert counts == {"insert": 2, "substitute": 2, "delete": 1, "match": 1}
        assert brute_force_distance(offer, profile, model, graph, "skills") == 5.0

    def test_empty_profile(self, graph):
        model = CostModel({"skills": CategoryCosts(1.0, 1.75, 0.5)})
        cost, script = category_distance(skills("java", "sql", "seo"), [], model, graph, "skills")
        assert cost == 3 * 1.75 and script.count("insert") == 3

    def test_empty_offer_deletes_everything(self, graph):
        model = CostModel({"skills": CategoryCosts(1.0, 1.0, -0.25)})
        cost, script = category_distance([], skills("java", "sql"), model, graph, "skills")
        assert cost == -0.5 and script.count("delete") == 2

    def test_missing_category(self, graph):
        with pytest.raises(ConfigError):
            category_distance(skills("java"), [], unit_model(categories=("education",)), graph, "skills")

    def test_weights_scale_insert_and_substitute_not_delete(self, graph):
        model = CostModel({"skills": CategoryCosts(0.5, 1.0, 0.75)}, path_cutoff=2)
        offer = [Item("java", "skills", 2.0), Item("seo", "skills", 3.0)]
        cost, script = category_distance(offer, skills("cpp", "litigation"), model, graph, "skills")
        by_kind = {op.kind: op.cost for op in script}
        assert by_kind == {"substitute": 0.5 * 2 * 2.0, "insert": 3.0, "delete": 0.75}
        assert cost == 2.0 + 3.0 + 0.75

    def test_additive_scheme(self, graph):
        model = CostModel({"skills": CategoryCosts(0.5, 1.0, 0.75)}, path_cutoff=2, weight_scheme="additive")
        offer = [Item("java", "skills", 2.0), Item("seo", "skills", 3.0), Item("sql", "skills", 4.0)]
        cost, script = category_distance(offer, skills("cpp", "sql"), model, graph, "skills")
        by_kind = {op.kind: op.cost for op in script}
        # substitute 0.5*2 + (2-1); insert 1 + (3-1); an exact match stays free
        assert by_kind == {"substitute": 2.0, "insert": 3.0, "match": 0.0}
        assert cost == 5.0

    def test_negative_dc_can_beat_matching(self, graph):
        model = CostModel({"skills": CategoryCosts(1.0, 0.25, -1.0)})
        cost, script = category_distance(skills("java"), skills("java"), model, graph, "skills")
        assert cost == -0.75
        assert [op.kind for op in script] == ["insert", "delete"]

    def test_absent_concepts_only_match_themselves(self, graph):
        model = unit_model(4)
        cost, script = category_distance(skills("cobol", "java"), skills("cobol", "fortran"), model, graph, "skills")
        assert cost == 2.0 and script.count("match") == 1

    def test_tie_prefers_matches_then_substitutions(self, graph):
        # alpha = 0 makes substitutions as cheap as matches
        model = CostModel({"skills": CategoryCosts(0.0, 1.0, 1.0)}, path_cutoff=2)
        _, script = category_distance(skills("java", "cpp"), skills("cpp", "oop"), model, graph, "skills")
        assert sorted(op.kind for op in script) == ["match", "substitute"]
        # ic + dc == substitution cost: substitution still wins the tie
        model = CostModel({"skills": CategoryCosts(1.0, 0.5, 0.5)}, path_cutoff=1)
        _, script = category_distance(skills("cpp"), skills("c"), model, graph, "skills")
        assert [op.kind for op in script] == ["substitute"]

    def test_order_of_inputs_irrelevant(self, graph):
        rng = random.Random(3)
        vocab = graph.vocabulary("skills")
        for _ in range(50):
            offer, profile, model = random_instance(rng, vocab, 6)
            c1, s1 = category_distance(offer, profile, model, graph, "skills")
            rng.shuffle(offer), rng.shuffle(profile)
            c2, s2 = category_distance(offer, profile, model, graph, "skills")
            assert c1 == c2 and s1 == s2


class TestOracle:
    def test_refuses_large(self, graph):
        big = skills(*graph.vocabulary("skills")[:7])
        with pytest.raises(OracleRefusal):
            brute_force_distance(big, [], unit_model(), graph, "skills")

    def test_identity(self, graph):
        items = skills("java", "html", "seo")
        assert brute_force_distance(items, items, unit_model(4), graph, "skills") == 0.0

    def test_500_random_instances(self, graph):
        rng = random.Random(20240501)
        vocab = graph.vocabulary("skills")
        bad = []
        for _ in range(500):
            offer, profile, model = random_instance(rng, vocab)
            cost, script = category_distance(offer, profile, model, graph, "skills")
            oracle = brute_force_distance(offer, profile, model, graph, "skills")
            if not (cost == oracle == script.cost == category_cost(offer, profile, model, graph, "skills")):
                bad.append((offer, profile, model, cost, oracle))
        assert bad == []


class TestProperties:
    @settings(max_examples=150, deadline=None)
    @given(st.randoms(use_true_random=False))
    def test_script_accounts_for_every_item(self, graph, rnd):
        offer, profile, model = random_instance(rnd, graph.vocabulary("skills"), 8)
        cost, script = category_distance(offer, profile, model, graph, "skills")
        offer_side = sorted(op.offer_concept for op in script if op.kind != "delete")
        profile_side = sorted(op.profile_concept for op in script if op.kind != "insert")
        assert offer_side == sorted(it.concept for it in offer)
        assert profile_side == sorted(it.concept for it in profile)
        assert script.cost == cost
        # every cost sits on the quantisation grid
        assert all((op.cost / TICK).is_integer() for op in script)

    @settings(max_examples=100, deadline=None)
    @given(st.randoms(use_true_random=False))
    def test_set_difference_formula_without_substitutions(self, graph, rnd):
        vocab = graph.vocabulary("languages") + graph.vocabulary("skills")
        a = set(rnd.sample(vocab, rnd.randint(0, 6)))
        b = set(rnd.sample(vocab, rnd.randint(0, 6)))
        ic, dc = rnd.choice([1.0, 0.5, 2.0]), rnd.choice([1.0, 0.25, 3.0])
        # alpha huge so no substitution is ever worth it; then pairing unequal items never helps
        model = CostModel({"skills": CategoryCosts(1e3, ic, dc)}, path_cutoff=1)
        cost, _ = category_distance(skills(*a), skills(*b), model, graph, "skills")
        assert cost == ic * len(a - b) + dc * len(b - a)

    @settings(max_examples=100, deadline=None)
    @given(st.randoms(use_true_random=False))
    def test_bounded_by_sequence_edit_distance(self, rnd):
        # a clique makes every unequal pair substitutable at cost 1
        vocab = [f"c{i}" for i in range(10)]
        clique = load_taxonomy(
            "".join(f"N {c} skills {c}\n" for c in vocab)
            + "".join(f"E {a} {b}\n" for a, b in itertools.combinations(vocab, 2))
        )
        a = rnd.sample(vocab, rnd.randint(0, 6))
        b = rnd.sample(vocab, rnd.randint(0, 6))
        model = CostModel({"skills": CategoryCosts(1.0, 1.0, 1.0)}, path_cutoff=1)
        cost, _ = category_distance(skills(*a), skills(*b), model, clique, "skills")
        assert cost <= unit_edit_distance(a, b)
        assert cost == max(len(a), len(b)) - len(set(a) & set(b))

    @settings(max_examples=100, deadline=None)
    @given(st.randoms(use_true_random=False), st.floats(0.0, 3.0))
    def test_monotone_in_ic(self, graph, rnd, bump):
        offer, profile, model = random_instance(rnd, graph.vocabulary("skills"), 6)
        c = model.costs("skills")
        raised = model.replace(("skills", "ic"), c.ic + bump)
        low, _ = category_distance(offer, profile, model, graph, "skills")
        high, _ = category_distance(offer, profile, raised, graph, "skills")
        assert high >= low

    def test_fast_path_matches_scripted_path_on_large_sets(self, graph):
        rng = np.random.default_rng(9)
        vocab = graph.vocabulary("skills")
        for _ in range(40):
            offer = [Item(vocab[i], "skills", float(rng.choice([1, 2, 0.5])))
                     for i in rng.choice(len(vocab), 12, replace=False)]
            profile = [Item(vocab[i], "skills") for i in rng.choice(len(vocab), 15, replace=False)]
            model = CostModel({"skills": CategoryCosts(*rng.uniform(0, 2, 2), rng.uniform(-1, 2))})
            cost, script = category_distance(offer, profile, model, graph, "skills")
            assert cost == category_cost(offer, profile, model, graph, "skills") == script.cost
