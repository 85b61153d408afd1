import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from chatrank.errors import DataError
from chatrank.eval.crossval import KnrmItem, assign_folds, cross_validate_knrm
from chatrank.eval.metrics import Judgment, mean, ndcg_at_k, precision_at_1
from chatrank.eval.significance import paired_t_test
from chatrank.rankers import KnrmModel


def test_ndcg_hand_example():
    judged = {"a": 1, "b": 2, "c": 0}
    # hand computation: DCG = 1 + 3/log2(3); IDCG = 3 + 1/log2(3)
    hand = (1 + 3 / math.log2(3)) / (3 + 1 / math.log2(3))
    assert ndcg_at_k(["a", "b", "c"], judged, 3) == pytest.approx(hand, abs=1e-12)
    assert ndcg_at_k(["a", "b", "c"], judged, 3) == pytest.approx(0.7967, abs=1e-4)


@given(st.lists(st.integers(0, 2), min_size=1, max_size=25), st.integers(1, 25))
@settings(max_examples=300)
def test_ndcg_bounds_and_ideal(grades, k):
    ids = [f"d{i}" for i in range(len(grades))]
    judged = dict(zip(ids, grades))
    val = ndcg_at_k(ids, judged, k)
    assert 0.0 <= val <= 1.0 + 1e-12
    assert val == pytest.approx(oracles.ndcg(grades, k), abs=1e-12)
    ideal = sorted(ids, key=lambda d: -judged[d])
    assert ndcg_at_k(ideal, judged, k) == (1.0 if any(grades) else 0.0)


def test_ndcg_missing_judgment():
    with pytest.raises(DataError, match="'x'"):
        ndcg_at_k(["a", "x"], {"a": 1}, 2)


def test_precision_at_1():
    assert precision_at_1(["a", "b"], {"a": 1, "b": 0}) == 1
    assert precision_at_1(["b", "a"], {"a": 2, "b": 0}) == 0


def test_judgment_validation():
    rec = {"user": "u", "query_id": "q", "doc_id": "d", "grade": 3, "pool_tag": "top10"}
    with pytest.raises(DataError):
        Judgment.from_record(rec)
    with pytest.raises(DataError):
        Judgment.from_record(dict(rec, grade=1, pool_tag="other"))
    assert Judgment.from_record(dict(rec, grade=2)).grade == 2


def test_ttest_example_against_quadrature():
    a, b = [1, 2, 3, 4], [0, 0, 0, 0]
    res = paired_t_test(a, b)
    assert res.t == pytest.approx(oracles.t_statistic([1, 2, 3, 4]), abs=1e-12)
    assert res.t == pytest.approx(3.873, abs=1e-3)
    assert res.p == pytest.approx(oracles.t_two_tailed_p(res.t, 3), abs=1e-6)
    assert res.p == pytest.approx(0.0305, abs=1e-3)
    assert res.significant()


@given(st.lists(st.floats(-5, 5), min_size=3, max_size=12), st.integers(0, 1000))
@settings(max_examples=100)
def test_ttest_symmetry(a, seed):
    rng = np.random.default_rng(seed)
    b = list(rng.normal(size=len(a)))
    ab, ba = paired_t_test(a, b), paired_t_test(b, a)
    if not ab.degenerate:
        assert ab.t == pytest.approx(-ba.t, rel=1e-12)
    assert ab.p == pytest.approx(ba.p, rel=1e-12)
    assert 0.0 <= ab.p <= 1.0


def test_ttest_degenerate_branches():
    same = paired_t_test([0.5, 0.5], [0.5, 0.5])
    assert (same.t, same.p, same.degenerate) == (0.0, 1.0, True)
    shift = paired_t_test([1.0, 2.0, 3.0], [0.0, 1.0, 2.0])
    assert shift.t == math.inf and shift.p == 0.0 and shift.degenerate
    with pytest.raises(ValueError):
        paired_t_test([1.0], [2.0])


def test_mean_is_order_independent():
    vals = [0.1] * 10 + [1e16, -1e16]
    assert mean(vals) == mean(reversed(vals))


def make_items(n, domains=("books", "travel")):
    rng = np.random.default_rng(0)
    items = []
    for i in range(n):
        feats = {f"d{j}": rng.normal(size=11) for j in range(5)}
        grades = {f"d{j}": int(rng.integers(0, 3)) for j in range(5)}
        items.append(KnrmItem(("u", f"q{i}"), domains[i % len(domains)], {"random20": grades}, feats))
    return items


def test_folds_cover_each_pair_once():
    items = make_items(20)
    folds = assign_folds(items, 10, seed=3)
    assert [len(f) for f in folds] == [2] * 10
    keys = [it.key for f in folds for it in f]
    assert sorted(keys) == sorted(it.key for it in items)
    assert [[it.key for it in f] for f in assign_folds(items, 10, seed=3)] == [[it.key for it in f] for f in folds]


def test_folds_need_enough_pairs():
    with pytest.raises(DataError):
        assign_folds(make_items(5), 10)


def test_cross_validation_is_deterministic():
    items = make_items(20)
    init = KnrmModel.initial(0)
    r1 = cross_validate_knrm(items, init, folds=10, seed=1, epochs=3, lr=0.05)
    r2 = cross_validate_knrm(items, init, folds=10, seed=1, epochs=3, lr=0.05)
    assert r1.pair_metrics == r2.pair_metrics and r1.chosen_epochs == r2.chosen_epochs
    assert set(r1.pair_metrics) == {it.key for it in items}
    assert all(0 <= e <= 3 for e in r1.chosen_epochs)


def test_train_pairs_prefer_higher_grade():
    f = {"a": np.ones(2), "b": np.zeros(2)}
    item = KnrmItem(("u", "q"), "books", {"random20": {"a": 2, "b": 0}, "top10": {"b": 1}}, f)
    pairs = item.train_pairs()
    assert len(pairs) == 1 and pairs[0][0] is f["a"]
