import math
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chatrank.corpus import CorpusStats, TokenizedDoc
from chatrank.domain_vocab import SpyWeights, apply_spy, read_weights, spy_weights, uniform_weights, \
    write_weights
from chatrank.errors import DataError


def pool(docs):
    return CorpusStats.from_docs(TokenizedDoc(f"d{i}", toks) for i, toks in enumerate(docs))


def test_domain_exclusive_example():
    dom = CorpusStats({}, {"fjord": 10, "x": 990}, 1, 1000)
    full = CorpusStats({}, {"fjord": 10, "x": 2990}, 3, 3000)
    assert spy_weights(dom, full).get("fjord") == 3.0


def test_absent_from_domain_is_zero_and_unseen_is_default():
    dom = pool([["a", "b"]])
    full = CorpusStats.merge(dom, pool([["c", "c"]]))
    w = spy_weights(dom, full)
    assert w.get("c") == 0.0
    assert w.get("never") == 1.0


def test_empty_reference_pool():
    with pytest.raises(DataError):
        spy_weights(CorpusStats({}, {}, 0, 0), CorpusStats({}, {}, 0, 0))


DOMAIN_DOCS = {
    "books": [["crime", "novel", "price"], ["novel", "author", "great"]],
    "travel": [["beach", "price", "great", "great"], ["museum", "trip"]],
    "food": [["curry", "price"], ["cake", "great", "recipe", "recipe"]],
}


def test_three_domain_recount():
    pools = {d: pool(docs) for d, docs in DOMAIN_DOCS.items()}
    full = CorpusStats.merge(*pools.values())
    for dom, docs in DOMAIN_DOCS.items():
        dom_counts = Counter(t for d in docs for t in d)
        all_counts = Counter(t for ds in DOMAIN_DOCS.values() for d in ds for t in d)
        n_dom, n_all = sum(dom_counts.values()), sum(all_counts.values())
        w = spy_weights(pools[dom], full, dom)
        for term in all_counts:
            expected = (dom_counts[term] / n_dom) / (all_counts[term] / n_all)
            assert w.get(term) == pytest.approx(expected, rel=1e-12)


doc_lists = st.lists(st.lists(st.sampled_from("abcdefg"), min_size=1, max_size=8), min_size=1, max_size=6)


@given(doc_lists, doc_lists, st.integers(2, 4))
@settings(max_examples=200)
def test_duplication_invariance(dom_docs, other_docs, k):
    dom = pool(dom_docs)
    full = CorpusStats.merge(dom, pool(other_docs))
    dup_dom = pool(dom_docs * k)
    dup_full = CorpusStats.merge(dup_dom, pool(other_docs * k))
    assert spy_weights(dom, full).weights == spy_weights(dup_dom, dup_full).weights


@given(doc_lists, doc_lists)
@settings(max_examples=200)
def test_exclusive_term_weight(dom_docs, other_docs):
    dom = pool(dom_docs + [["zz"]])
    full = CorpusStats.merge(dom, pool(other_docs))
    assert spy_weights(dom, full).get("zz") == full.total_tokens / dom.total_tokens


def test_apply_spy_identity_and_prune():
    terms = {"a": 0.5, "b": 0.3, "c": 0.2}
    assert apply_spy(terms, uniform_weights()) == terms
    assert apply_spy(terms, uniform_weights(), "prune", math.inf) == {}
    w = SpyWeights("books", {"a": 2.0, "b": 0.4, "c": 1.0})
    # filter oracle
    assert apply_spy(terms, w, "prune", 1.0) == {t: v for t, v in terms.items() if w.get(t) >= 1.0} \
        == {"a": 0.5, "c": 0.2}
    assert apply_spy(terms, w, "weight") == {"a": 1.0, "b": 0.3 * 0.4, "c": 0.2}


def test_weights_roundtrip(tmp_path):
    w = spy_weights(pool([["a", "b"]]), pool([["a", "b"], ["b", "c"]]), "books")
    path = tmp_path / "w.tsv"
    path.write_text(write_weights(w))
    assert read_weights(path).weights == w.weights
