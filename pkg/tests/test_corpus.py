import json
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chatrank.corpus import (CorpusStats, TokenizedDoc, background_model, default_stopwords, ingest_documents,
                             read_background_frequencies, tokenize)
from chatrank.errors import DataError


def doc(i, body, domain="books", title=""):
    return {"id": f"d{i}", "domain": domain, "entity_key": f"e{i}", "title": title, "body": body,
            "url": f"http://x/{i}"}


def test_tokenize_empty():
    assert tokenize("") == []


def test_tokenize_lowercases_and_splits():
    assert tokenize("Scandinavian suspense") == ["scandinavian", "suspense"]


def test_tokenize_punctuation_and_stopwords():
    # manual segmentation: the | wine | lover | s | trip | the | best -> drop {the, s}
    assert tokenize("The wine-lover's trip, the BEST!", {"the", "s"}) == ["wine", "lover", "trip", "best"]


def test_tokenize_keeps_digits_and_unicode():
    assert tokenize("15-minute Crème brûlée", set()) == ["15", "minute", "crème", "brûlée"]


def test_tokenize_drops_underscores():
    assert tokenize("snake_case", set()) == ["snake", "case"]


def test_default_stopwords_size():
    words = default_stopwords()
    assert 110 <= len(words) <= 140
    assert {"the", "i", "s", "and"} <= words


@given(st.text())
@settings(max_examples=300)
def test_tokenize_idempotent(text):
    once = tokenize(text)
    assert tokenize(" ".join(once)) == once
    assert all(t and t == t.strip() and t == t.lower() for t in once)


def test_ingest_empty():
    docs, tokenized, stats = ingest_documents([])
    assert docs == [] and tokenized == []
    assert stats.doc_count == 0
    assert stats.avg_doc_len == 0 and not stats.has_avg_doc_len


def test_ingest_average_length():
    _, _, stats = ingest_documents([doc(1, "alpha beta gamma delta"), doc(2, "a1 b2 c3 d4 e5 f6")], set())
    assert stats.avg_doc_len == 5


def test_ingest_rejects_duplicate_id():
    with pytest.raises(DataError, match="d1"):
        ingest_documents([doc(1, "x"), doc(1, "y")])


def test_ingest_rejects_unknown_domain():
    with pytest.raises(DataError, match="music"):
        ingest_documents([doc(1, "rock", domain="music")])


def test_ingest_rejects_empty_body():
    with pytest.raises(DataError):
        ingest_documents([doc(1, "the and of")])


def brute_force_stats(texts, stopwords):
    df, cf = Counter(), Counter()
    total = 0
    for text in texts:
        toks = tokenize(text, stopwords)
        total += len(toks)
        for t in toks:
            cf[t] += 1
        for t in set(toks):
            df[t] += 1
    return dict(df), dict(cf), total


def test_ingest_three_doc_fixture():
    texts = ["red apple green apple", "green pear", "apple pear plum plum"]
    _, tokenized, stats = ingest_documents([doc(i, t) for i, t in enumerate(texts)], set())
    df, cf, total = brute_force_stats(["\n" + t for t in texts], set())
    assert stats.df == df == {"red": 1, "apple": 2, "green": 2, "pear": 2, "plum": 1}
    assert stats.cf == cf == {"red": 1, "apple": 3, "green": 2, "pear": 2, "plum": 2}
    assert stats.total_tokens == total == 10
    assert [t.length for t in tokenized] == [4, 2, 4]


words = st.sampled_from(["alpha", "beta", "gamma", "delta", "eps", "zeta", "eta", "theta"])


@given(st.lists(st.lists(words, min_size=1, max_size=30), min_size=1, max_size=100))
@settings(max_examples=60)
def test_stats_match_recount(bodies):
    texts = [" ".join(b) for b in bodies]
    _, _, stats = ingest_documents([doc(i, t) for i, t in enumerate(texts)], set())
    df, cf, total = brute_force_stats(texts, set())
    assert stats.df == df and stats.cf == cf and stats.total_tokens == total
    assert stats.avg_doc_len * stats.doc_count == stats.total_tokens
    assert isinstance(stats.avg_doc_len, Fraction)
    assert all(stats.df[t] <= stats.doc_count and stats.cf[t] >= stats.df[t] for t in stats.df)


def test_stats_independent_of_order():
    docs = [TokenizedDoc(f"d{i}", toks) for i, toks in enumerate([["a", "b"], ["b", "c", "c"], ["a"]])]
    assert CorpusStats.from_docs(docs) == CorpusStats.from_docs(reversed(docs))


def test_background_single_corpus():
    stats = CorpusStats({"w": 5, "v": 45}, {"w": 5, "v": 45}, 50, 50)
    bg = background_model([stats])
    assert bg.prob("w") == 0.1
    assert bg.prob("unseen") == bg.mass_default == 1 / 500


def test_background_union_equals_pooled_recount():
    a = [TokenizedDoc("a1", ["x", "y", "y"]), TokenizedDoc("a2", ["z"])]
    b = [TokenizedDoc("b1", ["y", "q", "q", "q"])]
    bg = background_model([CorpusStats.from_docs(a), CorpusStats.from_docs(b)])
    pooled = Counter(t for d in a + b for t in d.tokens)
    total = sum(pooled.values())
    assert bg.probabilities == {t: c / total for t, c in pooled.items()}
    assert abs(sum(bg.probabilities.values()) - 1.0) < 1e-9
    assert all(p > 0 for p in bg.probabilities.values())
    assert bg.mass_default < min(bg.probabilities.values())


def test_background_rejects_empty():
    with pytest.raises(DataError):
        background_model([CorpusStats({}, {}, 0, 0)])


def test_background_frequency_file(tmp_path):
    path = tmp_path / "bg.tsv"
    path.write_text("museum\t3\nwine\t1\n", encoding="utf-8")
    bg = background_model([read_background_frequencies(path)])
    assert bg.prob("museum") == 0.75 and bg.prob("wine") == 0.25


def test_stats_roundtrip():
    stats = CorpusStats.from_docs([TokenizedDoc("a", ["x", "y", "x"])])
    assert CorpusStats.from_dict(json.loads(json.dumps(stats.to_dict()))) == stats
