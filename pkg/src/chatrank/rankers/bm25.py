"""Okapi BM25 with the user model folded in as query expansion."""

import math

K1 = 1.5
B = 0.75


def idf(term, stats):
    df = stats.df.get(term, 0)
    n = stats.doc_count
    return math.log((n - df + 0.5) / (df + 0.5) + 1.0)


def expanded_terms(q_terms, u=None):
    """Distinct terms of the query plus the user model's vocabulary."""
    terms = set(q_terms)
    if u is not None:
        terms.update(u.term_counts)
    return sorted(terms)


def score_bm25(q_terms, u, doc, stats, k1=K1, b=B, spy=None):
    avgdl = float(stats.avg_doc_len)
    if avgdl <= 0:
        raise ValueError("BM25 needs a positive average document length")
    tf = doc.tf
    norm = k1 * (1.0 - b + b * doc.length / avgdl)
    score = 0.0
    for w in expanded_terms(q_terms, u):
        f = tf.get(w, 0)
        if f == 0:
            continue
        weight = spy.get(w) if spy is not None else 1.0
        score += weight * idf(w, stats) * f * (k1 + 1.0) / (f + norm)
    return score
