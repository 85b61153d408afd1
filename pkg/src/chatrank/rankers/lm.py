"""KL-divergence language-model scoring with Dirichlet smoothing.

The document model inside the divergence is ``(tf + mu * p_bg) / (|d| + mu)``.
Query and user divergences are mixed with weight ``lam``; each term's
contribution may be scaled by a domain-specificity weight.
"""

import math

import numpy as np


def _divergence(term_probs, doc, mu, bg, spy, tf_of):
    denom = doc.length + mu
    total = 0.0
    for w, p in term_probs.items():
        if p <= 0:
            continue
        weight = spy.get(w) if spy is not None else 1.0
        p_doc = (tf_of(w) + mu * bg.prob(w)) / denom
        total += weight * p * math.log(p / p_doc)
    return total


def _mixture(q, u, doc, lam, mu, bg, spy, tf_of):
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must lie in [0, 1]")
    if mu <= 0:
        raise ValueError("mu must be positive")
    if lam < 1.0 and u is None:
        raise ValueError("a user model is required when lambda < 1")
    score = 0.0
    # skip a side entirely at lambda 0/1 so the other side cannot leak in
    if lam > 0.0:
        score += lam * _divergence(q.term_probs, doc, mu, bg, spy, tf_of)
    if lam < 1.0:
        score += (1.0 - lam) * _divergence(u.term_probs, doc, mu, bg, spy, tf_of)
    return -score


def score_lm(q, u, doc, lam, mu, bg, spy=None):
    """Negative mixed KL divergence of query and user models from the smoothed document model."""
    tf = doc.tf
    return _mixture(q, u, doc, lam, mu, bg, spy, lambda w: tf.get(w, 0))


def translated_tf(w, doc, store, tau_sim):
    """Similarity-weighted term frequency: ``sum cos(w, t) * tf(t, d)`` over doc terms with cos >= tau_sim.

    ``w`` itself always contributes with similarity 1.
    """
    tf = doc.tf
    total = tf.get(w, 0) * 1.0
    wi = store.index.get(w)
    if wi is None:
        return total
    others = [t for t in sorted(tf) if t != w and t in store.index]
    if not others:
        return total
    idx = [store.index[t] for t in others]
    sims = np.clip(store.unit[idx] @ store.unit[wi], -1.0, 1.0)
    keep = sims >= tau_sim
    if keep.any():
        counts = np.array([tf[t] for t in others], dtype=np.float64)
        total += float(np.dot(sims[keep], counts[keep]))
    return total


def score_lm_embed(q, u, doc, lam, mu, bg, store, spy=None, tau_sim=0.5):
    """``score_lm`` with embedding-translated term frequencies."""
    cache = {}

    def tf_of(w):
        if w not in cache:
            cache[w] = translated_tf(w, doc, store, tau_sim)
        return cache[w]

    return _mixture(q, u, doc, lam, mu, bg, spy, tf_of)
