"""Kernel-pooling neural ranker over fixed word embeddings.

Only the linear layer over kernel features is learned; kernel centres and
widths stay fixed, so features can be computed once per query/document pair.
"""

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from chatrank.user_model import top_terms

MAX_QUERY_TERMS = 50
MAX_DOC_TERMS = 5000
EPS = 1e-10


def default_kernels():
    """Exact-match kernel plus ten soft-match kernels at 0.9, 0.7, ..., -0.9."""
    mus = [1.0] + [round(0.9 - 0.2 * i, 10) for i in range(10)]
    sigmas = [1e-3] + [0.1] * 10
    return list(zip(mus, sigmas))


@dataclass
class KnrmModel:
    kernels: list = field(default_factory=default_kernels)
    weights: np.ndarray = None
    bias: float = 0.0
    max_query_terms: int = MAX_QUERY_TERMS
    max_doc_terms: int = MAX_DOC_TERMS
    seed: int = 0

    def __post_init__(self):
        self.kernels = [(float(m), float(s)) for m, s in self.kernels]
        if any(s <= 0 for _, s in self.kernels):
            raise ValueError("kernel widths must be positive")
        if self.weights is None:
            self.weights = np.zeros(len(self.kernels))
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.shape != (len(self.kernels),):
            raise ValueError("need exactly one weight per kernel")
        self.bias = float(self.bias)

    @classmethod
    def initial(cls, seed=0, kernels=None, scale=0.01):
        kernels = default_kernels() if kernels is None else kernels
        rng = np.random.default_rng(seed)
        return cls(kernels, rng.normal(0.0, scale, len(kernels)), 0.0, seed=seed)

    def score_features(self, phi):
        return float(self.weights @ phi + self.bias)

    def to_dict(self):
        return {
            "kernels": [list(k) for k in self.kernels],
            "weights": [float(w) for w in self.weights],
            "bias": self.bias,
            "max_query_terms": self.max_query_terms,
            "max_doc_terms": self.max_doc_terms,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data):
        return cls([tuple(k) for k in data["kernels"]], np.array(data["weights"], dtype=np.float64),
                   data["bias"], data.get("max_query_terms", MAX_QUERY_TERMS),
                   data.get("max_doc_terms", MAX_DOC_TERMS), data.get("seed", 0))

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path):
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def similarity_matrix(q_terms, d_terms, store):
    """Cosine matrix between query and document terms.

    Identical surface forms get 1.0 even without a vector; other pairs with
    an unknown side get 0.
    """
    sim = np.zeros((len(q_terms), len(d_terms)))
    if store is not None and len(store) > 0:
        qi = [store.index.get(t) for t in q_terms]
        di = [store.index.get(t) for t in d_terms]
        qmask = np.array([i is not None for i in qi], dtype=bool)
        dmask = np.array([i is not None for i in di], dtype=bool)
        if qmask.any() and dmask.any():
            qidx = np.array([i for i in qi if i is not None])
            didx = np.array([i for i in di if i is not None])
            qn = store.norms[qidx]
            dn = store.norms[didx]
            qv = np.divide(store.matrix[qidx], qn[:, None], out=np.zeros_like(store.matrix[qidx]), where=qn[:, None] > 0)
            dv = np.divide(store.matrix[didx], dn[:, None], out=np.zeros_like(store.matrix[didx]), where=dn[:, None] > 0)
            sim[np.ix_(qmask, dmask)] = np.clip(qv @ dv.T, -1.0, 1.0)
    dpos = {}
    for j, t in enumerate(d_terms):
        dpos.setdefault(t, []).append(j)
    for i, t in enumerate(q_terms):
        for j in dpos.get(t, ()):
            sim[i, j] = 1.0
    return sim


def kernel_features(sim, kernels):
    """Soft-TF features: per kernel, ``sum_i log(sum_j exp(-(M_ij - mu)^2 / (2 sigma^2)) + eps)``."""
    mus = np.array([m for m, _ in kernels])
    sigmas = np.array([s for _, s in kernels])
    if sim.size == 0:
        return np.zeros(len(kernels))
    diff = sim[:, :, None] - mus[None, None, :]
    pooled = np.exp(-(diff ** 2) / (2.0 * sigmas ** 2)).sum(axis=1)
    return np.log(pooled + EPS).sum(axis=0)


def knrm_features(model, q_terms, d_terms, store):
    q_terms = list(q_terms)[: model.max_query_terms]
    # canonical column order makes the pooled sums independent of input order
    d_terms = sorted(list(d_terms)[: model.max_doc_terms])
    if not q_terms or not d_terms:
        return np.zeros(len(model.kernels))
    return kernel_features(similarity_matrix(q_terms, d_terms, store), model.kernels)


def knrm_score(model, q_terms, d_terms, store):
    """``w . phi + bias``; empty inputs score the bias alone."""
    if not q_terms or not d_terms:
        return model.bias
    return model.score_features(knrm_features(model, q_terms, d_terms, store))


def query_terms(q, u=None, k=MAX_QUERY_TERMS, spy=None):
    """Query terms first (by count), then the user's top terms, up to ``k`` distinct."""
    terms = top_terms(q.term_counts, k)
    if u is not None and len(terms) < k:
        counts = u.term_counts
        if spy is not None:
            counts = {t: c * spy.get(t) for t, c in counts.items()}
            counts = {t: c for t, c in counts.items() if c > 0}
        seen = set(terms)
        for t in top_terms(counts, k + len(terms)) if counts else []:
            if t not in seen:
                terms.append(t)
                seen.add(t)
            if len(terms) == k:
                break
    return terms


def doc_terms(doc, k=MAX_DOC_TERMS):
    """The ``k`` most frequent distinct document terms."""
    return top_terms(doc.tf, k)


def _stack(pairs):
    if isinstance(pairs, tuple) and len(pairs) == 2 and isinstance(pairs[0], np.ndarray) and pairs[0].ndim == 2:
        return pairs
    pos = np.array([p for p, _ in pairs], dtype=np.float64)
    neg = np.array([n for _, n in pairs], dtype=np.float64)
    return pos, neg


def hinge_loss(model, pairs):
    """Mean pairwise hinge loss ``max(0, 1 - s(pos) + s(neg))`` over feature pairs."""
    if len(pairs) == 0:
        return 0.0
    pos, neg = _stack(pairs)
    margins = 1.0 - (pos @ model.weights + model.bias) + (neg @ model.weights + model.bias)
    return float(np.maximum(margins, 0.0).mean())


def hinge_gradient(model, pairs):
    """Gradient of ``hinge_loss`` with respect to ``(weights, bias)``."""
    gw = np.zeros_like(model.weights)
    if len(pairs) == 0:
        return gw, 0.0
    pos, neg = _stack(pairs)
    margins = 1.0 - (pos @ model.weights + model.bias) + (neg @ model.weights + model.bias)
    active = margins > 0.0
    gw = (neg[active] - pos[active]).sum(axis=0) / len(pos)
    # the bias enters both scores and cancels
    return gw, 0.0


def featurize_triples(model, triples, store):
    """Turn ``(q_terms, d_pos_terms, d_neg_terms)`` triples into feature pairs."""
    return [(knrm_features(model, q, dp, store), knrm_features(model, q, dn, store)) for q, dp, dn in triples]


def knrm_train(model, pairs, epochs=1, lr=0.01, store=None, callback=None):
    """Full-batch gradient descent on the pairwise hinge loss.

    ``pairs`` holds ``(phi_pos, phi_neg)`` feature vectors, or
    ``(q_terms, d_pos, d_neg)`` term triples when ``store`` is given.
    ``callback(epoch, model)`` runs after every epoch. Returns a new model;
    the input is not modified.
    """
    if store is not None:
        pairs = featurize_triples(model, pairs, store)
    model = replace(model, weights=model.weights.copy())
    if len(pairs) == 0 or lr == 0:
        return model
    stacked = _stack(pairs)
    for epoch in range(1, epochs + 1):
        gw, gb = hinge_gradient(model, stacked)
        model.weights = model.weights - lr * gw
        model.bias = model.bias - lr * gb
        if callback is not None:
            callback(epoch, model)
    return model
