"""Ten-fold cross-validation for the kernel ranker."""

from dataclasses import dataclass, field, replace

import numpy as np

from chatrank.errors import DataError
from chatrank.eval.metrics import mean, ndcg_at_k, precision_at_1
from chatrank.rankers.base import rerank
from chatrank.rankers.knrm import knrm_train


@dataclass
class KnrmItem:
    """One (user, query) pair with precomputed kernel features per judged doc.

    ``pools`` maps a pool tag to ``{doc_id: grade}``; ``features`` maps every
    doc id judged in any pool to its feature vector.
    """

    key: tuple
    domain: str
    pools: dict
    features: dict

    def train_pairs(self):
        grades = {}
        for judged in self.pools.values():
            for doc_id, g in judged.items():
                grades[doc_id] = max(g, grades.get(doc_id, 0))
        docs = sorted(grades)
        return [(self.features[p], self.features[n]) for p in docs for n in docs if grades[p] > grades[n]]


@dataclass
class CrossValidationResult:
    pair_metrics: dict
    fold_ndcg: list
    folds: list
    chosen_epochs: list = field(default_factory=list)

    @property
    def mean_ndcg(self):
        return mean(m["ndcg20"] for _, m in sorted(self.pair_metrics.items()))


def assign_folds(items, folds=10, seed=0):
    """Stratified round-robin fold assignment: shuffle within each domain, then deal."""
    if len(items) < folds:
        raise DataError(f"need at least {folds} pairs for {folds}-fold cross-validation, got {len(items)}")
    rng = np.random.default_rng(seed)
    by_domain = {}
    for item in sorted(items, key=lambda it: it.key):
        by_domain.setdefault(item.domain, []).append(item)
    assignment = [[] for _ in range(folds)]
    slot = 0
    for dom in sorted(by_domain):
        group = by_domain[dom]
        for idx in rng.permutation(len(group)):
            assignment[slot % folds].append(group[idx])
            slot += 1
    return assignment


def _score_pool(model, item, tag):
    judged = item.pools.get(tag)
    if not judged:
        return None
    return rerank(sorted(judged), lambda d: model.score_features(item.features[d])), judged


def evaluate_item(model, item):
    out = {}
    ranked = _score_pool(model, item, "random20")
    if ranked is not None:
        ranking, judged = ranked
        out["ndcg20"] = ndcg_at_k(ranking, judged, 20)
        out["p1"] = precision_at_1(ranking, judged)
    ranked = _score_pool(model, item, "top10")
    if ranked is not None:
        ranking, judged = ranked
        out["ndcg_top10"] = ndcg_at_k(ranking, judged, 10)
    return out


def _mean_ndcg(model, items):
    return mean(evaluate_item(model, it)["ndcg20"] for it in items)


def cross_validate_knrm(items, model_init, folds=10, seed=0, epochs=20, lr=0.01):
    """Train on 8 folds, pick the epoch on 1, test on 1; rotate through all folds.

    Epoch 0 (the initial model) is a candidate; ties keep the earlier epoch.
    """
    items = list(items)
    assignment = assign_folds(items, folds, seed)
    pair_metrics = {}
    fold_ndcg = []
    chosen = []
    for k in range(folds):
        test = assignment[k]
        val = assignment[(k + 1) % folds]
        train = [it for j, fold in enumerate(assignment) if j not in (k, (k + 1) % folds) for it in fold]
        pairs = [p for it in train for p in it.train_pairs()]
        best = {"score": _mean_ndcg(model_init, val), "epoch": 0, "model": model_init}

        def track(epoch, model):
            score = _mean_ndcg(model, val)
            if score > best["score"]:
                best.update(score=score, epoch=epoch, model=knrm_copy(model))

        knrm_train(model_init, pairs, epochs=epochs, lr=lr, callback=track)
        chosen.append(best["epoch"])
        model = best["model"]
        for it in test:
            pair_metrics[it.key] = evaluate_item(model, it)
        fold_ndcg.append(_mean_ndcg(model, test))
    return CrossValidationResult(pair_metrics, fold_ndcg, [[it.key for it in f] for f in assignment], chosen)


def knrm_copy(model):
    return replace(model, weights=model.weights.copy())
