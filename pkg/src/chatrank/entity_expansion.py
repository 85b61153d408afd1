"""User-model expansion with knowledge-base entity descriptions.

Entities mentioned by a user are optionally filtered by how close they lie to
a domain vector in embedding space; the descriptions of the surviving
entities are tokenized and merged into the user's term counts.
"""

import logging
from collections import Counter
from dataclasses import dataclass

import numpy as np

from chatrank.corpus import tokenize
from chatrank.errors import DataError
from chatrank.user_model import UserModel

log = logging.getLogger(__name__)

VARIANTS = ("none", "all", "domain", "ne_all", "ne_dom")


@dataclass(frozen=True)
class EntityAnnotation:
    user: str
    kind: str
    record_id: str
    surface: str
    entity_id: str
    is_named_entity: bool

    @classmethod
    def from_record(cls, record):
        try:
            ann = cls(str(record["user"]), record["kind"], str(record["record_id"]), str(record["surface"]),
                      str(record["entity_id"]), bool(record["is_named_entity"]))
        except KeyError as exc:
            raise DataError(f"annotation record missing field {exc}") from exc
        if ann.kind not in ("chat", "questionnaire"):
            raise DataError(f"annotation kind must be chat or questionnaire, got {ann.kind!r}")
        return ann


@dataclass(frozen=True)
class CatalogEntry:
    description: str
    is_named_entity: bool


class EntityCatalog(dict):
    """``entity_id -> CatalogEntry``."""

    @classmethod
    def from_records(cls, records):
        catalog = cls()
        for r in records:
            try:
                desc = str(r["description"])
                entry = CatalogEntry(desc, bool(r["is_named_entity"]))
                eid = str(r["entity_id"])
            except KeyError as exc:
                raise DataError(f"catalog record missing field {exc}") from exc
            if not desc.strip():
                raise DataError(f"entity {eid!r} has an empty description")
            catalog[eid] = entry
        return catalog


@dataclass(frozen=True)
class DomainVector:
    domain: str
    vector: np.ndarray
    m: int
    seed: str = ""


def domain_vector(seed, store, m=50, domain=None):
    """Cosine-weighted centroid of the ``m`` keys closest to ``seed`` (seed excluded)."""
    if seed not in store:
        raise DataError(f"seed {seed!r} has no vector")
    if m < 1:
        raise ValueError("m must be >= 1")
    sims = store.cosine_to(store.vector(seed))
    order = sorted((i for i in range(len(store.keys)) if store.keys[i] != seed),
                   key=lambda i: (-sims[i], store.keys[i]))[:m]
    weights = sims[order]
    total = float(weights.sum())
    if total <= 0:
        raise DataError(f"neighbourhood of {seed!r} has non-positive total similarity")
    vec = (weights[:, None] * store.matrix[order]).sum(axis=0) / total
    vec.setflags(write=False)
    return DomainVector(domain, vec, m, seed)


def entity_domain_relatedness(entity_id, dv, store):
    """Cosine between an entity's vector and the domain vector; ``None`` if the entity has no vector."""
    if entity_id not in store:
        return None
    return float(store.cosine_to(dv.vector, [entity_id])[0])


def select_entities(annotations, variant, dv=None, tau=None, store=None):
    """Entity ids from ``annotations`` kept by an expansion variant.

    ``all`` keeps everything, ``ne_all`` keeps named entities, and the
    ``domain``/``ne_dom`` variants further require relatedness >= ``tau``.
    """
    if variant == "none":
        return set()
    if variant not in VARIANTS:
        raise ValueError(f"unknown expansion variant {variant!r}")
    if variant in ("domain", "ne_dom") and (tau is None or dv is None or store is None):
        raise ValueError(f"variant {variant} needs a domain vector, store and tau")
    selected = set()
    for ann in annotations:
        if variant in ("ne_all", "ne_dom") and not ann.is_named_entity:
            continue
        if variant in ("domain", "ne_dom"):
            rel = entity_domain_relatedness(ann.entity_id, dv, store)
            if rel is None or rel < tau:
                continue
        selected.add(ann.entity_id)
    return selected


def description_counts(entity_ids, catalog, stopwords=None, spy=None):
    counts = Counter()
    for eid in sorted(entity_ids):
        entry = catalog.get(eid)
        if entry is None:
            log.warning("entity %r not in catalog, skipped", eid)
            continue
        counts.update(tokenize(entry.description, stopwords))
    if spy is None:
        return dict(counts)
    return {t: c * spy.get(t) for t, c in counts.items()}


def expand_user_model(model, selected, catalog, spy=None, stopwords=None):
    """Add description tokens of ``selected`` entities to ``model`` and renormalize.

    With ``spy``, each added count is scaled by the term's domain weight.
    Entity names themselves are not added.
    """
    if not selected:
        return model
    extra = description_counts(selected, catalog, stopwords, spy)
    counts = Counter(model.term_counts)
    for t in sorted(extra):
        counts[t] += extra[t]
    return UserModel.from_counts(model.user, model.source, model.scope_config, model.domain,
                                 counts, model.record_ids)


def expand_by_neighbors(model, selected, store, k=10, vocabulary=None):
    """Add the ``k`` embedding neighbours of each entity as unit-count terms.

    Experimental alternative to description expansion; not used by default.
    """
    if not selected:
        return model
    keys = [key for key in store.keys if vocabulary is None or key in vocabulary]
    counts = Counter(model.term_counts)
    for eid in sorted(selected):
        if eid not in store:
            continue
        sims = store.cosine_to(store.vector(eid), keys)
        order = sorted(range(len(keys)), key=lambda i: (-sims[i], keys[i]))
        added = 0
        for i in order:
            if keys[i] == eid:
                continue
            counts[keys[i]] += 1
            added += 1
            if added == k:
                break
    return UserModel.from_counts(model.user, model.source, model.scope_config, model.domain,
                                 counts, model.record_ids)


def pr_points(scores, labels):
    """Precision-recall points, one per distinct score threshold (descending).

    The curve starts at recall 0 with the precision of the first threshold.
    """
    n_pos = sum(1 for y in labels if y)
    if n_pos == 0:
        raise DataError("precision-recall needs at least one positive label")
    pairs = sorted(zip(scores, labels), key=lambda p: -p[0])
    points = []
    tp = fp = 0
    i = 0
    while i < len(pairs):
        s = pairs[i][0]
        while i < len(pairs) and pairs[i][0] == s:
            if pairs[i][1]:
                tp += 1
            else:
                fp += 1
            i += 1
        points.append((tp / n_pos, tp / (tp + fp)))
    return [(0.0, points[0][1])] + points


def pr_auc(scores, labels):
    """Trapezoidal area under the precision-recall curve."""
    pts = pr_points(scores, labels)
    area = 0.0
    for (r0, p0), (r1, p1) in zip(pts, pts[1:]):
        area += (r1 - r0) * (p0 + p1) / 2.0
    return area


def truncated_pr_auc(scores, labels, tau):
    """PR area when entities below ``tau`` are rejected (ranked last, tied)."""
    cut = [s if s >= tau else -np.inf for s in scores]
    return pr_auc(cut, labels)


@dataclass(frozen=True)
class TunedThreshold:
    domain: str
    m: int
    tau: float
    auc: float


def tune_thresholds(gold, store, seeds, ms, taus):
    """Grid-search ``(m, tau)`` per domain maximizing truncated PR-AUC.

    ``gold`` is an iterable of ``(entity_id, domain, is_related)``; ``seeds``
    maps each domain to its seed key. Ties prefer smaller ``m``, then smaller ``tau``.
    """
    gold = list(gold)
    if not gold:
        raise DataError("tuning needs gold-labelled entities")
    by_domain = {}
    for eid, dom, related in gold:
        by_domain.setdefault(dom, []).append((eid, bool(related)))
    result = {}
    for dom in sorted(by_domain):
        items = [(e, y) for e, y in by_domain[dom] if e in store]
        if not items:
            raise DataError(f"no gold entity of domain {dom!r} has a vector")
        labels = [y for _, y in items]
        best = None
        for m in sorted(ms):
            dv = domain_vector(seeds[dom], store, m, dom)
            scores = [entity_domain_relatedness(e, dv, store) for e, _ in items]
            for tau in sorted(taus):
                auc = truncated_pr_auc(scores, labels, tau)
                if best is None or auc > best.auc:
                    best = TunedThreshold(dom, m, tau, auc)
        result[dom] = best
    return result
