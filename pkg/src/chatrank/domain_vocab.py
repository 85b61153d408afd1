"""Domain-specificity weights for terms.

A term's weight for a domain is its relative frequency in the domain's
document pool divided by its relative frequency in the pool of all domains.
"""

import math
from dataclasses import dataclass
from pathlib import Path

from chatrank.errors import DataError


@dataclass(frozen=True)
class SpyWeights:
    domain: str
    weights: dict
    default_weight: float = 1.0

    def get(self, term):
        return self.weights.get(term, self.default_weight)

    def __getitem__(self, term):
        return self.get(term)


def spy_weights(domain_pool, all_pool, domain=None, default_weight=1.0):
    """Weights from a domain pool measured against the pool it belongs to.

    Terms of ``all_pool`` missing from ``domain_pool`` get 0; terms missing
    from ``all_pool`` fall back to ``default_weight``.
    """
    if all_pool.total_tokens <= 0:
        raise DataError("spy weights need a non-empty reference pool")
    if default_weight < 0:
        raise ValueError("default_weight must be non-negative")
    dom_total = domain_pool.total_tokens
    all_total = all_pool.total_tokens
    weights = {}
    for term, cf_all in all_pool.cf.items():
        cf_dom = domain_pool.cf.get(term, 0)
        if cf_dom == 0 or cf_all == 0:
            weights[term] = 0.0
        else:
            # single division of exact integers keeps ratios scale-invariant
            weights[term] = (cf_dom * all_total) / (cf_all * dom_total)
    return SpyWeights(domain, weights, default_weight)


def uniform_weights(domain=None, value=1.0):
    """Weights that are ``value`` for every term."""
    return SpyWeights(domain, {}, value)


def apply_spy(terms, weights, mode="weight", tau=None):
    """Reweight or prune a term map by domain specificity.

    ``terms`` maps term to contribution (probability or count); a
    ``UserModel`` or ``QueryModel`` is accepted and its ``term_probs`` used.
    ``mode="weight"`` multiplies each contribution by its weight;
    ``mode="prune"`` keeps terms whose weight is at least ``tau`` and leaves
    their contributions unchanged.
    """
    if hasattr(terms, "term_probs"):
        terms = terms.term_probs
    if mode == "weight":
        return {t: v * weights.get(t) for t, v in terms.items()}
    if mode == "prune":
        if tau is None:
            raise ValueError("prune mode needs tau")
        if tau == math.inf:
            return {}
        return {t: v for t, v in terms.items() if weights.get(t) >= tau}
    raise ValueError(f"unknown mode {mode!r}")


def write_weights(weights):
    return "".join(f"{t}\t{w!r}\n" for t, w in sorted(weights.weights.items()))


def read_weights(path, domain=None, default_weight=1.0):
    weights = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            term, value = line.split("\t")
            weights[term] = float(value)
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: expected term<TAB>weight") from exc
    return SpyWeights(domain, weights, default_weight)
