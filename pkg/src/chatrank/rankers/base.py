"""Query models, scored results and pool re-ranking."""

from collections import Counter
from dataclasses import dataclass

from chatrank.corpus import tokenize
from chatrank.errors import DataError


@dataclass(frozen=True)
class QueryModel:
    query_id: str
    domain: str
    term_probs: dict
    term_counts: dict

    @classmethod
    def from_text(cls, query_id, domain, text, stopwords=None):
        counts = Counter(tokenize(text, stopwords))
        if not counts:
            raise DataError(f"query {query_id!r} has no terms")
        total = sum(counts.values())
        counts = dict(sorted(counts.items()))
        return cls(query_id, domain, {t: c / total for t, c in counts.items()}, counts)


@dataclass(frozen=True)
class ScoredDoc:
    doc_id: str
    score: float
    rank: int


def rerank(pool, scorer):
    """Score every doc in ``pool`` and sort by descending score, then doc id.

    ``pool`` holds objects with a ``doc_id`` attribute (or plain ids);
    ``scorer`` maps one pool item to a float.
    """
    pool = list(pool)
    if not pool:
        raise ValueError("cannot rerank an empty pool")
    scored = []
    for item in pool:
        doc_id = item if isinstance(item, str) else item.doc_id
        scored.append((float(scorer(item)), doc_id))
    scored.sort(key=lambda sd: (-sd[0], sd[1]))
    return [ScoredDoc(doc_id, score, rank) for rank, (score, doc_id) in enumerate(scored, start=1)]
