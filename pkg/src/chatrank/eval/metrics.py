"""Graded relevance metrics over ranked lists."""

import math
from dataclasses import dataclass

from chatrank.errors import DataError

GRADES = (0, 1, 2)
POOL_TAGS = ("random20", "top10")


@dataclass(frozen=True)
class Judgment:
    user: str
    query_id: str
    doc_id: str
    grade: int
    pool_tag: str

    @classmethod
    def from_record(cls, record):
        try:
            j = cls(str(record["user"]), str(record["query_id"]), str(record["doc_id"]),
                    record["grade"], record["pool_tag"])
        except KeyError as exc:
            raise DataError(f"judgment missing field {exc}") from exc
        if j.grade not in GRADES or isinstance(j.grade, bool):
            raise DataError(f"judgment grade must be 0, 1 or 2, got {j.grade!r}")
        if j.pool_tag not in POOL_TAGS:
            raise DataError(f"unknown pool tag {j.pool_tag!r}")
        return j


def _doc_id(item):
    return item if isinstance(item, str) else item.doc_id


def _grades(ranking, judgments):
    grades = []
    for item in ranking:
        doc_id = _doc_id(item)
        if doc_id not in judgments:
            raise DataError(f"no judgment for document {doc_id!r}")
        grades.append(judgments[doc_id])
    return grades


def dcg(grades, k):
    return sum((2 ** g - 1) / math.log2(i + 2) for i, g in enumerate(grades[:k]))


def ndcg_at_k(ranking, judgments, k):
    """NDCG@k with gain ``2^grade - 1``; the ideal ordering sorts the ranked docs' grades.

    ``judgments`` maps doc id to grade. Returns 0 when no ranked doc has a
    positive grade.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    grades = _grades(ranking, judgments)
    ideal = dcg(sorted(grades, reverse=True), k)
    if ideal == 0:
        return 0.0
    return dcg(grades, k) / ideal


def precision_at_1(ranking, judgments):
    if not ranking:
        raise ValueError("empty ranking")
    return 1 if _grades(ranking[:1], judgments)[0] >= 1 else 0


def mean(values):
    """Arithmetic mean with a fixed summation order (``math.fsum``)."""
    values = list(values)
    if not values:
        return float("nan")
    return math.fsum(values) / len(values)
