from chatrank.rankers.base import QueryModel, ScoredDoc, rerank
from chatrank.rankers.bm25 import score_bm25
from chatrank.rankers.knrm import KnrmModel, knrm_features, knrm_score, knrm_train
from chatrank.rankers.lm import score_lm, score_lm_embed

__all__ = [
    "KnrmModel",
    "QueryModel",
    "ScoredDoc",
    "knrm_features",
    "knrm_score",
    "knrm_train",
    "rerank",
    "score_bm25",
    "score_lm",
    "score_lm_embed",
]
