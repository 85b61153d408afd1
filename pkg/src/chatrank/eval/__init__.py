from chatrank.eval.metrics import Judgment, ndcg_at_k, precision_at_1
from chatrank.eval.significance import TTestResult, paired_t_test

__all__ = ["Judgment", "TTestResult", "ndcg_at_k", "paired_t_test", "precision_at_1"]
