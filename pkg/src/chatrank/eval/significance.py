"""Two-tailed paired t-test."""

import math
from dataclasses import dataclass

from scipy import stats

ALPHA = 0.05


@dataclass(frozen=True)
class TTestResult:
    t: float
    p: float
    degenerate: bool = False

    def significant(self, alpha=ALPHA):
        return self.p < alpha


def paired_t_test(a, b):
    """Paired t statistic of ``a - b`` and its two-tailed p-value (n - 1 dof).

    Zero-variance differences are flagged ``degenerate``: identical samples
    give ``t = 0, p = 1``; a constant nonzero shift gives ``t = +-inf, p = 0``.
    """
    a = [float(x) for x in a]
    b = [float(x) for x in b]
    if len(a) != len(b):
        raise ValueError("paired samples must have equal length")
    n = len(a)
    if n < 2:
        raise ValueError("need at least two pairs")
    diffs = [x - y for x, y in zip(a, b)]
    m = math.fsum(diffs) / n
    var = math.fsum((d - m) ** 2 for d in diffs) / (n - 1)
    if var == 0.0:
        if m == 0.0:
            return TTestResult(0.0, 1.0, True)
        return TTestResult(math.copysign(math.inf, m), 0.0, True)
    t = m / math.sqrt(var / n)
    p = 2.0 * float(stats.t.sf(abs(t), n - 1))
    return TTestResult(t, min(1.0, p))
