"""Log-domain arithmetic helpers.

Magnitudes are carried as natural logarithms; ``-inf`` stands for exact zero.
Prefix sums are kept as unevaluated double-double pairs (hi, lo) so that window
differences over tens of thousands of factors stay within an ulp of the
correctly rounded sum.
"""

from __future__ import annotations

import math

import numpy as np

NEG_INF = -math.inf

# Two log-magnitudes of opposite sign closer than this cancel to exact zero.
CANCEL_TOL = 1e-13


def two_sum(a: float, b: float) -> tuple[float, float]:
    """Error-free transformation: a + b == s + e exactly."""
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def dd_prefix(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Compensated running sums with a leading zero.

    Returns arrays ``hi, lo`` of length ``len(values) + 1`` with
    ``hi[i] + lo[i]`` equal to ``sum(values[:i])`` to about 2**-104 relative.
    """
    n = len(values)
    hi = np.zeros(n + 1)
    lo = np.zeros(n + 1)
    s, c = 0.0, 0.0
    for i, v in enumerate(values.tolist()):
        s, e = two_sum(s, v)
        # renormalise so |c| stays below half an ulp of s
        c += e
        s, c = two_sum(s, c)
        hi[i + 1] = s
        lo[i + 1] = c
    return hi, lo


def dd_diff(hi_b, lo_b, hi_a, lo_a):
    """(hi_b + lo_b) - (hi_a + lo_a), works on scalars and numpy arrays alike."""
    s = hi_b - hi_a
    bb = s - hi_b
    e = (hi_b - (s - bb)) + (-hi_a - bb)
    return s + (e + (lo_b - lo_a))


def log_sum_exp(logs) -> float:
    """log(sum(exp(l))) ignoring -inf entries; -inf for an empty/all-zero input."""
    logs = [l for l in logs if l != NEG_INF]
    if not logs:
        return NEG_INF
    m = max(logs)
    return m + math.log(math.fsum(math.exp(l - m) for l in logs))


def log_add(s1: int, l1: float, s2: int, l2: float) -> tuple[int, float]:
    """Signed log-domain addition of s1*exp(l1) and s2*exp(l2).

    Returns ``(sign, log_magnitude)``; an exact zero is ``(0, -inf)``.
    """
    if l1 == NEG_INF:
        return (s2, l2) if l2 != NEG_INF else (0, NEG_INF)
    if l2 == NEG_INF:
        return s1, l1
    if l1 < l2:
        s1, l1, s2, l2 = s2, l2, s1, l1
    d = l2 - l1
    if s1 == s2:
        return s1, l1 + math.log1p(math.exp(d))
    if -d <= CANCEL_TOL:
        return 0, NEG_INF
    return s1, l1 + math.log1p(-math.exp(d))


def to_signed_log(value: float) -> tuple[int, float]:
    if value == 0:
        return 0, NEG_INF
    return (1 if value > 0 else -1), math.log(abs(value))


def from_signed_log(sign: int, logmag: float) -> float:
    if sign == 0 or logmag == NEG_INF:
        return 0.0
    return sign * math.exp(logmag)
