"""Brute-force reference computations, independent of the library internals.

Everything here works on plain Python/numpy weight functions ``wt(j) -> float``
and dense truncated matrices; nothing is imported from ``lychaos`` except for
building inputs in the tests themselves.
"""

import math

import numpy as np


def shift_matrix(wt, lo, hi, unilateral=False):
    """Matrix of B_w on span{e_lo..e_hi}: column of e_i holds w_i at row i-1."""
    size = hi - lo + 1
    mat = np.zeros((size, size))
    for i in range(lo, hi + 1):
        if i - 1 < lo:
            continue  # target falls off the truncation (or off the domain)
        if unilateral and i - 1 < 1:
            continue
        mat[i - 1 - lo, i - lo] = abs(wt(i))
    return mat


def log_norm_oracle(wt, n, k_lo, k_hi, unilateral=False):
    """log of the max column l1 sum of B^n over columns k_lo..k_hi.

    Built on [k_lo - n, k_hi] so every image of the selected columns is kept.
    Returns -inf when all selected columns vanish.
    """
    lo = k_lo - n
    if unilateral:
        lo = max(lo, 1)
    mat = shift_matrix(wt, lo, k_hi, unilateral)
    power = np.linalg.matrix_power(mat, n)
    cols = power[:, k_lo - lo:k_hi - lo + 1]
    best = np.abs(cols).sum(axis=0).max()
    return math.log(best) if best > 0 else -math.inf


def dense_apply(wt, vec, n, unilateral=False):
    """Apply B_w n times to a dict {index: value} one step at a time."""
    cur = dict(vec)
    for _ in range(n):
        nxt = {}
        for j, v in cur.items():
            if unilateral and j - 1 < 1:
                continue
            nxt[j - 1] = nxt.get(j - 1, 0.0) + v * abs(wt(j))
        cur = {j: v for j, v in nxt.items() if v != 0.0}
    return cur


def dense_norm(vec, p):
    vals = [abs(v) for v in vec.values()]
    if not vals:
        return 0.0
    if p == "1":
        return math.fsum(vals)
    if p == "2":
        return math.sqrt(math.fsum(v * v for v in vals))
    return max(vals)


def brute_best_window(wt, horizon, k_lo, k_hi, unilateral=False):
    """max over ends k and lengths n <= horizon of sum log|w| over [k-n+1, k]."""
    best = -math.inf
    for k in range(k_lo, k_hi + 1):
        for n in range(1, horizon + 1):
            if unilateral and k - n < 1:
                break
            best = max(best, math.fsum(math.log(abs(wt(j))) for j in range(k - n + 1, k + 1)))
    return best


def explicit_fn(values, start, default):
    def wt(j):
        i = j - start
        return values[i] if 0 <= i < len(values) else default
    return wt


def segments_fn(segments):
    def wt(j):
        for lo, hi, v in segments:
            if (lo is None or j >= lo) and (hi is None or j <= hi):
                return v
        raise ValueError(j)
    return wt
