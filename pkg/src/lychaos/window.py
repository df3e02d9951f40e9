"""Window products of weights: operator norms and limit-condition certificates.

Index convention: a window of length ``n`` ending at ``k`` is ``[k-n+1, k]``,
the ``n`` factors picked up by ``B_w^n e_k``.  Hence

    log ||B_w^n|| = sup_k  sum_{j=k-n+1}^{k} log|w_j|

with ``k`` ranging over all integers (bilateral) or ``k >= n + 1`` (unilateral).
Ranges passed as ``k_lo, k_hi`` are ranges of *end* indices.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import EmptyRange, MalformedSpec, NotBilateral
from .logmath import dd_diff
from .shiftops import window_log
from .weights import LogWindowTable, Side, WeightSeq, build_table

REPLAY_TOL = 1e-12
# Table sums near a threshold are re-decided with a correctly rounded sum, so
# certificates do not depend on where the serving table happens to start.
CONFIRM_SLACK = 1e-9


@dataclass(frozen=True)
class DivergenceCert:
    """A window ``[k-n+1, k]`` whose log-product reaches ``threshold_used``."""

    k: int
    n: int
    log_product: float
    threshold_used: float

    def replay(self, w: WeightSeq, tol: float = REPLAY_TOL) -> bool:
        if self.n < 1 or self.log_product < self.threshold_used:
            return False
        if w.side is Side.UNILATERAL and self.k - self.n < 1:
            return False
        again = window_log(w, self.k - self.n + 1, self.k)
        return abs(again - self.log_product) <= tol and again >= self.threshold_used - tol


@dataclass(frozen=True)
class DecayCert:
    """Prefix windows ``[-n_m+1, 0]`` with log-product at most ``-threshold * m``."""

    entries: tuple  # ((n_1, log_1), (n_2, log_2), ...)
    threshold: float

    @property
    def times(self) -> list[int]:
        return [n for n, _ in self.entries]

    def replay(self, w: WeightSeq, tol: float = REPLAY_TOL) -> bool:
        if w.side is not Side.BILATERAL:
            return False
        prev = 0
        for m, (n, logp) in enumerate(self.entries, start=1):
            bound = -self.threshold * m
            if n <= prev or logp > bound:
                return False
            again = window_log(w, -n + 1, 0)
            if abs(again - logp) > tol or again > bound + tol:
                return False
            prev = n
        return True


@dataclass(frozen=True)
class NotObserved:
    """No certificate within the horizon.

    ``best`` is the extremal log-product seen (largest for divergence, smallest for
    decay); ``found`` counts decay levels that were certified before running out.
    """

    condition: str
    best: float
    found: int = 0


def end_range(w: WeightSeq, n: int, k_lo: int, k_hi: int) -> tuple[int, int] | None:
    adm = w.admissible_end(n)
    lo = k_lo if adm is None else max(k_lo, adm)
    return (lo, k_hi) if lo <= k_hi else None


def table_for(w: WeightSeq, k_lo: int, k_hi: int, n_max: int) -> LogWindowTable:
    """Table serving every window of length <= n_max ending in [k_lo, k_hi]."""
    lo = k_lo - n_max + 1
    if w.side is Side.UNILATERAL:
        lo = max(lo, 1)
    return build_table(w, lo, max(k_hi, lo))


def _covers(table: LogWindowTable | None, lo: int, hi: int) -> bool:
    return table is not None and table.range_lo <= lo and hi <= table.range_hi


def max_window_log_product(w: WeightSeq, n: int, k_lo: int, k_hi: int,
                           table: LogWindowTable | None = None) -> tuple[int, float]:
    """Best window of length n ending in [k_lo, k_hi]; ties go to the smallest k."""
    if n < 1:
        raise MalformedSpec("window length must be positive")
    r = end_range(w, n, k_lo, k_hi)
    if r is None:
        raise EmptyRange(f"no admissible window of length {n} ends in [{k_lo}, {k_hi}]")
    a, b = r
    if not _covers(table, a - n + 1, b):
        table = table_for(w, a, b, n)
    vals = table.windows_ending(np.arange(a, b + 1), n)
    i = int(np.argmax(vals))
    return a + i, float(vals[i])


def op_log_norm(w: WeightSeq, n: int, k_lo: int, k_hi: int,
                table: LogWindowTable | None = None) -> float:
    """log ||B_w^n|| restricted to windows ending in [k_lo, k_hi].

    Equal to the true norm whenever the band holds a maximising window; see
    :func:`sup_log_norm` for a band that always does.
    """
    return max_window_log_product(w, n, k_lo, k_hi, table)[1]


def sup_log_norm(w: WeightSeq, n: int) -> float:
    """Exact log ||B_w^n|| over the whole index domain."""
    if n == 0:
        return 0.0
    return op_log_norm(w, n, *w.covering_range(n))


def _best_window_up_to(table: LogWindowTable, a: int, b: int, n_max: int, s_min: int) -> float:
    """max over k in [a, b], 1 <= n <= n_max, k - n >= s_min of the window sum.

    Sliding-window minimum of the prefix sums: for each end k the best start
    is the smallest prefix among positions k-n_max .. k-1.
    """
    hi, lo = table.prefix_hi, table.prefix_lo
    best = -math.inf
    dq: deque[int] = deque()
    nxt = max(a - n_max, s_min)
    for k in range(a, b + 1):
        while nxt <= k - 1:
            p = table.pidx(nxt)
            while dq and hi[table.pidx(dq[-1])] >= hi[p]:
                dq.pop()
            dq.append(nxt)
            nxt += 1
        while dq and dq[0] < k - n_max:
            dq.popleft()
        if not dq:
            continue
        i, j = table.pidx(dq[0]), table.pidx(k)
        v = dd_diff(hi[j], lo[j], hi[i], lo[i])
        if v > best:
            best = v
    return float(best)


def detect_divergence(w: WeightSeq, horizon: int, k_lo: int, k_hi: int, theta: float,
                      table: LogWindowTable | None = None) -> DivergenceCert | NotObserved:
    """First window (n ascending, then k ascending) with log-product >= theta."""
    if not theta > 0:
        raise MalformedSpec("theta must be positive")
    if horizon < 1:
        raise MalformedSpec("horizon must be at least 1")
    if k_lo > k_hi:
        raise EmptyRange(f"empty range [{k_lo}, {k_hi}]")
    r = end_range(w, 1, k_lo, k_hi)
    if r is None:
        raise EmptyRange(f"no admissible window ends in [{k_lo}, {k_hi}]")
    a, b = r
    if not _covers(table, max(a - horizon + 1, w.domain_lo or -math.inf), b):
        table = table_for(w, a, b, horizon)
    s_min = 1 if w.side is Side.UNILATERAL else table.range_lo - 1
    best = _best_window_up_to(table, a, b, horizon, s_min)
    if best < theta:
        return NotObserved("divergence", best)
    scanned = -math.inf
    for n in range(1, horizon + 1):
        rn = end_range(w, n, a, b)
        if rn is None:
            continue
        ends = np.arange(rn[0], rn[1] + 1)
        vals = table.windows_ending(ends, n)
        for i in np.flatnonzero(vals >= theta - CONFIRM_SLACK).tolist():
            k = int(ends[i])
            exact = window_log(w, k - n + 1, k)
            if exact >= theta:
                return DivergenceCert(k, n, exact, float(theta))
        scanned = max(scanned, float(vals.max()))
    return NotObserved("divergence", scanned)


def prefix_log_products(w: WeightSeq, horizon: int, table: LogWindowTable | None = None) -> np.ndarray:
    """``out[n-1] = sum_{j=-n+1}^{0} log|w_j|`` for n = 1..horizon (bilateral)."""
    if w.side is not Side.BILATERAL:
        raise NotBilateral("prefix products over [-n+1, 0] need a bilateral sequence")
    if not _covers(table, -horizon + 1, 0):
        table = build_table(w, -horizon + 1, 0)
    z = table.pidx(0)
    starts = table.pidx(-np.arange(1, horizon + 1))
    return dd_diff(table.prefix_hi[z], table.prefix_lo[z], table.prefix_hi[starts], table.prefix_lo[starts])


def decay_threshold(theta: float, m: int) -> float:
    return -theta * m


def detect_prefix_decay(w: WeightSeq, horizon: int, theta: float, m_max: int,
                        table: LogWindowTable | None = None) -> DecayCert | NotObserved:
    """Greedy n_1 < ... < n_{m_max} <= horizon with prefix log-product <= -theta*m."""
    if w.side is not Side.BILATERAL:
        raise NotBilateral("prefix decay is a bilateral condition")
    if not theta > 0 or m_max < 1 or horizon < 1:
        raise MalformedSpec("need theta > 0, m_max >= 1, horizon >= 1")
    vals = prefix_log_products(w, horizon, table)
    entries = []
    start = 0
    for m in range(1, m_max + 1):
        bound = decay_threshold(theta, m)
        hit = None
        for i in (start + np.flatnonzero(vals[start:] <= bound + CONFIRM_SLACK)).tolist():
            exact = window_log(w, -i, 0)
            if exact <= bound:
                hit = (i + 1, exact)
                break
        if hit is None:
            return NotObserved("decay", float(vals.min()), found=len(entries))
        entries.append(hit)
        start = hit[0]
    return DecayCert(tuple(entries), float(theta))
