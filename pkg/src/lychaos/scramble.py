"""Common proximal/distal schedules and uniformly scrambled finite families.

A family ``z_1..z_k`` is built from target balls ``(y_i, r_i)`` as

    z_i = y_i + (i / (k+1)) * eps * e_M,        eps = min r_i / 2,

with a perturbation index ``M`` outside the targets' supports.  Two schedules
then witness uniform scrambling level by level:

* at ``p_n`` every pairwise distance is at most ``1/n`` (proximal),
* at ``q_n`` every pairwise distance is at least ``n`` (distal).

The distal bound only looks at coordinate ``M - q_n`` of ``B^{q_n}(z_i - z_j)``,
which no other coordinate of the difference can reach; so
``||.|| >= |i - j| eps/(k+1) * prod_{[M-q_n+1, M]} |w|`` in every l^p norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .criteria import AnalysisParams, chaos_verdict
from .errors import (DecayNotEstablished, DeciderNotEstablished, DivergenceNotEstablished, MalformedSpec,
                     NotBilateral, TargetsOverlap, VerificationFailed)
from .logmath import NEG_INF
from .shiftops import Norm, SparseVector, norm, pair_distance_along, window_log
from .weights import Side, WeightSeq, build_table
from .window import CONFIRM_SLACK, NotObserved, detect_prefix_decay, end_range, table_for

MARGIN = math.log(2.0)
VERIFY_TOL = 1e-9
PROXIMAL_FACTOR = 3  # basis orbits pushed below 1/(3n)


# ---------------------------------------------------------------------------
# decay schedules


def _decay_profile(w: WeightSeq, lo: int, hi: int, t_max: int) -> np.ndarray:
    """``out[t-1] = max_{j in [lo, hi]} log||B^t e_j||`` for t = 1..t_max (bilateral)."""
    table = build_table(w, lo - t_max + 1, hi)
    ends = np.arange(lo, hi + 1)
    out = np.full(t_max, NEG_INF)
    for t in range(1, t_max + 1):
        out[t - 1] = table.windows_ending(ends, t).max()
    return out


def _exact_band_max(w: WeightSeq, lo: int, hi: int, t: int) -> float:
    return max(window_log(w, j - t + 1, j) for j in range(lo, hi + 1))


def _first_times(w: WeightSeq, lo: int, hi: int, thresholds: list[float], t_max: int,
                 start: int = 0) -> list[int] | None:
    """Smallest increasing times above ``start`` with the band maximum below each threshold."""
    if start >= t_max:
        return None
    prof = _decay_profile(w, lo, hi, t_max)
    out, prev = [], start
    for thr in thresholds:
        hit = None
        for i in (prev + np.flatnonzero(prof[prev:] <= thr + CONFIRM_SLACK)).tolist():
            if _exact_band_max(w, lo, hi, i + 1) <= thr:
                hit = i + 1
                break
        if hit is None:
            return None
        out.append(hit)
        prev = hit
    return out


def _require_decay(w: WeightSeq, params: AnalysisParams):
    if w.side is not Side.BILATERAL:
        raise NotBilateral("decay schedules are bilateral")
    cert = detect_prefix_decay(w, params.horizon, params.theta_dec, params.m_max)
    if isinstance(cert, NotObserved):
        raise DecayNotEstablished(f"prefix decay not observed within horizon {params.horizon}"
                                  f" (smallest prefix log-product {cert.best:.12g})")
    return cert


def proximal_times(w: WeightSeq, levels: int, support: int, p: Norm = Norm.P1,
                   params: AnalysisParams = AnalysisParams(), mass: float = 1.0) -> list[int]:
    """Evaluation times ``p_n`` sending every ``e_j``, ``|j| <= support``, below ``1/(3n mass)``.

    ``mass`` bounds the l1 mass of the vectors that will be evaluated at ``p_n``,
    so their images fall below ``1/(3n)`` by the triangle inequality.  The norm
    parameter does not matter: ``B^t e_j`` has a single non-zero coordinate.
    Unilateral: ``p_n = support + n`` annihilates everything.
    """
    if levels < 1 or support < 1 or not mass > 0:
        raise MalformedSpec("need levels >= 1, support >= 1, mass > 0")
    if w.side is Side.UNILATERAL:
        return [support + n for n in range(1, levels + 1)]
    _require_decay(w, params)
    thr = [-math.log(PROXIMAL_FACTOR * n * mass) for n in range(1, levels + 1)]
    times = _first_times(w, -support, support, thr, params.horizon + support)
    if times is None:
        raise DecayNotEstablished(f"basis orbits on [-{support}, {support}] do not shrink enough"
                                  f" within horizon {params.horizon}")
    return times


def shifted_decay_times(w: WeightSeq, k_lo: int, k_hi: int, levels: int,
                        params: AnalysisParams = AnalysisParams()) -> list[int]:
    """One schedule with ``sum_{[-p_n+k+1, k]} log|w| <= -n ln 2`` for every k in the band."""
    if k_lo > k_hi or levels < 1:
        raise MalformedSpec("need k_lo <= k_hi and levels >= 1")
    _require_decay(w, params)
    thr = [-n * math.log(2.0) for n in range(1, levels + 1)]
    times = _first_times(w, k_lo, k_hi, thr, params.horizon + max(abs(k_lo), abs(k_hi)))
    if times is None:
        raise DecayNotEstablished(f"band [{k_lo}, {k_hi}] does not decay within horizon {params.horizon}")
    return times


# ---------------------------------------------------------------------------
# distal schedule


def distal_threshold(n: int, family_size: int, eps: float, margin: float = MARGIN) -> float:
    return math.log(n * (family_size + 1) / eps) + margin


def _allowed(ends: np.ndarray, exclude: tuple[int, int] | None) -> np.ndarray:
    if exclude is None:
        return ends
    return ends[(ends < exclude[0]) | (ends > exclude[1])]


def _best_end(w, table, q, lo, hi, thr, exclude, m_prev):
    """Window of length q ending in [lo, hi] (outside ``exclude``) reaching thr.

    Preference: ``|m| >= |m_prev| + 1`` with ``m = end - q``, then the largest
    product, then the smallest end.  Returns ``(end, exact_log)`` or None.
    """
    r = end_range(w, q, lo, hi)
    if r is None:
        return None
    ends = _allowed(np.arange(r[0], r[1] + 1), exclude)
    if not len(ends):
        return None
    vals = table.windows_ending(ends, q)
    ok = vals >= thr - CONFIRM_SLACK
    if not ok.any():
        return None
    cand = [(int(k), window_log(w, int(k) - q + 1, int(k))) for k in ends[ok]]
    cand = [(k, v) for k, v in cand if v >= thr]
    if not cand:
        return None
    escalating = [(k, v) for k, v in cand if abs(k - q) >= abs(m_prev) + 1]
    pool = escalating or cand
    return min(pool, key=lambda kv: (-kv[1], kv[0]))


def distal_data(w: WeightSeq, levels: int, params: AnalysisParams = AnalysisParams(),
                family_size: int = 5, eps: float = 1.0, margin: float = MARGIN,
                exclude: tuple[int, int] | None = None) -> tuple[list[int], list[int]]:
    """Distal times ``q_n`` and window offsets ``m_n``.

    Level n needs the window ``[m_n+1, m_n+q_n]`` to reach
    ``log(n (k+1) / eps) + margin``; ``q_n`` is the smallest admissible length
    above ``q_{n-1}``.  The final perturbation index ``M = m_N + q_N`` must also
    carry every earlier level: each ``[M-q_n+1, M]`` is re-checked.
    ``exclude`` is an index band the window ends must avoid.
    """
    if levels < 1 or family_size < 1 or not eps > 0:
        raise MalformedSpec("need levels >= 1, family_size >= 1, eps > 0")
    lo, hi = params.k_lo, params.k_hi
    table = table_for(w, lo, hi, params.horizon)
    q_times, m_idx = [], []
    q_prev, m_prev = 0, 0
    for n in range(1, levels + 1):
        thr = distal_threshold(n, family_size, eps, margin)
        hit = None
        for q in range(q_prev + 1, params.horizon + 1):
            best = _best_end(w, table, q, lo, hi, thr, exclude, m_prev)
            if best is not None:
                hit = (q, best[0])
                break
        if hit is None:
            raise DivergenceNotEstablished(f"no window reaches {thr:.12g} at level {n} within horizon"
                                           f" {params.horizon}")
        q, end = hit
        q_times.append(q)
        m_idx.append(end - q)
        q_prev, m_prev = q, end - q
    big_m = m_idx[-1] + q_times[-1]
    for n, q in enumerate(q_times, start=1):
        thr = distal_threshold(n, family_size, eps, margin)
        lo_j = big_m - q + 1
        if (w.side is Side.UNILATERAL and lo_j < 2) or window_log(w, lo_j, big_m) < thr:
            raise DivergenceNotEstablished(f"perturbation index {big_m} does not carry level {n}")
    return q_times, m_idx


# ---------------------------------------------------------------------------
# witnesses


@dataclass(frozen=True)
class Target:
    center: SparseVector
    radius: float


@dataclass(frozen=True)
class PairRecord:
    level: int
    i: int
    j: int
    log_dist_p: float
    log_dist_q: float
    proximal_ok: bool
    distal_ok: bool


@dataclass(frozen=True)
class ScrambleReport:
    records: tuple
    schedule_ok: bool
    passed: bool
    first_failure: PairRecord | None

    def failing(self) -> list[PairRecord]:
        return [r for r in self.records if not (r.proximal_ok and r.distal_ok)]


@dataclass(frozen=True)
class ScrambleWitness:
    p_times: tuple
    q_times: tuple
    m_indices: tuple
    family: tuple
    perturbation_index: int | None = None
    eps: float | None = None
    norm: Norm = Norm.P1
    verification: tuple = field(default_factory=tuple)

    @property
    def levels(self) -> int:
        return len(self.p_times)


def _strictly_increasing(xs) -> bool:
    return all(a < b for a, b in zip(xs, xs[1:])) and all(x >= 1 for x in xs)


def check_levels(w: WeightSeq, family, p_times, q_times, p: Norm, tol: float = VERIFY_TOL,
                 pairs=None, level_pairs=None) -> tuple:
    """Per-level pair records: distance at ``p_n`` <= 1/n and at ``q_n`` >= n.

    ``pairs`` restricts the checked pairs; ``level_pairs(n)`` overrides it per level.
    Comparisons are made between log-distances with absolute slack ``tol``.
    """
    k = len(family)
    base = pairs if pairs is not None else [(i, j) for i in range(k) for j in range(i + 1, k)]
    out = []
    for n, (pn, qn) in enumerate(zip(p_times, q_times), start=1):
        todo = level_pairs(n) if level_pairs is not None else base
        for i, j in todo:
            dp, = pair_distance_along(w, family[i], family[j], [pn], p)
            dq, = pair_distance_along(w, family[i], family[j], [qn], p)
            out.append(PairRecord(n, i + 1, j + 1, dp, dq,
                                  dp <= -math.log(n) + tol, dq >= math.log(n) - tol))
    return tuple(out)


def verify_scramble(w: WeightSeq, witness: ScrambleWitness, p: Norm | None = None,
                    tol: float = VERIFY_TOL) -> ScrambleReport:
    """Recompute every distance from the family and schedules alone."""
    p = witness.norm if p is None else p
    sched = (_strictly_increasing(list(witness.p_times)) and _strictly_increasing(list(witness.q_times))
             and len(witness.p_times) == len(witness.q_times))
    n_levels = min(len(witness.p_times), len(witness.q_times))
    recs = check_levels(w, list(witness.family), witness.p_times[:n_levels], witness.q_times[:n_levels], p, tol)
    bad = [r for r in recs if not (r.proximal_ok and r.distal_ok)]
    return ScrambleReport(recs, sched, sched and not bad, bad[0] if bad else None)


def _support_hull(vectors) -> tuple[int, int] | None:
    idx = [j for v in vectors for j in v.support]
    return (min(idx), max(idx)) if idx else None


def _check_targets(targets, p: Norm):
    for t in targets:
        if not (t.radius > 0 and math.isfinite(t.radius)):
            raise MalformedSpec(f"target radius must be positive, got {t.radius!r}")
    for a in range(len(targets)):
        for b in range(a + 1, len(targets)):
            ta, tb = targets[a], targets[b]
            d = norm(ta.center.sub(tb.center), p)
            if d < math.log(ta.radius + tb.radius):
                raise TargetsOverlap(f"targets {a + 1} and {b + 1} overlap")


def _perturbed(center: SparseVector, index: int, log_coef: float) -> SparseVector:
    return center.add(SparseVector(center.side, {index: (1, log_coef)}))


def build_scrambled_family(w: WeightSeq, targets, p_times, q_times, m_indices,
                           p: Norm = Norm.P1) -> ScrambleWitness:
    """``z_i = y_i + (i/(k+1)) eps e_M`` with ``M = m_N + q_N``, then verified."""
    targets = list(targets)
    k = len(targets)
    if k == 0:
        raise MalformedSpec("a family needs at least one target")
    if not (len(p_times) == len(q_times) == len(m_indices)) or not p_times:
        raise MalformedSpec("schedules must be non-empty and of equal length")
    if not (_strictly_increasing(list(p_times)) and _strictly_increasing(list(q_times))):
        raise MalformedSpec("schedules must be strictly increasing positive integers")
    for t in targets:
        if t.center.side is not w.side:
            raise MalformedSpec("target side differs from the weights")
    _check_targets(targets, p)
    eps = min(t.radius for t in targets) / 2
    big_m = m_indices[-1] + q_times[-1]
    hull = _support_hull([t.center for t in targets])
    if hull is not None and hull[0] <= big_m <= hull[1]:
        raise MalformedSpec(f"perturbation index {big_m} falls inside the target supports {hull}")
    if w.side is Side.UNILATERAL and big_m < 1:
        raise MalformedSpec(f"perturbation index {big_m} outside the unilateral domain")
    family = tuple(_perturbed(t.center, big_m, math.log(i / (k + 1)) + math.log(eps))
                   for i, t in enumerate(targets, start=1))
    draft = ScrambleWitness(tuple(p_times), tuple(q_times), tuple(m_indices), family, big_m, eps, p)
    rep = verify_scramble(w, draft, p)
    if not rep.passed:
        f = rep.first_failure
        where = f"pair ({f.i}, {f.j}) at level {f.level}" if f else "schedule"
        raise VerificationFailed(f"scramble verification failed: {where}", f)
    return ScrambleWitness(draft.p_times, draft.q_times, draft.m_indices, family, big_m, eps, p, rep.records)


def construct_witness(w: WeightSeq, targets, levels: int = 8,
                      params: AnalysisParams = AnalysisParams()) -> ScrambleWitness:
    """Decide, then build schedules and the family for the given targets."""
    targets = list(targets)
    if not targets:
        raise MalformedSpec("a family needs at least one target")
    verdict = chaos_verdict(w, params)
    if not verdict.established:
        raise DeciderNotEstablished(f"chaos not established within horizon ({', '.join(verdict.failed)} failed)")
    p = params.p
    _check_targets(targets, p)
    eps = min(t.radius for t in targets) / 2
    hull = _support_hull([t.center for t in targets])
    q_times, m_idx = distal_data(w, levels, params, family_size=len(targets), eps=eps, exclude=hull)
    big_m = m_idx[-1] + q_times[-1]
    support = max([abs(big_m)] + ([abs(hull[0]), abs(hull[1])] if hull else []))
    mass = 1.0
    if len(targets) > 1:
        mass = max(math.exp(norm(a.center.sub(b.center), Norm.P1)) for a in targets for b in targets) + eps
    p_times = proximal_times(w, levels, support, p, params, mass=mass)
    return build_scrambled_family(w, targets, p_times, q_times, m_idx, p)
