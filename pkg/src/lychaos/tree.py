"""Finite-depth nested-ball construction of a uniformly scrambled set.

Level n holds ``a_n`` closed balls, ``a_1 = 2`` and ``a_{n+1} = 2 a_n + 2``:
ball i of level n has children in slots i and ``a_n + i`` of level n+1, and two
fresh balls are placed inside the basis set ``O_{n+1}``.  All balls of a level
share one radius.

Every level picks a fresh index ``M_n`` outside all supports used so far and
offsets the pre-centres (parent centres, or the centre of ``O_n``) by
``(i/(a_n+1)) eps_n e_{M_n}``.  Distinct coefficients make the level disjoint,
and coordinate ``M_n - q_n`` alone certifies the distal bound.  The radius is
then shrunk with explicit operator-norm Lipschitz bounds

    ||B^t x - B^t x'|| <= ||B^t|| ||x - x'||,

so (iv) ``d(B^{p_n} x_i, B^{p_n} x_j) < 1/n`` and (v) ``d(B^{q_n} x_i, B^{q_n} x_j) > n``
hold for *every* choice of points in the balls, not just the centres.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .criteria import AnalysisParams, chaos_verdict
from .errors import DeciderNotEstablished, DepthInfeasible, MalformedSpec
from .scramble import (MARGIN, PROXIMAL_FACTOR, Target, _best_end, _first_times, _perturbed,
                       _require_decay, check_levels, distal_threshold)
from .shiftops import Norm, SparseVector, norm, pair_distance_along
from .weights import Side, WeightSeq
from .window import sup_log_norm, table_for

STRUCT_MARGIN = 1e-12
RADIUS_FLOOR_LOG = math.log(1e-300)
EPS_FRACTION = 0.4   # eps_n relative to the enclosing radius
SAFETY = 0.1         # share of the Lipschitz budget kept in reserve
DISJOINT_FRACTION = 0.4  # radius relative to the coefficient gap
DIAMETER_FRACTION = 0.45


def branching(n: int) -> int:
    """a_n with a_0 = 0, a_{n+1} = 2 a_n + 2."""
    a = 0
    for _ in range(n):
        a = 2 * a + 2
    return a


@dataclass(frozen=True)
class Ball:
    center: SparseVector
    log_radius: float
    parent: int | None  # index into the previous level; None for fresh balls

    @property
    def radius(self) -> float:
        return math.exp(self.log_radius)


@dataclass(frozen=True)
class Level:
    n: int
    balls: tuple
    p_time: int
    q_time: int
    index: int  # perturbation index M_n
    log_eps: float


@dataclass(frozen=True)
class NestedTree:
    basis: tuple  # Target per level
    levels: tuple
    norm: Norm = Norm.P1

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def sizes(self) -> list[int]:
        return [len(lv.balls) for lv in self.levels]

    @property
    def p_times(self) -> list[int]:
        return [lv.p_time for lv in self.levels]

    @property
    def q_times(self) -> list[int]:
        return [lv.q_time for lv in self.levels]

    def check_invariants(self) -> list[str]:
        """Structural problems found from the tree data alone; empty when sound."""
        return structural_problems(self)

    def leaves(self) -> list[SparseVector]:
        return [b.center for b in self.levels[-1].balls] if self.levels else []

    def ancestor(self, leaf: int, n: int) -> int | None:
        """Index of the level-n ancestor of a leaf, None if the line starts later."""
        i = leaf
        for lv in reversed(self.levels[n:]):
            i = lv.balls[i].parent
            if i is None:
                return None
        return i


def _dist_log(a: SparseVector, b: SparseVector, p: Norm) -> float:
    return norm(a.sub(b), p)


def _lin(x: float) -> float:
    return 0.0 if x == -math.inf else math.exp(x)


def _level_problems(tree: NestedTree, idx: int) -> list[str]:
    lv = tree.levels[idx]
    n, p = lv.n, tree.norm
    out = []
    if len(lv.balls) != branching(n):
        out.append(f"level {n}: {len(lv.balls)} balls, expected {branching(n)}")
    for i, b in enumerate(lv.balls):
        if not 2 * b.radius < 1 / n:
            out.append(f"level {n} ball {i + 1}: diameter {2 * b.radius:.12g} not below 1/{n}")
    balls = lv.balls
    for i in range(len(balls)):
        for j in range(i + 1, len(balls)):
            d = _lin(_dist_log(balls[i].center, balls[j].center, p))
            if not d > balls[i].radius + balls[j].radius + STRUCT_MARGIN:
                out.append(f"level {n}: balls {i + 1} and {j + 1} not disjoint")
    prev = tree.levels[idx - 1].balls if idx > 0 else ()
    fresh = 0
    basis = tree.basis[idx]
    for i, b in enumerate(balls):
        if b.parent is None:
            host_c, host_r = basis.center, basis.radius
            fresh += 1
        else:
            if not 0 <= b.parent < len(prev):
                out.append(f"level {n} ball {i + 1}: dangling parent {b.parent}")
                continue
            host_c, host_r = prev[b.parent].center, prev[b.parent].radius
        d = _lin(_dist_log(b.center, host_c, p))
        if not d + b.radius < host_r - STRUCT_MARGIN:
            out.append(f"level {n} ball {i + 1}: not nested in its {'basis set' if b.parent is None else 'parent'}")
    a_prev = len(prev)
    want = [i for i in range(a_prev)] + [i for i in range(a_prev)] + [None, None]
    if [b.parent for b in balls] != want:
        out.append(f"level {n}: parent links do not follow slots i, a_n + i")
    if fresh < 2:
        out.append(f"level {n}: basis set holds {fresh} balls")
    return out


def structural_problems(tree: NestedTree) -> list[str]:
    out = []
    if len(tree.basis) < tree.depth:
        out.append("fewer basis sets than levels")
        return out
    ps, qs = tree.p_times, tree.q_times
    if any(a >= b for a, b in zip(ps, ps[1:])) or any(a >= b for a, b in zip(qs, qs[1:])):
        out.append("schedules not strictly increasing")
    for idx in range(tree.depth):
        out.extend(_level_problems(tree, idx))
    return out


@dataclass(frozen=True)
class LevelCheck:
    n: int
    max_log_dist_p: float
    min_log_dist_q: float
    ball_bound_p: float  # certified upper bound at p_n over whole balls
    ball_bound_q: float  # certified lower bound at q_n over whole balls
    ok: bool


@dataclass(frozen=True)
class TreeReport:
    structural: tuple
    levels: tuple
    leaf_records: tuple
    passed: bool

    @property
    def first_failure(self):
        if self.structural:
            return self.structural[0]
        for lc in self.levels:
            if not lc.ok:
                return f"level {lc.n}: ball-wise bound fails"
        for r in self.leaf_records:
            if not (r.proximal_ok and r.distal_ok):
                return f"leaf pair ({r.i}, {r.j}) at level {r.level}"
        return None


def _extremes(w, centers, t, p, pairs_max: bool) -> float:
    vals = [pair_distance_along(w, centers[i], centers[j], [t], p)[0]
            for i in range(len(centers)) for j in range(i + 1, len(centers))]
    if not vals:
        return -math.inf if pairs_max else math.inf
    return max(vals) if pairs_max else min(vals)


def _ball_bounds(w: WeightSeq, lv: Level, p: Norm) -> tuple[float, float, float, float]:
    centers = [b.center for b in lv.balls]
    r = max(b.radius for b in lv.balls)
    dp = _extremes(w, centers, lv.p_time, p, True)
    dq = _extremes(w, centers, lv.q_time, p, False)
    up = _lin(dp) + 2 * r * math.exp(sup_log_norm(w, lv.p_time))
    down = _lin(dq) - 2 * r * math.exp(sup_log_norm(w, lv.q_time))
    return dp, dq, up, down


def verify_tree(w: WeightSeq, tree: NestedTree) -> TreeReport:
    """Structural invariants, ball-wise Lipschitz bounds and leaf-centre sampling."""
    p = tree.norm
    problems = tuple(structural_problems(tree))
    checks = []
    for lv in tree.levels:
        dp, dq, up, down = _ball_bounds(w, lv, p)
        checks.append(LevelCheck(lv.n, dp, dq, up, down, up < 1 / lv.n and down > lv.n))
    leaves = tree.leaves()

    def level_pairs(n):
        anc = [tree.ancestor(i, n) for i in range(len(leaves))]
        return [(i, j) for i in range(len(leaves)) for j in range(i + 1, len(leaves))
                if anc[i] is not None and anc[j] is not None and anc[i] != anc[j]]

    recs = check_levels(w, leaves, tree.p_times, tree.q_times, p, level_pairs=level_pairs) if leaves else ()
    ok = not problems and all(c.ok for c in checks) and all(r.proximal_ok and r.distal_ok for r in recs)
    return TreeReport(problems, tuple(checks), recs, ok)


# ---------------------------------------------------------------------------
# construction


def _hull(vectors, extra=()) -> tuple[int, int] | None:
    idx = [j for v in vectors for j in v.support] + list(extra)
    return (min(idx), max(idx)) if idx else None


def _log_sub(a: float, b: float) -> float:
    """log(exp(a) - exp(b)), -inf when not positive."""
    if b == -math.inf:
        return a
    if b >= a:
        return -math.inf
    return a + math.log1p(-math.exp(b - a))


def build_nested_tree(w: WeightSeq, basis_sets, depth: int = 4, p: Norm = Norm.P1,
                      params: AnalysisParams = AnalysisParams()) -> NestedTree:
    basis = [b if isinstance(b, Target) else Target(*b) for b in basis_sets]
    if depth < 1:
        raise MalformedSpec("depth must be at least 1")
    if len(basis) < depth:
        raise MalformedSpec(f"depth {depth} needs {depth} basis sets, got {len(basis)}")
    for b in basis:
        if b.center.side is not w.side:
            raise MalformedSpec("basis set side differs from the weights")
        if not (b.radius > 0 and math.isfinite(b.radius)):
            raise MalformedSpec(f"basis radius must be positive, got {b.radius!r}")
    verdict = chaos_verdict(w, params)
    if not verdict.established:
        raise DeciderNotEstablished(f"chaos not established within horizon ({', '.join(verdict.failed)} failed)")
    if w.side is Side.BILATERAL:
        _require_decay(w, params)

    table = table_for(w, params.k_lo, params.k_hi, params.horizon)
    used = [b.center for b in basis]
    levels: list[Level] = []
    prev: list[Ball] = []
    p_prev = q_prev = 0
    for n in range(1, depth + 1):
        host = basis[n - 1]
        a_prev = len(prev)
        a_n = 2 * a_prev + 2
        enclosing = math.log(host.radius) if not prev else min(math.log(host.radius), prev[0].log_radius)
        log_eps = math.log(EPS_FRACTION) + enclosing
        log_gap = log_eps - math.log(a_n + 1)

        # distal time and fresh index
        thr = distal_threshold(n, a_n, math.exp(log_eps), MARGIN)
        hull = _hull(used, [lv.index for lv in levels])
        hit = None
        for q in range(q_prev + 1, params.horizon + 1):
            best = _best_end(w, table, q, params.k_lo, params.k_hi, thr, hull, 0)
            if best is not None:
                hit = (q, best[0])
                break
        if hit is None:
            raise DepthInfeasible(f"no distal window within horizon {params.horizon} at level {n}", n - 1)
        q_n, big_m = hit

        pre = [b.center for b in prev] * 2 + [host.center, host.center]
        parents = list(range(a_prev)) * 2 + [None, None]
        centers = [_perturbed(c, big_m, math.log(i / (a_n + 1)) + log_eps)
                   for i, c in enumerate(pre, start=1)]
        used = used + centers

        # proximal time
        sup = _hull(centers)
        if w.side is Side.UNILATERAL:
            p_n = max(p_prev + 1, sup[1])
        else:
            s = max(abs(sup[0]), abs(sup[1]), 1)
            mass = max(_lin(norm(a.sub(b), Norm.P1)) for a in centers for b in centers)
            got = _first_times(w, -s, s, [-math.log(PROXIMAL_FACTOR * n * mass)],
                               params.horizon + s, start=p_prev)
            if got is None:
                raise DepthInfeasible(f"no proximal time within horizon {params.horizon} at level {n}", n - 1)
            p_n = got[0]

        # radius from the Lipschitz budgets
        dp = _extremes(w, centers, p_n, p, True)
        dq = _extremes(w, centers, q_n, p, False)
        prox_room = _log_sub(-math.log(n), dp)
        dist_room = _log_sub(dq, math.log(n))
        if prox_room == -math.inf or dist_room == -math.inf:
            raise DepthInfeasible(f"centre distances miss the level-{n} targets", n - 1)
        lip = math.log((1 - SAFETY) / 2)
        log_r = min(prox_room + lip - sup_log_norm(w, p_n),
                    dist_room + lip - sup_log_norm(w, q_n),
                    math.log(DISJOINT_FRACTION) + log_gap,
                    math.log(DIAMETER_FRACTION / n))
        if log_r < RADIUS_FLOOR_LOG:
            raise DepthInfeasible(f"radius underflow at level {n} (log radius {log_r:.12g})", n - 1)
        balls = tuple(Ball(c, log_r, par) for c, par in zip(centers, parents))
        lv = Level(n, balls, p_n, q_n, big_m, log_eps)
        trial = NestedTree(tuple(basis[:n]), tuple(levels + [lv]), p)
        problems = _level_problems(trial, n - 1)
        if problems:
            raise DepthInfeasible(f"{problems[0]} (slack below {STRUCT_MARGIN:g})", n - 1)
        levels.append(lv)
        prev = list(balls)
        p_prev, q_prev = p_n, q_n
    return NestedTree(tuple(basis[:depth]), tuple(levels), p)
