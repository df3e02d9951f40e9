"""Finitely supported vectors and exact powers of backward weighted shifts.

Coefficients are stored as ``(sign, log|coefficient|)``.  ``B_w e_i = w_i e_{i-1}``,
so ``B_w^n e_m = (prod_{j=m-n+1}^{m} w_j) e_{m-n}``; on the unilateral side the
image vanishes once the target index drops to 0.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import MalformedSpec, OutOfDomain, SideMismatch
from .logmath import NEG_INF, from_signed_log, log_add, log_sum_exp, to_signed_log
from .weights import Side, WeightSeq


class Norm(enum.Enum):
    P1 = "1"
    P2 = "2"
    SUP = "inf"

    @classmethod
    def parse(cls, raw) -> "Norm":
        if isinstance(raw, Norm):
            return raw
        text = str(raw).strip().lower()
        aliases = {"1": cls.P1, "l1": cls.P1, "2": cls.P2, "l2": cls.P2,
                   "inf": cls.SUP, "sup": cls.SUP, "c0": cls.SUP, "oo": cls.SUP}
        if text not in aliases:
            raise MalformedSpec(f"norm must be one of 1, 2, inf; got {raw!r}")
        return aliases[text]


@dataclass(frozen=True)
class SparseVector:
    side: Side
    entries: Mapping[int, tuple[int, float]] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for j, (s, l) in self.entries.items():
            if self.side is Side.UNILATERAL and j < 1:
                raise OutOfDomain(f"index {j} outside the unilateral domain j >= 1")
            if s != 0 and l != NEG_INF:
                clean[int(j)] = (1 if s > 0 else -1, float(l))
        object.__setattr__(self, "entries", dict(sorted(clean.items())))

    @classmethod
    def from_pairs(cls, side: Side, pairs: Iterable[tuple[int, float]]) -> "SparseVector":
        """Build from plain ``(index, value)`` pairs; repeated indices are summed."""
        acc: dict[int, tuple[int, float]] = {}
        for j, v in pairs:
            s, l = to_signed_log(float(v))
            if j in acc:
                s, l = log_add(*acc[j], s, l)
            acc[int(j)] = (s, l)
        return cls(side, acc)

    @classmethod
    def basis(cls, side: Side, j: int, value: float = 1.0) -> "SparseVector":
        return cls.from_pairs(side, [(j, value)])

    @classmethod
    def zero(cls, side: Side) -> "SparseVector":
        return cls(side, {})

    @property
    def support(self) -> list[int]:
        return list(self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def value(self, j: int) -> float:
        return from_signed_log(*self.entries.get(j, (0, NEG_INF)))

    def pairs(self) -> list[tuple[int, float]]:
        return [(j, from_signed_log(s, l)) for j, (s, l) in self.entries.items()]

    def add(self, other: "SparseVector", scale_sign: int = 1) -> "SparseVector":
        _same_side(self.side, other.side)
        out = dict(self.entries)
        for j, (s, l) in other.entries.items():
            out[j] = log_add(*out.get(j, (0, NEG_INF)), s * scale_sign, l)
        return SparseVector(self.side, out)

    def sub(self, other: "SparseVector") -> "SparseVector":
        return self.add(other, -1)

    def scaled(self, log_factor: float, sign: int = 1) -> "SparseVector":
        return SparseVector(self.side, {j: (s * sign, l + log_factor) for j, (s, l) in self.entries.items()})

    def l1_log(self) -> float:
        return norm(self, Norm.P1)


def _same_side(a: Side, b: Side):
    if a is not b:
        raise SideMismatch(f"{a.value} vector used with {b.value} operand")


def apply_power(w: WeightSeq, x: SparseVector, n: int) -> SparseVector:
    """``B_w^n x`` computed entry-wise in log-magnitude form."""
    _same_side(w.side, x.side)
    if n < 0:
        raise MalformedSpec("power must be non-negative")
    if n == 0 or x.is_zero():
        return x
    out = {}
    for m, (s, l) in x.entries.items():
        target = m - n
        if w.side is Side.UNILATERAL and target < 1:
            continue
        out[target] = (s, l + window_log(w, m - n + 1, m))
    return SparseVector(x.side, out)


def window_log(w: WeightSeq, a: int, b: int) -> float:
    """Correctly rounded ``sum_{j=a..b} log|w_j|`` (no table needed)."""
    if b < a:
        return 0.0
    return math.fsum(w.log_weights(a, b).tolist())


def norm(x: SparseVector, p: Norm) -> float:
    """Log of the ``p``-norm; ``-inf`` flags the zero vector."""
    logs = [l for _, l in x.entries.values()]
    if not logs:
        return NEG_INF
    if p is Norm.P1:
        return log_sum_exp(logs)
    if p is Norm.P2:
        return 0.5 * log_sum_exp([2 * l for l in logs])
    return max(logs)


def orbit_log_norms(w: WeightSeq, x: SparseVector, times: Sequence[int], p: Norm) -> list[float]:
    return [norm(apply_power(w, x, n), p) for n in times]


def pair_distance_along(w: WeightSeq, x: SparseVector, y: SparseVector, times: Sequence[int],
                        p: Norm) -> list[float]:
    """``log ||B^n x - B^n y||_p`` for each n in ``times``."""
    _same_side(w.side, x.side)
    _same_side(x.side, y.side)
    out = []
    for n in times:
        if n < 0:
            raise MalformedSpec("times must be non-negative")
        out.append(norm(apply_power(w, x, n).sub(apply_power(w, y, n)), p))
    return out


def is_zero_log(value: float) -> bool:
    return value == NEG_INF
