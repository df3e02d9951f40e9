"""Bounded non-zero weight sequences over the naturals or the integers.

Only moduli enter any computation downstream: a backward shift with weights
``w`` is conjugate, through a diagonal isometry, to the one with weights ``|w|``,
so norms and orbit distances agree.  Signs and complex phases are accepted in
descriptions and echoed back, never used.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Any, Mapping, Sequence, Union

import numpy as np

from .errors import BoundViolation, MalformedSpec, OutOfDomain, ZeroWeight
from .logmath import dd_diff, dd_prefix


class Side(str, enum.Enum):
    UNILATERAL = "unilateral"
    BILATERAL = "bilateral"


Number = Union[int, float, complex]


@dataclass(frozen=True)
class Explicit:
    """Listed values at ``start, start+1, ...``; ``default`` everywhere else."""

    values: tuple
    start: int
    default: Number


@dataclass(frozen=True)
class Periodic:
    """``w_j = pattern[(j - anchor) mod len(pattern)]``."""

    pattern: tuple
    anchor: int


@dataclass(frozen=True)
class Segment:
    lo: int | None  # None: unbounded below
    hi: int | None  # None: unbounded above
    value: Number


@dataclass(frozen=True)
class PiecewiseGeometric:
    """Contiguous index intervals, each carrying one constant weight.

    Window products inside a segment are geometric in the window length.
    """

    segments: tuple


WeightData = Union[Explicit, Periodic, PiecewiseGeometric]

KINDS = {Explicit: "explicit", Periodic: "periodic", PiecewiseGeometric: "piecewise_geometric"}


def _parse_number(raw: Any) -> Number:
    if isinstance(raw, bool):
        raise MalformedSpec(f"boolean is not a weight value: {raw!r}")
    if isinstance(raw, (int, float, complex)):
        value = raw
    elif isinstance(raw, str):
        text = raw.strip()
        try:
            value = float(text)
        except ValueError:
            try:
                value = complex(text.replace(" ", ""))
            except ValueError:
                raise MalformedSpec(f"unparseable weight value {raw!r}") from None
    else:
        raise MalformedSpec(f"unsupported weight value {raw!r}")
    if not math.isfinite(abs(value)):
        raise MalformedSpec(f"non-finite weight value {raw!r}")
    return value


def _magnitude_log(value: Number, bound: float) -> float:
    mag = abs(value)
    if mag == 0:
        raise ZeroWeight(f"weight value {value!r} is zero")
    if mag > bound:
        raise BoundViolation(f"|{value!r}| = {mag} exceeds bound_M = {bound}")
    return math.log(mag)


@dataclass(frozen=True, eq=False)
class WeightSeq:
    side: Side
    data: WeightData
    bound_M: float

    def __post_init__(self):
        # Precompute log-moduli once; everything else is read-only lookups.
        d = self.data
        logs = lambda vals: np.array([_magnitude_log(v, self.bound_M) for v in vals], dtype=float)
        if isinstance(d, Explicit):
            object.__setattr__(self, "_logs", logs(d.values))
            object.__setattr__(self, "_default_log", _magnitude_log(d.default, self.bound_M))
        elif isinstance(d, Periodic):
            object.__setattr__(self, "_logs", logs(d.pattern))
        else:
            object.__setattr__(self, "_logs", logs([s.value for s in d.segments]))
        self._logs.setflags(write=False)

    @property
    def kind(self) -> str:
        return KINDS[type(self.data)]

    @property
    def domain_lo(self) -> int | None:
        return 1 if self.side is Side.UNILATERAL else None

    def in_domain(self, j: int) -> bool:
        return self.side is Side.BILATERAL or j >= 1

    def _check(self, j: int):
        if not self.in_domain(j):
            raise OutOfDomain(f"index {j} is outside the unilateral domain j >= 1")

    def log_weight(self, j: int) -> float:
        """log|w_j| in natural-log units."""
        self._check(j)
        d = self.data
        if isinstance(d, Explicit):
            i = j - d.start
            return float(self._logs[i]) if 0 <= i < len(self._logs) else self._default_log
        if isinstance(d, Periodic):
            return float(self._logs[(j - d.anchor) % len(self._logs)])
        for idx, seg in enumerate(d.segments):
            if (seg.lo is None or seg.lo <= j) and (seg.hi is None or j <= seg.hi):
                return float(self._logs[idx])
        raise AssertionError("segments cover the domain")  # guarded by make_weights

    def log_weights(self, lo: int, hi: int) -> np.ndarray:
        """Vectorised ``log|w_j|`` for ``j = lo..hi``."""
        self._check(lo)
        if hi < lo:
            return np.empty(0)
        d = self.data
        idx = np.arange(lo, hi + 1)
        if isinstance(d, Explicit):
            out = np.full(len(idx), self._default_log)
            a, b = max(lo, d.start), min(hi, d.start + len(self._logs) - 1)
            if a <= b:
                out[a - lo : b - lo + 1] = self._logs[a - d.start : b - d.start + 1]
            return out
        if isinstance(d, Periodic):
            return self._logs[(idx - d.anchor) % len(self._logs)]
        out = np.empty(len(idx))
        for i, seg in enumerate(d.segments):
            a = lo if seg.lo is None else max(lo, seg.lo)
            b = hi if seg.hi is None else min(hi, seg.hi)
            if a <= b:
                out[a - lo : b - lo + 1] = self._logs[i]
        return out

    def admissible_end(self, n: int) -> int | None:
        """Smallest end index k for which the window [k-n+1, k] is an orbit step.

        Unilateral: ``B^n e_k`` is non-zero only when ``k - n >= 1``, so the first
        factor is always ``w_2`` or later.
        """
        return n + 1 if self.side is Side.UNILATERAL else None

    def covering_range(self, n: int) -> tuple[int, int]:
        """End-index range guaranteed to contain a maximising window of length n.

        Outside the returned band every window repeats (in value) one inside it,
        so ``sup_k`` over the band is the exact operator-norm supremum.
        """
        if n < 1:
            raise MalformedSpec("window length must be positive")
        adm = self.admissible_end(n)
        base = adm if adm is not None else 0
        d = self.data
        if isinstance(d, Explicit):
            if not d.values:
                return base, base
            lo, hi = d.start - 1, d.start + len(d.values) - 1 + n
        elif isinstance(d, Periodic):
            return base, base + len(d.pattern) - 1
        else:
            starts = [s.lo for s in d.segments[1:]]
            if not starts:
                return base, base
            lo, hi = starts[0] - 1, starts[-1] + n - 1
        if adm is not None:
            lo = max(lo, adm)
            hi = max(hi, lo)
        return lo, hi

    def describe(self) -> dict:
        """Canonical key-value description; ``make_weights`` inverts it."""
        d = self.data
        if isinstance(d, Explicit):
            data = {"values": [_echo(v) for v in d.values], "start": d.start, "default": _echo(d.default)}
        elif isinstance(d, Periodic):
            data = {"pattern": [_echo(v) for v in d.pattern], "anchor": d.anchor}
        else:
            data = {"segments": [{"lo": s.lo, "hi": s.hi, "value": _echo(s.value)} for s in d.segments]}
        return {"side": self.side.value, "kind": self.kind, "data": data, "bound_M": self.bound_M}


def _echo(v: Number):
    if isinstance(v, complex):
        return str(v)
    return v


@dataclass(frozen=True)
class LogWindowTable:
    """Compensated prefix sums of ``log|w_j|`` over ``[range_lo, range_hi]``."""

    range_lo: int
    range_hi: int
    logs: np.ndarray
    prefix_hi: np.ndarray
    prefix_lo: np.ndarray

    def pidx(self, j):
        """Position in the prefix arrays of the running sum through index ``j``."""
        return j - self.range_lo + 1

    def log_at(self, j: int) -> float:
        if not self.range_lo <= j <= self.range_hi:
            raise OutOfDomain(f"index {j} outside table [{self.range_lo}, {self.range_hi}]")
        return float(self.logs[j - self.range_lo])

    def window_sum(self, a: int, b: int) -> float:
        """sum_{j=a..b} log|w_j|."""
        if not (self.range_lo <= a and b <= self.range_hi and a <= b):
            raise OutOfDomain(f"window [{a}, {b}] outside table [{self.range_lo}, {self.range_hi}]")
        i, k = self.pidx(a - 1), self.pidx(b)
        return float(dd_diff(self.prefix_hi[k], self.prefix_lo[k], self.prefix_hi[i], self.prefix_lo[i]))

    def windows_ending(self, ends: np.ndarray, n: int) -> np.ndarray:
        """Vectorised window sums over ``[k-n+1, k]`` for each k in ``ends``."""
        k = self.pidx(ends)
        i = k - n
        if len(ends) and (i.min() < 0 or k.max() >= len(self.prefix_hi)):
            raise OutOfDomain("window outside table")
        return dd_diff(self.prefix_hi[k], self.prefix_lo[k], self.prefix_hi[i], self.prefix_lo[i])


def build_table(w: WeightSeq, lo: int, hi: int) -> LogWindowTable:
    if lo > hi:
        raise MalformedSpec(f"empty table range [{lo}, {hi}]")
    if not w.in_domain(lo):
        raise OutOfDomain(f"table range starts at {lo}, outside the unilateral domain")
    logs = w.log_weights(lo, hi)
    ph, pl = dd_prefix(logs)
    for arr in (logs, ph, pl):
        arr.setflags(write=False)
    return LogWindowTable(lo, hi, logs, ph, pl)


# ---------------------------------------------------------------------------
# construction


def _side(raw) -> Side:
    if isinstance(raw, Side):
        return raw
    try:
        return Side(str(raw).lower())
    except ValueError:
        raise MalformedSpec(f"side must be 'unilateral' or 'bilateral', got {raw!r}") from None


def _int(raw, name) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise MalformedSpec(f"{name} must be an integer, got {raw!r}")
    return raw


def _values(raw, name) -> tuple:
    if not isinstance(raw, (list, tuple)):
        raise MalformedSpec(f"{name} must be a list")
    return tuple(_parse_number(v) for v in raw)


def make_weights(desc: Mapping) -> WeightSeq:
    """Build a :class:`WeightSeq` from a key-value description.

    Keys: ``side``, ``kind`` (explicit | periodic | piecewise_geometric),
    ``data`` and optionally ``bound_M`` (defaults to the largest listed modulus).
    """
    if not isinstance(desc, Mapping):
        raise MalformedSpec("weight description must be a mapping")
    unknown = set(desc) - {"side", "kind", "data", "bound_M"}
    if unknown:
        raise MalformedSpec(f"unknown keys {sorted(unknown)}")
    try:
        side, kind, data = _side(desc["side"]), desc["kind"], desc["data"]
    except KeyError as exc:
        raise MalformedSpec(f"missing key {exc.args[0]!r}") from None
    if not isinstance(data, Mapping):
        raise MalformedSpec("data must be a mapping")
    unilateral = side is Side.UNILATERAL

    if kind == "explicit":
        values = _values(data.get("values", []), "values")
        start = _int(data.get("start", 1 if unilateral else 0), "start")
        default = _parse_number(data.get("default", 1.0))
        if unilateral and start < 1:
            raise MalformedSpec("unilateral explicit list must start at j >= 1")
        spec: WeightData = Explicit(values, start, default)
        listed = values + (default,)
    elif kind == "periodic":
        pattern = _values(data.get("pattern", []), "pattern")
        if not pattern:
            raise MalformedSpec("periodic pattern must be non-empty")
        spec = Periodic(pattern, _int(data.get("anchor", 1 if unilateral else 0), "anchor"))
        listed = pattern
    elif kind == "piecewise_geometric":
        raw = data.get("segments")
        if not isinstance(raw, (list, tuple)) or not raw:
            raise MalformedSpec("segments must be a non-empty list")
        segs = []
        for r in raw:
            if not isinstance(r, Mapping) or "value" not in r:
                raise MalformedSpec(f"bad segment {r!r}")
            lo, hi = r.get("lo"), r.get("hi")
            lo = None if lo is None else _int(lo, "segment lo")
            hi = None if hi is None else _int(hi, "segment hi")
            segs.append(Segment(lo, hi, _parse_number(r["value"])))
        _check_segments(segs, unilateral)
        spec = PiecewiseGeometric(tuple(segs))
        listed = tuple(s.value for s in segs)
    else:
        raise MalformedSpec(f"unknown kind {kind!r}")

    for v in listed:
        if abs(v) == 0:
            raise ZeroWeight(f"weight value {v!r} is zero")
    bound = desc.get("bound_M")
    if bound is None:
        bound = max(abs(v) for v in listed)
    if isinstance(bound, bool) or not isinstance(bound, (int, float)) or not bound > 0 or not math.isfinite(bound):
        raise MalformedSpec(f"bound_M must be a positive real, got {bound!r}")
    return WeightSeq(side, spec, float(bound))


def _check_segments(segs: list, unilateral: bool):
    first, last = segs[0], segs[-1]
    if unilateral:
        if first.lo not in (None, 1):
            raise MalformedSpec("unilateral segments must start at j = 1")
    elif first.lo is not None:
        raise MalformedSpec("bilateral segments must start unbounded (lo = null)")
    if last.hi is not None:
        raise MalformedSpec("last segment must be unbounded above (hi = null)")
    for a, b in zip(segs, segs[1:]):
        if a.hi is None or b.lo is None or b.lo != a.hi + 1:
            raise MalformedSpec("segments must be contiguous and ordered")
    for s in segs:
        if s.lo is not None and s.hi is not None and s.lo > s.hi:
            raise MalformedSpec(f"empty segment [{s.lo}, {s.hi}]")


def constant(value: Number, side: Side | str = Side.UNILATERAL, bound_M: float | None = None) -> WeightSeq:
    return periodic([value], side, bound_M=bound_M)


def periodic(pattern: Sequence, side: Side | str = Side.UNILATERAL, anchor: int | None = None,
             bound_M: float | None = None) -> WeightSeq:
    data: dict = {"pattern": list(pattern)}
    if anchor is not None:
        data["anchor"] = anchor
    return make_weights({"side": side, "kind": "periodic", "data": data, "bound_M": bound_M})


def explicit(values: Sequence, side: Side | str = Side.UNILATERAL, start: int | None = None,
             default: Number = 1.0, bound_M: float | None = None) -> WeightSeq:
    data: dict = {"values": list(values), "default": default}
    if start is not None:
        data["start"] = start
    return make_weights({"side": side, "kind": "explicit", "data": data, "bound_M": bound_M})


def piecewise(segments: Sequence[tuple], side: Side | str = Side.BILATERAL,
              bound_M: float | None = None) -> WeightSeq:
    """``segments`` is a list of ``(lo, hi, value)`` with ``None`` for unbounded ends."""
    segs = [{"lo": lo, "hi": hi, "value": v} for lo, hi, v in segments]
    return make_weights({"side": side, "kind": "piecewise_geometric", "data": {"segments": segs},
                         "bound_M": bound_M})


def log_weight(w: WeightSeq, j: int) -> float:
    return w.log_weight(j)
