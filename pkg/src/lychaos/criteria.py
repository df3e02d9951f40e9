"""Horizon-relative chaos deciders for backward weighted shifts.

Tail conditions (``sup = inf``, ``liminf = 0``) cannot be settled from finite
data, so every decider answers either *Established* (with replayable
certificates) or *NotObservedWithinHorizon*.  A negative claim is never made.

Decision paths:

* unilateral: divergence of window products is equivalent to Li-Yorke chaos and
  to dense uniform Li-Yorke chaos (the generalized kernel - finitely supported
  vectors - is dense, and the operator is sensitive exactly when norms blow up);
* bilateral: both prefix decay over ``[-n+1, 0]`` and window divergence are
  required.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, field, replace

from .errors import WrongSide
from .shiftops import Norm, SparseVector, apply_power, norm, window_log
from .weights import Side, WeightSeq
from .window import NotObserved, detect_divergence, detect_prefix_decay


class Property(str, enum.Enum):
    LI_YORKE = "LiYorke"
    DENSE_UNIFORM_LI_YORKE = "DenseUniformLiYorke"
    SENSITIVE = "Sensitive"
    DENSE_NULL_ORBITS = "DenseNullOrbits"


class Status(str, enum.Enum):
    ESTABLISHED = "Established"
    NOT_OBSERVED = "NotObservedWithinHorizon"


@dataclass(frozen=True)
class AnalysisParams:
    horizon: int = 10_000
    theta_div: float = 40.0
    theta_dec: float = 40.0
    k_lo: int = -10_000
    k_hi: int = 10_000
    p: Norm = Norm.P1
    m_max: int = 8
    support: int = 3
    seed: int = 0

    def with_(self, **kw) -> "AnalysisParams":
        return replace(self, **kw)

    def echo(self) -> dict:
        return {"horizon": self.horizon, "theta_div": self.theta_div, "theta_dec": self.theta_dec,
                "range": [self.k_lo, self.k_hi], "p": self.p.value, "m_max": self.m_max,
                "support": self.support, "seed": self.seed}


@dataclass(frozen=True)
class ChaosVerdict:
    property: Property
    status: Status
    certificates: tuple
    params: AnalysisParams
    failed: tuple = ()
    covers: tuple = ()
    evidence: dict = field(default_factory=dict)

    @property
    def established(self) -> bool:
        return self.status is Status.ESTABLISHED

    def replay(self, w: WeightSeq) -> bool:
        return all(c.replay(w) for c in self.certificates)


def _divergence(w: WeightSeq, params: AnalysisParams):
    return detect_divergence(w, params.horizon, params.k_lo, params.k_hi, params.theta_div)


def _verdict(prop, results: dict, params, covers=(), evidence=None) -> ChaosVerdict:
    certs = tuple(r for r in results.values() if not isinstance(r, NotObserved))
    failed = tuple(name for name, r in results.items() if isinstance(r, NotObserved))
    ev = dict(evidence or {})
    for name, r in results.items():
        if isinstance(r, NotObserved):
            ev[f"{name}_best"] = r.best
            if name == "decay":
                ev["decay_levels_found"] = r.found
    status = Status.NOT_OBSERVED if failed else Status.ESTABLISHED
    return ChaosVerdict(prop, status, certs, params, failed, tuple(covers) if not failed else (), ev)


def unilateral_verdict(w: WeightSeq, params: AnalysisParams = AnalysisParams()) -> ChaosVerdict:
    """Li-Yorke / dense uniform Li-Yorke chaos of a unilateral shift."""
    if w.side is not Side.UNILATERAL:
        raise WrongSide("unilateral_verdict needs unilateral weights")
    return _verdict(Property.DENSE_UNIFORM_LI_YORKE, {"divergence": _divergence(w, params)}, params,
                    covers=(Property.LI_YORKE, Property.DENSE_UNIFORM_LI_YORKE))


def bilateral_verdict(w: WeightSeq, params: AnalysisParams = AnalysisParams()) -> ChaosVerdict:
    """Both conjuncts: prefix decay and window divergence."""
    if w.side is not Side.BILATERAL:
        raise WrongSide("bilateral_verdict needs bilateral weights")
    results = {
        "decay": detect_prefix_decay(w, params.horizon, params.theta_dec, params.m_max),
        "divergence": _divergence(w, params),
    }
    return _verdict(Property.DENSE_UNIFORM_LI_YORKE, results, params,
                    covers=(Property.LI_YORKE, Property.DENSE_UNIFORM_LI_YORKE))


def sensitivity_verdict(w: WeightSeq, params: AnalysisParams = AnalysisParams()) -> ChaosVerdict:
    """Sensitivity of a linear operator is unbounded norm growth."""
    return _verdict(Property.SENSITIVE, {"divergence": _divergence(w, params)}, params,
                    covers=(Property.SENSITIVE,))


def chaos_verdict(w: WeightSeq, params: AnalysisParams = AnalysisParams()) -> ChaosVerdict:
    if w.side is Side.UNILATERAL:
        return unilateral_verdict(w, params)
    return bilateral_verdict(w, params)


SPOT_CHECKS = 8
BOUND_TOL = 1e-9


def dense_null_orbit_verdict(w: WeightSeq, params: AnalysisParams = AnalysisParams(),
                             support: int | None = None) -> ChaosVerdict:
    """A dense set of vectors whose orbit tends to 0 along one time sequence.

    The dense set is the finitely supported vectors.  Unilateral: each one is
    annihilated after finitely many steps.  Bilateral: along ``t_m = n_m + s``
    (``n_m`` the prefix decay times) every ``e_j`` with ``|j| <= s`` satisfies

        log ||B^{t_m} e_j|| <= D(n_m) + (s - j) log M + R_j,

    ``D`` the prefix log-product and ``R_j`` a constant depending on j only; so
    the orbits go to 0 with D.  Linearity and the triangle inequality extend this
    to every vector supported in ``[-s, s]``, which is spot-checked on random
    vectors drawn with ``params.seed``.
    """
    s = params.support if support is None else support
    if s < 1:
        raise ValueError("support bound must be >= 1")
    p = params.p
    rng = random.Random(params.seed)
    if w.side is Side.UNILATERAL:
        times = list(range(1, params.m_max + 1))
        checks = []
        for j in range(1, s + 1):
            e = SparseVector.basis(w.side, j)
            checks.append({"j": j, "zero_at": j, "ok": apply_power(w, e, j).is_zero()
                           and not apply_power(w, e, j - 1).is_zero()})
        ok = all(c["ok"] for c in checks)
        status = Status.ESTABLISHED if ok else Status.NOT_OBSERVED
        return ChaosVerdict(Property.DENSE_NULL_ORBITS, status, (), params,
                            () if ok else ("annihilation",), (Property.DENSE_NULL_ORBITS,) if ok else (),
                            {"p_times": times, "support": s, "annihilation": checks})

    decay = detect_prefix_decay(w, params.horizon, params.theta_dec, params.m_max)
    if isinstance(decay, NotObserved):
        return _verdict(Property.DENSE_NULL_ORBITS, {"decay": decay}, params)
    log_m = math.log(w.bound_M)
    rows = []
    ok = True
    for (n, d), t in zip(decay.entries, (n + s for n in decay.times)):
        worst = -math.inf
        for j in range(-s, s + 1):
            lnorm = norm(apply_power(w, SparseVector.basis(w.side, j), t), p)
            r_j = window_log(w, 1, j) if j >= 0 else -window_log(w, j + 1, 0)
            bound = d + (s - j) * log_m + r_j
            ok &= lnorm <= bound + BOUND_TOL
            worst = max(worst, lnorm)
        rows.append({"t": t, "decay_log": d, "max_basis_log_norm": worst})
    spot_ok = 0
    times = [n + s for n in decay.times]
    for _ in range(SPOT_CHECKS):
        pairs = [(j, rng.uniform(-1, 1)) for j in range(-s, s + 1)]
        x = SparseVector.from_pairs(w.side, pairs)
        good = True
        for t in times:
            lhs = norm(apply_power(w, x, t), p)
            # triangle inequality over the basis expansion
            rhs = norm(SparseVector.from_pairs(w.side, [
                (j, abs(a) * math.exp(norm(apply_power(w, SparseVector.basis(w.side, j), t), p)))
                for j, a in pairs]), Norm.P1)
            good &= lhs <= rhs + BOUND_TOL
        spot_ok += good
    ok &= spot_ok == SPOT_CHECKS
    status = Status.ESTABLISHED if ok else Status.NOT_OBSERVED
    return ChaosVerdict(Property.DENSE_NULL_ORBITS, status, (decay,), params,
                        () if ok else ("tail_bound",), (Property.DENSE_NULL_ORBITS,) if ok else (),
                        {"p_times": times, "support": s, "orbit_bounds": rows,
                         "spot_checks": {"drawn": SPOT_CHECKS, "passed": spot_ok}})
