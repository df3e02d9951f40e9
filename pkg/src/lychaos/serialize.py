"""Deterministic structured-text files: a versioned header line, then canonical JSON.

Floats are written with ``repr`` so certificates and centres round-trip exactly;
infinities become the strings ``"inf"`` / ``"-inf"``.  Keys are sorted and there
are no timestamps, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import json
import math

from . import __version__
from .errors import MalformedSpec
from .scramble import PairRecord, ScrambleReport, ScrambleWitness, Target
from .shiftops import Norm, SparseVector
from .tree import Ball, Level, NestedTree, TreeReport
from .weights import Side, WeightSeq, make_weights
from .window import DecayCert, DivergenceCert, NotObserved

FORMAT_VERSION = 1
KINDS = ("report", "witness", "tree", "verification")


def fmt(x: float) -> str:
    """Display form: 12 significant digits."""
    if x == math.inf:
        return "inf"
    if x == -math.inf:
        return "-inf"
    return f"{x:.12g}"


def _clean(obj):
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            raise ValueError("NaN in serialized data")
        return obj
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _num(raw) -> float:
    if raw == "inf":
        return math.inf
    if raw == "-inf":
        return -math.inf
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise MalformedSpec(f"expected a number, got {raw!r}")
    return float(raw)


def header(kind: str) -> str:
    return f"# lychaos {kind} v{FORMAT_VERSION}"


def dumps(kind: str, body: dict) -> str:
    if kind not in KINDS:
        raise ValueError(kind)
    doc = dict(body)
    doc["tool_version"] = __version__
    return header(kind) + "\n" + json.dumps(_clean(doc), sort_keys=True, indent=2, allow_nan=False) + "\n"


def loads(text: str) -> tuple[str, dict]:
    first, _, rest = text.partition("\n")
    parts = first.split()
    if len(parts) != 4 or parts[:2] != ["#", "lychaos"] or parts[2] not in KINDS:
        raise MalformedSpec("missing or unknown header line")
    if parts[3] != f"v{FORMAT_VERSION}":
        raise MalformedSpec(f"unsupported format version {parts[3]}")
    try:
        body = json.loads(rest)
    except json.JSONDecodeError as exc:
        raise MalformedSpec(f"bad JSON body: {exc}") from None
    if not isinstance(body, dict):
        raise MalformedSpec("body must be an object")
    return parts[2], body


# ---------------------------------------------------------------------------
# pieces


def vector_out(x: SparseVector) -> list:
    return [[j, s, l] for j, (s, l) in x.entries.items()]


def vector_in(side: Side, raw) -> SparseVector:
    if not isinstance(raw, list):
        raise MalformedSpec("vector must be a list of [index, sign, log] triples")
    entries = {}
    for item in raw:
        if not (isinstance(item, list) and len(item) == 3 and isinstance(item[0], int) and item[1] in (-1, 1)):
            raise MalformedSpec(f"bad vector entry {item!r}")
        if item[0] in entries:
            raise MalformedSpec(f"repeated index {item[0]}")
        entries[item[0]] = (item[1], _num(item[2]))
    return SparseVector(side, entries)


def plain_vector_in(side: Side, raw) -> SparseVector:
    """``[[index, value], ...]`` as written by hand in target and basis files."""
    if not isinstance(raw, list):
        raise MalformedSpec("center must be a list of [index, value] pairs")
    pairs = []
    for item in raw:
        if not (isinstance(item, list) and len(item) == 2 and isinstance(item[0], int)
                and not isinstance(item[0], bool)):
            raise MalformedSpec(f"bad center entry {item!r}")
        pairs.append((item[0], _num(item[1])))
    return SparseVector.from_pairs(side, pairs)


def balls_in(side: Side, raw) -> list[Target]:
    """Target/basis files: a list of ``{"center": [[j, v], ...], "radius": r}``."""
    if isinstance(raw, dict) and "balls" in raw:
        raw = raw["balls"]
    if not isinstance(raw, list) or not raw:
        raise MalformedSpec("expected a non-empty list of balls")
    out = []
    for b in raw:
        if not isinstance(b, dict) or set(b) != {"center", "radius"}:
            raise MalformedSpec(f"ball must have exactly 'center' and 'radius': {b!r}")
        r = _num(b["radius"])
        if not (r > 0 and math.isfinite(r)):
            raise MalformedSpec(f"radius must be positive, got {b['radius']!r}")
        out.append(Target(plain_vector_in(side, b["center"]), r))
    return out


def cert_out(c) -> dict:
    if isinstance(c, DivergenceCert):
        return {"type": "DivergenceCert", "k": c.k, "n": c.n, "window": [c.k - c.n + 1, c.k],
                "log_product": c.log_product, "threshold_used": c.threshold_used}
    if isinstance(c, DecayCert):
        return {"type": "DecayCert", "threshold": c.threshold,
                "entries": [{"m": m, "n": n, "log_product": l} for m, (n, l) in enumerate(c.entries, start=1)]}
    raise TypeError(type(c))


def verdict_out(v) -> dict:
    return {"property": v.property.value, "status": v.status.value,
            "certificates": [cert_out(c) for c in v.certificates],
            "failed": list(v.failed), "covers": [c.value for c in v.covers], "evidence": v.evidence}


def record_out(r: PairRecord) -> dict:
    return {"level": r.level, "i": r.i, "j": r.j, "log_dist_p": r.log_dist_p, "log_dist_q": r.log_dist_q,
            "proximal_ok": r.proximal_ok, "distal_ok": r.distal_ok}


def witness_out(w: WeightSeq, wit: ScrambleWitness, params: dict) -> dict:
    return {"weights": w.describe(), "params": params, "norm": wit.norm.value,
            "p_times": list(wit.p_times), "q_times": list(wit.q_times), "m_indices": list(wit.m_indices),
            "perturbation_index": wit.perturbation_index, "eps": wit.eps,
            "family": [vector_out(z) for z in wit.family],
            "verification": [record_out(r) for r in wit.verification]}


def _int_list(raw, name) -> tuple:
    if not isinstance(raw, list) or any(isinstance(x, bool) or not isinstance(x, int) for x in raw):
        raise MalformedSpec(f"{name} must be a list of integers")
    return tuple(raw)


def _weights_in(body) -> WeightSeq:
    if "weights" not in body:
        raise MalformedSpec("file does not embed its weights")
    return make_weights(body["weights"])


def witness_in(body: dict) -> tuple[WeightSeq, ScrambleWitness]:
    """Weights and witness; stored measurements are dropped on purpose."""
    w = _weights_in(body)
    try:
        fam = tuple(vector_in(w.side, v) for v in body["family"])
        wit = ScrambleWitness(_int_list(body["p_times"], "p_times"), _int_list(body["q_times"], "q_times"),
                              _int_list(body.get("m_indices", []), "m_indices"), fam,
                              body.get("perturbation_index"), body.get("eps"), Norm.parse(body["norm"]))
    except KeyError as exc:
        raise MalformedSpec(f"witness missing {exc.args[0]!r}") from None
    return w, wit


def tree_out(w: WeightSeq, tree: NestedTree, params: dict) -> dict:
    return {"weights": w.describe(), "params": params, "norm": tree.norm.value, "sizes": tree.sizes,
            "basis": [{"center": vector_out(b.center), "radius": b.radius} for b in tree.basis],
            "levels": [{"n": lv.n, "p_time": lv.p_time, "q_time": lv.q_time, "index": lv.index,
                        "log_eps": lv.log_eps,
                        "balls": [{"center": vector_out(b.center), "log_radius": b.log_radius, "parent": b.parent}
                                  for b in lv.balls]} for lv in tree.levels]}


def tree_in(body: dict) -> tuple[WeightSeq, NestedTree]:
    w = _weights_in(body)
    try:
        basis = tuple(Target(vector_in(w.side, b["center"]), _num(b["radius"])) for b in body["basis"])
        levels = []
        for lv in body["levels"]:
            balls = tuple(Ball(vector_in(w.side, b["center"]), _num(b["log_radius"]), b["parent"])
                          for b in lv["balls"])
            levels.append(Level(lv["n"], balls, lv["p_time"], lv["q_time"], lv["index"], _num(lv["log_eps"])))
        return w, NestedTree(basis, tuple(levels), Norm.parse(body["norm"]))
    except (KeyError, TypeError) as exc:
        raise MalformedSpec(f"malformed tree file: {exc}") from None


def scramble_report_out(rep: ScrambleReport) -> dict:
    f = rep.first_failure
    return {"passed": rep.passed, "schedule_ok": rep.schedule_ok,
            "first_failure": record_out(f) if f else None,
            "failures": len(rep.failing()), "records": [record_out(r) for r in rep.records]}


def tree_report_out(rep: TreeReport) -> dict:
    return {"passed": rep.passed, "first_failure": rep.first_failure, "structural": list(rep.structural),
            "levels": [{"n": c.n, "max_log_dist_p": c.max_log_dist_p, "min_log_dist_q": c.min_log_dist_q,
                        "ball_bound_p": c.ball_bound_p, "ball_bound_q": c.ball_bound_q, "ok": c.ok}
                       for c in rep.levels],
            "leaf_pairs_checked": len(rep.leaf_records),
            "leaf_failures": sum(1 for r in rep.leaf_records if not (r.proximal_ok and r.distal_ok))}


def not_observed_out(r: NotObserved) -> dict:
    return {"condition": r.condition, "best": r.best, "found": r.found}
