"""Li-Yorke and dense uniform Li-Yorke chaos for backward weighted shifts."""

__version__ = "0.1.0"

from .criteria import (AnalysisParams, ChaosVerdict, Property, Status, bilateral_verdict, chaos_verdict,
                       dense_null_orbit_verdict, sensitivity_verdict, unilateral_verdict)
from .errors import (BoundViolation, DecayNotEstablished, DeciderNotEstablished, DepthInfeasible,
                     DivergenceNotEstablished, EmptyRange, LYChaosError, MalformedSpec, NotBilateral, OutOfDomain,
                     SideMismatch, TargetsOverlap, VerificationFailed, WrongSide, ZeroWeight)
from .scramble import (ScrambleReport, ScrambleWitness, Target, build_scrambled_family, construct_witness,
                       distal_data, proximal_times, shifted_decay_times, verify_scramble)
from .shiftops import Norm, SparseVector, apply_power, norm, orbit_log_norms, pair_distance_along
from .tree import NestedTree, build_nested_tree, verify_tree
from .weights import Side, WeightSeq, build_table, constant, explicit, make_weights, periodic, piecewise
from .window import (DecayCert, DivergenceCert, NotObserved, detect_divergence, detect_prefix_decay,
                     max_window_log_product, op_log_norm, sup_log_norm)

__all__ = [
    "AnalysisParams",
    "BoundViolation",
    "ChaosVerdict",
    "DecayCert",
    "DecayNotEstablished",
    "DeciderNotEstablished",
    "DepthInfeasible",
    "DivergenceCert",
    "DivergenceNotEstablished",
    "EmptyRange",
    "LYChaosError",
    "MalformedSpec",
    "NestedTree",
    "Norm",
    "NotBilateral",
    "NotObserved",
    "OutOfDomain",
    "Property",
    "ScrambleReport",
    "ScrambleWitness",
    "Side",
    "SideMismatch",
    "SparseVector",
    "Status",
    "Target",
    "TargetsOverlap",
    "VerificationFailed",
    "WeightSeq",
    "WrongSide",
    "ZeroWeight",
    "apply_power",
    "bilateral_verdict",
    "build_nested_tree",
    "build_scrambled_family",
    "build_table",
    "chaos_verdict",
    "constant",
    "construct_witness",
    "dense_null_orbit_verdict",
    "detect_divergence",
    "detect_prefix_decay",
    "distal_data",
    "explicit",
    "make_weights",
    "max_window_log_product",
    "norm",
    "op_log_norm",
    "orbit_log_norms",
    "pair_distance_along",
    "periodic",
    "piecewise",
    "proximal_times",
    "sensitivity_verdict",
    "shifted_decay_times",
    "sup_log_norm",
    "unilateral_verdict",
    "verify_scramble",
    "verify_tree",
]
