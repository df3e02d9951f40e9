import dataclasses
import math

import pytest
from hypothesis import given, settings, strategies as st

from lychaos.criteria import AnalysisParams
from lychaos.errors import (DecayNotEstablished, DeciderNotEstablished, DivergenceNotEstablished, MalformedSpec,
                            TargetsOverlap)
from lychaos.scramble import (Target, build_scrambled_family, construct_witness, distal_data, proximal_times,
                              shifted_decay_times, verify_scramble)
from lychaos.shiftops import Norm, SparseVector, apply_power, norm, pair_distance_along, window_log
from lychaos.weights import Side, constant, piecewise
from lychaos.window import detect_prefix_decay

LN2 = math.log(2)
TWO = piecewise([(None, 0, 0.5), (1, None, 2)])
C2 = constant(2)
P = AnalysisParams()


def basis_targets(side, idx, radius=0.5):
    return [Target(SparseVector.basis(side, j), radius) for j in idx]


def test_proximal_unilateral():
    p = proximal_times(C2, 5, 3)
    assert p == [4, 5, 6, 7, 8]
    for t in p:
        for j in range(1, 4):
            assert apply_power(C2, SparseVector.basis(Side.UNILATERAL, j), t).is_zero()


def brute_first_time(w, s, bound, after):
    t = after + 1
    while max(window_log(w, j - t + 1, j) for j in range(-s, s + 1)) > bound:
        t += 1
    return t


def test_proximal_bilateral_is_minimal():
    p = proximal_times(TWO, 3, 2)
    prev = 0
    for n, t in enumerate(p, start=1):
        assert t == brute_first_time(TWO, 2, -math.log(3 * n), prev)
        for j in range(-2, 3):
            assert norm(apply_power(TWO, SparseVector.basis(Side.BILATERAL, j), t), Norm.P1) <= -math.log(3 * n)
        prev = t
    # worst basis vector is e_2: 2^2 (1/2)^(t-2) <= 1/3 first at t = 6
    assert p[0] == 6


def test_proximal_needs_decay():
    with pytest.raises(DecayNotEstablished):
        proximal_times(constant(2, Side.BILATERAL), 3, 2)


def test_distal_unilateral_constant_two():
    q, m = distal_data(C2, 4, P, family_size=5, eps=1.0)
    # smallest increasing q with q ln 2 >= ln(6n) + ln 2
    expect, prev = [], 0
    for n in range(1, 5):
        qq = prev + 1
        while qq * LN2 < math.log(6 * n) + LN2:
            qq += 1
        expect.append(qq)
        prev = qq
    assert q == expect == [4, 5, 6, 7]
    assert m == [1, 2, 3, 4]


def test_distal_two_segment_growth_side():
    q, m = distal_data(TWO, 5, P, family_size=5, eps=0.25)
    assert all(x >= 1 for x in m) and all(a < b for a, b in zip(m, m[1:]))
    assert all(a < b for a, b in zip(q, q[1:]))


def test_distal_constant_one():
    with pytest.raises(DivergenceNotEstablished):
        distal_data(constant(1), 2, P.with_(horizon=50))


def test_two_targets_single_coordinate_difference():
    targets = [Target(SparseVector.basis(Side.UNILATERAL, 1), 1.0),
               Target(SparseVector.from_pairs(Side.UNILATERAL, [(1, 3.0)]), 1.0)]
    wit = construct_witness(C2, targets, 4, P)
    eps = 0.5
    assert wit.eps == eps
    big_m = wit.perturbation_index
    for n, (pn, qn) in enumerate(zip(wit.p_times, wit.q_times), start=1):
        assert pair_distance_along(C2, wit.family[0], wit.family[1], [pn], Norm.P1) == [-math.inf]
        # the y parts die (support 1 < q_n); only the i/(k+1) eps e_M coordinate survives
        (dq,) = pair_distance_along(C2, wit.family[0], wit.family[1], [qn], Norm.P1)
        assert dq == pytest.approx(math.log(eps / 3) + qn * LN2, abs=1e-12)
        assert big_m > qn


def test_single_target_is_trivially_verified():
    wit = construct_witness(C2, basis_targets(Side.UNILATERAL, [2]), 3, P)
    rep = verify_scramble(C2, wit)
    assert rep.passed and rep.records == ()


def test_target_errors():
    with pytest.raises(TargetsOverlap):
        construct_witness(C2, [Target(SparseVector.basis(Side.UNILATERAL, 1), 1.0),
                               Target(SparseVector.from_pairs(Side.UNILATERAL, [(1, 1.5)]), 1.0)], 2, P)
    with pytest.raises(MalformedSpec):
        construct_witness(C2, [], 2, P)
    with pytest.raises(MalformedSpec):
        build_scrambled_family(C2, [], [1], [1], [0])
    with pytest.raises(DeciderNotEstablished):
        construct_witness(constant(1), basis_targets(Side.UNILATERAL, [1, 3]), 2, P)


def test_perturbation_index_must_leave_supports():
    with pytest.raises(MalformedSpec):
        build_scrambled_family(C2, basis_targets(Side.UNILATERAL, [1, 5]), [9], [3], [0])


@pytest.mark.parametrize("w", [C2, TWO], ids=["const2", "two_segment"])
@pytest.mark.parametrize("p", list(Norm))
def test_five_vector_witness_round_trip(w, p):
    wit = construct_witness(w, basis_targets(w.side, range(1, 6)), 8, P.with_(p=p))
    assert wit.norm is p
    rep = verify_scramble(w, wit)
    assert rep.passed and len(rep.records) == 8 * 10
    for t, z in zip(basis_targets(w.side, range(1, 6)), wit.family):
        assert norm(z.sub(t.center), p) < math.log(t.radius)


def test_verify_catches_tampering():
    wit = construct_witness(TWO, basis_targets(Side.BILATERAL, range(1, 6)), 4, P)
    same = dataclasses.replace(wit, family=(wit.family[0],) + wit.family[:1] + wit.family[2:])
    rep = verify_scramble(TWO, same)
    assert not rep.passed
    bad = [r for r in rep.records if r.i == 1 and r.j == 2]
    assert all(not r.distal_ok and r.log_dist_q == -math.inf for r in bad)
    swapped = dataclasses.replace(wit, q_times=wit.p_times)
    rep2 = verify_scramble(TWO, swapped)
    assert not rep2.passed and not rep2.first_failure.distal_ok
    unsorted = dataclasses.replace(wit, p_times=wit.p_times[::-1])
    assert not verify_scramble(TWO, unsorted).passed


def test_shifted_decay_times_band():
    p = shifted_decay_times(TWO, -10, 10, 8)
    assert p == [21 + i for i in range(8)]
    for n, t in enumerate(p, start=1):
        assert all(window_log(TWO, -t + k + 1, k) <= -n * LN2 for k in range(-10, 11))


def test_shifted_decay_reduces_to_decay_times():
    p = shifted_decay_times(TWO, 0, 0, 6)
    assert p == detect_prefix_decay(TWO, 100, LN2, 6).times


def test_shifted_decay_needs_decay():
    with pytest.raises(DecayNotEstablished):
        shifted_decay_times(constant(2, Side.BILATERAL), -1, 1, 3)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.25, 0.8), st.floats(1.3, 3.0), st.integers(2, 5), st.integers(1, 6))
def test_witness_round_trip_property(low, high, k, levels):
    w = piecewise([(None, 0, low), (1, None, high)])
    params = P.with_(theta_div=3.0, theta_dec=3.0, horizon=2000, k_lo=-2000, k_hi=2000)
    wit = construct_witness(w, basis_targets(Side.BILATERAL, range(1, k + 1), 0.4), levels, params)
    assert verify_scramble(w, wit).passed
