import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from lychaos.errors import EmptyRange, MalformedSpec, NotBilateral
from lychaos.weights import Side, constant, explicit, piecewise
from lychaos.window import (DecayCert, DivergenceCert, NotObserved, detect_divergence, detect_prefix_decay,
                            max_window_log_product, op_log_norm, prefix_log_products, sup_log_norm)

from oracles import brute_best_window, explicit_fn, log_norm_oracle

LN2 = math.log(2)
TWO = piecewise([(None, 0, 0.5), (1, None, 2)])


def test_two_segment_best_window():
    assert max_window_log_product(TWO, 3, -5, 5) == (3, pytest.approx(3 * LN2))


def test_small_range_enumerates_each_end():
    w = explicit([random.Random(3).uniform(0.1, 3) for _ in range(11)], Side.BILATERAL, start=-5)
    wt = explicit_fn(list(w.data.values), -5, 1.0)
    best = max(math.fsum(math.log(wt(j)) for j in range(k - 1, k + 1)) for k in range(-5, 6))
    assert op_log_norm(w, 2, -5, 5) == pytest.approx(best, abs=1e-12)


def test_empty_ranges():
    with pytest.raises(EmptyRange):
        max_window_log_product(constant(2), 5, 1, 4)  # unilateral ends start at 6
    with pytest.raises(MalformedSpec):
        max_window_log_product(TWO, 0, -5, 5)


def test_oracle_random_specs():
    rng = random.Random(11)
    for _ in range(10):
        unilateral = rng.random() < 0.5
        start = 1 if unilateral else rng.randint(-40, 0)
        vals = [rng.uniform(0.1, 3) for _ in range(60)]
        side = Side.UNILATERAL if unilateral else Side.BILATERAL
        w = explicit(vals, side, start=start, default=rng.uniform(0.1, 3))
        wt = explicit_fn(vals, start, math.exp(w.log_weight(start + 100)))
        lo, hi = start, start + 59
        for n in range(1, 9):
            if unilateral and hi < n + 1:
                continue
            assert op_log_norm(w, n, lo, hi) == pytest.approx(log_norm_oracle(wt, n, lo, hi, unilateral), abs=1e-9)


def test_sup_norm_of_constant():
    assert sup_log_norm(constant(2), 7) == pytest.approx(7 * LN2)
    assert sup_log_norm(TWO, 4) == pytest.approx(4 * LN2)
    assert sup_log_norm(constant(2), 0) == 0.0


@pytest.mark.parametrize("theta", [0.5, 5.0, 40.0, 41.6])
def test_constant_two_certificate_length(theta):
    cert = detect_divergence(constant(2), 10_000, -10_000, 10_000, theta)
    assert isinstance(cert, DivergenceCert)
    assert cert.n == math.ceil(theta / LN2)
    assert cert.k == cert.n + 1  # first admissible end, first factor w_2
    assert cert.replay(constant(2))


def test_constant_one_never_diverges():
    for h in (1, 10, 1000):
        r = detect_divergence(constant(1), h, -10_000, 10_000, 1e-6)
        assert isinstance(r, NotObserved) and r.best == 0.0


def test_tampered_certificates_fail_replay():
    w = constant(2)
    cert = detect_divergence(w, 100, 1, 200, 5.0)
    assert not DivergenceCert(cert.k, cert.n, cert.log_product + 1e-6, cert.threshold_used).replay(w)
    assert not DivergenceCert(cert.k, cert.n - 1, cert.log_product, cert.threshold_used).replay(w)
    assert not DivergenceCert(cert.n, cert.n, cert.log_product, cert.threshold_used).replay(w)  # off the domain


def test_prefix_decay_greedy():
    cert = detect_prefix_decay(TWO, 100, LN2, 4)
    assert cert.times == [1, 2, 3, 4]
    assert cert.replay(TWO)
    cert40 = detect_prefix_decay(TWO, 10_000, 40.0, 8)
    assert cert40.times[0] == 58 and cert40.replay(TWO)


def test_prefix_decay_failures():
    r = detect_prefix_decay(constant(2, Side.BILATERAL), 500, 40.0, 8)
    assert isinstance(r, NotObserved) and r.found == 0
    partial = detect_prefix_decay(TWO, 200, 40.0, 8)
    assert isinstance(partial, NotObserved) and partial.found == 3
    with pytest.raises(NotBilateral):
        detect_prefix_decay(constant(2), 10, 1.0, 1)
    with pytest.raises(NotBilateral):
        prefix_log_products(constant(2), 10)


def test_decay_replay_rejects_tampering():
    cert = detect_prefix_decay(TWO, 100, LN2, 3)
    assert not DecayCert(cert.entries[::-1], cert.threshold).replay(TWO)
    assert not DecayCert(cert.entries, cert.threshold * 2).replay(TWO)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.2, 3.0), min_size=3, max_size=15), st.integers(1, 12), st.floats(0.05, 4.0),
       st.booleans())
def test_divergence_matches_brute_force(values, horizon, theta, unilateral):
    side = Side.UNILATERAL if unilateral else Side.BILATERAL
    start = 1 if unilateral else -5
    w = explicit(values, side, start=start, default=1.0)
    wt = explicit_fn(values, start, 1.0)
    lo, hi = (1, 20) if unilateral else (-10, 15)
    best = brute_best_window(wt, horizon, lo, hi, unilateral)
    r = detect_divergence(w, horizon, lo, hi, theta)
    if best >= theta + 1e-9:
        assert isinstance(r, DivergenceCert) and r.replay(w)
        assert r.n <= horizon
    elif best < theta - 1e-9:
        assert isinstance(r, NotObserved)
        assert r.best == pytest.approx(best, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0.2, 3.0), min_size=3, max_size=15), st.integers(1, 10), st.integers(0, 30),
       st.floats(0.5, 5.0))
def test_horizon_monotonicity(values, h, extra, theta):
    w = explicit(values, Side.BILATERAL, start=-3, default=1.0)
    a = detect_divergence(w, h, -20, 20, theta)
    if isinstance(a, DivergenceCert):
        assert detect_divergence(w, h + extra, -20, 20, theta) == a
