import math
from fractions import Fraction

import numpy as np
from hypothesis import given, settings, strategies as st

from lychaos.logmath import NEG_INF, dd_diff, dd_prefix, from_signed_log, log_add, log_sum_exp, to_signed_log, two_sum

finite = st.floats(-1e6, 1e6, allow_nan=False)


@given(finite, finite)
def test_two_sum_is_error_free(a, b):
    s, e = two_sum(a, b)
    assert Fraction(s) + Fraction(e) == Fraction(a) + Fraction(b)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=300))
def test_prefix_windows_agree_with_fsum(values):
    hi, lo = dd_prefix(np.array(values))
    n = len(values)
    for a in (0, n // 3, n // 2):
        b = n
        ref = math.fsum(values[a:b])
        assert abs(dd_diff(hi[b], lo[b], hi[a], lo[a]) - ref) <= 1e-12 * max(1, abs(ref))


@given(st.floats(-50, 50), st.floats(-50, 50), st.sampled_from([-1, 1]), st.sampled_from([-1, 1]))
def test_log_add_matches_linear(l1, l2, s1, s2):
    s, l = log_add(s1, l1, s2, l2)
    direct = s1 * math.exp(l1) + s2 * math.exp(l2)
    got = from_signed_log(s, l)
    assert abs(got - direct) <= 1e-9 * max(math.exp(l1), math.exp(l2))


def test_exact_cancellation():
    assert log_add(1, 0.3, -1, 0.3) == (0, NEG_INF)
    assert log_add(0, NEG_INF, -1, 2.0) == (-1, 2.0)


def test_log_sum_exp():
    assert log_sum_exp([]) == NEG_INF
    assert log_sum_exp([NEG_INF]) == NEG_INF
    assert math.isclose(log_sum_exp([math.log(2), math.log(3)]), math.log(5))
    assert math.isclose(log_sum_exp([1000.0, 1000.0]), 1000.0 + math.log(2))


def test_signed_log_round_trip():
    for v in (0.0, 1.5, -2.25, 1e-200):
        assert math.isclose(from_signed_log(*to_signed_log(v)), v, rel_tol=1e-13)  # exp/log round trip loses ~|log| ulps
