import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmwctune.lti import (
    PidGains,
    TransferFunction,
    dcgain,
    feedback_unity,
    freq_response,
    is_stable,
    pid_tf,
    poles,
    series,
    ss_freq_response,
    to_state_space,
)
from pmwctune.polynomials import Polynomial, add, root_residual

from conftest import lag_plant

tf = TransferFunction.from_coeffs


def test_pid_tf_examples():
    p = pid_tf(PidGains(1, 0, 0))
    assert p.num.coeffs.tolist() == [1, 0]
    assert p.den.coeffs.tolist() == [1, 0]
    assert p(2.5 + 1j) == pytest.approx(1.0)
    pi = pid_tf(PidGains(0.366, 1.366, 0))
    assert pi.num.coeffs.tolist() == [0.366, 1.366]
    assert pi.den.coeffs.tolist() == [1, 0]
    i = pid_tf(PidGains(0, 1, 0))
    assert i.num.coeffs.tolist() == [1] and i.den.coeffs.tolist() == [1, 0]


def test_series_examples():
    l = series(tf([1], [1, 0]), tf([1], [1, 1]))
    assert l.den.coeffs.tolist() == [1, 1, 0]
    l3 = series(pid_tf(PidGains(2.732, 1.171, 1.903)), lag_plant(3))
    assert l3.num.coeffs.tolist() == [1.903, 2.732, 1.171]
    assert l3.den.coeffs.tolist() == [1, 3, 3, 1, 0]
    a = tf([2, 1], [1, 3, 5])
    same = series(a, tf([1], [1]))
    assert same.num == a.num and same.den == a.den


def test_feedback_examples():
    t = feedback_unity(tf([1], [1, 0]))
    assert t.den.coeffs.tolist() == [1, 1]
    l = series(pid_tf(PidGains(0.366, 1.366, 0)), lag_plant(1))
    t = feedback_unity(l)
    # (s^2 + s) + (0.366 s + 1.366)
    np.testing.assert_allclose(t.den.coeffs, [1, 1.366, 1.366])
    np.testing.assert_allclose(t.num.coeffs, [0.366, 1.366])
    zero = feedback_unity(tf([0], [1, 1]))
    assert zero.num.is_zero


def test_feedback_algebraic_loop():
    with pytest.raises(ValueError):
        feedback_unity(tf([-1], [1]))


def test_dcgain():
    assert dcgain(lag_plant(3)) == 1.0
    assert dcgain(tf([2, 4], [1, 2])) == 2.0
    with pytest.raises(ValueError, match="DC gain"):
        dcgain(tf([1], [1, 0]))


def test_freq_response_examples():
    g = freq_response(lag_plant(1), 1.0)
    assert g == pytest.approx((1 - 1j) / 2)
    assert abs(g) == pytest.approx(1 / math.sqrt(2))
    assert math.degrees(cmath.phase(g)) == pytest.approx(-45)
    g3 = freq_response(lag_plant(3), 1.0)
    assert g3 == pytest.approx(1 / (-2 + 2j))
    assert abs(g3) == pytest.approx(1 / (2 * math.sqrt(2)))
    assert math.degrees(cmath.phase(g3)) == pytest.approx(-135)
    assert freq_response(tf([1], [1]), 7.0) == 1


def test_freq_response_errors():
    with pytest.raises(ValueError):
        freq_response(tf([1], [1, 0, 1]), 1.0)
    with pytest.raises(ValueError):
        freq_response(tf([1], [1, 1]), 0.0)


def test_poles_examples():
    np.testing.assert_allclose(poles(lag_plant(3)), [-1, -1, -1], atol=1e-4)
    t = feedback_unity(series(pid_tf(PidGains(0.366, 1.366, 0)), lag_plant(1)))
    # quadratic formula on s^2 + 1.366 s + 1.366
    disc = cmath.sqrt(1.366**2 - 4 * 1.366)
    expected = sorted([(-1.366 + disc) / 2, (-1.366 - disc) / 2], key=lambda z: z.imag)
    got = sorted(poles(t), key=lambda z: z.imag)
    np.testing.assert_allclose(got, expected, atol=1e-12)
    assert all(p.real < 0 for p in got)
    np.testing.assert_allclose(sorted(poles(tf([1], [1, 0, 1])).imag), [-1, 1])


@pytest.mark.parametrize(
    "den, expected",
    [([1, 1], True), ([1, -1], False), ([1, 0, 1], False), ([1, 3, 3, 1], True)],
)
def test_is_stable(den, expected):
    assert is_stable(tf([1], den)) is expected


def test_state_space_first_order():
    ss = to_state_space(tf([1], [1, 1]))
    assert ss.A.tolist() == [[-1]] and ss.B.tolist() == [[1]]
    assert ss.C.tolist() == [[1]] and ss.D.tolist() == [[0]]


def test_state_space_biproper():
    # (s+2)/(s+1) = 1 + 1/(s+1)
    ss = to_state_space(tf([1, 2], [1, 1]))
    assert ss.D.tolist() == [[1]]
    assert ss.A.tolist() == [[-1]] and ss.B.tolist() == [[1]] and ss.C.tolist() == [[1]]


def test_state_space_static_and_improper():
    ss = to_state_space(tf([3], [1]))
    assert ss.order == 0 and ss.D.tolist() == [[3]]
    with pytest.raises(ValueError):
        to_state_space(tf([1, 0, 0], [1, 1]))


def test_state_space_normalizes_leading_coefficient():
    ss = to_state_space(tf([4], [2, 2]))
    assert ss.A.tolist() == [[-1]] and ss.C.tolist() == [[2]]


coeff = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@st.composite
def proper_tf(draw):
    n = draw(st.integers(1, 6))
    den = [draw(st.floats(0.5, 5))] + [draw(coeff) for _ in range(n)]
    m = draw(st.integers(0, n))
    num = [draw(coeff) for _ in range(m + 1)]
    return tf(num, den)


@settings(max_examples=200, deadline=None)
@given(proper_tf(), st.floats(-2, 2))
def test_freq_response_matches_state_space(g, logw):
    w = 10.0**logw
    den_jw = np.polyval(g.den.coeffs, 1j * w)
    if abs(den_jw) < 1e-6 * np.max(np.abs(g.den.coeffs)) * max(1, w) ** g.den.degree:
        return
    a = freq_response(g, w)
    b = ss_freq_response(to_state_space(g), w)
    assert abs(a - b) <= 1e-8 * max(1.0, abs(a))


@settings(max_examples=100, deadline=None)
@given(proper_tf())
def test_feedback_poles_are_roots_of_sum(l):
    try:
        t = feedback_unity(l)
    except ValueError:
        return
    if t.den.degree < 1:
        return
    total = add(l.den, l.num)
    assert max(root_residual(total, p) for p in poles(t)) <= 1e-8


@settings(max_examples=100, deadline=None)
@given(proper_tf(), proper_tf(), proper_tf())
def test_series_associative(a, b, c):
    left = series(series(a, b), c)
    right = series(a, series(b, c))
    for x, y in [(left.num.coeffs, right.num.coeffs), (left.den.coeffs, right.den.coeffs)]:
        assert np.max(np.abs(x - y)) <= 1e-12 * max(1.0, np.max(np.abs(x)))


@settings(max_examples=200, deadline=None)
@given(st.lists(coeff, min_size=1, max_size=4), st.lists(coeff, min_size=1, max_size=4))
def test_integrating_loop_has_unit_dc_gain(num, den_rest):
    num_poly = Polynomial(num)
    if num_poly.coeffs[-1] == 0:
        return
    # integrator: constant term of the denominator is exactly zero
    l = TransferFunction(num_poly, Polynomial([1.0] + den_rest + [0.0]))
    t = feedback_unity(l)
    assert abs(dcgain(t) - 1.0) <= 1e-12
