import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmwctune.polynomials import Polynomial, add, eval_at, mul, root_residual, roots, trim_leading_zeros

coeff = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def poly_strategy(max_degree=8):
    return st.lists(coeff, min_size=2, max_size=max_degree + 1).filter(lambda c: abs(c[0]) > 1e-3)


def test_add_examples():
    assert add(Polynomial([1, 1]), Polynomial([1, -1])) == Polynomial([2, 0])
    assert add(Polynomial([1, 0, 0]), Polynomial([1])) == Polynomial([1, 0, 1])
    assert add(Polynomial([1, 1]), Polynomial([0])) == Polynomial([1, 1])


def test_add_cancels_to_lower_degree():
    p = add(Polynomial([1, 2]), Polynomial([-1, 3]))
    assert p.degree == 0
    assert p.coeffs.tolist() == [5.0]


def test_mul_examples():
    lin = Polynomial([1, 1])
    assert mul(lin, lin) == Polynomial([1, 2, 1])
    # hand expansion of (s+1)^3
    assert mul(mul(lin, lin), lin) == Polynomial([1, 3, 3, 1])
    p = Polynomial([2, -1, 4])
    assert mul(p, Polynomial([1])) == p


def test_eval_at_examples():
    assert eval_at(Polynomial([1, 1]), 1j) == 1 + 1j
    # (1+j)^3 = (1+j)(2j) = -2 + 2j
    assert eval_at(Polynomial([1, 3, 3, 1]), 1j) == pytest.approx(-2 + 2j, abs=1e-15)
    assert eval_at(Polynomial([5]), 3.7 - 2j) == 5


def test_trim_is_idempotent():
    c = trim_leading_zeros([0, 0, 1, 2])
    assert c.tolist() == [1, 2]
    assert trim_leading_zeros(c).tolist() == [1, 2]
    assert trim_leading_zeros([0, 0]).tolist() == [0.0]


def test_polynomial_is_immutable():
    p = Polynomial([1, 2])
    with pytest.raises(ValueError):
        p.coeffs[0] = 3.0


def test_roots_examples():
    assert roots(Polynomial([1, 1])) == pytest.approx([-1])
    np.testing.assert_allclose(roots(Polynomial([1, 2, 1])), [-1, -1], atol=1e-6)
    r = roots(Polynomial([1, 0, 1]))
    assert sorted(r, key=lambda z: z.imag) == pytest.approx([-1j, 1j])
    triple = roots(Polynomial([1, 3, 3, 1]))
    assert len(triple) == 3
    np.testing.assert_allclose(triple, [-1, -1, -1], atol=1e-4)
    p = Polynomial([1, 3, 3, 1])
    assert max(root_residual(p, z) for z in triple) <= 1e-8


def test_roots_zero_at_origin():
    r = roots(Polynomial([1, 1, 0, 0]))
    assert sorted(r.real) == pytest.approx([-1, 0, 0])


@pytest.mark.parametrize("coeffs", [[0], [3.0]])
def test_roots_rejects_degenerate(coeffs):
    with pytest.raises(ValueError):
        roots(Polynomial(coeffs))


@settings(max_examples=300, deadline=None)
@given(poly_strategy())
def test_roots_residual_and_reconstruction(c):
    p = Polynomial(c)
    r = roots(p)
    assert r.size == p.degree
    assert max(root_residual(p, z) for z in r) <= 1e-8
    rebuilt = np.real(np.poly(r)) * p.coeffs[0]
    assert np.max(np.abs(rebuilt - p.coeffs)) <= 1e-6 * np.max(np.abs(p.coeffs))


@settings(max_examples=200, deadline=None)
@given(poly_strategy())
def test_roots_conjugate_closed(c):
    r = roots(Polynomial(c))
    conj = np.sort_complex(np.conj(r))
    np.testing.assert_array_equal(np.sort_complex(r), conj)


@settings(max_examples=200, deadline=None)
@given(poly_strategy(5), poly_strategy(5), coeff, coeff)
def test_eval_is_multiplicative(a, b, sr, si):
    p, q, s = Polynomial(a), Polynomial(b), complex(sr, si)
    lhs = eval_at(mul(p, q), s)
    rhs = eval_at(p, s) * eval_at(q, s)
    scale = max(abs(rhs), np.max(np.abs(np.convolve(a, b))) * max(1, abs(s)) ** (len(a) + len(b)))
    assert abs(lhs - rhs) <= 1e-10 * scale
