"""Real-coefficient polynomials in descending powers of ``s``.

Coefficients are stored leading-first, the same convention as
:func:`numpy.polyval`, so ``Polynomial([1, 3, 3, 1])`` is ``(s + 1)**3``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

__all__ = [
    "Polynomial",
    "add",
    "mul",
    "eval_at",
    "roots",
    "root_residual",
    "trim_leading_zeros",
]

ABERTH_MAX_ITER = 200
ABERTH_TOL = 1e-12
ROOT_RESIDUAL_TOL = 1e-8


def trim_leading_zeros(coeffs: Iterable[float]) -> np.ndarray:
    """Drop leading zeros; the zero polynomial is kept as ``[0.0]``."""
    c = np.atleast_1d(np.asarray(coeffs, dtype=float)).ravel()
    if c.size == 0:
        return np.zeros(1)
    nz = np.flatnonzero(c)
    if nz.size == 0:
        return np.zeros(1)
    return c[nz[0]:]


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Immutable real polynomial, leading coefficient first."""

    coeffs: np.ndarray

    def __init__(self, coeffs: Iterable[float]):
        c = trim_leading_zeros(coeffs)
        if not np.all(np.isfinite(c)):
            raise ValueError("polynomial coefficients must be finite")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def is_zero(self) -> bool:
        return self.coeffs.size == 1 and self.coeffs[0] == 0.0

    def __call__(self, s):
        return eval_at(self, s)

    def __add__(self, other: Polynomial) -> Polynomial:
        return add(self, other)

    def __mul__(self, other: Polynomial) -> Polynomial:
        return mul(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self) -> int:
        return hash(self.coeffs.tobytes())

    def __repr__(self) -> str:
        return f"Polynomial({self.coeffs.tolist()})"


def add(p: Polynomial, q: Polynomial) -> Polynomial:
    a, b = p.coeffs, q.coeffs
    n = max(a.size, b.size)
    out = np.zeros(n)
    out[n - a.size:] += a
    out[n - b.size:] += b
    return Polynomial(out)


def mul(p: Polynomial, q: Polynomial) -> Polynomial:
    return Polynomial(np.convolve(p.coeffs, q.coeffs))


def eval_at(p: Polynomial, s):
    """Horner evaluation at a (complex) point or array of points."""
    s = np.asarray(s, dtype=complex) if np.iscomplexobj(s) else np.asarray(s)
    acc = np.zeros_like(s, dtype=complex if np.iscomplexobj(s) else float) + p.coeffs[0]
    for c in p.coeffs[1:]:
        acc = acc * s + c
    return acc[()] if acc.ndim == 0 else acc


def _cauchy_bound(monic: np.ndarray) -> float:
    return 1.0 + float(np.max(np.abs(monic[1:])))


def _aberth(monic: np.ndarray) -> np.ndarray:
    n = monic.size - 1
    deriv = monic[:-1] * np.arange(n, 0, -1)
    radius = _cauchy_bound(monic)
    # Offset angle keeps the starting points off the real axis and breaks symmetry.
    z = radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
    done = np.zeros(n, dtype=bool)
    for _ in range(ABERTH_MAX_ITER):
        for i in range(n):
            if done[i]:
                continue
            pz = np.polyval(monic, z[i])
            dpz = np.polyval(deriv, z[i])
            if pz == 0:
                done[i] = True
                continue
            ratio = pz / dpz if dpz != 0 else np.inf
            diff = z[i] - np.delete(z, i)
            repulsion = np.sum(1.0 / diff) if np.all(diff != 0) else 0.0
            if not np.isfinite(ratio):
                w = 1e-8 * max(1.0, abs(z[i]))
            else:
                w = ratio / (1.0 - ratio * repulsion)
            z[i] -= w
            if abs(w) <= ABERTH_TOL * max(1.0, abs(z[i])):
                done[i] = True
        if done.all():
            break
    return z


def _pair_conjugates(z: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    remaining = list(z)
    out: list[complex] = []
    while remaining:
        k = int(np.argmax([abs(r.imag) for r in remaining]))
        r = remaining.pop(k)
        if abs(r.imag) <= tol * max(1.0, abs(r)) or not remaining:
            out.append(complex(r.real, 0.0))
            continue
        j = int(np.argmin([abs(q - r.conjugate()) for q in remaining]))
        q = remaining.pop(j)
        m = 0.5 * (r + q.conjugate())
        m = complex(m.real, abs(m.imag))
        out.extend([m, m.conjugate()])
    return np.array(sorted(out, key=lambda c: (c.real, c.imag)))


def root_residual(p: Polynomial, r: complex) -> float:
    """Scaled residual ``|p(r)| / (max|coeff| * max(1, |r|)**degree)``."""
    scale = np.max(np.abs(p.coeffs)) * max(1.0, abs(r)) ** p.degree
    return float(abs(np.polyval(p.coeffs, r)) / scale)


def roots(p: Polynomial) -> np.ndarray:
    """All ``degree`` complex roots, conjugate pairs matched exactly.

    Uses Aberth-Ehrlich simultaneous iteration on the monic polynomial.
    Clustered (multiple) roots converge only to cluster accuracy; the
    contract is the scaled residual, not root separation.

    Raises:
        ValueError: for the zero polynomial or a nonzero constant.
    """
    if p.is_zero:
        raise ValueError("roots of the zero polynomial are undefined")
    if p.degree < 1:
        raise ValueError("roots requires degree >= 1")
    monic = p.coeffs / p.coeffs[0]
    # Exact zero roots are peeled off first; Aberth handles the rest.
    n_zero = 0
    while monic.size > 1 and monic[-1] == 0.0:
        monic = monic[:-1]
        n_zero += 1
    if monic.size == 1:
        z = np.zeros(0, dtype=complex)
    elif monic.size == 2:
        z = np.array([complex(-monic[1], 0.0)])
    else:
        z = _aberth(monic)
    z = np.concatenate([z, np.zeros(n_zero, dtype=complex)])
    return _pair_conjugates(z)
