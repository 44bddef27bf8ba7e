"""Continuous-time SISO transfer functions and their state-space realization."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .polynomials import Polynomial, add, eval_at, mul, roots

__all__ = [
    "TransferFunction",
    "PidGains",
    "StateSpace",
    "pid_tf",
    "series",
    "feedback_unity",
    "dcgain",
    "freq_response",
    "poles",
    "is_stable",
    "to_state_space",
    "ss_freq_response",
    "STABILITY_MARGIN",
]

STABILITY_MARGIN = 1e-9


@dataclass(frozen=True)
class TransferFunction:
    num: Polynomial
    den: Polynomial

    def __post_init__(self):
        if self.den.is_zero:
            raise ValueError("transfer function denominator is the zero polynomial")

    @classmethod
    def from_coeffs(cls, num: Iterable[float], den: Iterable[float]) -> TransferFunction:
        return cls(Polynomial(num), Polynomial(den))

    @property
    def is_proper(self) -> bool:
        return self.num.is_zero or self.num.degree <= self.den.degree

    def __call__(self, s):
        return eval_at(self.num, s) / eval_at(self.den, s)

    def __mul__(self, other: TransferFunction) -> TransferFunction:
        return series(self, other)

    def __repr__(self) -> str:
        return f"TransferFunction(num={self.num.coeffs.tolist()}, den={self.den.coeffs.tolist()})"


@dataclass(frozen=True)
class PidGains:
    """Parallel-form PID gains: ``kp`` (-), ``ki`` (1/s), ``kd`` (s)."""

    kp: float
    ki: float
    kd: float

    def as_array(self) -> np.ndarray:
        return np.array([self.kp, self.ki, self.kd], dtype=float)

    @classmethod
    def from_array(cls, x) -> PidGains:
        return cls(float(x[0]), float(x[1]), float(x[2]))


@dataclass(frozen=True)
class StateSpace:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        n = self.A.shape[0]
        if self.A.shape != (n, n) or self.B.shape != (n, 1) or self.C.shape != (1, n):
            raise ValueError("inconsistent state-space dimensions")
        if self.D.shape != (1, 1):
            raise ValueError("D must be 1x1")

    @property
    def order(self) -> int:
        return self.A.shape[0]


def pid_tf(g: PidGains) -> TransferFunction:
    """Unfiltered PID ``(kd s^2 + kp s + ki) / s``."""
    return TransferFunction(Polynomial([g.kd, g.kp, g.ki]), Polynomial([1.0, 0.0]))


def series(a: TransferFunction, b: TransferFunction) -> TransferFunction:
    # No pole-zero cancellation, by design.
    return TransferFunction(mul(a.num, b.num), mul(a.den, b.den))


def feedback_unity(l: TransferFunction) -> TransferFunction:
    """Closed loop ``L / (1 + L)`` under negative unity feedback."""
    den = add(l.den, l.num)
    if den.is_zero:
        raise ValueError("algebraic loop: 1 + L(s) is identically zero")
    return TransferFunction(l.num, den)


def dcgain(g: TransferFunction) -> float:
    d0 = g.den.coeffs[-1]
    if d0 == 0.0:
        raise ValueError("infinite or undefined DC gain")
    return float(g.num.coeffs[-1] / d0)


def freq_response(g: TransferFunction, w: float) -> complex:
    if not w > 0:
        raise ValueError("frequency must be positive")
    d = complex(eval_at(g.den, 1j * w))
    if d == 0:
        raise ValueError(f"pole on the imaginary axis at w={w}")
    return complex(eval_at(g.num, 1j * w)) / d


def poles(g: TransferFunction) -> np.ndarray:
    return roots(g.den)


def is_stable(g: TransferFunction) -> bool:
    """True when every pole lies strictly in the left half plane.

    Poles within ``STABILITY_MARGIN`` of the imaginary axis count as
    unstable, so marginal systems such as ``1/(s^2 + 1)`` return False.
    """
    return bool(np.all(poles(g).real < -STABILITY_MARGIN))


def to_state_space(g: TransferFunction) -> StateSpace:
    """Controllable canonical realization of a proper transfer function.

    For a biproper ``g`` the direct feedthrough ``D`` is split off first and
    the strictly proper remainder is realized.
    """
    if not g.is_proper:
        raise ValueError("improper transfer function has no state-space realization")
    den = g.den.coeffs / g.den.coeffs[0]
    num = g.num.coeffs / g.den.coeffs[0]
    n = den.size - 1
    padded = np.zeros(n + 1)
    padded[n + 1 - num.size:] = num
    d = padded[0]
    if n == 0:
        return StateSpace(np.zeros((0, 0)), np.zeros((0, 1)), np.zeros((1, 0)), np.array([[d]]))
    rem = padded[1:] - d * den[1:]
    A = np.zeros((n, n))
    A[0, :] = -den[1:]
    A[1:, :-1] = np.eye(n - 1)
    B = np.zeros((n, 1))
    B[0, 0] = 1.0
    return StateSpace(A, B, rem.reshape(1, n), np.array([[d]]))


def ss_freq_response(ss: StateSpace, w: float) -> complex:
    """``C (jwI - A)^-1 B + D``; an independent route to :func:`freq_response`."""
    n = ss.order
    if n == 0:
        return complex(ss.D[0, 0])
    x = np.linalg.solve(1j * w * np.eye(n) - ss.A, ss.B.astype(complex))
    return complex((ss.C @ x)[0, 0] + ss.D[0, 0])
