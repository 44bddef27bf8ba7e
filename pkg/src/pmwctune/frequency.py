"""Gain-crossover search, phase margin, and Bode data for an open loop."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lti import TransferFunction
from .polynomials import eval_at

__all__ = [
    "MarginReport",
    "gain_crossovers",
    "phase_margin_at",
    "verify_margins",
    "bode_grid",
    "W_MIN",
    "W_MAX",
]

W_MIN = 1e-3
W_MAX = 1e3
SCAN_POINTS = 2000
BISECT_RTOL = 1e-10
# Phase-tracking grid density for unwrapping up to the crossover.
UNWRAP_POINTS_PER_DECADE = 400


@dataclass(frozen=True)
class MarginReport:
    wc_achieved: float
    pm_achieved: float
    crossing_count: int


def _response(l: TransferFunction, w: np.ndarray) -> np.ndarray:
    s = 1j * np.asarray(w, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return eval_at(l.num, s) / eval_at(l.den, s)


def _log_mag(l: TransferFunction, w) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log(np.abs(_response(l, w)))


def gain_crossovers(
    l: TransferFunction,
    w_min: float = W_MIN,
    w_max: float = W_MAX,
    n_points: int = SCAN_POINTS,
) -> np.ndarray:
    """All frequencies in ``[w_min, w_max]`` where ``|L(jw)| = 1``, ascending.

    A log-spaced scan brackets sign changes of ``log|L|``; each bracket is
    then bisected in ``log w`` to a relative width of ``BISECT_RTOL``.
    """
    if not 0 < w_min < w_max:
        raise ValueError("need 0 < w_min < w_max")
    w = np.logspace(np.log10(w_min), np.log10(w_max), n_points)
    f = _log_mag(l, w)
    out = []
    for k in range(w.size - 1):
        fa, fb = f[k], f[k + 1]
        if not (np.isfinite(fa) and np.isfinite(fb)):
            continue
        if fa == 0.0:
            out.append(w[k])
            continue
        if fa * fb > 0 or fb == 0.0:
            continue
        lo, hi = math.log(w[k]), math.log(w[k + 1])
        flo = fa
        while hi - lo > BISECT_RTOL:
            mid = 0.5 * (lo + hi)
            fm = float(_log_mag(l, math.exp(mid)))
            if fm == 0.0:
                lo = hi = mid
                break
            if (fm > 0) == (flo > 0):
                lo, flo = mid, fm
            else:
                hi = mid
        out.append(math.exp(0.5 * (lo + hi)))
    if f.size and f[-1] == 0.0:
        out.append(w[-1])
    return np.array(out)


def _unwrapped_phase(l: TransferFunction, w: np.ndarray) -> np.ndarray:
    """Phase in radians along ``w``, unwrapped from the principal value at ``w[0]``."""
    return np.unwrap(np.angle(_response(l, w)))


def phase_margin_at(l: TransferFunction, wc: float, w_min: float = W_MIN) -> float:
    """``180 + angle L(j wc)`` in degrees, phase tracked continuously from ``w_min``."""
    if not wc > 0:
        raise ValueError("crossover frequency must be positive")
    val = complex(_response(l, np.array([wc]))[0])
    if not np.isfinite(val) or val == 0:
        raise ValueError(f"pole or zero on the imaginary axis at w={wc}")
    start = min(w_min, wc)
    decades = max(math.log10(wc / start), 0.0)
    n = max(2, int(math.ceil(decades * UNWRAP_POINTS_PER_DECADE)) + 1)
    w = np.logspace(math.log10(start), math.log10(wc), n)
    w[-1] = wc
    phase = _unwrapped_phase(l, w)
    return 180.0 + math.degrees(phase[-1])


def verify_margins(
    l: TransferFunction, w_min: float = W_MIN, w_max: float = W_MAX
) -> MarginReport:
    """Achieved crossover and phase margin of an open loop.

    When the loop crosses 0 dB more than once the lowest crossing is
    reported; ``crossing_count`` exposes the ambiguity.
    """
    wcs = gain_crossovers(l, w_min, w_max)
    if wcs.size == 0:
        raise ValueError("no gain crossover in scan range")
    wc = float(wcs[0])
    return MarginReport(wc, phase_margin_at(l, wc, w_min), int(wcs.size))


def bode_grid(
    l: TransferFunction,
    w_min: float = W_MIN,
    w_max: float = W_MAX,
    points_per_decade: int = 100,
) -> np.ndarray:
    """Rows of ``(w, magnitude_db, phase_deg)`` on a log-spaced grid."""
    if not 0 < w_min < w_max:
        raise ValueError("need 0 < w_min < w_max")
    if points_per_decade < 1:
        raise ValueError("points_per_decade must be >= 1")
    decades = math.log10(w_max / w_min)
    n = max(2, int(math.ceil(decades * points_per_decade)) + 1)
    w = np.logspace(math.log10(w_min), math.log10(w_max), n)
    resp = _response(l, w)
    with np.errstate(divide="ignore"):
        mag_db = 20.0 * np.log10(np.abs(resp))
    phase = np.degrees(np.unwrap(np.angle(resp)))
    return np.column_stack([w, mag_db, phase])
