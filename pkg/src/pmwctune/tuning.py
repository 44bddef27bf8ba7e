"""PID tuning by IAE minimization under exact phase-margin/crossover constraints.

The two crossover conditions ``|L(j wc)| = 1`` and ``angle L(j wc) = PM - 180``
are posed as the single complex equality ``L(j wc) = exp(j (PM - 180))``.
Because ``L = C G`` and ``C(j w) = kp + ki/(j w) + kd j w`` is linear in the
gains, the constraint is linear too: its Jacobian is constant, and the feasible
set is a line in gain space. :func:`tune` runs SQP on the full problem;
:func:`oracle_tune` searches the line directly and serves as a cross-check.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .frequency import MarginReport, verify_margins
from .lti import PidGains, TransferFunction, dcgain, freq_response, is_stable, pid_tf, series
from .optimizer import NlpProblem, SolveReport, SqpOptions, solve_sqp
from .simulation import SimGrid, closed_loop, iae_of_gains

__all__ = [
    "InfeasibleSpecError",
    "TuneSpec",
    "TuneResult",
    "ManifoldLine",
    "constraint_residuals",
    "constraint_jacobian",
    "manifold_reduce",
    "initial_gains",
    "tune",
    "oracle_tune",
    "evaluate_gains",
    "PM_TOL_DEG",
    "WC_TOL",
]

log = logging.getLogger(__name__)

PM_TOL_DEG = 0.05
WC_TOL = 1e-3
ORACLE_SCAN_POINTS = 400
ORACLE_SCAN_WIDTH = 10.0
ORACLE_TOL = 1e-8


class InfeasibleSpecError(ValueError):
    """The requested phase margin / crossover cannot be met with non-negative gains."""


@dataclass(frozen=True)
class TuneSpec:
    pm_target: float = 60.0
    wc_target: float = 1.0
    grid: SimGrid = SimGrid()
    solver: SqpOptions = SqpOptions()
    # "complex" (linear real/imag split) or "polar" (|L| - 1, phase error in rad)
    formulation: str = "complex"

    def __post_init__(self):
        if not 0 < self.pm_target < 180:
            raise ValueError("pm_target must lie in (0, 180) degrees")
        if not self.wc_target > 0:
            raise ValueError("wc_target must be positive")
        if self.formulation not in ("complex", "polar"):
            raise ValueError(f"unknown constraint formulation {self.formulation!r}")

    @property
    def target_point(self) -> complex:
        """Where ``L(j wc)`` must land: unit magnitude at phase ``PM - 180``."""
        return cmath.exp(1j * math.radians(self.pm_target - 180.0))


@dataclass
class TuneResult:
    """Tuned gains plus independently recomputed verification metrics."""

    gains: PidGains
    pm_achieved: float
    wc_achieved: float
    iae: float
    stable: bool
    solver: SolveReport
    crossing_count: int = 1
    converged: bool = True
    warnings: list[str] = field(default_factory=list)

    @property
    def kp(self) -> float:
        return self.gains.kp

    @property
    def ki(self) -> float:
        return self.gains.ki

    @property
    def kd(self) -> float:
        return self.gains.kd

    def as_dict(self) -> dict:
        return {
            "Kp": self.kp,
            "Ki": self.ki,
            "Kd": self.kd,
            "PM": self.pm_achieved,
            "wc": self.wc_achieved,
            "IAE": self.iae,
            "Stable": self.stable,
            "converged": self.converged,
            "iterations": self.solver.iterations,
        }


@dataclass(frozen=True)
class ManifoldLine:
    """Feasible gain set: ``kp`` fixed, ``kd`` affine in ``ki``."""

    kp: float
    imag_offset: float
    wc: float

    def kd(self, ki: float) -> float:
        return (self.imag_offset + ki / self.wc) / self.wc

    @property
    def ki_min(self) -> float:
        return max(0.0, -self.wc * self.imag_offset)

    def gains(self, ki: float) -> PidGains:
        return PidGains(self.kp, ki, max(0.0, self.kd(ki)))


def _plant_at_wc(plant: TransferFunction, wc: float) -> complex:
    gw = freq_response(plant, wc)
    if gw == 0:
        raise InfeasibleSpecError("plant has transmission zero at wc")
    return gw


def constraint_residuals(g: PidGains, plant: TransferFunction, spec: TuneSpec) -> np.ndarray:
    """Crossover constraint violation at ``spec.wc_target`` (zero when met).

    ``complex`` formulation: real and imaginary parts of
    ``L(j wc) - exp(j (PM - 180 deg))``. ``polar`` formulation:
    ``(|L| - 1, wrapped phase error in radians)``.
    """
    wc = spec.wc_target
    gw = _plant_at_wc(plant, wc)
    cw = complex(g.kp, g.kd * wc - g.ki / wc)
    lw = cw * gw
    if spec.formulation == "polar":
        phase_err = cmath.phase(lw) - math.radians(spec.pm_target - 180.0)
        phase_err = (phase_err + math.pi) % (2 * math.pi) - math.pi
        return np.array([abs(lw) - 1.0, phase_err])
    r = lw - spec.target_point
    return np.array([r.real, r.imag])


def constraint_jacobian(plant: TransferFunction, spec: TuneSpec) -> np.ndarray:
    """Constant 2x3 Jacobian of the complex-form residuals w.r.t. (kp, ki, kd)."""
    wc = spec.wc_target
    gw = _plant_at_wc(plant, wc)
    cols = [gw, -1j * gw / wc, 1j * wc * gw]
    return np.array([[z.real for z in cols], [z.imag for z in cols]])


def manifold_reduce(plant: TransferFunction, spec: TuneSpec) -> ManifoldLine:
    """Closed-form solution of the crossover constraints.

    With ``c = exp(j (PM - 180)) / G(j wc)`` the constraints reduce to
    ``kp = Re c`` and ``kd wc - ki / wc = Im c``.

    Raises:
        InfeasibleSpecError: if ``Re c < 0`` (would need negative ``kp``).
    """
    wc = spec.wc_target
    c = spec.target_point / _plant_at_wc(plant, wc)
    if c.real < 0:
        raise InfeasibleSpecError("specification infeasible with non-negative Kp")
    return ManifoldLine(c.real, c.imag, wc)


def initial_gains(plant: TransferFunction) -> PidGains:
    """All gains ``1 / dcgain(plant)``; unit gains when that is undefined or <= 0."""
    try:
        k = dcgain(plant)
    except ValueError:
        log.info("plant DC gain undefined; starting from unit gains")
        return PidGains(1.0, 1.0, 1.0)
    if not k > 0 or not math.isfinite(1.0 / k):
        log.info("plant DC gain %g not positive; starting from unit gains", k)
        return PidGains(1.0, 1.0, 1.0)
    return PidGains(1.0 / k, 1.0 / k, 1.0 / k)


def evaluate_gains(g: PidGains, plant: TransferFunction, grid: SimGrid = SimGrid()):
    """Margins, IAE and stability of a fixed PID over ``plant``.

    Returns ``(MarginReport or None, iae, stable)``; the report is None when
    the open loop never crosses 0 dB in the scan range.
    """
    loop = series(pid_tf(g), plant)
    try:
        margins = verify_margins(loop)
    except ValueError:
        margins = None
    try:
        stable = is_stable(closed_loop(g, plant))
    except ValueError:
        stable = False
    return margins, iae_of_gains(g, plant, grid), stable


def _finish(gains: PidGains, plant, spec: TuneSpec, report: SolveReport) -> TuneResult:
    margins, value, stable = evaluate_gains(gains, plant, spec.grid)
    warnings = []
    if margins is None:
        margins = MarginReport(math.nan, math.nan, 0)
        warnings.append("no gain crossover in scan range")
    ok = (
        abs(margins.pm_achieved - spec.pm_target) <= PM_TOL_DEG
        and abs(margins.wc_achieved - spec.wc_target) <= WC_TOL
    )
    if not report.converged:
        warnings.append(f"solver did not converge: {report.message}")
    if not ok:
        warnings.append("achieved margins differ from the specification")
    if margins.crossing_count > 1:
        warnings.append(f"{margins.crossing_count} gain crossovers; lowest reported")
    if not stable:
        warnings.append("closed loop is not stable")
    for w in warnings:
        log.warning(w)
    return TuneResult(
        gains=gains,
        pm_achieved=margins.pm_achieved,
        wc_achieved=margins.wc_achieved,
        iae=value,
        stable=stable,
        solver=report,
        crossing_count=margins.crossing_count,
        converged=report.converged and ok,
        warnings=warnings,
    )


def tune(plant: TransferFunction, spec: TuneSpec = TuneSpec()) -> TuneResult:
    """Minimize the closed-loop IAE subject to the crossover constraints and gains >= 0.

    Raises:
        InfeasibleSpecError: if no non-negative gains can meet the spec.
        ValueError: if the plant is improper.
    """
    if not plant.is_proper:
        raise ValueError("plant must be proper")
    manifold_reduce(plant, spec)

    def objective(x):
        return iae_of_gains(PidGains.from_array(x), plant, spec.grid)

    def constraints(x):
        return constraint_residuals(PidGains.from_array(x), plant, spec)

    jac = None
    if spec.formulation == "complex":
        jmat = constraint_jacobian(plant, spec)

        def jac(_x):
            return jmat

    problem = NlpProblem(objective, constraints, np.zeros(3), jac)
    x0 = initial_gains(plant).as_array()
    report = solve_sqp(problem, x0, spec.solver)
    return _finish(PidGains.from_array(report.x_star), plant, spec, report)


def _golden(f, a: float, b: float, tol: float):
    invphi = (math.sqrt(5) - 1) / 2
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    n = 0
    while b - a > tol:
        n += 1
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (c, fc, n) if fc <= fd else (d, fd, n)


def _first_local_min(vals: np.ndarray) -> int:
    # IAE on the line can keep falling toward very large gains, so the
    # lowest-gain local minimum is taken rather than the scan-wide minimum.
    n = vals.size
    for i in range(n):
        if not np.isfinite(vals[i]):
            continue
        left = i == 0 or not np.isfinite(vals[i - 1]) or vals[i] <= vals[i - 1]
        right = i == n - 1 or vals[i] <= vals[i + 1]
        if left and right:
            return i
    return int(np.nanargmin(np.where(np.isfinite(vals), vals, np.nan)))


def oracle_tune(plant: TransferFunction, spec: TuneSpec = TuneSpec()) -> TuneResult:
    """Line search for the IAE minimum along the feasible gain line.

    Coarse scan of ``ki`` over ``[ki_min, ki_min + 10]`` followed by
    golden-section refinement around the first (lowest-``ki``) local minimum
    of the scan. Independent of the SQP path; used to cross-check
    :func:`tune`.
    """
    line = manifold_reduce(plant, spec)
    lo = line.ki_min

    def f(ki):
        return iae_of_gains(line.gains(ki), plant, spec.grid)

    kis = np.linspace(lo, lo + ORACLE_SCAN_WIDTH, ORACLE_SCAN_POINTS)
    vals = np.array([f(k) for k in kis])
    if not np.any(np.isfinite(vals)):
        raise InfeasibleSpecError("no stabilizing gains on constraint manifold in scan range")
    i = _first_local_min(vals)
    a, b = kis[max(i - 1, 0)], kis[min(i + 1, kis.size - 1)]
    ki, fbest, n = _golden(f, a, b, ORACLE_TOL)
    if vals[i] < fbest:
        ki, fbest = float(kis[i]), float(vals[i])
    gains = line.gains(ki)
    res = float(np.max(np.abs(constraint_residuals(gains, plant, spec))))
    report = SolveReport(gains.as_array(), fbest, res, ORACLE_SCAN_POINTS + n, True, "golden section")
    return _finish(gains, plant, spec, report)
