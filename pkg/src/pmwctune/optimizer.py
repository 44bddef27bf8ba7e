"""Dense SQP for small problems with equality constraints and lower bounds.

Solves::

    minimize    f(x)
    subject to  c(x) = 0
                x >= lower_bounds

with a damped-BFGS model of the Lagrangian Hessian, an active-set QP
subproblem over the bounds, and a backtracking line search on the l1 merit
function ``f + rho * ||c||_1``. The objective may return ``inf`` to mark an
infeasible region; the line search simply backs away from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "NlpProblem",
    "SqpOptions",
    "SolveReport",
    "solve_sqp",
    "fd_gradient",
    "fd_jacobian",
    "solve_bounded_qp",
]

Objective = Callable[[np.ndarray], float]
Constraints = Callable[[np.ndarray], np.ndarray]
Jacobian = Callable[[np.ndarray], np.ndarray]


@dataclass
class NlpProblem:
    objective: Objective
    eq_constraints: Constraints
    lower_bounds: np.ndarray
    eq_jacobian: Optional[Jacobian] = None

    @property
    def dim(self) -> int:
        return int(np.asarray(self.lower_bounds).size)


@dataclass(frozen=True)
class SqpOptions:
    max_iter: int = 500
    ftol: float = 1e-6
    ctol: float = 1e-8
    backtrack: float = 0.5
    min_step: float = 1e-12
    armijo: float = 1e-4
    # Also require a small step; on flat, kinked objectives |df| alone stops early.
    xtol: float = 1e-6


@dataclass
class SolveReport:
    x_star: np.ndarray
    objective_value: float
    constraint_residual_inf_norm: float
    iterations: int
    converged: bool
    message: str = ""
    history: list = field(default_factory=list, repr=False)

    def __eq__(self, other):
        if not isinstance(other, SolveReport):
            return NotImplemented
        return (
            np.array_equal(self.x_star, other.x_star)
            and self.objective_value == other.objective_value
            and self.constraint_residual_inf_norm == other.constraint_residual_inf_norm
            and self.iterations == other.iterations
            and self.converged == other.converged
        )


def fd_gradient(f: Objective, x: np.ndarray, f0: float | None = None) -> np.ndarray:
    """Forward-difference gradient with ``h_i = 1e-6 * max(1, |x_i|)``.

    A coordinate whose forward probe is not finite falls back to a backward
    difference.

    Raises:
        ValueError: if both probes of some coordinate are non-finite.
    """
    x = np.asarray(x, dtype=float)
    if f0 is None:
        f0 = f(x)
    if not math.isfinite(f0):
        raise ValueError("objective is not finite at the base point")
    g = np.empty_like(x)
    for i in range(x.size):
        h = 1e-6 * max(1.0, abs(x[i]))
        xp = x.copy()
        xp[i] += h
        fp = f(xp)
        if math.isfinite(fp):
            g[i] = (fp - f0) / (xp[i] - x[i])
            continue
        xm = x.copy()
        xm[i] -= h
        fm = f(xm)
        if not math.isfinite(fm):
            raise ValueError(f"non-finite objective on both sides of coordinate {i}")
        g[i] = (f0 - fm) / (x[i] - xm[i])
    return g


def fd_jacobian(c: Constraints, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    c0 = np.asarray(c(x), dtype=float)
    jac = np.empty((c0.size, x.size))
    for i in range(x.size):
        h = 1e-7 * max(1.0, abs(x[i]))
        xp = x.copy()
        xp[i] += h
        jac[:, i] = (np.asarray(c(xp), dtype=float) - c0) / (xp[i] - x[i])
    return jac


def _kkt_solve(H, g, A, b):
    n, m = H.shape[0], A.shape[0]
    K = np.zeros((n + m, n + m))
    K[:n, :n] = H
    K[:n, n:] = -A.T
    K[n:, :n] = A
    rhs = np.concatenate([-g, b])
    try:
        sol = np.linalg.solve(K, rhs)
    except np.linalg.LinAlgError:
        sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
    return sol[:n], sol[n:]


def solve_bounded_qp(H, g, J, r, lower):
    """Minimize ``g.d + d.H.d/2`` s.t. ``J d = r`` and ``d >= lower``.

    Primal active-set loop over the bounds. ``H`` must be positive definite.
    The multiplier convention is ``H d + g = J.T lam + sum(mu_i e_i)`` with
    ``mu >= 0`` at the solution.

    Returns:
        ``(d, lam, active)`` with the equality multipliers ``lam`` and the
        sorted list of active bound indices.
    """
    n, m = H.shape[0], J.shape[0]
    active: list[int] = [i for i in range(n) if lower[i] >= 0.0]
    seen = set()
    for _ in range(4 * n + 8):
        key = tuple(active)
        if key in seen:
            break
        seen.add(key)
        E = np.eye(n)[active] if active else np.zeros((0, n))
        A = np.vstack([J, E])
        b = np.concatenate([r, lower[active]])
        d, mult = _kkt_solve(H, g, A, b)
        lam, mu = mult[:m], mult[m:]
        d[active] = lower[active]
        viol = lower - d
        viol[active] = -np.inf
        k = int(np.argmax(viol))
        if viol[k] > 1e-12 * max(1.0, abs(lower[k])):
            active = sorted(active + [k])
            continue
        if mu.size and mu.min() < 0:
            active = sorted(a for j, a in enumerate(active) if j != int(np.argmin(mu)))
            continue
        return d, lam, active
    return _enumerate_qp(H, g, J, r, lower)


def _enumerate_qp(H, g, J, r, lower):
    # Fallback for cycling: exhaustive search over active sets (n is tiny).
    n, m = H.shape[0], J.shape[0]
    best = None
    for mask in range(1 << n):
        active = [i for i in range(n) if mask >> i & 1]
        E = np.eye(n)[active] if active else np.zeros((0, n))
        d, mult = _kkt_solve(H, g, np.vstack([J, E]), np.concatenate([r, lower[active]]))
        d[active] = lower[active]
        if np.any(d < lower - 1e-12) or np.any(mult[m:] < -1e-12):
            continue
        q = g @ d + 0.5 * d @ H @ d
        if best is None or q < best[0]:
            best = (q, d, mult[:m], active)
    if best is None:
        raise ValueError("bounded QP subproblem is infeasible")
    return best[1], best[2], best[3]


def _damped_bfgs(B: np.ndarray, s: np.ndarray, y: np.ndarray) -> np.ndarray:
    Bs = B @ s
    sBs = float(s @ Bs)
    if sBs <= 0:
        return B
    sy = float(s @ y)
    if sy >= 0.2 * sBs:
        theta = 1.0
    else:
        theta = 0.8 * sBs / (sBs - sy)
    rvec = theta * y + (1 - theta) * Bs
    B_new = B - np.outer(Bs, Bs) / sBs + np.outer(rvec, rvec) / float(s @ rvec)
    B_new = 0.5 * (B_new + B_new.T)
    try:
        np.linalg.cholesky(B_new)
    except np.linalg.LinAlgError:
        # round-off-sized steps can break definiteness; keep the old model
        return B
    return B_new


def solve_sqp(p: NlpProblem, x0, opts: SqpOptions = SqpOptions()) -> SolveReport:
    """Run SQP from ``x0`` (clipped onto the bounds).

    Stops when the objective change of an accepted step is at most
    ``opts.ftol`` and the constraint residual is at most ``opts.ctol``, or
    after ``opts.max_iter`` iterations (``converged=False``).

    Raises:
        ValueError: when the objective is not finite at the start point.
    """
    lb = np.asarray(p.lower_bounds, dtype=float)
    x = np.maximum(np.asarray(x0, dtype=float), lb)
    f = p.objective(x)
    if not math.isfinite(f):
        raise ValueError("infeasible start: objective is not finite at x0")

    def jac(z):
        return p.eq_jacobian(z) if p.eq_jacobian is not None else fd_jacobian(p.eq_constraints, z)

    c = np.asarray(p.eq_constraints(x), dtype=float)
    g = fd_gradient(p.objective, x, f)
    J = jac(x)
    B = np.eye(x.size)
    rho = 1.0
    history = []
    message = "iteration limit reached"
    converged = False
    it = 0
    for it in range(1, opts.max_iter + 1):
        d, lam, active = solve_bounded_qp(B, g, J, -c, lb - x)
        rho = max(rho, 2.0 * float(np.max(np.abs(lam))) if lam.size else rho)
        merit = f + rho * np.sum(np.abs(c))
        slope = float(g @ d) - rho * float(np.sum(np.abs(c)))
        alpha = 1.0
        while True:
            x_try = x + alpha * d
            x_try = np.maximum(x_try, lb)
            if alpha == 1.0:
                x_try[active] = lb[active]
            f_try = p.objective(x_try)
            c_try = np.asarray(p.eq_constraints(x_try), dtype=float)
            merit_try = f_try + rho * np.sum(np.abs(c_try))
            if math.isfinite(merit_try) and merit_try <= merit + opts.armijo * alpha * min(slope, 0.0):
                break
            alpha *= opts.backtrack
            if alpha < opts.min_step:
                break
        if alpha < opts.min_step:
            message = "line search failed"
            res = float(np.max(np.abs(c))) if c.size else 0.0
            converged = res <= opts.ctol
            break
        s = x_try - x
        g_new = fd_gradient(p.objective, x_try, f_try)
        J_new = jac(x_try)
        y = (g_new - J_new.T @ lam) - (g - J.T @ lam)
        B = _damped_bfgs(B, s, y)
        df = abs(f_try - f)
        x, f, c, g, J = x_try, f_try, c_try, g_new, J_new
        res = float(np.max(np.abs(c))) if c.size else 0.0
        history.append((it, f, res, alpha))
        step = float(np.max(np.abs(s)))
        if df <= opts.ftol and res <= opts.ctol and step <= opts.xtol * max(1.0, float(np.max(np.abs(x)))):
            converged = True
            message = "function change, step and constraint residual below tolerance"
            break
    res = float(np.max(np.abs(c))) if c.size else 0.0
    return SolveReport(x, float(f), res, it, converged, message, history)
