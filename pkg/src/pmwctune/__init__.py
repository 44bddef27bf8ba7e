"""PID tuning that minimizes step-response IAE at an exact phase margin and crossover."""

from .frequency import MarginReport, bode_grid, gain_crossovers, phase_margin_at, verify_margins
from .lti import (
    PidGains,
    StateSpace,
    TransferFunction,
    dcgain,
    feedback_unity,
    freq_response,
    is_stable,
    pid_tf,
    poles,
    series,
    to_state_space,
)
from .optimizer import NlpProblem, SolveReport, SqpOptions, fd_gradient, solve_sqp
from .polynomials import Polynomial, roots
from .simulation import SimGrid, StepResponse, iae, iae_of_gains, step_metrics, step_response
from .tuning import (
    InfeasibleSpecError,
    TuneResult,
    TuneSpec,
    constraint_residuals,
    initial_gains,
    manifold_reduce,
    oracle_tune,
    tune,
)

__version__ = "0.1.0"
