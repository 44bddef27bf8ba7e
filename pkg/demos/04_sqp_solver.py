# # The SQP engine on its own
#
# Equality constraints, lower bounds, damped BFGS, l1 merit line search.

import numpy as np

from pmwctune import NlpProblem, solve_sqp

# Minimize (x-3)^2 + y^2 on the line x + y = 1 with y >= 0: the bound is active.

problem = NlpProblem(
    objective=lambda x: (x[0] - 3) ** 2 + x[1] ** 2,
    eq_constraints=lambda x: np.array([x[0] + x[1] - 1]),
    lower_bounds=np.zeros(2),
    eq_jacobian=lambda x: np.array([[1.0, 1.0]]),
)
report = solve_sqp(problem, [0.2, 0.2])
print(report)
for it, f, res, alpha in report.history:
    print(f"iter {it}: f={f:.6g} residual={res:.1e} step={alpha}")
