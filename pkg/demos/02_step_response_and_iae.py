# # Step response and the IAE objective
#
# The closed loop is discretized with an exact zero-order hold, so a 10 ms
# step introduces no integration error. IAE is the trapezoidal integral of
# |1 - y| over 0..20 s.

import numpy as np

from pmwctune import PidGains, SimGrid, TransferFunction, iae, iae_of_gains, step_metrics, step_response
from pmwctune.lti import to_state_space
from pmwctune.simulation import closed_loop

# ## Exactness check on a first-order lag

lag = to_state_space(TransferFunction.from_coeffs([1], [1, 1]))
resp = step_response(lag, SimGrid(5.0, 0.01))
print("max |y - (1 - e^-t)| =", np.max(np.abs(resp.y - (1 - np.exp(-resp.t)))))

# ## Two controllers on 1/(s+1)^3

plant = TransferFunction.from_coeffs([1], [1, 3, 3, 1])
for label, gains in [("PMwc", PidGains(2.732, 1.171, 1.903)), ("reference", PidGains(2.732, 0.977, 1.709))]:
    r = step_response(to_state_space(closed_loop(gains, plant)))
    m = step_metrics(r, final_value=1.0)
    print(f"{label:9s} IAE={iae(r):.4f}  settling(2%)={m.settling_time:.2f} s  overshoot={m.overshoot_pct:.2f} %")

# ## Grid sensitivity

g = PidGains(2.732, 1.171, 1.903)
for dt in (0.02, 0.01, 0.005):
    print(f"dt={dt}: IAE={iae_of_gains(g, plant, SimGrid(20.0, dt)):.6f}")
