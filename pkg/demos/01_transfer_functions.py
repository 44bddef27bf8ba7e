# # Transfer functions, poles and frequency response
#
# Plants and controllers are ratios of real polynomials with coefficients in
# descending powers of s.

import numpy as np

from pmwctune import PidGains, Polynomial, TransferFunction, roots
from pmwctune.lti import feedback_unity, freq_response, is_stable, pid_tf, poles, series, to_state_space

# ## The benchmark plant 1/(s+1)^3

plant = TransferFunction.from_coeffs([1], [1, 3, 3, 1])
print(plant)
print("G(j1) =", freq_response(plant, 1.0))
print("|G(j1)| =", abs(freq_response(plant, 1.0)), " angle =", np.degrees(np.angle(freq_response(plant, 1.0))))

# A triple root only converges to cluster accuracy, but the residual is tiny.

print("roots of (s+1)^3:", roots(Polynomial([1, 3, 3, 1])))

# ## PID in series with the plant, then unity feedback

controller = pid_tf(PidGains(kp=2.732, ki=1.171, kd=1.903))
loop = series(controller, plant)
closed = feedback_unity(loop)
print("L(s) =", loop)
print("T(s) =", closed)
print("closed-loop poles:", poles(closed))
print("stable:", is_stable(closed))

# ## State-space realization used by the simulator

ss = to_state_space(closed)
print("A =\n", ss.A)
print("C =", ss.C, " D =", ss.D)
