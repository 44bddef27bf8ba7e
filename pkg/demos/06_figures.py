# # Step-response and Bode comparison plots for 1/(s+1)^3
#
# Needs matplotlib (not a library dependency). Writes two PNG files next to
# this script.

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from pmwctune import PidGains, TransferFunction, bode_grid, step_response, tune
from pmwctune.lti import pid_tf, series, to_state_space
from pmwctune.simulation import closed_loop

out = Path(__file__).parent
plant = TransferFunction.from_coeffs([1], [1, 3, 3, 1])
controllers = {"PMwc-Tune": tune(plant).gains, "reference": PidGains(2.732, 0.977, 1.709)}

fig, ax = plt.subplots()
for label, g in controllers.items():
    r = step_response(to_state_space(closed_loop(g, plant)))
    ax.plot(r.t, r.y, label=label)
ax.set_xlabel("t [s]")
ax.set_ylabel("y")
ax.legend()
fig.savefig(out / "step_comparison.png", dpi=120)

fig, (ax_mag, ax_ph) = plt.subplots(2, 1, sharex=True)
for label, g in controllers.items():
    rows = bode_grid(series(pid_tf(g), plant), 1e-2, 1e2, 100)
    ax_mag.semilogx(rows[:, 0], rows[:, 1], label=label)
    ax_ph.semilogx(rows[:, 0], rows[:, 2], label=label)
ax_mag.set_ylabel("|L| [dB]")
ax_ph.set_ylabel("angle L [deg]")
ax_ph.set_xlabel("w [rad/s]")
ax_mag.legend()
fig.savefig(out / "bode_comparison.png", dpi=120)
print("wrote", out / "step_comparison.png", "and", out / "bode_comparison.png")
