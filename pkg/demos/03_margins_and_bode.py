# # Phase margin, crossover and Bode data

from pmwctune import PidGains, TransferFunction, bode_grid, gain_crossovers, verify_margins
from pmwctune.lti import pid_tf, series

plant = TransferFunction.from_coeffs([1], [1, 2, 1])

for label, gains in [("PMwc", PidGains(1.732, 1.251, 0.251)), ("reference", PidGains(1.873, 1.336, 0.634))]:
    loop = series(pid_tf(gains), plant)
    m = verify_margins(loop)
    print(f"{label:9s} wc={m.wc_achieved:.4f} rad/s  PM={m.pm_achieved:.2f} deg  crossings={m.crossing_count}")

# A loop that crosses 0 dB twice reports the lowest crossing and the count.

bandpass = TransferFunction.from_coeffs([2.5, 0], [1, 1, 1])
print("crossings:", gain_crossovers(bandpass), verify_margins(bandpass))

# ## Bode rows (w, dB, unwrapped degrees)

rows = bode_grid(series(pid_tf(PidGains(1.732, 1.251, 0.251)), plant), 0.1, 10, 4)
for w, mag, ph in rows:
    print(f"{w:8.4f} {mag:8.3f} {ph:9.3f}")
