# # Tuning the 1/(s+1)^n benchmarks at PM = 60 deg, wc = 1 rad/s
#
# The crossover conditions pin Kp and tie Kd to Ki, so the search happens
# along a line in gain space. SQP and a direct line search should agree.

import time

from pmwctune import TransferFunction, TuneSpec, manifold_reduce, oracle_tune, tune

spec = TuneSpec(pm_target=60.0, wc_target=1.0)
plants = {
    1: TransferFunction.from_coeffs([1], [1, 1]),
    2: TransferFunction.from_coeffs([1], [1, 2, 1]),
    3: TransferFunction.from_coeffs([1], [1, 3, 3, 1]),
}

for n, plant in plants.items():
    line = manifold_reduce(plant, spec)
    print(f"n={n}: Kp fixed at {line.kp:.4f}, Kd = Ki + ({line.imag_offset:+.4f}), Ki >= {line.ki_min:.4f}")

    t0 = time.perf_counter()
    r = tune(plant, spec)
    elapsed = time.perf_counter() - t0
    o = oracle_tune(plant, spec)
    print(
        f"  SQP    Kp={r.kp:.3f} Ki={r.ki:.3f} Kd={r.kd:.3f} PM={r.pm_achieved:.2f} wc={r.wc_achieved:.4f} "
        f"IAE={r.iae:.4f} stable={r.stable} ({r.solver.iterations} iters, {elapsed:.2f} s)"
    )
    print(f"  oracle Kp={o.kp:.3f} Ki={o.ki:.3f} Kd={o.kd:.3f} IAE={o.iae:.4f}")

# ## Other targets

r = tune(plants[2], TuneSpec(pm_target=45.0, wc_target=1.0))
print("PM=45, wc=1 on 1/(s+1)^2:", r.as_dict())
