"""Persistent random walk: ballistic at short times, diffusive at long times.

Walkers move at speed c and reverse direction at rate lambda. Their spread
follows the telegrapher variance, which goes as (ct)^2 early and 2Dt late with
D = c^2 / (2 lambda). The same law solved as a two-component PDE matches the
walker histogram.
"""

import numpy as np

from stochbridge import kac
from stochbridge._grid import Grid1D

c, lam = 1.0, 1.0
times = [0.01, 0.1, 1.0, 10.0, 20.0, 40.0]
snaps, _ = kac.walker_snapshots(100_000, c, lam, times, seed=3)

# %% Variance against the exact formula
print("   t      MC var        exact      |z|    var/(ct)^2")
for t, x in zip(times, snaps):
    v, se = kac.sample_variance(x)
    exact = kac.telegrapher_variance(c, lam, t)
    print(f"{t:5.2f}  {v:11.5f}  {exact:11.5f}  {abs(v - exact) / se:5.2f}   {v / (c * t) ** 2:.4f}")
D = kac.diffusion_coefficient(c, lam)
slope = (kac.sample_variance(snaps[5])[0] - kac.sample_variance(snaps[4])[0]) / 20.0
print(f"late slope {slope:.4f} vs 2D = {2 * D:.4f}")

# %% Walkers against the PDE at t = 5
dx, t = 0.01, 5.0
grid = Grid1D.centered(0.0, 2 * t, dx)
field = kac.evolve_kac(kac.KacField.point(grid, 0.0, c, lam), dx, int(round(t / dx)))
ens = kac.simulate_walkers(100_000, c, lam, field.t, seed=4)
print(f"\nL1(MC, PDE) at t=5: {kac.compare_mc_pde(ens, field, bins=100):.4f}")
print(f"mass outside the light cone: {kac.mass_outside_cone(grid, field.rho, 0.0, c, field.t):.2e}")
