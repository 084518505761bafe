"""Right and left movers on a lattice: a walk that solves 1+1 Dirac.

Right and left movers shifted by one cell per step, mixed by a mass rotation,
give a unitary walk whose plane waves obey omega^2 = c^2 k^2 + mu^2. Letting the
movers also swap at a rate lambda turns the walk into a damped one whose single
component obeys a telegrapher equation with a mass term.
"""

import numpy as np

from stochbridge import chiral as ch
from stochbridge.experiments import te_mass_refinement

# %% Dispersion relation
for p in ch.dispersion_sweep([0.0, 0.5, 1.0, 2.0], [0.0, 1.0]):
    print(f"k={p.k:3.1f} mu={p.mu:3.1f}  omega={p.omega_measured + 0.0:.7f}  theory={p.omega_theory:.7f}")

# %% Second-order equation for one mover
for lam, mu in [(0.5, 0.0), (0.5, 1.0), (1.0, 2.0)]:
    rows = te_mass_refinement(lam, mu, levels=3)
    res = [r[2] for r in rows]
    orders = [np.log2(a / b) for a, b in zip(res, res[1:])]
    print(f"lambda={lam} mu={mu}: residuals {', '.join(f'{r:.2e}' for r in res)}  orders {orders[0]:.3f}, {orders[1]:.3f}")
