"""Stochastic particles that reproduce |psi|^2.

Particles follow dx = b dt + sqrt(2D) dW with D = hbar / 2m and the forward
drift b = v + u built from the wavefunction. A cloud started from the ground
state stays in it; a cloud started at a point relaxes toward it.
"""

import numpy as np

from stochbridge import nelson as ne
from stochbridge._grid import Grid1D

grid = Grid1D.centered(0.0, 8.0, 0.05)
w, E0 = ne.stationary_state(grid, ne.Potential("harmonic", {"omega": 1.0}))
print(f"discrete ground-state energy {E0:.6f}")

# %% Quantum potential plus potential is flat
region = ne.mass_quantile_mask(w)
qv = (ne.quantum_potential(w) + w.V)[region]
print(f"Q + V on the central 90% of the mass: {qv.min():.5f} .. {qv.max():.5f}")

# %% The ground-state cloud stays put
edges = np.linspace(-4, 4, 41)
run = ne.sample_cloud(w, 20_000, 5.0, 0.008, seed=5, record_times=[0.0, 2.5, 5.0])
for t, x in zip(run.times, run.snapshots):
    print(f"t={t:3.1f}  L1 to |psi|^2: {ne.cloud_l1(x, w, edges):.4f}  <x>={x.mean():+.4f}")

# %% A coherent state: the cloud follows the packet
packet = ne.harmonic_ground_state(grid, 1.0, shift=1.0)
run = ne.sample_cloud(packet, 20_000, 3.14, 0.002, seed=6, record_times=[0.0, 1.57, 3.14], evolve_psi=True)
for t, x in zip(run.times, run.snapshots):
    print(f"t={t:4.2f}  cloud <x>={x.mean():+.3f}  cos t={np.cos(t):+.3f}")
