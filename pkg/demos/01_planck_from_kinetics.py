"""Planck occupancy from photon-molecule kinetics.

A mode of A cells exchanges quanta with two-level molecules held at the
Boltzmann ratio. Both mean-field closures relax to A / (e^x - 1), and the
birth-death jump process fluctuates around it with a geometric law.
"""

import math

import numpy as np

from stochbridge import kinetics as kn

# %% Mean-field relaxation for a few temperatures
A = 10.0
for x in (0.5, 1.0, 2.0):
    cell = kn.ModeCell(A=A, N=0.0)
    for form in kn.FORMS:
        pair = kn.boltzmann_pair(x, form=form, A=A)
        rate = kn.max_relaxation_rate(form, cell, pair)
        res = kn.evolve_mean_field(cell, pair, form, t_end=400 / rate)
        print(f"x={x:3.1f} {form:24s} N_final={res.fixed_point:.9f}  A/(e^x-1)={A / math.expm1(x):.9f}")

# %% Stochastic picture: one mode, A = 1, x = 1
cell = kn.ModeCell(A=1.0, N=0.0)
pair = kn.boltzmann_pair(1.0, form="einstein_three_process", A=1.0)
traj = kn.simulate_jump_process(cell, pair, 200_000, seed=1)
occ = traj.occupation()
geometric = (1 - math.exp(-1)) * np.exp(-np.arange(occ.size))
print("\nN   time fraction   geometric")
for n in range(6):
    print(f"{n}   {occ[n]:.5f}         {geometric[n]:.5f}")
print(f"mean {traj.mean():.4f} vs 1/(e-1) = {1 / math.expm1(1):.4f}")

# %% Rate linearity of a cold absorber
lo, hi = kn.absorption_slopes(A=100.0, kappa=1.0, beta=0.5)
print(f"\nabsorption slope near N=0: {lo:.12f}, at N~100A: {hi:.12f}")
