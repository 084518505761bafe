"""A two-level emitter in a thermal bath, and what a cavity does to it.

The Lindblad populations relax at gamma (2N + 1) to N / (2N + 1); the ratio of
emission to absorption is (N + 1) / N. A cavity scales gamma by the Purcell
factor, and a damped signal has a Lorentzian power spectrum of width epsilon.
"""

import numpy as np

from stochbridge import emitter as em

# %% Relaxation from the excited state
for N in (0.0, 0.5, 1.0, 5.0):
    b = em.BathCoupling(gamma=1.0, N_th=N)
    dt = em.max_stable_dt(b)
    traj = em.evolve(em.TwoLevelDensity.excited(), b, dt, int(round(20 / (b.relaxation_rate * dt))))
    inf = N / (2 * N + 1)
    k = traj.times <= 8 / b.relaxation_rate
    fit = em.fit_relaxation_rate(traj.times[k], traj.rho_ee[k], inf)
    w_em, w_abs = em.golden_rule_rates(b)
    ratio = w_em / w_abs if w_abs > 0 else np.inf
    print(f"N={N:3.1f}  rho_ee(inf)={traj.rho_ee[-1]:.8f} (theory {inf:.8f})  "
          f"rate fit {fit:.6f} (theory {2 * N + 1:.1f})  W_em/W_abs={ratio:.4f}")

# %% Purcell factor of a small high-Q cavity
env = em.CavityEnv(wavelength_over_n=1.0, Q=1e4, V=1.0, xi=1.0)
print(f"\nPurcell factor: {em.purcell_factor(env):.4f}")
for Q in (1e3, 1e4, 1e5):
    print(f"  Q={Q:8.0f}  F_P={em.purcell_factor(em.CavityEnv(wavelength_over_n=1.0, Q=Q, V=1.0, xi=1.0)):.2f}")

# %% Lineshape of a damped emitter
for eps in (0.05, 0.1, 0.5):
    ls = em.lineshape(em.LineshapeSpec.centered(eps, 5.0))
    print(f"eps={eps:4.2f}  FWHM from signal {ls.fwhm_fourier:.6f}")
