"""1+1 Dirac dynamics and the chiral persistent walk.

Fields are stored in the Weyl (chirality) basis: ``psi_R`` moves right and
``psi_L`` left at speed ``c``, and the mass frequency ``mu = m c^2 / hbar``
couples them off-diagonally,

    (d_t + c d_x) psi_R = -i mu psi_L
    (d_t - c d_x) psi_L = -i mu psi_R.

``to_dirac_basis`` maps to the representation with ``alpha = sigma_x`` and
``beta = sigma_z``. The chiral walk is the separate, non-unitary system

    (d_t +- c d_x) psi_{R/L} = -lam psi_{R/L} + lam psi_{L/R} - i mu psi_{R/L}

in which the mass is a global phase and ``lam`` damps ``psi_R - psi_L``.

Both steppers are Strang splittings around a periodic shift by ``c dt``: a
roll when ``c dt = dx`` and an exact Fourier shift otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence

import numpy as np

from . import _rng
from ._grid import Grid1D

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)


@dataclass
class SpinorField1D:
    grid: Grid1D
    psi_R: np.ndarray
    psi_L: np.ndarray
    c: float = 1.0
    mass_freq: float = 0.0
    lambda_flip: float = 0.0
    t: float = 0.0

    def __post_init__(self):
        self.psi_R = np.asarray(self.psi_R, dtype=complex)
        self.psi_L = np.asarray(self.psi_L, dtype=complex)
        if self.psi_R.shape != (self.grid.n,) or self.psi_L.shape != (self.grid.n,):
            raise ValueError("spinor components must match the grid")
        if self.c < 0 or self.lambda_flip < 0:
            raise ValueError("c and lambda_flip must be non-negative")

    def norm(self) -> float:
        return float(np.sum(np.abs(self.psi_R) ** 2 + np.abs(self.psi_L) ** 2) * self.grid.dx)

    def params(self) -> tuple[float, float, float]:
        return (self.c, self.mass_freq, self.lambda_flip)

    def courant(self, dt: float) -> float:
        return self.c * dt / self.grid.dx


def gaussian_spinor(
    grid: Grid1D, x0: float, sigma: float, *, right: complex = 1.0, left: complex = 0.0, k0: float = 0.0, **params
) -> SpinorField1D:
    """Normalized Gaussian envelope times the constant spinor ``(right, left)``."""
    env = np.exp(-((grid.x - x0) ** 2) / (4 * sigma**2) + 1j * k0 * grid.x)
    f = SpinorField1D(grid, right * env, left * env, **params)
    s = math.sqrt(f.norm())
    return replace(f, psi_R=f.psi_R / s, psi_L=f.psi_L / s)


def to_dirac_basis(f: SpinorField1D) -> tuple[np.ndarray, np.ndarray]:
    """Components in the ``alpha = sigma_x``, ``beta = sigma_z`` representation."""
    return tuple(HADAMARD @ np.vstack([f.psi_R, f.psi_L]))


def from_dirac_basis(grid: Grid1D, upper, lower, **params) -> SpinorField1D:
    R, L = HADAMARD @ np.vstack([np.asarray(upper, complex), np.asarray(lower, complex)])
    return SpinorField1D(grid, R, L, **params)


# ---------------------------------------------------------------- pieces


def _shift(values: np.ndarray, cells: float) -> np.ndarray:
    """Periodic translation by ``cells`` grid cells (positive moves right)."""
    whole = round(cells)
    if abs(cells - whole) < 1e-12:
        return np.roll(values, int(whole))
    k = 2 * np.pi * np.fft.fftfreq(values.size)
    if values.size % 2 == 0:
        k[values.size // 2] = 0.0  # keep the Nyquist mode real
    return np.fft.ifft(np.fft.fft(values) * np.exp(-1j * k * cells))


def _advect(f: SpinorField1D, dt: float) -> tuple[np.ndarray, np.ndarray]:
    nu = f.courant(dt)
    if nu > 1 + 1e-12:
        raise ValueError(f"CFL violated: c dt / dx = {nu:.6g} > 1")
    if nu == 0:
        return f.psi_R, f.psi_L
    return _shift(f.psi_R, nu), _shift(f.psi_L, -nu)


def _mass_rotation(R, L, mu_dt: float):
    # exp(-i mu dt sigma_x)
    co, si = math.cos(mu_dt), math.sin(mu_dt)
    return co * R - 1j * si * L, co * L - 1j * si * R


def _flip_exchange(R, L, lam_dt: float, mu_dt: float):
    # exp(dt [lam (sigma_x - I) - i mu I]): the sum keeps its modulus, the difference decays
    phase = complex(math.cos(mu_dt), -math.sin(mu_dt))
    s, d = (R + L) * phase, (R - L) * (phase * math.exp(-2 * lam_dt))
    return 0.5 * (s + d), 0.5 * (s - d)


# -------------------------------------------------------------- steppers


def dirac_step(f: SpinorField1D, dt: float) -> SpinorField1D:
    """Unitary split step: half mass rotation, chiral shift, half mass rotation."""
    if f.lambda_flip != 0:
        raise ValueError("dirac_step needs lambda_flip = 0; use chiral_walk_step")
    h = 0.5 * f.mass_freq * dt
    R, L = _mass_rotation(f.psi_R, f.psi_L, h)
    R, L = _advect(replace(f, psi_R=R, psi_L=L), dt)
    R, L = _mass_rotation(R, L, h)
    return replace(f, psi_R=R, psi_L=L, t=f.t + dt)


def chiral_walk_step(f: SpinorField1D, dt: float) -> SpinorField1D:
    """Split step of the chiral walk: half exchange, chiral shift, half exchange."""
    lam_h, mu_h = 0.5 * f.lambda_flip * dt, 0.5 * f.mass_freq * dt
    R, L = _flip_exchange(f.psi_R, f.psi_L, lam_h, mu_h)
    R, L = _advect(replace(f, psi_R=R, psi_L=L), dt)
    R, L = _flip_exchange(R, L, lam_h, mu_h)
    return replace(f, psi_R=R, psi_L=L, t=f.t + dt)


def evolve(f: SpinorField1D, dt: float, n_steps: int, *, walk: bool = False, every: int = 0):
    """``n_steps`` steps of ``dirac_step`` (or ``chiral_walk_step`` with ``walk``).

    Returns the final field and, with ``every > 0``, snapshots every ``every``
    steps including the initial one.
    """
    step = chiral_walk_step if walk else dirac_step
    snaps = [f] if every else []
    for i in range(1, n_steps + 1):
        f = step(f, dt)
        if every and i % every == 0:
            snaps.append(f)
    return f, snaps


# ------------------------------------------------------------ dispersion


def dirac_frequency(c: float, k: float, mu: float) -> float:
    return math.sqrt(c * c * k * k + mu * mu)


def plane_wave_eigenspinor(grid: Grid1D, k: float, *, c: float = 1.0, mu: float = 0.0) -> SpinorField1D:
    """Positive-frequency plane wave ``e^{ikx} (w + ck, mu)`` (normalized)."""
    w = dirac_frequency(c, k, mu)
    a, b = (w + c * k, mu) if w + c * k > 0 else (mu, w - c * k)
    if a == 0 and b == 0:
        a = 1.0
    s = math.hypot(a, b) * math.sqrt(grid.length)
    wave = np.exp(1j * k * grid.x)
    return SpinorField1D(grid, a / s * wave, b / s * wave, c=c, mass_freq=mu)


class DispersionPoint(NamedTuple):
    k: float
    mu: float
    omega_measured: float
    omega_theory: float

    @property
    def rel_error(self) -> float:
        return abs(self.omega_measured - self.omega_theory) / self.omega_theory if self.omega_theory else abs(
            self.omega_measured
        )


def dispersion_check(
    k: float, *, c: float = 1.0, mu: float = 0.0, length: float = 2 * np.pi * 4, n: int = 4096,
    dt: float | None = None, t_end: float = 10.0,
) -> DispersionPoint:
    """Evolve the positive-frequency eigenspinor and measure its phase rotation rate.

    The periodic box must hold a whole number of wavelengths and resolve the
    wave with ``k dx <= 0.1``. The default step is the exact shift ``c dt = dx``.
    """
    grid = Grid1D.periodic(0.0, length, n)
    cycles = k * length / (2 * np.pi)
    if abs(cycles - round(cycles)) > 1e-9:
        raise ValueError(f"k = {k} is not commensurate with the periodic box")
    if abs(k) * grid.dx > 0.1 + 1e-12:
        raise ValueError("k dx must not exceed 0.1")
    if dt is None:
        dt = grid.dx / c if c > 0 else 0.01
    n_steps = max(1, int(round(t_end / dt)))
    f0 = plane_wave_eigenspinor(grid, k, c=c, mu=mu)
    f, total = f0, 0.0
    prev = np.concatenate([f0.psi_R, f0.psi_L])
    for _ in range(n_steps):
        f = dirac_step(f, dt)
        cur = np.concatenate([f.psi_R, f.psi_L])
        total += np.angle(np.vdot(prev, cur))
        prev = cur
    return DispersionPoint(k, mu, -total / (n_steps * dt), dirac_frequency(c, k, mu))


def _dispersion_job(args):
    k, mu, kw = args
    return dispersion_check(k, mu=mu, **kw)


def dispersion_sweep(
    ks: Sequence[float], mus: Sequence[float], workers: int | None = None, **kw
) -> list[DispersionPoint]:
    jobs = [(k, mu, kw) for mu in mus for k in ks]
    return _rng.map_ordered(_dispersion_job, jobs, workers)


# ------------------------------------------------------------- residuals


def _check_snapshots(snaps: Sequence[SpinorField1D]) -> None:
    if len(snaps) != 3:
        raise ValueError("need three consecutive snapshots")
    a = snaps[1]
    for s in (snaps[0], snaps[2]):
        if s.params() != a.params() or not s.grid.same_as(a.grid):
            raise ValueError("snapshots differ in grid or parameters")


def _derivatives(snaps: Sequence[SpinorField1D], dt: float):
    prev, cur, nxt = (s.psi_R for s in snaps)
    dx = snaps[1].grid.dx
    r_tt = (nxt - 2 * cur + prev) / dt**2
    r_t = (nxt - prev) / (2 * dt)
    r_xx = (np.roll(cur, -1) - 2 * cur + np.roll(cur, 1)) / dx**2
    return cur, r_t, r_tt, r_xx


def _l2(r: np.ndarray, dx: float) -> float:
    return math.sqrt(float(np.sum(np.abs(r) ** 2) * dx))


def telegrapher_residual(snaps: Sequence[SpinorField1D], dt: float) -> float:
    """L2 residual of ``R_tt + 2 lam R_t - c^2 R_xx = 0`` on ``psi_R``."""
    _check_snapshots(snaps)
    f = snaps[1]
    _, r_t, r_tt, r_xx = _derivatives(snaps, dt)
    return _l2(r_tt + 2 * f.lambda_flip * r_t - f.c**2 * r_xx, f.grid.dx)


def te_mass_residual(snaps: Sequence[SpinorField1D], dt: float) -> float:
    """L2 residual of the second-order equation for ``psi_R`` in the chiral walk,

        R_tt + 2 (lam + i mu) R_t - c^2 R_xx + (2 i lam mu - mu^2) R = 0,

    obtained by eliminating ``psi_L``. Centred differences in x and t.
    """
    _check_snapshots(snaps)
    f = snaps[1]
    lam, mu = f.lambda_flip, f.mass_freq
    r, r_t, r_tt, r_xx = _derivatives(snaps, dt)
    res = r_tt + 2 * (lam + 1j * mu) * r_t - f.c**2 * r_xx + (2j * lam * mu - mu * mu) * r
    return _l2(res, f.grid.dx)
