"""Nelson's stochastic mechanics in one dimension.

A wavefunction ``psi = sqrt(rho) exp(i S / hbar)`` evolving under

    i hbar psi_t = -(hbar^2 / 2m) psi_xx + V psi

defines a current velocity ``v = S_x / m`` and an osmotic velocity
``u = D (ln rho)_x`` with ``D = hbar / 2m``. Particles following the forward
Ito diffusion ``dX = (v + u) dt + sqrt(2 D) dW`` keep the density ``rho``.

Cells where ``rho`` drops below ``RHO_FLOOR * max(rho)`` are flagged: u, v and
Q are returned as NaN there, and the sampler extends the nearest valid drift
across them.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np
from scipy import sparse
from scipy.linalg import eigh_tridiagonal
from scipy.sparse.linalg import splu

from . import _rng
from ._grid import Grid1D

RHO_FLOOR = 1e-12


@dataclass(frozen=True)
class Potential:
    """``free``, ``harmonic`` (``omega``) or ``double_well`` (``depth``, ``x_min``)."""

    name: str = "free"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        required = {"free": (), "harmonic": ("omega",), "double_well": ("depth", "x_min")}
        if self.name not in required:
            raise ValueError(f"unknown potential {self.name!r}")
        missing = [k for k in required[self.name] if k not in self.params]
        if missing:
            raise ValueError(f"potential {self.name!r} needs {missing}")

    def __call__(self, x: np.ndarray, mass: float) -> np.ndarray:
        x = np.asarray(x, float)
        if self.name == "harmonic":
            return 0.5 * mass * self.params["omega"] ** 2 * x * x
        if self.name == "double_well":
            a, b = self.params["depth"], self.params["x_min"]
            return a * ((x / b) ** 2 - 1.0) ** 2
        return np.zeros_like(x)


@dataclass
class WaveFunction1D:
    grid: Grid1D
    psi: np.ndarray
    hbar: float = 1.0
    mass: float = 1.0
    potential: Potential = field(default_factory=Potential)
    t: float = 0.0

    def __post_init__(self):
        self.psi = np.asarray(self.psi, dtype=complex)
        if self.psi.shape != (self.grid.n,):
            raise ValueError("psi must match the grid")
        if not (self.hbar > 0 and self.mass > 0):
            raise ValueError("hbar and mass must be positive")

    @property
    def rho(self) -> np.ndarray:
        return np.abs(self.psi) ** 2

    @property
    def V(self) -> np.ndarray:
        return self.potential(self.grid.x, self.mass)

    @property
    def D(self) -> float:
        return self.hbar / (2.0 * self.mass)

    def norm(self) -> float:
        return float(np.sum(self.rho) * self.grid.dx)

    def normalized(self) -> "WaveFunction1D":
        return replace(self, psi=self.psi / math.sqrt(self.norm()))

    def mean_x(self) -> float:
        return float(np.dot(self.grid.x, self.rho) * self.grid.dx / self.norm())


# ----------------------------------------------------------- constructors


def gaussian_packet(
    grid: Grid1D,
    x0: float,
    sigma: float,
    k0: float = 0.0,
    *,
    hbar: float = 1.0,
    mass: float = 1.0,
    potential: Potential | None = None,
) -> WaveFunction1D:
    """Normalized packet with ``|psi|^2`` of standard deviation ``sigma``."""
    x = grid.x
    psi = np.exp(-((x - x0) ** 2) / (4 * sigma**2) + 1j * k0 * x)
    w = WaveFunction1D(grid, psi, hbar, mass, potential or Potential())
    return w.normalized()


def harmonic_ground_state(
    grid: Grid1D, omega: float, *, hbar: float = 1.0, mass: float = 1.0, shift: float = 0.0
) -> WaveFunction1D:
    """Analytic oscillator ground state, optionally displaced (coherent state at rest)."""
    sigma = math.sqrt(hbar / (2 * mass * omega))
    return gaussian_packet(
        grid, shift, sigma, hbar=hbar, mass=mass, potential=Potential("harmonic", {"omega": omega})
    )


def _hamiltonian_bands(grid: Grid1D, V: np.ndarray, hbar: float, mass: float):
    kin = hbar * hbar / (2 * mass * grid.dx**2)
    return 2 * kin + V, np.full(grid.n - 1, -kin)


def stationary_state(
    grid: Grid1D, potential: Potential, *, hbar: float = 1.0, mass: float = 1.0, level: int = 0
) -> tuple[WaveFunction1D, float]:
    """Eigenvector of the discretized Hamiltonian (Dirichlet ends) and its energy.

    Unlike the analytic eigenfunction it is stationary under the solver to
    round-off.
    """
    diag, off = _hamiltonian_bands(grid, potential(grid.x, mass), hbar, mass)
    E, vec = eigh_tridiagonal(diag, off, select="i", select_range=(level, level))
    phi = vec[:, 0]
    if phi[np.argmax(np.abs(phi))] < 0:
        phi = -phi
    w = WaveFunction1D(grid, phi.astype(complex), hbar, mass, potential).normalized()
    return w, float(E[0])


# ----------------------------------------------------------------- solver


class SchrodingerSolver:
    """Crank-Nicolson stepping with a cached LU factorization.

    ``(1 + i dt H / 2 hbar) psi' = (1 - i dt H / 2 hbar) psi`` with the three-point
    Laplacian and ``psi = 0`` beyond the grid ends; unitary to round-off.
    """

    def __init__(self, grid: Grid1D, V: np.ndarray, dt: float, hbar: float = 1.0, mass: float = 1.0):
        diag, off = _hamiltonian_bands(grid, V, hbar, mass)
        H = sparse.diags([off, diag, off], [-1, 0, 1], format="csc")
        a = 0.5j * dt / hbar
        eye = sparse.identity(grid.n, dtype=complex, format="csc")
        self.dt = dt
        self._B = (eye - a * H).tocsr()
        lhs = (eye + a * H).tocsc()
        self._lu = splu(lhs)
        assert np.all(np.isfinite(self._lu.U.diagonal())) and np.all(self._lu.U.diagonal() != 0)

    @classmethod
    def for_wavefunction(cls, w: WaveFunction1D, dt: float) -> "SchrodingerSolver":
        number = accuracy_number(w, dt)
        if number > 0.1:
            warnings.warn(f"time step is coarse for this state (accuracy number {number:.3g} > 0.1)")
        return cls(w.grid, w.V, dt, w.hbar, w.mass)

    def step(self, psi: np.ndarray) -> np.ndarray:
        return self._lu.solve(self._B @ psi)


def accuracy_number(w: WaveFunction1D, dt: float) -> float:
    """``dt (max|V| + hbar^2 k^2 / 2m) / hbar`` over the state's support.

    ``k`` is the largest wavenumber carrying more than 1e-6 of the spectral
    power; ``V`` is taken where ``rho`` exceeds 1e-6 of its peak.
    """
    rho = w.rho
    on = rho > 1e-6 * rho.max()
    vmax = float(np.max(np.abs(w.V[on])))
    power = np.abs(np.fft.fft(w.psi)) ** 2
    k = np.abs(2 * np.pi * np.fft.fftfreq(w.grid.n, w.grid.dx))
    order = np.argsort(k)
    tail = np.cumsum(power[order][::-1])[::-1] / power.sum()
    kmax = float(k[order][np.searchsorted(-tail, -1e-6)]) if np.any(tail > 1e-6) else 0.0
    return dt * (vmax + w.hbar**2 * kmax**2 / (2 * w.mass)) / w.hbar


def schrodinger_step(w: WaveFunction1D, dt: float) -> WaveFunction1D:
    solver = SchrodingerSolver(w.grid, w.V, dt, w.hbar, w.mass)
    return replace(w, psi=solver.step(w.psi), t=w.t + dt)


def evolve(w: WaveFunction1D, dt: float, n_steps: int, every: int = 0) -> tuple[WaveFunction1D, list]:
    """``n_steps`` solver steps; with ``every > 0`` also returns snapshots every
    ``every`` steps (the initial state included)."""
    solver = SchrodingerSolver.for_wavefunction(w, dt)
    psi = w.psi.copy()
    snaps = [w] if every else []
    for i in range(1, n_steps + 1):
        psi = solver.step(psi)
        if every and i % every == 0:
            snaps.append(replace(w, psi=psi.copy(), t=w.t + i * dt))
    return replace(w, psi=psi, t=w.t + n_steps * dt), snaps


# ---------------------------------------------------- velocities and Q


def valid_cells(w: WaveFunction1D) -> np.ndarray:
    """Cells where the centred stencils are defined: interior, with ``rho`` above
    the floor at the cell and both neighbours."""
    rho = w.rho
    ok = rho > RHO_FLOOR * rho.max()
    mask = np.zeros_like(ok)
    mask[1:-1] = ok[1:-1] & ok[:-2] & ok[2:]
    return mask


def _masked(values: np.ndarray, mask: np.ndarray) -> np.ndarray:
    out = np.full(mask.shape, np.nan)
    out[mask] = values[mask]
    return out


def osmotic_velocity(w: WaveFunction1D) -> np.ndarray:
    """``u = D (ln rho)_x`` from a centred difference of ``ln rho``."""
    mask = valid_cells(w)
    rho = np.where(mask | np.roll(mask, 1) | np.roll(mask, -1), w.rho, 1.0)
    lr = np.log(rho)
    u = np.zeros(w.grid.n)
    u[1:-1] = w.D * (lr[2:] - lr[:-2]) / (2 * w.grid.dx)
    return _masked(u, mask)


def current_velocity(w: WaveFunction1D) -> np.ndarray:
    """``v = (hbar/m) Im(psi_x / psi)`` from the phase difference of the two
    neighbours, ``arg(psi_{i+1} conj(psi_{i-1})) / 2 dx``, so no unwrapping is needed."""
    mask = valid_cells(w)
    psi = w.psi
    v = np.zeros(w.grid.n)
    v[1:-1] = np.angle(psi[2:] * np.conj(psi[:-2])) / (2 * w.grid.dx) * w.hbar / w.mass
    return _masked(v, mask)


def forward_drift(w: WaveFunction1D) -> np.ndarray:
    return current_velocity(w) + osmotic_velocity(w)


def backward_drift(w: WaveFunction1D) -> np.ndarray:
    return current_velocity(w) - osmotic_velocity(w)


def quantum_potential(w: WaveFunction1D) -> np.ndarray:
    """``Q = -(hbar^2 / 2m) (sqrt rho)_xx / sqrt rho`` with the three-point stencil."""
    mask = valid_cells(w)
    a = np.sqrt(w.rho)
    lap = np.zeros(w.grid.n)
    lap[1:-1] = (a[2:] - 2 * a[1:-1] + a[:-2]) / w.grid.dx**2
    with np.errstate(divide="ignore", invalid="ignore"):
        Q = -(w.hbar**2) / (2 * w.mass) * lap / a
    return _masked(Q, mask)


def mass_quantile_mask(w: WaveFunction1D, lo: float = 0.05, hi: float = 0.95) -> np.ndarray:
    """Cells between the ``lo`` and ``hi`` quantiles of the probability mass."""
    cdf = np.cumsum(w.rho)
    cdf /= cdf[-1]
    return (cdf >= lo) & (cdf <= hi)


class MadelungResiduals(NamedTuple):
    continuity: float
    hamilton_jacobi: float


def madelung_residuals(
    w_prev: WaveFunction1D, w: WaveFunction1D, w_next: WaveFunction1D, dt: float,
    quantiles: tuple[float, float] = (0.05, 0.95),
) -> MadelungResiduals:
    """RMS residuals of the continuity and quantum Hamilton-Jacobi equations.

    Centred differences in time across the three snapshots; evaluated on the
    valid cells between the given mass quantiles of ``w``.
    """
    for other in (w_prev, w_next):
        if not (other.grid.same_as(w.grid) and other.hbar == w.hbar and other.mass == w.mass):
            raise ValueError("snapshots must share grid, hbar and mass")
    dx = w.grid.dx
    rho = w.rho
    v = current_velocity(w)
    flux = np.nan_to_num(rho * v)
    div = np.zeros_like(flux)
    div[1:-1] = (flux[2:] - flux[:-2]) / (2 * dx)
    cont = (w_next.rho - w_prev.rho) / (2 * dt) + div

    S_t = w.hbar * np.angle(w_next.psi * np.conj(w_prev.psi)) / (2 * dt)
    hj = S_t + 0.5 * w.mass * v**2 + w.V + quantum_potential(w)

    region = mass_quantile_mask(w, *quantiles) & valid_cells(w)
    region[[0, 1, -2, -1]] = False
    rms = lambda r: math.sqrt(float(np.mean(r[region] ** 2)))  # noqa: E731
    return MadelungResiduals(rms(cont), rms(hj))


# ---------------------------------------------------------------- sampler


@dataclass
class NelsonCloud:
    positions: np.ndarray
    hbar: float
    mass: float
    t: float = 0.0
    seed: int = 0

    def __post_init__(self):
        self.positions = np.asarray(self.positions, float)
        if not (self.hbar > 0 and self.mass > 0):
            raise ValueError("hbar and mass must be positive")
        if not np.all(np.isfinite(self.positions)):
            raise ValueError("positions must be finite")

    @property
    def D(self) -> float:
        return self.hbar / (2.0 * self.mass)


def fill_nearest(values: np.ndarray) -> np.ndarray:
    """Replace NaNs by the nearest finite value (ties go left)."""
    values = np.asarray(values, float)
    good = np.flatnonzero(np.isfinite(values))
    if good.size == 0:
        return np.zeros_like(values)
    idx = np.arange(values.size)
    pos = np.searchsorted(good, idx)
    left = good[np.clip(pos - 1, 0, good.size - 1)]
    right = good[np.clip(pos, 0, good.size - 1)]
    pick = np.where(np.abs(idx - left) <= np.abs(right - idx), left, right)
    return values[pick]


def drift_field(w: WaveFunction1D) -> np.ndarray:
    """Forward drift on the grid with flagged cells filled from valid neighbours."""
    return fill_nearest(forward_drift(w))


def _reflect(x: np.ndarray, lo: float, hi: float) -> np.ndarray:
    x = np.where(x < lo, 2 * lo - x, x)
    x = np.where(x > hi, 2 * hi - x, x)
    return np.clip(x, lo, hi)


def _interp_uniform(x: np.ndarray, grid: Grid1D, values: np.ndarray, slopes: np.ndarray) -> np.ndarray:
    # x is already inside the grid; direct index arithmetic beats np.interp's search
    s = (x - grid.x0) / grid.dx
    i = np.minimum(s.astype(np.intp), grid.n - 2)
    return values[i] + (s - i) * slopes[i]


def _em_update(x, drift, grid: Grid1D, D, dt, noise, slopes=None):
    if slopes is None:
        slopes = np.diff(drift)
    b = _interp_uniform(x, grid, drift, slopes)
    x = x + b * dt + math.sqrt(2 * D * dt) * noise
    return _reflect(x, grid.x[0], grid.x[-1])


def nelson_step(cloud: NelsonCloud, w: WaveFunction1D, dt: float, rng: np.random.Generator) -> NelsonCloud:
    """One Euler-Maruyama step of ``dX = b+(X) dt + sqrt(2 D) dW`` with the
    drift linearly interpolated from the grid and reflection at the grid ends."""
    if not (math.isclose(cloud.hbar, w.hbar) and math.isclose(cloud.mass, w.mass)):
        raise ValueError("cloud and wavefunction disagree on hbar or mass")
    drift = drift_field(w)
    check_drift_step(drift, w.grid, dt)
    noise = rng.standard_normal(cloud.positions.size)
    x = _em_update(cloud.positions, drift, w.grid, cloud.D, dt, noise)
    return replace(cloud, positions=x, t=cloud.t + dt)


def check_drift_step(drift: np.ndarray, grid: Grid1D, dt: float) -> None:
    bmax = float(np.max(np.abs(drift)))
    if dt * bmax > grid.dx * (1 + 1e-12):
        raise ValueError(f"dt max|b| = {dt * bmax:.3g} exceeds dx = {grid.dx:.3g}")


def sample_density(grid: Grid1D, rho: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` positions from a gridded density (cell choice, then uniform in the cell)."""
    p = np.asarray(rho, float) * grid.dx
    cdf = np.cumsum(p)
    cdf /= cdf[-1]
    cell = np.searchsorted(cdf, rng.random(n), side="right")
    cell = np.minimum(cell, grid.n - 1)
    x = grid.x[cell] + (rng.random(n) - 0.5) * grid.dx
    return np.clip(x, grid.x[0], grid.x[-1])


class CloudRun(NamedTuple):
    cloud: NelsonCloud
    times: np.ndarray
    snapshots: np.ndarray  # (len(times), n)


def _cloud_shard(args):
    rng, x, drifts, grid, D, dt, n_steps, record = args
    rec = []
    if 0 in record:
        rec.append(x.copy())
    fixed = drifts.ndim == 1
    slopes = np.diff(drifts, axis=-1)
    for i in range(1, n_steps + 1):
        d, sl = (drifts, slopes) if fixed else (drifts[i - 1], slopes[i - 1])
        x = _em_update(x, d, grid, D, dt, rng.standard_normal(x.size), sl)
        if i in record:
            rec.append(x.copy())
    return x, np.array(rec)


def sample_cloud(
    w: WaveFunction1D,
    n: int,
    t_end: float,
    dt: float,
    *,
    seed: int = 0,
    positions: np.ndarray | None = None,
    record_times: Sequence[float] = (),
    evolve_psi: bool = False,
    workers: int | None = None,
) -> CloudRun:
    """Run ``n`` Nelson particles from ``|psi|^2`` (or ``positions``) to ``t_end``.

    With ``evolve_psi`` the drift follows the Schroedinger evolution of ``w``;
    otherwise it is frozen at ``w`` (right for stationary states). Particles are
    sharded with seed-derived substreams, so results do not depend on
    ``workers``.
    """
    n_steps = int(round(t_end / dt))
    if not math.isclose(n_steps * dt, t_end, rel_tol=1e-9, abs_tol=1e-12):
        raise ValueError("t_end must be a whole number of steps")
    record = {int(round(t / dt)) for t in record_times}
    if evolve_psi:
        solver = SchrodingerSolver.for_wavefunction(w, dt)
        drifts = np.empty((n_steps, w.grid.n))
        psi = w.psi.copy()
        for i in range(n_steps):
            drifts[i] = drift_field(replace(w, psi=psi))
            psi = solver.step(psi)
        check_drift_step(drifts, w.grid, dt)
    else:
        drifts = drift_field(w)
        check_drift_step(drifts, w.grid, dt)

    jobs = []
    for k, (lo, hi) in enumerate(_rng.shard_bounds(n)):
        rng = _rng.generator(seed, _rng.STREAM_NELSON, k)
        if positions is None:
            x = sample_density(w.grid, w.rho, hi - lo, rng)
        else:
            x = np.asarray(positions[lo:hi], float).copy()
        jobs.append((rng, x, drifts, w.grid, w.D, dt, n_steps, record))
    results = _rng.map_ordered(_cloud_shard, jobs, workers)
    x = np.concatenate([r[0] for r in results])
    snaps = np.concatenate([r[1] for r in results], axis=1) if record else np.empty((0, n))
    times = np.array(sorted(record), dtype=float) * dt
    cloud = NelsonCloud(x, w.hbar, w.mass, t=w.t + n_steps * dt, seed=seed)
    return CloudRun(cloud, times, snaps)


def cloud_l1(positions: np.ndarray, w: WaveFunction1D, edges: np.ndarray) -> float:
    """L1 distance between the particle histogram and the binned ``|psi|^2`` mass."""
    counts, _ = np.histogram(positions, bins=edges)
    target = binned_density(w, edges)
    return float(np.abs(counts / len(positions) - target).sum())


def binned_density(w: WaveFunction1D, edges: np.ndarray) -> np.ndarray:
    """Normalized ``|psi|^2`` mass per bin, each cell's mass spread uniformly over
    the cell (the law ``sample_density`` draws from)."""
    g = w.grid
    faces = g.x0 - 0.5 * g.dx + g.dx * np.arange(g.n + 1)
    cdf = np.concatenate([[0.0], np.cumsum(w.rho)])
    cdf /= cdf[-1]
    return np.diff(np.interp(edges, faces, cdf))
