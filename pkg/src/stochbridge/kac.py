"""Persistent (Kac) random walk on the line.

A walker moves at speed ``c`` and reverses direction after exponentially
distributed waiting times with mean ``1 / lam``. The right/left-moving densities obey

    dP+/dt = -c dP+/dx - lam P+ + lam P-
    dP-/dt = +c dP-/dx - lam P- + lam P+

so that ``rho = P+ + P-`` satisfies the telegrapher equation
``rho_tt + 2 lam rho_t = c^2 rho_xx``, ballistic for ``t << 1/lam`` and
diffusive with ``D = c^2 / (2 lam)`` for ``t >> 1/lam``.

Here the walkers are simulated exactly (event-driven), the densities are stepped
with operator splitting (exact lattice shift when ``c dt = dx``, exact 2x2
exchange), and a plain explicit heat solver covers the diffusive limit.
Boundaries are periodic throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence

import numpy as np

from . import _rng
from ._grid import Grid1D, bin_masses

CFL_TOL = 1e-12


def diffusion_coefficient(c: float, lam: float) -> float:
    return c * c / (2.0 * lam)


def telegrapher_variance(c: float, lam: float, t: float) -> float:
    """Exact position variance of the walk from a point with unbiased direction.

    ``Var(t) = (c^2/lam) t - (c^2 / 2 lam^2) (1 - exp(-2 lam t))``.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    u = lam * t
    if u < 0.05:
        # series of u - (1 - e^{-2u})/2 = sum_{k>=2} (-2u)^k / (2 k!)
        f = sum((-2.0 * u) ** k / (2.0 * math.factorial(k)) for k in range(2, 16))
    else:
        f = u + 0.5 * math.expm1(-2.0 * u)
    return c * c / (lam * lam) * f


# ------------------------------------------------------------- Monte Carlo


@dataclass
class WalkerEnsemble:
    positions: np.ndarray
    signs: np.ndarray
    c: float
    lam: float
    t: float
    seed: int
    x0: float = 0.0

    def __post_init__(self):
        if self.positions.shape != self.signs.shape:
            raise ValueError("positions and signs must have the same length")
        if not (self.c > 0 and self.lam > 0):
            raise ValueError("c and lam must be positive")

    def variance(self) -> tuple[float, float]:
        """Sample variance and its standard error ``sqrt((m4 - s^4) / n)``."""
        return sample_variance(self.positions)


def sample_variance(x: np.ndarray) -> tuple[float, float]:
    x = np.asarray(x, float)
    d = x - x.mean()
    var = float(np.mean(d * d))
    m4 = float(np.mean(d**4))
    return var, math.sqrt(max(m4 - var * var, 0.0) / x.size)


def _initial_signs(rng: np.random.Generator, n: int, mode: str, offset: int) -> np.ndarray:
    if mode == "random":
        return np.where(rng.random(n) < 0.5, 1.0, -1.0)
    if mode == "balanced":
        return np.where((np.arange(n) + offset) % 2 == 0, 1.0, -1.0)
    if mode in ("right", "left"):
        return np.full(n, 1.0 if mode == "right" else -1.0)
    raise ValueError(f"unknown sign initialisation {mode!r}")


def _walk_shard(args):
    rng, pos, sign, c, lam, times = args
    n = pos.size
    tw = np.zeros(n)
    next_flip = rng.exponential(1.0 / lam, n)
    out = np.empty((len(times), n))
    for k, T in enumerate(times):
        idx = np.flatnonzero(next_flip < T)
        while idx.size:
            tf = next_flip[idx]
            pos[idx] += sign[idx] * c * (tf - tw[idx])
            tw[idx] = tf
            sign[idx] = -sign[idx]
            next_flip[idx] = tf + rng.exponential(1.0 / lam, idx.size)
            idx = idx[next_flip[idx] < T]
        pos += sign * c * (T - tw)
        tw[:] = T
        out[k] = pos
    return out, sign


def walker_snapshots(
    n: int,
    c: float,
    lam: float,
    times: Sequence[float],
    *,
    x0: float = 0.0,
    positions: np.ndarray | None = None,
    init_signs: str = "random",
    seed: int = 0,
    workers: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Exact event-driven walk recorded at increasing ``times``.

    Returns ``(snapshots, final_signs)``, ``snapshots[k]`` holding all positions at
    ``times[k]``. Walkers are cut into fixed shards with their own substreams,
    so the result does not depend on ``workers``.
    """
    if n < 1:
        raise ValueError("need at least one walker")
    if not (c > 0 and lam > 0):
        raise ValueError("c and lam must be positive")
    times = [float(t) for t in times]
    if any(t < 0 for t in times) or any(b < a for a, b in zip(times, times[1:])):
        raise ValueError("times must be non-negative and non-decreasing")
    if positions is not None:
        positions = np.asarray(positions, float)
        if positions.shape != (n,):
            raise ValueError("positions must have length n")

    jobs = []
    for k, (lo, hi) in enumerate(_rng.shard_bounds(n)):
        rng = _rng.generator(seed, _rng.STREAM_WALKERS, k)
        sign = _initial_signs(rng, hi - lo, init_signs, lo)
        pos = np.full(hi - lo, float(x0)) if positions is None else positions[lo:hi].copy()
        jobs.append((rng, pos, sign, c, lam, times))
    results = _rng.map_ordered(_walk_shard, jobs, workers)
    snaps = np.concatenate([r[0] for r in results], axis=1)
    signs = np.concatenate([r[1] for r in results])
    if positions is None:
        # round-off guard: a point source cannot leave its light cone
        for k, T in enumerate(times):
            np.clip(snaps[k], x0 - c * T, x0 + c * T, out=snaps[k])
    return snaps, signs


def simulate_walkers(
    n: int,
    c: float,
    lam: float,
    t_end: float,
    *,
    x0: float = 0.0,
    positions: np.ndarray | None = None,
    init_signs: str = "random",
    seed: int = 0,
    workers: int | None = None,
) -> WalkerEnsemble:
    """Ensemble of ``n`` persistent walkers at ``t_end``.

    Walkers start at ``x0`` (or at ``positions``, e.g. samples of a density)
    with directions drawn per ``init_signs``: ``random`` (unbiased coin),
    ``balanced`` (alternating), ``right`` or ``left``.
    """
    snaps, signs = walker_snapshots(
        n, c, lam, [t_end], x0=x0, positions=positions, init_signs=init_signs,
        seed=seed, workers=workers,
    )
    return WalkerEnsemble(snaps[0], signs, c, lam, float(t_end), int(seed), float(x0))


# ---------------------------------------------------------------- PDE side


@dataclass
class KacField:
    grid: Grid1D
    P_plus: np.ndarray
    P_minus: np.ndarray
    c: float
    lam: float
    t: float = 0.0

    def __post_init__(self):
        if self.P_plus.shape != (self.grid.n,) or self.P_minus.shape != (self.grid.n,):
            raise ValueError("density arrays must match the grid")
        if self.c < 0 or self.lam < 0:
            raise ValueError("c and lam must be non-negative")

    @classmethod
    def point(cls, grid: Grid1D, x_source: float, c: float, lam: float) -> "KacField":
        """Unit mass in the cell at ``x_source``, split equally between directions."""
        i = grid.index_of(x_source)
        P = np.zeros(grid.n)
        P[i] = 0.5 / grid.dx
        return cls(grid, P.copy(), P.copy(), c, lam)

    @classmethod
    def from_density(cls, grid: Grid1D, rho: np.ndarray, c: float, lam: float) -> "KacField":
        rho = np.asarray(rho, float)
        rho = rho / (rho.sum() * grid.dx)
        return cls(grid, 0.5 * rho, 0.5 * rho.copy(), c, lam)

    @property
    def rho(self) -> np.ndarray:
        return self.P_plus + self.P_minus

    @property
    def mass(self) -> float:
        return float(np.sum(self.P_plus + self.P_minus) * self.grid.dx)

    def courant(self, dt: float) -> float:
        return self.c * dt / self.grid.dx


def _exchange(Pp: np.ndarray, Pm: np.ndarray, lam: float, h: float):
    if lam * h == 0.0:
        return Pp, Pm
    s = Pp + Pm
    d = (Pp - Pm) * math.exp(-2.0 * lam * h)
    return 0.5 * (s + d), 0.5 * (s - d)


def _advect(Pp: np.ndarray, Pm: np.ndarray, nu: float):
    if nu == 0.0:
        return Pp, Pm
    if abs(nu - 1.0) <= CFL_TOL:
        return np.roll(Pp, 1), np.roll(Pm, -1)
    # first-order upwind for fractional Courant numbers
    Pp = (1.0 - nu) * Pp + nu * np.roll(Pp, 1)
    Pm = (1.0 - nu) * Pm + nu * np.roll(Pm, -1)
    return Pp, Pm


def kac_pde_step(f: KacField, dt: float) -> KacField:
    """Advance ``(P+, P-)`` by ``dt`` with Strang splitting (half exchange,
    advection, half exchange)."""
    nu = f.courant(dt)
    if nu > 1.0 + CFL_TOL:
        raise ValueError(f"CFL violated: c dt / dx = {nu:.6g} > 1")
    Pp, Pm = _exchange(f.P_plus, f.P_minus, f.lam, 0.5 * dt)
    Pp, Pm = _advect(Pp, Pm, nu)
    Pp, Pm = _exchange(Pp, Pm, f.lam, 0.5 * dt)
    return replace(f, P_plus=Pp, P_minus=Pm, t=f.t + dt)


def evolve_kac(f: KacField, dt: float, n_steps: int) -> KacField:
    for _ in range(n_steps):
        f = kac_pde_step(f, dt)
    return f


def density_and_current(f: KacField) -> tuple[np.ndarray, np.ndarray]:
    return f.P_plus + f.P_minus, f.c * (f.P_plus - f.P_minus)


class KacResiduals(NamedTuple):
    continuity: float
    momentum: float


def kac_residuals(f_prev: KacField, f: KacField, f_next: KacField) -> KacResiduals:
    """Discrete L2 norms of the continuity and momentum residuals at ``f.t``.

    ``rho_t + j_x = 0`` and ``j_t + 2 lam j + c^2 rho_x = 0``, with centred
    differences in space and across the three time levels.
    """
    dt = f_next.t - f.t
    if not math.isclose(f.t - f_prev.t, dt, rel_tol=1e-9):
        raise ValueError("snapshots must be equally spaced in time")
    dx = f.grid.dx
    rho_p, j_p = density_and_current(f_prev)
    rho, j = density_and_current(f)
    rho_n, j_n = density_and_current(f_next)

    def ddx(a):
        return (np.roll(a, -1) - np.roll(a, 1)) / (2.0 * dx)

    cont = (rho_n - rho_p) / (2.0 * dt) + ddx(j)
    mom = (j_n - j_p) / (2.0 * dt) + 2.0 * f.lam * j + f.c**2 * ddx(rho)
    norm = lambda r: math.sqrt(float(np.sum(r * r)) * dx)  # noqa: E731
    return KacResiduals(norm(cont), norm(mom))


def moments(grid: Grid1D, rho: np.ndarray) -> tuple[float, float]:
    """Mean and variance of a gridded density (midpoint quadrature)."""
    x = grid.x
    w = rho * grid.dx
    mass = w.sum()
    mean = float(np.dot(x, w) / mass)
    return mean, float(np.dot((x - mean) ** 2, w) / mass)


# ------------------------------------------------------- diffusive limit


def diffusion_step(rho: np.ndarray, D: float, dt: float, dx: float) -> np.ndarray:
    """Explicit centred heat step on a periodic mesh."""
    r = D * dt / (dx * dx)
    if r > 0.5 * (1.0 + CFL_TOL):
        raise ValueError(f"explicit diffusion unstable: D dt / dx^2 = {r:.6g} > 0.5")
    return rho + r * (np.roll(rho, -1) - 2.0 * rho + np.roll(rho, 1))


def diffuse(rho: np.ndarray, D: float, duration: float, dx: float, r: float = 0.4) -> np.ndarray:
    """Heat flow over ``duration`` with ``D dt / dx^2 <= r``."""
    if duration <= 0:
        return np.array(rho, float)
    n = max(1, int(math.ceil(duration * D / (r * dx * dx))))
    dt = duration / n
    for _ in range(n):
        rho = diffusion_step(rho, D, dt, dx)
    return rho


# ---------------------------------------------------------- validation


def histogram_edges(x0: float, c: float, t: float, bins: int = 100) -> np.ndarray:
    """Equal-width bins spanning the light cone ``[x0 - c t, x0 + c t]``."""
    return np.linspace(x0 - c * t, x0 + c * t, bins + 1)


def compare_mc_pde(ens: WalkerEnsemble, f: KacField, bins: int = 100) -> float:
    """L1 distance between the walker histogram and the PDE bin masses."""
    if not math.isclose(ens.t, f.t, rel_tol=1e-9, abs_tol=1e-12):
        raise ValueError(f"time mismatch: walkers at t={ens.t}, field at t={f.t}")
    if not (math.isclose(ens.c, f.c) and math.isclose(ens.lam, f.lam)):
        raise ValueError("walkers and field use different c or lam")
    edges = histogram_edges(ens.x0, ens.c, ens.t, bins)
    x = f.grid.x
    if edges[0] < x[0] - 0.5 * f.grid.dx or edges[-1] > x[-1] + 0.5 * f.grid.dx:
        raise ValueError("field grid does not cover the comparison domain")
    mc, _ = np.histogram(ens.positions, bins=edges)
    pde = bin_masses(x, f.rho * f.grid.dx, edges)
    return float(np.abs(mc / ens.positions.size - pde).sum())


def mass_outside_cone(grid: Grid1D, rho: np.ndarray, x0: float, c: float, t: float) -> float:
    x = grid.x
    tol = 1e-9 * grid.dx
    out = (x < x0 - c * t - tol) | (x > x0 + c * t + tol)
    return float(np.sum(rho[out]) * grid.dx)
