"""Two-level emitter in a thermal or engineered radiation field.

Units: hbar = 1, rates and frequencies in inverse time units of the caller's
choosing. The state is stored as the four real numbers
``(rho_gg, rho_ee, Re rho_eg, Im rho_eg)``, which keeps it Hermitian by
construction; the master equation

    d rho/dt = -i[H, rho] + gamma (N+1) D[sigma_-] rho + gamma N D[sigma_+] rho

becomes a fixed 4x4 real linear system integrated with classical RK4.
``H = (rabi/2) sigma_x + (detuning/2) sigma_z`` in the rotating frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _rng

POSITIVITY_TOL = 1e-9


@dataclass(frozen=True)
class TwoLevelDensity:
    """Density matrix in the ``(g, e)`` basis."""

    gg: complex
    ee: complex
    ge: complex
    eg: complex

    def matrix(self) -> np.ndarray:
        return np.array([[self.gg, self.ge], [self.eg, self.ee]], dtype=complex)

    @classmethod
    def from_matrix(cls, rho: np.ndarray) -> "TwoLevelDensity":
        rho = 0.5 * (rho + rho.conj().T)
        return cls(gg=rho[0, 0], ee=rho[1, 1], ge=rho[0, 1], eg=rho[1, 0])

    @classmethod
    def ground(cls) -> "TwoLevelDensity":
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def excited(cls) -> "TwoLevelDensity":
        return cls(0.0, 1.0, 0.0, 0.0)

    def as_vector(self) -> np.ndarray:
        return np.array([self.gg.real, self.ee.real, self.eg.real, self.eg.imag])

    @classmethod
    def from_vector(cls, y: np.ndarray) -> "TwoLevelDensity":
        gg, ee, a, b = (float(v) for v in y)
        return cls(complex(gg), complex(ee), complex(a, -b), complex(a, b))

    @property
    def trace(self) -> float:
        return float((self.gg + self.ee).real)

    @property
    def determinant(self) -> float:
        return float((self.gg * self.ee).real - abs(self.eg) ** 2)


@dataclass(frozen=True)
class BathCoupling:
    gamma: float
    N_th: float = 0.0
    omega0: float = 1.0
    g2: float = 1.0
    rabi: float = 0.0
    detuning: float = 0.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if not self.N_th >= 0:
            raise ValueError("N_th must be non-negative")
        if not self.omega0 > 0:
            raise ValueError("omega0 must be positive")
        if self.g2 < 0:
            raise ValueError("g2 must be non-negative")

    @property
    def relaxation_rate(self) -> float:
        """Population relaxation rate ``gamma (2 N + 1)``."""
        return self.gamma * (2.0 * self.N_th + 1.0)


def golden_rule_rates(b: BathCoupling) -> tuple[float, float]:
    """``(W_em, W_abs) = ((N+1) g2, N g2)``."""
    return (b.N_th + 1.0) * b.g2, b.N_th * b.g2


# ------------------------------------------------------ master equation


_SM = np.array([[0, 1], [0, 0]], dtype=complex)  # |g><e|
_SP = _SM.T.copy()
_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SZ = np.array([[-1, 0], [0, 1]], dtype=complex)


def _dissipator(L: np.ndarray, rho: np.ndarray) -> np.ndarray:
    LdL = L.conj().T @ L
    return L @ rho @ L.conj().T - 0.5 * (LdL @ rho + rho @ LdL)


def lindblad_rhs(rho: np.ndarray, b: BathCoupling) -> np.ndarray:
    """Right-hand side of the master equation for a 2x2 matrix ``rho``."""
    H = 0.5 * b.rabi * _SX + 0.5 * b.detuning * _SZ
    out = -1j * (H @ rho - rho @ H)
    out += b.gamma * (b.N_th + 1.0) * _dissipator(_SM, rho)
    out += b.gamma * b.N_th * _dissipator(_SP, rho)
    return out


def generator(b: BathCoupling) -> np.ndarray:
    """4x4 real matrix of the master equation on ``(gg, ee, Re eg, Im eg)``."""
    cols = []
    for y in np.eye(4):
        rho = TwoLevelDensity.from_vector(y).matrix()
        d = lindblad_rhs(rho, b)
        cols.append([d[0, 0].real, d[1, 1].real, d[1, 0].real, d[1, 0].imag])
    return np.array(cols).T


def step_matrix(b: BathCoupling, dt: float) -> np.ndarray:
    """One classical RK4 step of the linear generator, as a matrix."""
    hL = dt * generator(b)
    P = np.eye(4)
    term = np.eye(4)
    for k in range(1, 5):
        term = term @ hL / k
        P = P + term
    return P


def _check_positive(y: np.ndarray) -> None:
    det = y[0] * y[1] - y[2] ** 2 - y[3] ** 2
    if det < -POSITIVITY_TOL or min(y[0], y[1]) < -POSITIVITY_TOL:
        raise ValueError(
            f"density matrix lost positivity (det = {det:.3e}); reduce the time step"
        )


def lindblad_step(rho: TwoLevelDensity, b: BathCoupling, dt: float) -> TwoLevelDensity:
    y = step_matrix(b, dt) @ rho.as_vector()
    _check_positive(y)
    return TwoLevelDensity.from_vector(y)


def max_stable_dt(b: BathCoupling) -> float:
    """Largest step meeting the accuracy guideline ``1e-2 / (gamma (2N+1) + rabi)``."""
    return 1e-2 / (b.relaxation_rate + abs(b.rabi))


class LindbladTrajectory(NamedTuple):
    times: np.ndarray
    states: np.ndarray  # (n_steps + 1, 4) rows of (gg, ee, Re eg, Im eg)

    @property
    def rho_ee(self) -> np.ndarray:
        return self.states[:, 1]

    @property
    def trace(self) -> np.ndarray:
        return self.states[:, 0] + self.states[:, 1]


def evolve(rho: TwoLevelDensity, b: BathCoupling, dt: float, n_steps: int) -> LindbladTrajectory:
    """Repeated :func:`lindblad_step`, keeping every state."""
    P = step_matrix(b, dt)
    states = np.empty((n_steps + 1, 4))
    y = rho.as_vector()
    states[0] = y
    for i in range(1, n_steps + 1):
        y = P @ y
        states[i] = y
    for y in states[:: max(1, n_steps // 64)]:
        _check_positive(y)
    _check_positive(states[-1])
    return LindbladTrajectory(dt * np.arange(n_steps + 1), states)


def steady_state(b: BathCoupling) -> TwoLevelDensity:
    """Undriven stationary state, ``rho_ee = N / (2N + 1)``."""
    if b.rabi != 0:
        raise ValueError("closed-form steady state is only available without drive")
    ee = b.N_th / (2.0 * b.N_th + 1.0)
    return TwoLevelDensity(complex(1.0 - ee), complex(ee), 0j, 0j)


def fit_relaxation_rate(times: np.ndarray, rho_ee: np.ndarray, rho_ee_inf: float) -> float:
    """Decay rate from a least-squares line through ``log|rho_ee - rho_ee(inf)|``."""
    dev = np.abs(np.asarray(rho_ee) - rho_ee_inf)
    keep = dev > 1e-10 * dev.max()
    slope = np.polyfit(np.asarray(times)[keep], np.log(dev[keep]), 1)[0]
    return -float(slope)


# -------------------------------------------------------------- Purcell / LDOS


@dataclass(frozen=True)
class CavityEnv:
    """Emitter environment: either cavity parameters or a direct LDOS ratio.

    ``wavelength_over_n`` and ``V`` must be in consistent units (e.g. um and
    um^3).
    """

    wavelength_over_n: float | None = None
    Q: float | None = None
    V: float | None = None
    xi: float | None = None
    ldos_ratio: float | None = None

    def __post_init__(self):
        cav = (self.wavelength_over_n, self.Q, self.V, self.xi)
        given = [v is not None for v in cav]
        if any(given) and not all(given):
            raise ValueError("cavity needs all of wavelength_over_n, Q, V, xi")
        if all(given):
            if min(self.wavelength_over_n, self.Q, self.V) <= 0:
                raise ValueError("wavelength_over_n, Q and V must be positive")
            if not 0.0 <= self.xi <= 1.0:
                raise ValueError("overlap factor xi must lie in [0, 1]")
        if self.ldos_ratio is not None and self.ldos_ratio < 0:
            raise ValueError("ldos_ratio must be non-negative")

    @property
    def has_cavity(self) -> bool:
        return self.Q is not None


def purcell_factor(env: CavityEnv) -> float:
    """``F_P = 3/(4 pi^2) (lambda/n)^3 (Q/V) xi``."""
    if not env.has_cavity:
        raise ValueError("purcell_factor needs cavity parameters")
    return 3.0 / (4.0 * math.pi**2) * env.wavelength_over_n**3 * env.Q / env.V * env.xi


def environment_scaled_gamma(gamma_free: float, env: CavityEnv) -> float:
    """Free-space decay rate rescaled by the LDOS ratio or by the Purcell factor."""
    if env.has_cavity and env.ldos_ratio is not None:
        raise ValueError("give either ldos_ratio or cavity parameters, not both")
    if env.ldos_ratio is not None:
        return gamma_free * env.ldos_ratio
    if env.has_cavity:
        return gamma_free * purcell_factor(env)
    raise ValueError("environment has neither ldos_ratio nor cavity parameters")


# ------------------------------------------------------- waiting times


class WaitingTimeFit(NamedTuple):
    samples: np.ndarray
    rate: float
    stderr: float


def sample_waiting_times(epsilon: float, count: int, seed: int) -> WaitingTimeFit:
    """Exponential waiting times of rate ``epsilon`` and the ML rate estimate."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = _rng.generator(seed, _rng.STREAM_WAITING)
    tau = rng.exponential(1.0 / epsilon, int(count))
    rate = count / float(tau.sum())
    return WaitingTimeFit(tau, rate, rate / math.sqrt(count))


# ----------------------------------------------------------- lineshapes


@dataclass(frozen=True)
class LineshapeSpec:
    epsilon: float
    omega0: float
    grid: np.ndarray

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        grid = np.asarray(self.grid, dtype=float)
        if grid.ndim != 1 or grid.size < 3 or np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        lo, hi = self.omega0 - 20 * self.epsilon, self.omega0 + 20 * self.epsilon
        if grid[0] > lo + 1e-12 * abs(lo) or grid[-1] < hi - 1e-12 * abs(hi):
            raise ValueError("grid must span [omega0 - 20 eps, omega0 + 20 eps]")
        object.__setattr__(self, "grid", grid)

    @classmethod
    def centered(cls, epsilon: float, omega0: float, half_width: float = 20.0, per_eps: int = 20):
        """Uniform grid with spacing ``epsilon / per_eps`` containing ``omega0``."""
        m = int(round(half_width * per_eps))
        grid = omega0 + epsilon * np.arange(-m, m + 1) / per_eps
        return cls(epsilon, omega0, grid)


class Lineshape(NamedTuple):
    omega: np.ndarray
    analytic: np.ndarray  # peak-normalized
    fourier: np.ndarray  # peak-normalized
    fwhm_analytic: float
    fwhm_fourier: float
    peak_height: float  # un-normalized analytic peak, 4 / eps^2


def lorentzian(omega: np.ndarray, omega0: float, epsilon: float) -> np.ndarray:
    """Peak-normalized Lorentzian of full width at half maximum ``epsilon``."""
    h = 0.5 * epsilon
    return h * h / ((np.asarray(omega) - omega0) ** 2 + h * h)


def damped_signal_spectrum(
    omega: np.ndarray, omega0: float, epsilon: float, decay_lengths: float = 80.0
) -> np.ndarray:
    """Power spectrum ``|sum_n w_n s(t_n) e^{i omega t_n} dt|^2`` of the sampled
    signal ``s(t) = exp(-epsilon t / 2 - i omega0 t)``, ``t >= 0``.

    The sampling step keeps ``|omega - omega0| dt <= 0.1`` across ``omega`` and the
    first sample carries trapezoid weight 1/2.
    """
    omega = np.asarray(omega, dtype=float)
    span = max(np.max(np.abs(omega - omega0)), epsilon)
    dt = 0.1 / span
    t = np.arange(0.0, decay_lengths / epsilon, dt)
    s = np.exp(-0.5 * epsilon * t - 1j * omega0 * t)
    s[0] *= 0.5
    out = np.empty(omega.size)
    chunk = max(1, 2**20 // t.size)
    for lo in range(0, omega.size, chunk):
        w = omega[lo : lo + chunk, None]
        F = dt * (np.exp(1j * w * t[None, :]) @ s)
        out[lo : lo + chunk] = np.abs(F) ** 2
    return out


def measure_fwhm(omega: np.ndarray, values: np.ndarray) -> float:
    """Full width at half maximum by linear interpolation of the half-max crossings."""
    omega = np.asarray(omega, float)
    values = np.asarray(values, float)
    i = int(np.argmax(values))
    half = 0.5 * values[i]
    left = i
    while left > 0 and values[left] > half:
        left -= 1
    right = i
    while right < values.size - 1 and values[right] > half:
        right += 1
    if values[left] > half or values[right] > half:
        raise ValueError("spectrum does not fall below half maximum inside the grid")

    def cross(a, b):
        return omega[a] + (half - values[a]) * (omega[b] - omega[a]) / (values[b] - values[a])

    return float(cross(right - 1, right) - cross(left, left + 1))


def lineshape(spec: LineshapeSpec) -> Lineshape:
    """Spectrum of ``exp(-epsilon t/2) exp(-i omega0 t)`` by two independent routes.

    Both spectra are normalized to unit peak on the grid; the un-normalized
    analytic peak ``4 / epsilon^2`` is reported separately (doubling ``epsilon``
    quarters it).
    """
    grid = spec.grid
    if np.max(np.diff(grid)) > spec.epsilon / 20.0 * (1 + 1e-9):
        raise ValueError("grid spacing must not exceed epsilon / 20")
    analytic = lorentzian(grid, spec.omega0, spec.epsilon)
    analytic = analytic / analytic.max()
    fourier = damped_signal_spectrum(grid, spec.omega0, spec.epsilon)
    fourier = fourier / fourier.max()
    return Lineshape(
        grid,
        analytic,
        fourier,
        measure_fwhm(grid, analytic),
        measure_fwhm(grid, fourier),
        4.0 / spec.epsilon**2,
    )
