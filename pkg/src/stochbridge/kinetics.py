"""Matter-radiation kinetics built on per-encounter interaction probabilities.

An encounter between a molecule and a radiation mode with ``A`` cells holding
``N`` quanta leads to an interaction with probability ``N / (A + N)``. Taking
the rate of encounters to scale with that same count of cells plus quanta,
``kappa * (A + N)``, turns that probability into a rate ``kappa * N`` that is
linear in ``N`` at any intensity.

Two closures of the radiation balance are integrated:

``bose_two_process``
    ``dN/dt = alpha n_s - n_r beta N / (A + N)`` (probability form).
``einstein_three_process``
    ``dN/dt = n_s (alpha + kappa beta w N) - n_r kappa beta N`` (rate form),
    with ``w = g_r / g_s``.

Populations are held at the Boltzmann ratio ``n_s / n_r = (g_s/g_r) e^{-x}``
(heat-bath contact), so both closures relax to ``A / (e^x - 1)`` when the
detailed-balance coefficient relation holds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from . import _rng

Form = Literal["bose_two_process", "einstein_three_process"]
FORMS: tuple[str, ...] = ("bose_two_process", "einstein_three_process")


@dataclass(frozen=True)
class ModeCell:
    """One radiation mode: ``A`` cells sharing ``N`` quanta at ``x = h nu / kT``.

    ``p_r`` are optional unnormalized occupancy weights (weight of cells holding
    ``r`` quanta, ``r = 0, 1, ...``); they are only checked for consistency with
    ``N / (A + N)``.
    """

    A: float
    N: float
    x: float | None = None
    p_r: tuple[float, ...] | None = None

    def __post_init__(self):
        if not self.A >= 1:
            raise ValueError(f"cell count A must be >= 1, got {self.A}")
        if not self.N >= 0:
            raise ValueError(f"quantum count N must be >= 0, got {self.N}")
        if self.x is not None and self.x < 0:
            raise ValueError(f"frequency ratio x must be >= 0, got {self.x}")
        if self.p_r is not None:
            p = np.asarray(self.p_r, dtype=float)
            if p.ndim != 1 or np.any(p < 0) or not np.any(p > 0):
                raise ValueError("p_r must be non-negative with at least one positive entry")
            object.__setattr__(self, "p_r", tuple(float(v) for v in p))
            reduced = occupancy_ratio(p)
            expected = self.N / (self.A + self.N)
            if not math.isclose(reduced, expected, rel_tol=1e-12, abs_tol=1e-15):
                raise ValueError(
                    f"p_r gives sum(r p_r)/sum((r+1) p_r) = {reduced!r}, "
                    f"inconsistent with N/(A+N) = {expected!r}"
                )

    @classmethod
    def from_occupancy(cls, p_r: Sequence[float], x: float | None = None) -> "ModeCell":
        """Cell whose ``A`` and ``N`` are read off occupancy counts ``p_r``."""
        p = np.asarray(p_r, dtype=float)
        r = np.arange(p.size)
        return cls(A=float(p.sum()), N=float((r * p).sum()), x=x, p_r=tuple(p))


def occupancy_ratio(p_r: Sequence[float]) -> float:
    """``sum(r p_r) / sum((r + 1) p_r)`` for weights indexed by ``r = 0, 1, ...``."""
    p = np.asarray(p_r, dtype=float)
    r = np.arange(p.size)
    return float((r * p).sum() / ((r + 1) * p).sum())


@dataclass(frozen=True)
class LevelPair:
    """Lower (``r``) and upper (``s``) level populations and their coupling constants."""

    n_r: float
    n_s: float
    alpha: float
    beta: float
    kappa: float = 1.0
    g_r: int = 1
    g_s: int = 1

    def __post_init__(self):
        if self.n_r < 0 or self.n_s < 0 or self.n_r + self.n_s <= 0:
            raise ValueError("populations must be non-negative and not both zero")
        if self.g_r < 1 or self.g_s < 1:
            raise ValueError("degeneracies must be positive integers")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be non-negative")
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")

    @property
    def degeneracy_ratio(self) -> float:
        return self.g_r / self.g_s


def boltzmann_pair(
    x: float,
    *,
    form: Form,
    beta: float = 0.5,
    kappa: float = 1.0,
    A: float = 1.0,
    g_r: int = 1,
    g_s: int = 1,
    n_r: float = 1.0,
) -> LevelPair:
    """Level pair clamped at the Boltzmann ratio with detailed-balance ``alpha``.

    ``alpha = beta g_r/g_s`` for the probability form and
    ``alpha = kappa beta A g_r/g_s`` for the rate form. ``x = inf`` gives an
    empty upper level.
    """
    if form not in FORMS:
        raise ValueError(f"unknown form {form!r}")
    if x < 0:
        raise ValueError("x must be >= 0")
    n_s = 0.0 if math.isinf(x) else n_r * (g_s / g_r) * math.exp(-x)
    if form == "bose_two_process":
        alpha = beta * g_r / g_s
    else:
        alpha = kappa * beta * A * g_r / g_s
    return LevelPair(n_r=n_r, n_s=n_s, alpha=alpha, beta=beta, kappa=kappa, g_r=g_r, g_s=g_s)


def interaction_probability(cell: ModeCell) -> float:
    return cell.N / (cell.A + cell.N)


def absorption_probability(cell: ModeCell, beta: float) -> float:
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1] to give a probability, got {beta}")
    return beta * interaction_probability(cell)


def encounter_rate(cell: ModeCell, kappa: float) -> float:
    """Encounter frequency ``kappa (A + N)``."""
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    return kappa * (cell.A + cell.N)


def per_molecule_rates(cell: ModeCell, pair: LevelPair) -> tuple[float, float, float]:
    """``(R_abs, R_stim, R_sp)``: encounter rate times the per-encounter probabilities.

    Written as ``kappa beta N`` directly so the result carries no dependence on
    ``A`` even in floating point.
    """
    stim = pair.kappa * pair.beta * cell.N
    return stim, stim, pair.alpha


def planck_occupancy(x: float) -> float:
    """Mean number of quanta per cell at equilibrium, ``1 / (e^x - 1)``."""
    if not x > 0:
        raise ValueError("no equilibrium occupancy for x <= 0")
    if x > 700.0:
        return math.exp(-x)
    return 1.0 / math.expm1(x)


def _rhs(form: str, cell: ModeCell, pair: LevelPair):
    """Right-hand side ``dN/dt`` and its derivative in ``N``."""
    A = cell.A
    if form == "bose_two_process":
        up, down = pair.alpha * pair.n_s, pair.n_r * pair.beta
        return (lambda N: up - down * N / (A + N)), (lambda N: -down * A / (A + N) ** 2)
    if form == "einstein_three_process":
        kb = pair.kappa * pair.beta
        gain = pair.n_s * pair.alpha
        net = kb * (pair.n_s * pair.degeneracy_ratio - pair.n_r)
        return (lambda N: gain + net * N), (lambda N: net)
    raise ValueError(f"unknown form {form!r}; expected one of {FORMS}")


def max_relaxation_rate(form: str, cell: ModeCell, pair: LevelPair) -> float:
    """Upper bound on ``|d(dN/dt)/dN|`` over ``N >= 0``."""
    if form == "bose_two_process":
        return pair.n_r * pair.beta / cell.A
    kb = pair.kappa * pair.beta
    return kb * abs(pair.n_r - pair.n_s * pair.degeneracy_ratio)


@dataclass
class MeanFieldResult:
    form: str
    times: np.ndarray
    N: np.ndarray
    converged: bool
    dt: float

    @property
    def fixed_point(self) -> float:
        return float(self.N[-1])


def evolve_mean_field(
    cell: ModeCell,
    pair: LevelPair,
    form: Form,
    t_end: float,
    dt: float | None = None,
    tol: float = 1e-9,
) -> MeanFieldResult:
    """Integrate the mean-field balance for ``N(t)`` with fixed-step RK4.

    Starts from ``cell.N`` and stops once the Newton estimate of the distance
    to the fixed point, ``|dN/dt| / |d(dN/dt)/dN|``, falls below ``tol * A``.
    The default step is ``0.05`` over the largest relaxation rate of the
    right-hand side. ``converged`` is False when ``t_end`` is reached first.
    """
    f, fprime = _rhs(form, cell, pair)
    if dt is None:
        rate = max_relaxation_rate(form, cell, pair)
        if rate <= 0:
            raise ValueError("right-hand side has no relaxation; no fixed point")
        dt = 0.05 / rate
    if not dt > 0:
        raise ValueError("dt must be positive")
    threshold = tol * cell.A

    def done(N):
        slope = abs(fprime(N))
        return slope > 0 and abs(f(N)) < threshold * slope

    n_max = int(math.ceil(t_end / dt))
    N = float(cell.N)
    Ns, ts = [N], [0.0]
    converged = done(N)
    step = 0
    while not converged and step < n_max:
        k1 = f(N)
        k2 = f(N + 0.5 * dt * k1)
        k3 = f(N + 0.5 * dt * k2)
        k4 = f(N + dt * k3)
        N = max(N + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), 0.0)
        step += 1
        Ns.append(N)
        ts.append(step * dt)
        converged = done(N)
    return MeanFieldResult(form, np.array(ts), np.array(Ns), bool(converged), dt)


def fixed_point(form: Form, cell: ModeCell, pair: LevelPair) -> float:
    """Closed-form stationary ``N`` of the chosen closure."""
    if form == "bose_two_process":
        up, down = pair.alpha * pair.n_s, pair.n_r * pair.beta
        if down <= up:
            raise ValueError("no finite fixed point")
        return cell.A * up / (down - up)
    kb = pair.kappa * pair.beta
    net = kb * (pair.n_r - pair.n_s * pair.degeneracy_ratio)
    if net <= 0:
        raise ValueError("no finite fixed point")
    return pair.n_s * pair.alpha / net


# ---------------------------------------------------------------- jump process


@dataclass
class JumpTrajectory:
    """Event times and the quantum count right after each event."""

    times: np.ndarray
    N_values: np.ndarray
    seed: int
    N0: int = 0
    absorbed: bool = False

    def __post_init__(self):
        if self.times.size and np.any(np.diff(self.times) <= 0):
            raise ValueError("event times must be strictly increasing")
        steps = np.diff(np.concatenate([[self.N0], self.N_values]))
        if steps.size and not np.all(np.abs(steps) == 1):
            raise ValueError("successive N values must differ by exactly 1")

    def occupation(self) -> np.ndarray:
        """Fraction of elapsed time spent at each ``N = 0, 1, ...``.

        The state after the last event is not counted (its holding time is
        unknown).
        """
        if self.times.size == 0:
            out = np.zeros(self.N0 + 1)
            out[self.N0] = 1.0
            return out
        states = np.concatenate([[self.N0], self.N_values[:-1]])
        holding = np.diff(np.concatenate([[0.0], self.times]))
        hist = np.bincount(states, weights=holding)
        return hist / hist.sum()

    def mean(self) -> float:
        occ = self.occupation()
        return float(np.dot(np.arange(occ.size), occ))


def jump_rates(cell: ModeCell, pair: LevelPair):
    """Birth and death rates of the linear closure as functions of ``N``."""
    kb = pair.kappa * pair.beta
    w = pair.degeneracy_ratio

    def birth(N):
        return pair.n_s * (pair.alpha + kb * w * N)

    def death(N):
        return pair.n_r * kb * N

    return birth, death


def _check_stable(pair: LevelPair) -> None:
    if pair.n_s * pair.degeneracy_ratio >= pair.n_r:
        raise ValueError(
            "birth rate grows at least as fast as death rate (n_s g_r/g_s >= n_r); "
            "no stationary law"
        )


def simulate_jump_process(
    cell: ModeCell, pair: LevelPair, n_events: int, seed: int
) -> JumpTrajectory:
    """Event-driven (Gillespie) simulation of the birth-death process for ``N``.

    Starts from ``int(cell.N)``. Stops early, flagged ``absorbed``, if both rates
    vanish.
    """
    if n_events < 1:
        raise ValueError("n_events must be >= 1")
    _check_stable(pair)
    rng = _rng.generator(seed, _rng.STREAM_JUMP)
    waits = rng.standard_exponential(n_events)
    coins = rng.random(n_events)

    kb = pair.kappa * pair.beta
    b0 = pair.n_s * pair.alpha
    b1 = pair.n_s * kb * pair.degeneracy_ratio
    d1 = pair.n_r * kb

    N0 = int(cell.N)
    N = N0
    t = 0.0
    times = np.empty(n_events)
    values = np.empty(n_events, dtype=np.int64)
    absorbed = False
    count = 0
    for i in range(n_events):
        b = b0 + b1 * N
        total = b + d1 * N
        if total <= 0.0:
            absorbed = True
            break
        t += waits[i] / total
        N += 1 if coins[i] * total < b else -1
        times[i] = t
        values[i] = N
        count += 1
    return JumpTrajectory(times[:count], values[:count], int(seed), N0, absorbed)


def stationary_distribution(cell: ModeCell, pair: LevelPair, n_max: int) -> np.ndarray:
    """Stationary law on ``0..n_max`` from ``pi_{N+1} / pi_N = b_N / d_{N+1}``."""
    _check_stable(pair)
    birth, death = jump_rates(cell, pair)
    logp = np.zeros(n_max + 1)
    for n in range(n_max):
        logp[n + 1] = logp[n] + math.log(birth(n)) - math.log(death(n + 1))
    p = np.exp(logp - logp.max())
    return p / p.sum()


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    n = max(p.size, q.size)
    p = np.pad(p, (0, n - p.size))
    q = np.pad(q, (0, n - q.size))
    return 0.5 * float(np.abs(p - q).sum())


def linear_fit_slope(N: np.ndarray, rate: np.ndarray) -> float:
    """Least-squares slope of ``rate`` against ``N``."""
    N = np.asarray(N, float)
    rate = np.asarray(rate, float)
    Nc = N - N.mean()
    return float(np.dot(Nc, rate - rate.mean()) / np.dot(Nc, Nc))


def absorption_slopes(
    A: float, kappa: float, beta: float, n_points: int = 101
) -> tuple[float, float]:
    """Fitted slopes of ``R_abs(N)`` over ``[0, A/100]`` and ``[100 A, 200 A]``."""
    pair = LevelPair(n_r=1.0, n_s=0.0, alpha=0.0, beta=beta, kappa=kappa)
    slopes = []
    for lo, hi in ((0.0, A / 100.0), (100.0 * A, 200.0 * A)):
        Ns = np.linspace(lo, hi, n_points)
        R = np.array([per_molecule_rates(ModeCell(A=A, N=n), pair)[0] for n in Ns])
        slopes.append(linear_fit_slope(Ns, R))
    return slopes[0], slopes[1]


__all__ = [
    "FORMS",
    "JumpTrajectory",
    "LevelPair",
    "MeanFieldResult",
    "ModeCell",
    "absorption_probability",
    "absorption_slopes",
    "boltzmann_pair",
    "encounter_rate",
    "evolve_mean_field",
    "fixed_point",
    "interaction_probability",
    "jump_rates",
    "occupancy_ratio",
    "per_molecule_rates",
    "planck_occupancy",
    "simulate_jump_process",
    "stationary_distribution",
    "total_variation",
]
