"""Registry of named experiments run by the command-line interface.

Each experiment declares its parameters, a static ``check`` that computes
stability and accuracy preconditions without running, and a ``run`` that
returns a JSON-ready summary plus named tables. Runs are deterministic in
(parameters, seed) for any worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

REQUIRED = object()


@dataclass(frozen=True)
class Param:
    kind: str  # float, int, str, floats
    default: Any = REQUIRED
    low: float | None = None  # inclusive unless low_open
    high: float | None = None
    low_open: bool = False
    choices: tuple | None = None
    doc: str = ""

    @property
    def required(self) -> bool:
        return self.default is REQUIRED

    def parse(self, value: Any) -> Any:
        if self.kind == "floats":
            if isinstance(value, str):
                parts = [p for p in value.replace(" ", "").split(",") if p]
                return tuple(float(p) for p in parts)
            return tuple(float(v) for v in value)
        if self.kind == "float":
            return float(value)
        if self.kind == "int":
            if isinstance(value, str):
                f = float(value)
                if f != int(f):
                    raise ValueError(f"expected an integer, got {value!r}")
                return int(f)
            if isinstance(value, float) and value != int(value):
                raise ValueError(f"expected an integer, got {value!r}")
            return int(value)
        return str(value)

    def problems(self, name: str, value: Any) -> list[str]:
        items = value if self.kind == "floats" else (value,)
        out = []
        if self.kind == "floats" and not items:
            out.append(f"{name}: needs at least one value")
        for v in items:
            if self.choices is not None and v not in self.choices:
                out.append(f"{name}: {v!r} not in {list(self.choices)}")
            if self.kind in ("float", "int", "floats"):
                if not math.isfinite(v):
                    out.append(f"{name}: must be finite")
                    continue
                if self.low is not None and (v <= self.low if self.low_open else v < self.low):
                    op = ">" if self.low_open else ">="
                    out.append(f"{name}: must be {op} {self.low}, got {v}")
                if self.high is not None and v > self.high:
                    out.append(f"{name}: must be <= {self.high}, got {v}")
        return out


@dataclass
class Table:
    columns: list[str]
    rows: np.ndarray

    def __post_init__(self):
        self.rows = np.atleast_2d(np.asarray(self.rows, dtype=float))
        if self.rows.shape[1] != len(self.columns):
            raise ValueError("table width does not match its header")


@dataclass
class Result:
    summary: dict
    tables: dict[str, Table] = field(default_factory=dict)


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    anchors: tuple[str, ...]
    params: dict[str, Param]
    run: Callable[[dict, int, int | None], Result]
    check: Callable[[dict], list[str]] = lambda p: []
    stochastic: bool = False

    def required(self) -> list[str]:
        return sorted(k for k, p in self.params.items() if p.required)

    def with_defaults(self, values: dict) -> dict:
        out = {k: p.default for k, p in self.params.items() if not p.required}
        out.update(values)
        return out


def _pos(kind="float", default=REQUIRED, doc=""):
    return Param(kind, default, low=0.0, low_open=True, doc=doc)


def _nonneg(kind="float", default=REQUIRED, doc=""):
    return Param(kind, default, low=0.0, doc=doc)


def _thin(n: int, limit: int = 2001) -> np.ndarray:
    """Indices of at most ``limit`` evenly spaced rows, the last always kept."""
    if n <= limit:
        return np.arange(n)
    return np.unique(np.linspace(0, n - 1, limit).round().astype(int))


# ------------------------------------------------------------ kinetics


def _kinetics_forms(p):
    from . import kinetics

    return kinetics.FORMS if p["form"] == "both" else (p["form"],)


def _run_kinetics_equilibrium(p, seed, workers):
    from . import kinetics as kn

    target = p["A"] * kn.planck_occupancy(p["x"])
    cell = kn.ModeCell(A=p["A"], N=p["N0"])
    forms, tables = {}, {}
    for form in _kinetics_forms(p):
        pair = kn.boltzmann_pair(p["x"], form=form, beta=p["beta"], kappa=p["kappa"], A=p["A"])
        rate = kn.max_relaxation_rate(form, cell, pair)
        res = kn.evolve_mean_field(cell, pair, form, t_end=p["t_relax"] / rate)
        forms[form] = {
            "N_final": res.fixed_point,
            "closed_form": kn.fixed_point(form, cell, pair),
            "converged": res.converged,
            "rel_error": abs(res.fixed_point - target) / target,
            "steps": int(res.times.size - 1),
            "dt": res.dt,
        }
        keep = _thin(res.times.size)
        tables[f"trajectory_{form}"] = Table(["t", "N"], np.column_stack([res.times[keep], res.N[keep]]))
    summary = {
        "fixed_point": target,
        "converged": all(f["converged"] for f in forms.values()),
        "max_rel_error": max(f["rel_error"] for f in forms.values()),
        "forms": forms,
    }
    return Result(summary, tables)


def _run_kinetics_jump(p, seed, workers):
    from . import kinetics as kn

    cell = kn.ModeCell(A=p["A"], N=p["N0"])
    pair = kn.boltzmann_pair(p["x"], form="einstein_three_process", beta=p["beta"], kappa=p["kappa"], A=p["A"])
    traj = kn.simulate_jump_process(cell, pair, p["n_events"], seed)
    occ = traj.occupation()
    n_max = max(len(occ), 8)
    theory = kn.stationary_distribution(cell, pair, n_max - 1)
    emp = np.zeros(n_max)
    emp[: len(occ)] = occ
    mean_theory = p["A"] * kn.planck_occupancy(p["x"])
    summary = {
        "total_variation": kn.total_variation(emp, theory),
        "mean": traj.mean(),
        "mean_theory": mean_theory,
        "mean_rel_error": abs(traj.mean() - mean_theory) / mean_theory,
        "events": int(traj.times.size - 1),
        "absorbed": traj.absorbed,
        "t_final": float(traj.times[-1]),
    }
    table = Table(["N", "empirical", "theory"], np.column_stack([np.arange(n_max), emp, theory]))
    return Result(summary, {"distribution": table})


# ------------------------------------------------------------- emitter


def _bath(p):
    from .emitter import BathCoupling

    return BathCoupling(gamma=p["gamma"], N_th=p["N_th"], rabi=p["rabi"], detuning=p["detuning"])


def _emitter_dt(p):
    from .emitter import max_stable_dt

    return p["dt"] if p["dt"] > 0 else max_stable_dt(_bath(p))


def _check_emitter_relax(p):
    from .emitter import max_stable_dt

    bound = max_stable_dt(_bath(p))
    if p["dt"] > bound * (1 + 1e-12):
        return [f"stability: dt = {p['dt']:.6g} exceeds 1e-2 / (gamma (2 N_th + 1) + rabi) = {bound:.6g}"]
    return []


def _run_emitter_relax(p, seed, workers):
    from . import emitter as em

    b = _bath(p)
    dt = _emitter_dt(p)
    t_end = p["t_end"] if p["t_end"] > 0 else 20.0 / b.relaxation_rate
    n = int(math.ceil(t_end / dt - 1e-9))
    traj = em.evolve(em.TwoLevelDensity.excited(), b, dt, n)
    summary = {
        "dt": dt,
        "steps": n,
        "rho_ee_final": float(traj.rho_ee[-1]),
        "trace_drift": float(np.max(np.abs(traj.trace - 1.0))),
        "relaxation_rate_theory": b.relaxation_rate,
    }
    if p["rabi"] == 0:
        inf = float(em.steady_state(b).ee.real)
        summary["rho_ee_steady"] = inf
        summary["steady_error"] = abs(summary["rho_ee_final"] - inf)
        k = traj.times <= 8.0 / b.relaxation_rate
        fit = em.fit_relaxation_rate(traj.times[k], traj.rho_ee[k], inf)
        summary["relaxation_rate_fit"] = fit
        summary["relaxation_rel_error"] = abs(fit - b.relaxation_rate) / b.relaxation_rate
    keep = _thin(traj.times.size)
    table = Table(["t", "rho_ee", "trace"], np.column_stack([traj.times, traj.rho_ee, traj.trace])[keep])
    return Result(summary, {"trajectory": table})


def _run_emitter_lineshape(p, seed, workers):
    from . import emitter as em

    ls = em.lineshape(em.LineshapeSpec.centered(p["epsilon"], p["omega0"]))
    fit = em.sample_waiting_times(p["epsilon"], p["n_waiting"], seed)
    summary = {
        "epsilon": p["epsilon"],
        "fwhm_analytic": ls.fwhm_analytic,
        "fwhm_fourier": ls.fwhm_fourier,
        "fwhm_rel_error": abs(ls.fwhm_fourier - p["epsilon"]) / p["epsilon"],
        "max_pointwise_rel_diff": float(np.max(np.abs(ls.fourier - ls.analytic) / ls.analytic)),
        "peak_height": ls.peak_height,
        "waiting_rate_fit": fit.rate,
        "waiting_rate_stderr": fit.stderr,
    }
    table = Table(["omega", "analytic", "fourier"], np.column_stack([ls.omega, ls.analytic, ls.fourier]))
    return Result(summary, {"lineshape": table})


def _run_purcell(p, seed, workers):
    from . import emitter as em

    env = em.CavityEnv(wavelength_over_n=p["wavelength_over_n"], Q=p["Q"], V=p["V"], xi=p["xi"])
    F = em.purcell_factor(env)
    summary = {"purcell_factor": F, "gamma_free": p["gamma_free"], "gamma_env": em.environment_scaled_gamma(p["gamma_free"], env)}
    scan = np.linspace(0.0, 1.0, 11)
    rows = [[xi, em.purcell_factor(em.CavityEnv(p["wavelength_over_n"], p["Q"], p["V"], xi))] for xi in scan]
    return Result(summary, {"xi_scan": Table(["xi", "purcell_factor"], rows)})


# ----------------------------------------------------------------- kac


def _kac_times(p):
    if p["times"]:
        return sorted(p["times"])
    return [f / p["lam"] for f in (0.01, 0.1, 1.0, 10.0, 20.0, 40.0)]


def _run_kac_crossover(p, seed, workers):
    from . import kac

    c, lam = p["c"], p["lam"]
    times = _kac_times(p)
    snaps, _ = kac.walker_snapshots(p["n_walkers"], c, lam, times, seed=seed, workers=workers)
    rows, var_mc = [], []
    for t, x in zip(times, snaps):
        v, se = kac.sample_variance(x)
        exact = kac.telegrapher_variance(c, lam, t)
        var_mc.append(v)
        rows.append([t, v, se, exact, (v - exact) / se if se > 0 else 0.0])
    D = kac.diffusion_coefficient(c, lam)
    t_b = 0.01 / lam
    summary = {
        "D": D,
        "max_abs_z": max(abs(r[4]) for r in rows),
        "ballistic_ratio_exact": kac.telegrapher_variance(c, lam, t_b) / (c * t_b) ** 2,
    }
    if t_b in times:
        summary["ballistic_ratio_mc"] = var_mc[times.index(t_b)] / (c * t_b) ** 2
    late = [i for i, t in enumerate(times) if t >= 20.0 / lam * (1 - 1e-12)]
    if len(late) >= 2:
        i, j = late[0], late[-1]
        slope = (var_mc[j] - var_mc[i]) / (times[j] - times[i])
        summary["diffusive_slope_mc"] = slope
        summary["diffusive_slope_rel_error"] = abs(slope - 2 * D) / (2 * D)
    table = Table(["t", "var_mc", "stderr", "var_exact", "z"], rows)
    return Result(summary, {"variance": table})


def _check_kac_mc_vs_pde(p):
    dt = p["dt"] if p["dt"] > 0 else p["dx"] / p["c"]
    nu = p["c"] * dt / p["dx"]
    out = []
    if nu > 1 + 1e-12:
        out.append(f"CFL: c dt / dx = {nu:.6g} > 1")
    steps = p["t_end"] / dt
    if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
        out.append(f"t_end = {p['t_end']} is not a whole number of steps of dt = {dt:.6g}")
    return out


def _run_kac_mc_vs_pde(p, seed, workers):
    from . import kac
    from ._grid import Grid1D, bin_masses

    c, lam, dx = p["c"], p["lam"], p["dx"]
    dt = p["dt"] if p["dt"] > 0 else dx / c
    n = int(round(p["t_end"] / dt))
    grid = Grid1D.centered(0.0, c * p["t_end"] + 5 * dx, dx)
    f0 = kac.KacField.point(grid, 0.0, c, lam)
    f = kac.evolve_kac(f0, dt, n)
    ens = kac.simulate_walkers(p["n_walkers"], c, lam, f.t, seed=seed, workers=workers)
    edges = kac.histogram_edges(0.0, c, f.t, p["bins"])
    counts, _ = np.histogram(ens.positions, bins=edges)
    pde = bin_masses(grid.x, f.rho * dx, edges)
    summary = {
        "l1": kac.compare_mc_pde(ens, f, bins=p["bins"]),
        "steps": n,
        "courant": c * dt / dx,
        "mass_drift": abs(f.mass - f0.mass),
        "mass_outside_cone": kac.mass_outside_cone(grid, f.rho, 0.0, c, f.t),
    }
    centres = 0.5 * (edges[1:] + edges[:-1])
    table = Table(["x", "mc", "pde"], np.column_stack([centres, counts / ens.positions.size, pde]))
    return Result(summary, {"histogram": table})


# -------------------------------------------------------------- nelson


def _nelson_state(p):
    from . import nelson as ne
    from ._grid import Grid1D

    grid = Grid1D.centered(0.0, p["half_width"], p["dx"])
    pot = ne.Potential("harmonic", {"omega": p["omega"]})
    return ne.stationary_state(grid, pot, hbar=p["hbar"], mass=p["mass"], level=p["level"])


def _check_nelson(p):
    from . import nelson as ne

    out = []
    steps = p["t_end"] / p["dt"]
    if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
        out.append(f"t_end = {p['t_end']} is not a whole number of steps of dt = {p['dt']}")
    w, _ = _nelson_state(p)
    bmax = float(np.max(np.abs(ne.drift_field(w))))
    if p["dt"] * bmax > p["dx"] * (1 + 1e-12):
        out.append(f"drift step: dt max|b+| = {p['dt'] * bmax:.6g} exceeds dx = {p['dx']}")
    return out


def _run_nelson_sample(p, seed, workers):
    from . import nelson as ne

    w, E = _nelson_state(p)
    t_end = p["t_end"]
    n_rec = max(1, p["records"])
    record = [t_end * k / n_rec for k in range(n_rec + 1)]
    run = ne.sample_cloud(w, p["n_particles"], t_end, p["dt"], seed=seed, record_times=record, workers=workers)
    sigma = math.sqrt(p["hbar"] / (2 * p["mass"] * p["omega"]))
    edges = np.linspace(-6 * sigma, 6 * sigma, p["bins"] + 1)
    l1 = [ne.cloud_l1(x, w, edges) for x in run.snapshots]
    counts, _ = np.histogram(run.cloud.positions, bins=edges)
    target = ne.binned_density(w, edges)
    q = ne.quantum_potential(w)
    region = ne.mass_quantile_mask(w)
    summary = {
        "energy": E,
        "D": w.D,
        "l1_initial": l1[0],
        "l1_final": l1[-1],
        "l1_max": max(l1),
        "q_plus_v_max_dev": float(np.max(np.abs((q + w.V)[region] - E))),
    }
    centres = 0.5 * (edges[1:] + edges[:-1])
    return Result(
        summary,
        {
            "l1_vs_time": Table(["t", "l1"], np.column_stack([run.times, l1])),
            "histogram": Table(["x", "cloud", "density"], np.column_stack([centres, counts / len(run.cloud.positions), target])),
        },
    )


# -------------------------------------------------------------- chiral


def _check_dirac(p):
    out = []
    dx = p["length"] / p["n"]
    for k in p["ks"]:
        cycles = k * p["length"] / (2 * math.pi)
        if abs(cycles - round(cycles)) > 1e-9:
            out.append(f"k = {k}: not commensurate with the periodic box")
        if abs(k) * dx > 0.1 + 1e-12:
            out.append(f"k = {k}: k dx = {abs(k) * dx:.4g} > 0.1")
    return out


def _run_dirac_dispersion(p, seed, workers):
    from . import chiral as ch

    pts = ch.dispersion_sweep(
        list(p["ks"]), list(p["mus"]), workers=workers, c=p["c"], length=p["length"], n=p["n"], t_end=p["t_end"]
    )
    rows = [[q.k, q.mu, q.omega_measured, q.omega_theory, q.rel_error] for q in pts]
    summary = {"max_rel_error": max(r[4] for r in rows), "points": len(rows)}
    return Result(summary, {"dispersion": Table(["k", "mu", "omega_measured", "omega_theory", "rel_error"], rows)})


def _chiral_field(p):
    from . import chiral as ch
    from ._grid import Grid1D

    L = p["half_length"]
    grid = Grid1D.periodic(-L, 2 * L, int(round(2 * L / p["dx"])))
    return ch.gaussian_spinor(
        grid, 0.0, p["sigma"], right=1.0, left=p["left"], c=p["c"], mass_freq=p["mu"], lambda_flip=p["lam"]
    )


def _check_chiral(p):
    out = []
    if p["c"] * p["t_end"] * 4 > 2 * p["half_length"]:
        out.append("domain: periodic box shorter than 4 c t_end")
    n = 2 * p["half_length"] / p["dx"]
    if abs(n - round(n)) > 1e-9:
        out.append("dx does not divide the periodic box")
    return out


def _run_chiral_verbatim(p, seed, workers):
    from dataclasses import replace

    from . import chiral as ch

    f = _chiral_field(p)
    dt = p["dx"] / p["c"] if p["c"] > 0 else p["dx"]
    n = int(round(p["t_end"] / dt))
    every = max(1, n // 200)
    out, snaps = ch.evolve(f, dt, n, walk=True, every=every)
    diff0 = math.sqrt(float(np.sum(np.abs(f.psi_R - f.psi_L) ** 2) * f.grid.dx))
    rows = [
        [s.t, s.norm(), math.sqrt(float(np.sum(np.abs(s.psi_R - s.psi_L) ** 2) * f.grid.dx))] for s in snaps
    ]
    summary = {"norm_initial": f.norm(), "norm_final": out.norm(), "chirality_difference_initial": diff0,
               "chirality_difference_final": rows[-1][2], "t_final": out.t}
    if p["lam"] == 0:
        free, _ = ch.evolve(replace(f, mass_freq=0.0), dt, n)
        phase = np.exp(-1j * p["mu"] * out.t)
        summary["phase_relation_error"] = float(
            max(np.max(np.abs(out.psi_R - free.psi_R * phase)), np.max(np.abs(out.psi_L - free.psi_L * phase)))
        )
    snapshot = np.column_stack([out.grid.x, np.abs(out.psi_R) ** 2, np.abs(out.psi_L) ** 2])
    return Result(
        summary,
        {
            "norms": Table(["t", "norm", "chirality_difference"], rows),
            "snapshot": Table(["x", "rho_R", "rho_L"], snapshot),
        },
    )


def te_mass_refinement(lam, mu, c=1.0, dx0=0.04, levels=2, t=1.0, half_length=20.0, sigma=1.0, left=0.3):
    """Residuals of the eliminated equation at ``levels`` halvings of ``dx = c dt``."""
    from . import chiral as ch
    from ._grid import Grid1D

    rows = []
    for lev in range(levels):
        dx = dx0 / 2**lev
        grid = Grid1D.periodic(-half_length, 2 * half_length, int(round(2 * half_length / dx)))
        f = ch.gaussian_spinor(grid, 0.0, sigma, right=1.0, left=left, c=c, mass_freq=mu, lambda_flip=lam)
        dt = dx / c
        n = int(round(t / dt))
        _, s = ch.evolve(f, dt, n + 1, walk=True, every=1)
        trio = s[n - 1 : n + 2]
        rows.append([dx, dt, ch.te_mass_residual(trio, dt), ch.telegrapher_residual(trio, dt)])
    return rows


def _run_te_mass(p, seed, workers):
    rows = te_mass_refinement(p["lam"], p["mu"], p["c"], p["dx0"], p["levels"], p["t"])
    orders = [math.log2(a[2] / b[2]) for a, b in zip(rows, rows[1:])]
    summary = {"residuals": [r[2] for r in rows], "orders": orders, "telegrapher_residuals": [r[3] for r in rows]}
    if p["mu"] == 0:
        summary["massless_matches_telegrapher"] = all(r[2] == r[3] for r in rows)
    return Result(summary, {"refinement": Table(["dx", "dt", "te_mass_residual", "telegrapher_residual"], rows)})


def _check_te_mass(p):
    if p["c"] * p["t"] * 4 > 40.0:
        return ["domain: periodic box shorter than 4 c t"]
    return []


# ------------------------------------------------------------- catalog

_FORM = Param("str", "both", choices=("both", "bose_two_process", "einstein_three_process"))

EXPERIMENTS: dict[str, Experiment] = {
    e.name: e
    for e in [
        Experiment(
            "kinetics-equilibrium",
            "Mean-field relaxation of the mode occupancy to the Planck fixed point",
            ("Planck law from the two-process Bose balance", "Einstein detailed balance reduction"),
            {
                "x": _pos(doc="h nu / k T"),
                "A": _pos(doc="number of cells"),
                "form": _FORM,
                "beta": Param("float", 0.5, low=0.0, low_open=True, high=1.0),
                "kappa": _pos(default=1.0),
                "N0": _nonneg(default=0.0),
                "t_relax": _pos(default=400.0, doc="integration window in relaxation times"),
            },
            _run_kinetics_equilibrium,
        ),
        Experiment(
            "kinetics-jump",
            "Gillespie birth-death process for the quanta count against its stationary law",
            ("stochastic jump-process equilibrium of the quanta count",),
            {
                "x": _pos(), "A": _pos(), "n_events": Param("int", low=1),
                "beta": Param("float", 0.5, low=0.0, low_open=True, high=1.0),
                "kappa": _pos(default=1.0), "N0": _nonneg(default=0.0),
            },
            _run_kinetics_jump,
            stochastic=True,
        ),
        Experiment(
            "emitter-relax",
            "Lindblad relaxation of a two-level emitter in a thermal bath",
            ("two-level master equation with thermal occupation", "golden-rule vacuum term"),
            {
                "gamma": _pos(), "N_th": _nonneg(),
                "rabi": _nonneg(default=0.0), "detuning": Param("float", 0.0),
                "dt": _nonneg(default=0.0, doc="0 selects the stability bound"),
                "t_end": _nonneg(default=0.0, doc="0 selects 20 relaxation times"),
            },
            _run_emitter_relax,
            _check_emitter_relax,
        ),
        Experiment(
            "emitter-lineshape",
            "Lorentzian lineshape from exponential waiting times, analytic vs Fourier route",
            ("Lorentzian lineshape of width epsilon from Poisson emission times",),
            {"epsilon": _pos(), "omega0": Param("float", 5.0), "n_waiting": Param("int", 10000, low=1)},
            _run_emitter_lineshape,
            stochastic=True,
        ),
        Experiment(
            "purcell",
            "Purcell enhancement of the spontaneous emission rate in a cavity",
            ("cavity Purcell factor", "environment-scaled emission rate"),
            {
                "wavelength_over_n": _pos(), "Q": _pos(), "V": _pos(),
                "xi": Param("float", 1.0, low=0.0, high=1.0), "gamma_free": _pos(default=1.0),
            },
            _run_purcell,
        ),
        Experiment(
            "kac-crossover",
            "Persistent-walker variance from ballistic to diffusive regime",
            ("telegrapher variance crossover", "diffusion limit D = c^2 / 2 lambda"),
            {"c": _pos(), "lam": _pos(), "n_walkers": Param("int", low=2), "times": Param("floats", ())},
            _run_kac_crossover,
            stochastic=True,
        ),
        Experiment(
            "kac-mc-vs-pde",
            "Walker histogram against the Kac system solved on a lattice",
            ("Kac two-velocity system", "telegrapher equation for the density"),
            {
                "c": _pos(), "lam": _pos(), "n_walkers": Param("int", low=1), "t_end": _pos(),
                "dx": _pos(default=0.01), "dt": _nonneg(default=0.0, doc="0 selects dx / c"),
                "bins": Param("int", 100, low=1),
            },
            _run_kac_mc_vs_pde,
            _check_kac_mc_vs_pde,
            stochastic=True,
        ),
        Experiment(
            "nelson-sample",
            "Nelson particle cloud in a harmonic eigenstate against |psi|^2",
            ("Nelson forward diffusion with D = hbar / 2m", "quantum potential balance"),
            {
                "omega": _pos(), "n_particles": Param("int", low=1), "t_end": _pos(),
                "dt": _pos(default=0.008), "dx": _pos(default=0.05), "half_width": _pos(default=8.0),
                "hbar": _pos(default=1.0), "mass": _pos(default=1.0), "level": Param("int", 0, low=0),
                "records": Param("int", 10, low=1), "bins": Param("int", 40, low=1),
            },
            _run_nelson_sample,
            _check_nelson,
            stochastic=True,
        ),
        Experiment(
            "dirac-dispersion",
            "Measured phase rotation of Dirac plane waves against sqrt(c^2 k^2 + mu^2)",
            ("1+1 Dirac equation plane-wave dispersion",),
            {
                "ks": Param("floats"), "mus": Param("floats", low=0.0), "c": _pos(default=1.0),
                "length": _pos(default=8 * math.pi), "n": Param("int", 4096, low=8), "t_end": _pos(default=10.0),
            },
            _run_dirac_dispersion,
            _check_dirac,
        ),
        Experiment(
            "chiral-verbatim",
            "Two-chirality walk: right and left movers exchanged at rate lambda, mass as a phase",
            ("random chirality reversal as the persistent-walk form of 1+1 Dirac",),
            {
                "lam": _nonneg(), "mu": Param("float"), "t_end": _pos(), "c": _pos(default=1.0),
                "dx": _pos(default=0.02), "half_length": _pos(default=20.0), "sigma": _pos(default=1.0),
                "left": Param("float", 0.3),
            },
            _run_chiral_verbatim,
            _check_chiral,
        ),
        Experiment(
            "te-mass",
            "Refinement study of the telegrapher equation with mass from the chiral walk",
            ("second-order massive telegrapher equation after eliminating one mover",),
            {
                "lam": _nonneg(), "mu": Param("float"), "c": _pos(default=1.0),
                "dx0": _pos(default=0.04), "levels": Param("int", 2, low=2), "t": _pos(default=1.0),
            },
            _run_te_mass,
            _check_te_mass,
        ),
    ]
}


def catalog() -> list[dict]:
    """Experiments sorted by name with descriptions, required parameters and anchors."""
    return [
        {
            "name": e.name,
            "description": e.description,
            "required": e.required(),
            "anchors": list(e.anchors),
        }
        for e in sorted(EXPERIMENTS.values(), key=lambda e: e.name)
    ]
