import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from stochbridge import kac
from stochbridge._grid import Grid1D, bin_masses

# 1 - (1 - e^{-2})/2 from mpmath
VAR_T1 = 0.567667641618306345946999747486


def _variance_by_quadrature(c, lam, t):
    """E[X_t^2] = 2 c^2 int_0^t int_0^s exp(-2 lam (s - u)) du ds, the velocity
    autocorrelation of the telegraph process integrated numerically."""
    val, _ = integrate.dblquad(
        lambda u, s: math.exp(-2 * lam * (s - u)), 0, t, 0, lambda s: s, epsabs=1e-13, epsrel=1e-13
    )
    return 2 * c * c * val


def _gaussian_field(dx, half_width=20.0, c=1.0, lam=1.0, sigma=1.0):
    g = Grid1D.centered(0.0, half_width, dx)
    return kac.KacField.from_density(g, np.exp(-g.x**2 / (2 * sigma**2)), c, lam)


# ---------------------------------------------------------------- variance


def test_variance_examples():
    assert kac.telegrapher_variance(1, 1, 0) == 0
    assert kac.telegrapher_variance(1, 1, 1) == pytest.approx(VAR_T1, rel=1e-14)


@pytest.mark.parametrize("c, lam, t", [(1, 1, 1), (2, 0.5, 3), (0.7, 3, 0.02), (1, 1, 0.049)])
def test_variance_matches_velocity_autocorrelation(c, lam, t):
    assert kac.telegrapher_variance(c, lam, t) == pytest.approx(_variance_by_quadrature(c, lam, t), rel=1e-9)


def test_variance_regimes():
    c, lam = 1.3, 0.8
    t = 0.01 / lam
    ratio = kac.telegrapher_variance(c, lam, t) / (c * t) ** 2
    assert 0.99 <= ratio <= 1.0
    D = kac.diffusion_coefficient(1.0, 0.5)
    assert D == 1.0
    slope = (kac.telegrapher_variance(1, 0.5, 200) - kac.telegrapher_variance(1, 0.5, 100)) / 100
    assert slope == pytest.approx(2 * D, rel=1e-12)


@given(u=st.floats(min_value=1e-6, max_value=0.2))
def test_variance_series_branch_is_continuous(u):
    # both branches evaluated near the switch agree with the direct formula
    direct = u - (1 - math.exp(-2 * u)) / 2
    assert kac.telegrapher_variance(1.0, 1.0, u) == pytest.approx(direct, rel=1e-9 / u)


# ------------------------------------------------------------- walkers


def test_ballistic_limit_walkers_on_light_cone():
    ens = kac.simulate_walkers(1000, 1.0, 1e-12, 1.0, seed=4)
    assert set(np.unique(ens.positions)) == {-1.0, 1.0}


def test_walker_variance_within_three_standard_errors():
    ens = kac.simulate_walkers(10**5, 1.0, 1.0, 1.0, seed=8)
    var, se = ens.variance()
    assert abs(var - VAR_T1) < 3 * se


def test_walker_mean_symmetric():
    ens = kac.simulate_walkers(10**5, 1.0, 1.0, 2.0, seed=6)
    se = ens.positions.std() / math.sqrt(ens.positions.size)
    assert abs(ens.positions.mean()) < 3 * se
    bal = kac.simulate_walkers(10**4, 1.0, 1.0, 2.0, init_signs="balanced", seed=6)
    assert abs(bal.positions.mean()) < 3 * bal.positions.std() / 100


def test_walkers_respect_finite_signal_speed():
    ens = kac.simulate_walkers(20000, 2.0, 3.0, 1.5, x0=0.7, seed=2)
    assert ens.positions.min() >= 0.7 - 3.0
    assert ens.positions.max() <= 0.7 + 3.0


def test_walkers_independent_of_worker_count():
    a = kac.simulate_walkers(40000, 1.0, 1.0, 3.0, seed=99, workers=1)
    b = kac.simulate_walkers(40000, 1.0, 1.0, 3.0, seed=99, workers=4)
    np.testing.assert_array_equal(a.positions, b.positions)
    assert a.positions.tobytes() == b.positions.tobytes()


def test_snapshots_continue_same_walkers():
    snaps, _ = kac.walker_snapshots(5000, 1.0, 1.0, [0.5, 0.5, 2.0], seed=1)
    np.testing.assert_array_equal(snaps[0], snaps[1])
    assert np.all(np.abs(snaps[2] - snaps[0]) <= 1.5 + 1e-12)


def test_walkers_from_density_samples():
    rng = np.random.default_rng(0)
    start = rng.normal(size=1000)
    ens = kac.simulate_walkers(1000, 1.0, 2.0, 0.25, positions=start, seed=3)
    assert np.all(np.abs(ens.positions - start) <= 0.25 + 1e-12)


# ----------------------------------------------------------------- PDE


def test_exact_transport_without_flips():
    f = _gaussian_field(0.1, lam=0.0)
    g = kac.kac_pde_step(f, 0.1)
    np.testing.assert_array_equal(g.P_plus, np.roll(f.P_plus, 1))
    np.testing.assert_array_equal(g.P_minus, np.roll(f.P_minus, -1))


def test_exchange_only_decay():
    grid = Grid1D(0.0, 1.0, 8)
    Pp = np.linspace(1.0, 2.0, 8)
    Pm = np.linspace(0.5, 0.0, 8)
    f = kac.KacField(grid, Pp, Pm, c=0.0, lam=0.7)
    dt = 0.3
    g = kac.kac_pde_step(f, dt)
    # closed-form solution of d/dt (P+, P-) = lam [[-1, 1], [1, -1]] (P+, P-)
    np.testing.assert_allclose(g.P_plus - g.P_minus, (Pp - Pm) * math.exp(-2 * 0.7 * dt), rtol=1e-14)
    np.testing.assert_allclose(g.P_plus + g.P_minus, Pp + Pm, rtol=1e-15)


def test_uniform_fixed_point():
    grid = Grid1D(0.0, 0.1, 50)
    f = kac.KacField(grid, np.full(50, 0.1), np.full(50, 0.1), c=1.0, lam=2.0)
    g = kac.evolve_kac(f, 0.1, 10)
    np.testing.assert_allclose(g.P_plus, f.P_plus, rtol=1e-14)
    np.testing.assert_allclose(g.P_minus, f.P_minus, rtol=1e-14)


def test_cfl_violation_rejected():
    f = _gaussian_field(0.1)
    with pytest.raises(ValueError, match="CFL"):
        kac.kac_pde_step(f, 0.15)


def test_fractional_courant_keeps_mass_and_sign():
    f = _gaussian_field(0.1)
    g = kac.evolve_kac(f, 0.05, 100)
    assert g.mass == pytest.approx(1.0, abs=1e-12)
    assert g.P_plus.min() >= 0 and g.P_minus.min() >= 0


def test_current_examples():
    f = _gaussian_field(0.1)
    rho, j = kac.density_and_current(f)
    assert np.all(j == 0)
    g = kac.KacField(f.grid, f.rho.copy(), np.zeros(f.grid.n), c=2.0, lam=1.0)
    rho, j = kac.density_and_current(g)
    np.testing.assert_array_equal(j, 2.0 * rho)


def _residuals_at(dx, t=1.0):
    f = _gaussian_field(dx)
    n = int(round(t / dx))
    a = kac.evolve_kac(f, dx, n - 1)
    b = kac.kac_pde_step(a, dx)
    return kac.kac_residuals(a, b, kac.kac_pde_step(b, dx))


def test_residuals_second_order():
    coarse, fine = _residuals_at(0.02), _residuals_at(0.01)
    assert coarse.continuity / fine.continuity == pytest.approx(4.0, rel=0.2)
    assert coarse.momentum / fine.momentum == pytest.approx(4.0, rel=0.2)


def test_point_source_mass_and_light_cone():
    grid = Grid1D.centered(0.0, 20.0, 0.01)
    f = kac.KacField.point(grid, 0.0, 1.0, 1.0)
    f = kac.evolve_kac(f, 0.01, 10**4)
    assert abs(f.mass - 1.0) < 1e-10
    # t = 100 would reach the periodic boundary; check cone at an earlier time
    g = kac.evolve_kac(kac.KacField.point(grid, 0.0, 1.0, 1.0), 0.01, 500)
    assert kac.mass_outside_cone(grid, g.rho, 0.0, 1.0, g.t) < 1e-10


def test_pde_second_moment_matches_exact_variance():
    grid = Grid1D.centered(0.0, 8.0, 0.005)
    f = kac.evolve_kac(kac.KacField.point(grid, 0.0, 1.0, 1.0), 0.005, 200)
    _, var = kac.moments(grid, f.rho)
    assert var == pytest.approx(VAR_T1, rel=1e-4)


def test_pde_diffusive_slope():
    dx = 0.05
    grid = Grid1D.centered(0.0, 160.0, dx)
    f = kac.KacField.point(grid, 0.0, 1.0, 1.0)
    f20 = kac.evolve_kac(f, dx, 400)
    f40 = kac.evolve_kac(f20, dx, 400)
    slope = (kac.moments(grid, f40.rho)[1] - kac.moments(grid, f20.rho)[1]) / 20.0
    assert slope == pytest.approx(2 * kac.diffusion_coefficient(1.0, 1.0), rel=0.02)


# ------------------------------------------------------------- diffusion


def test_diffusion_gaussian_spreading():
    dx = 0.02
    grid = Grid1D.centered(0.0, 12.0, dx)
    rho = np.zeros(grid.n)
    rho[grid.index_of(0.0)] = 1 / dx
    out = kac.diffuse(rho, 1.0, 0.5, dx)
    _, var = kac.moments(grid, out)
    assert var == pytest.approx(1.0, rel=0.01)
    gauss = np.exp(-grid.x**2 / 2) / math.sqrt(2 * math.pi)
    assert np.sum(np.abs(out - gauss)) * dx < 1e-3


def test_diffusion_preserves_uniform_and_mass():
    rho = np.full(40, 0.25)
    np.testing.assert_allclose(kac.diffusion_step(rho, 1.0, 0.001, 0.1), rho)
    rng = np.random.default_rng(1)
    rho = rng.random(40)
    assert kac.diffusion_step(rho, 1.0, 0.004, 0.1).sum() == pytest.approx(rho.sum(), rel=1e-14)


def test_diffusion_stability_guard():
    with pytest.raises(ValueError):
        kac.diffusion_step(np.ones(10), 1.0, 0.006, 0.1)


def test_kac_crosses_over_to_diffusion():
    dx = 0.05
    f = _gaussian_field(dx, half_width=150.0)
    f10 = kac.evolve_kac(f, dx, 200)
    f50 = kac.evolve_kac(f10, dx, 800)
    rho_d = kac.diffuse(f10.rho, kac.diffusion_coefficient(1.0, 1.0), 40.0, dx)
    assert np.sum(np.abs(rho_d - f50.rho)) * dx < 0.02


# -------------------------------------------------------- MC vs PDE


def test_bin_masses_splits_edge_ties():
    x = np.array([0.0, 0.5, 1.0, 1.5, 2.0])
    m = np.ones(5)
    np.testing.assert_allclose(bin_masses(x, m, np.array([0.0, 1.0, 2.0])), [2.5, 2.5])


def test_identical_densities_give_zero_distance():
    grid = Grid1D.centered(0.0, 2.0, 0.25)
    counts = np.arange(grid.n) % 3 + 1
    field = kac.KacField(grid, counts / (counts.sum() * grid.dx), np.zeros(grid.n), 1.0, 1.0, t=1.5)
    ens = kac.WalkerEnsemble(np.repeat(grid.x, counts), np.ones(counts.sum()), 1.0, 1.0, 1.5, 0)
    assert kac.compare_mc_pde(ens, field, bins=5) == pytest.approx(0.0, abs=1e-15)


def test_compare_rejects_mismatch():
    grid = Grid1D.centered(0.0, 10.0, 0.1)
    f = kac.KacField.point(grid, 0.0, 1.0, 1.0)
    ens = kac.simulate_walkers(100, 1.0, 1.0, 1.0, seed=0)
    with pytest.raises(ValueError, match="time"):
        kac.compare_mc_pde(ens, f)
    small = Grid1D.centered(0.0, 0.5, 0.1)
    g = kac.KacField.point(small, 0.0, 1.0, 1.0)
    g.t = 1.0
    with pytest.raises(ValueError, match="cover"):
        kac.compare_mc_pde(ens, g)


def _mc_pde_l1(n, seed, dx=0.01, t=5.0):
    grid = Grid1D.centered(0.0, 2 * t, dx)
    f = kac.evolve_kac(kac.KacField.point(grid, 0.0, 1.0, 1.0), dx, int(round(t / dx)))
    ens = kac.simulate_walkers(n, 1.0, 1.0, f.t, seed=seed)
    return kac.compare_mc_pde(ens, f, bins=100)


def test_mc_matches_pde():
    assert _mc_pde_l1(10**5, seed=21) < 0.03


def test_mc_pde_distance_scales_as_root_n():
    small = np.mean([_mc_pde_l1(25000, seed=s) for s in range(4)])
    large = np.mean([_mc_pde_l1(50000, seed=100 + s) for s in range(4)])
    assert 1.2 <= small / large <= 1.7
