import math

import numpy as np
import pytest
import sympy as sp
from dataclasses import replace

from stochbridge import chiral as ch
from stochbridge._grid import Grid1D

SQRT2 = 1.41421356237309504880168872421


@pytest.fixture(scope="module")
def ring():
    return Grid1D.periodic(-20.0, 40.0, 2000)


# -------------------------------------------------------------- dirac step


def test_massless_transport_is_rigid(ring):
    f = ch.gaussian_spinor(ring, 0.0, 1.0, right=1.0, left=0.5j)
    out, _ = ch.evolve(f, ring.dx, 150)
    np.testing.assert_array_equal(out.psi_R, np.roll(f.psi_R, 150))
    np.testing.assert_array_equal(out.psi_L, np.roll(f.psi_L, -150))


def test_fractional_courant_shift_matches_fourier_translation(ring):
    f = ch.gaussian_spinor(ring, 0.0, 1.0)
    out, _ = ch.evolve(f, 0.5 * ring.dx, 100)
    expected = ch.gaussian_spinor(ring, 50 * ring.dx, 1.0)
    np.testing.assert_allclose(out.psi_R, expected.psi_R, atol=1e-10)


def test_uniform_spinor_rotates_at_mass_frequency():
    g = Grid1D.periodic(0.0, 1.0, 16)
    f = ch.SpinorField1D(g, np.ones(16), np.zeros(16), c=1.0, mass_freq=2.0)
    dt = 2 * math.pi / 2.0 / 1000  # 1000 steps per amplitude period 2 pi / mu
    snaps = ch.evolve(f, dt, 1000, every=1)[1]
    t = np.array([s.t for s in snaps])
    pop = np.array([abs(s.psi_R[0]) ** 2 for s in snaps])
    np.testing.assert_allclose(pop, np.cos(2.0 * t) ** 2, atol=1e-12)
    np.testing.assert_allclose(snaps[-1].psi_R, f.psi_R, atol=1e-6)
    np.testing.assert_allclose(snaps[500].psi_R, -f.psi_R, atol=1e-6)


def test_dirac_norm_conserved(ring):
    f = ch.gaussian_spinor(ring, 0.0, 1.5, right=1.0, left=1j, k0=0.7, c=1.0, mass_freq=1.3)
    n0 = f.norm()
    out, _ = ch.evolve(f, 0.8 * ring.dx, 10**4)
    assert abs(out.norm() - n0) < 1e-10


def test_dirac_step_rejects_flips_and_cfl(ring):
    f = ch.gaussian_spinor(ring, 0.0, 1.0, lambda_flip=0.5)
    with pytest.raises(ValueError):
        ch.dirac_step(f, 0.01)
    with pytest.raises(ValueError, match="CFL"):
        ch.dirac_step(replace(f, lambda_flip=0.0), 1.5 * ring.dx)


def test_dirac_basis_round_trip(ring):
    f = ch.gaussian_spinor(ring, 1.0, 1.0, right=0.3, left=0.7 - 0.2j, mass_freq=0.4)
    up, lo = ch.to_dirac_basis(f)
    back = ch.from_dirac_basis(ring, up, lo, mass_freq=0.4)
    np.testing.assert_allclose(back.psi_R, f.psi_R, atol=1e-15)
    np.testing.assert_allclose(back.psi_L, f.psi_L, atol=1e-15)
    # the Hadamard change of basis maps sigma_z to sigma_x
    sz, sx = np.diag([1.0, -1.0]), np.array([[0.0, 1.0], [1.0, 0.0]])
    np.testing.assert_allclose(ch.HADAMARD @ sz @ ch.HADAMARD.T, sx, atol=1e-15)


def test_support_grows_at_most_at_speed_c(ring):
    R = np.zeros(ring.n, complex)
    R[1000] = 1.0
    f = ch.SpinorField1D(ring, R, np.zeros(ring.n), mass_freq=1.0)
    out, _ = ch.evolve(f, ring.dx, 60)
    nz = np.flatnonzero(np.abs(out.psi_R) + np.abs(out.psi_L) > 0)
    assert nz.min() >= 1000 - 60 and nz.max() <= 1000 + 60


# -------------------------------------------------------------- dispersion


@pytest.mark.parametrize("mu", [0.0, 1.0])
@pytest.mark.parametrize("k", [0.0, 0.5, 1.0, 2.0])
def test_dispersion_grid(k, mu):
    p = ch.dispersion_check(k, mu=mu)
    assert p.omega_theory == pytest.approx(math.sqrt(k * k + mu * mu), rel=1e-15)
    assert p.rel_error < 1e-4


def test_dispersion_reference_value():
    p = ch.dispersion_check(1.0, mu=1.0)
    assert p.omega_measured == pytest.approx(SQRT2, rel=1e-4)


def test_dispersion_preconditions():
    with pytest.raises(ValueError, match="commensurate"):
        ch.dispersion_check(0.3)
    with pytest.raises(ValueError):
        ch.dispersion_check(2.0, n=128)


def test_dispersion_sweep_workers_agree():
    a = ch.dispersion_sweep([0.5, 1.0], [0.0, 1.0], workers=1, t_end=2.0)
    b = ch.dispersion_sweep([0.5, 1.0], [0.0, 1.0], workers=3, t_end=2.0)
    assert a == b
    assert [(p.k, p.mu) for p in a] == [(0.5, 0.0), (1.0, 0.0), (0.5, 1.0), (1.0, 1.0)]


# ------------------------------------------------------------- chiral walk


def test_balanced_field_has_no_exchange(ring):
    f = ch.gaussian_spinor(ring, 0.0, 1.0, right=1.0, left=1.0, lambda_flip=2.0)
    assert np.array_equal(ch.chiral_walk_step(f, 0.0).psi_R, f.psi_R)
    uniform = ch.SpinorField1D(ring, np.ones(ring.n), np.ones(ring.n), lambda_flip=2.0)
    out, _ = ch.evolve(uniform, ring.dx, 20, walk=True)
    np.testing.assert_allclose(out.psi_R, 1.0, atol=1e-14)


def test_chirality_difference_decays_at_two_lambda():
    g = Grid1D.periodic(0.0, 1.0, 8)
    f = ch.SpinorField1D(g, np.ones(8), np.zeros(8), c=0.0, lambda_flip=1.0)
    snaps = ch.evolve(f, 0.01, 200, walk=True, every=10)[1]
    for s in snaps:
        assert abs(s.psi_R[0] - s.psi_L[0]) == pytest.approx(math.exp(-2 * s.t), rel=1e-12)


def test_walk_without_flips_is_phase_times_transport(ring):
    f = ch.gaussian_spinor(ring, 0.0, 1.0, right=1.0, left=0.4, mass_freq=1.7)
    walk, _ = ch.evolve(f, ring.dx, 300, walk=True)
    free, _ = ch.evolve(replace(f, mass_freq=0.0), ring.dx, 300)
    phase = np.exp(-1j * 1.7 * walk.t)
    np.testing.assert_allclose(walk.psi_R, free.psi_R * phase, atol=1e-10)
    np.testing.assert_allclose(walk.psi_L, free.psi_L * phase, atol=1e-10)


def test_walk_norm_non_increasing(ring):
    f = ch.gaussian_spinor(ring, 0.0, 1.0, right=1.0, left=0.2, lambda_flip=0.5, mass_freq=1.0)
    norms = [s.norm() for s in ch.evolve(f, ring.dx, 200, walk=True, every=1)[1]]
    assert np.all(np.diff(norms) <= 1e-15)
    assert norms[-1] < norms[0]


# ---------------------------------------------------------------- elimination


def test_symbolic_elimination():
    x, t = sp.symbols("x t")
    c, lam, mu = sp.symbols("c lambda mu", positive=True)
    R, L = sp.Function("R")(x, t), sp.Function("L")(x, t)

    def D(f, s):
        return sp.diff(f, t) + s * c * sp.diff(f, x) + (lam + sp.I * mu) * f

    # D+ R = lam L and D- L = lam R, so D- D+ R - lam^2 R = 0
    derived = sp.expand(D(D(R, 1), -1) - lam**2 * R)
    stated = (
        sp.diff(R, t, 2) + 2 * (lam + sp.I * mu) * sp.diff(R, t) - c**2 * sp.diff(R, x, 2)
        + (2 * sp.I * lam * mu - mu**2) * R
    )
    assert sp.simplify(derived - stated) == 0
    assert sp.simplify(derived.subs(mu, 0) - (sp.diff(R, t, 2) + 2 * lam * sp.diff(R, t) - c**2 * sp.diff(R, x, 2))) == 0


def _residuals(lam, mu, dxs=(0.04, 0.02)):
    out = []
    for dx in dxs:
        g = Grid1D.periodic(-20.0, 40.0, int(round(40.0 / dx)))
        f = ch.gaussian_spinor(g, 0.0, 1.0, right=1.0, left=0.3, mass_freq=mu, lambda_flip=lam)
        n = int(round(1.0 / dx))
        _, s = ch.evolve(f, dx, n + 1, walk=True, every=1)
        out.append((s[n - 1 : n + 2], dx))
    return out


@pytest.mark.parametrize("lam,mu", [(0.5, 1.0), (1.0, 2.0), (0.5, 0.0)])
def test_te_mass_residual_second_order(lam, mu):
    (coarse, h1), (fine, h2) = _residuals(lam, mu)
    ratio = ch.te_mass_residual(coarse, h1) / ch.te_mass_residual(fine, h2)
    assert ratio == pytest.approx(4.0, abs=4.0 * (2 ** 0.3 - 1))
    assert ch.te_mass_residual(fine, h2) < 1e-2


def test_massless_case_is_plain_telegrapher():
    for snaps, dx in _residuals(0.5, 0.0):
        assert ch.te_mass_residual(snaps, dx) == ch.telegrapher_residual(snaps, dx)


def test_free_transport_satisfies_wave_equation():
    for snaps, dx in _residuals(0.0, 0.0):
        assert ch.te_mass_residual(snaps, dx) < 1e-10


def test_opposite_mass_sign_does_not_converge():
    (coarse, h1), (fine, h2) = _residuals(0.5, 1.0)

    def flipped(snaps, dt):
        # the +mu^2 variant differs from te_mass_residual by 2 mu^2 R
        f = snaps[1]
        base = ch.te_mass_residual(snaps, dt)
        return base, math.sqrt(float(np.sum(np.abs(2 * f.mass_freq**2 * f.psi_R) ** 2) * f.grid.dx))

    for snaps, dt in ((coarse, h1), (fine, h2)):
        good, gap = flipped(snaps, dt)
        assert gap > 100 * good


def test_residual_rejects_mismatched_snapshots(ring):
    f = ch.gaussian_spinor(ring, 0.0, 1.0, lambda_flip=0.5)
    with pytest.raises(ValueError):
        ch.te_mass_residual([f, f, replace(f, lambda_flip=0.6)], 0.01)
    with pytest.raises(ValueError):
        ch.te_mass_residual([f, f], 0.01)
