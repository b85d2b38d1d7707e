import dataclasses
import math

import numpy as np
import pytest

from hardylab import HardyParams, derive_exponents
from hardylab import spherical as sph


@pytest.fixture(scope="module")
def grid512():
    return sph.AzimuthalGrid.uniform(512)


@pytest.fixture(scope="module")
def quarter_q2(grid512):
    p = HardyParams(3, 0.25, 2.0)
    return p, sph.solve_omega_shooting(p, grid512)


def test_grid_validation():
    with pytest.raises(ValueError):
        sph.AzimuthalGrid(np.array([0.0, 0.1, 0.2, 0.3, 0.4]))
    with pytest.raises(ValueError):
        sph.AzimuthalGrid(np.array([0.1, 0.2, 0.2, 0.3, 0.4]))
    g = sph.AzimuthalGrid.uniform(9)
    r = g.refined()
    assert r.n == 17 and np.array_equal(r.theta[::2], g.theta)


def test_psi_endpoints():
    p = HardyParams(3, 3 / 16)
    assert sph.psi_kappa(p, 0.0) == 1.0
    assert sph.psi_kappa(p, math.pi / 2) == pytest.approx(0.0, abs=1e-12)
    th = np.linspace(0, math.pi / 2, 50)
    assert np.all(np.diff(sph.psi_kappa(p, th)) < 0)


@pytest.mark.parametrize("kappa", [1 / 16, 3 / 16, 0.25])
def test_first_pair_second_order(kappa):
    p = HardyParams(3, kappa)
    g = sph.AzimuthalGrid.uniform(513)
    r1 = sph.first_eigen_check(p, g).residual_norm
    r2 = sph.first_eigen_check(p, g.refined()).residual_norm
    assert 3.6 <= r1 / r2 <= 4.4


def test_second_pair_value_and_orthogonality():
    p = HardyParams(3, 3 / 16)
    g = sph.AzimuthalGrid.uniform(513)
    rep = sph.second_eigen_check(p, g)
    assert rep["mu_kappa_2"] == pytest.approx(77 / 16, abs=1e-14)
    assert rep["mu_kappa_2_from_first"] == pytest.approx(77 / 16, abs=1e-14)
    assert abs(rep["orthogonality"]) < 1e-12
    r2 = sph.second_eigen_check(p, g.refined())["residual_norm"]
    assert 3.6 <= rep["residual_norm"] / r2 <= 4.4


def test_supercritical_is_nonexistent_without_solving(grid512):
    sol = sph.solve_omega_shooting(HardyParams(3, 0.25, 3.0), grid512)
    assert sol.verdict is sph.Verdict.NONEXISTENT
    assert sol.omega is None
    var = sph.solve_omega_variational(HardyParams(3, 0.25, 3.0), grid512)
    assert var.verdict is sph.Verdict.NONEXISTENT


def test_subcritical_exists(quarter_q2):
    p, sol = quarter_q2
    assert sol.verdict is sph.Verdict.EXISTS
    assert np.all(sol.omega > 0)
    assert sol.epsilon_sub > 0
    assert sol.residual_norm <= 1e-3


def test_subsolution_multiple_lies_below_profile(quarter_q2):
    p, sol = quarter_q2
    eps = sph.subsolution_epsilon(p)
    assert eps > 0
    assert np.all(sph.subsolution_residual(p, eps, sol.theta) <= 1e-12)
    assert np.all(sph.subsolution_residual(p, 0.5 * eps, sol.theta) < 0)
    # comparison: the largest subsolution multiple of psi lies below omega
    assert eps <= sol.epsilon_sub


def test_shooting_matches_variational(grid512):
    p = HardyParams(3, 3 / 16, 2.0)
    a = sph.solve_omega_shooting(p, grid512)
    b = sph.solve_omega_variational(p, grid512)
    assert np.max(np.abs(a.omega - b.omega)) <= 1e-3


def test_energy_decreases_from_zero(grid512):
    p = HardyParams(3, 1 / 8, 2.0)
    prob = sph.VariationalProblem(p, grid512.theta)
    w, hist = sph.minimize_energy(prob, np.zeros(grid512.n))
    assert all(b < a for a, b in zip(hist, hist[1:]))
    ex = derive_exponents(p)
    assert ex.ell_qN > ex.mu_kappa
    assert np.max(w) > 0


def test_separable_profile_scaling(quarter_q2):
    p, sol = quarter_q2
    assert np.array_equal(sph.separable_profile(p, sol, 1.0), sol.omega)
    assert np.allclose(sph.separable_profile(p, sol, 2.0), sol.omega / 4, rtol=1e-15)


def test_polar_residual_second_order():
    p = HardyParams(3, 0.25, 2.0)
    sol = sph.solve_omega_shooting(p, sph.AzimuthalGrid.uniform(2049))
    res = []
    for k, h in ((4, 0.05), (2, 0.025), (1, 0.0125)):
        sub = dataclasses.replace(sol, theta=sol.theta[::k], omega=sol.omega[::k], psi=sol.psi[::k])
        res.append(sph.polar_residual(p, sub, np.linspace(0.5, 1.0, int(round(0.5 / h)) + 1)))
    ratios = [res[i] / res[i + 1] for i in range(2)]
    assert ratios[0] < ratios[1]
    assert math.log2(ratios[1]) > 1.7


@pytest.mark.slow
def test_uniqueness_probe(quarter_q2, grid512):
    p, sol = quarter_q2
    A = sol.shoot_value
    brackets = [(0.5 * A, 1.5 * A), (0.9 * A, 1.1 * A), (0.2 * A, 3 * A), (0.99 * A, 1.2 * A), (0.7 * A, 1.01 * A)]
    vals = sph.uniqueness_probe(p, grid512, brackets)
    assert max(vals) - min(vals) <= 1e-8


def test_separated_bracket_required(grid512):
    p = HardyParams(3, 0.25, 2.0)
    sol = sph.solve_omega_shooting(p, grid512, bracket=(0.1, 0.2))
    assert sol.verdict is sph.Verdict.INCONCLUSIVE
