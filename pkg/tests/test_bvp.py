import math
import warnings

import numpy as np
import pytest

from hardylab import HardyParams, derive_exponents
from hardylab import bvp

P = HardyParams(2, 0.25, 2.0)


@pytest.fixture(scope="module")
def mesh():
    return bvp.PolarMesh(1e-3, 0.9, 41)


@pytest.fixture(scope="module")
def dirac(mesh):
    return {k: bvp.solve_dirac(P, mesh, k) for k in (1.0, 2.0, 4.0)}


@pytest.fixture(scope="module")
def strong(mesh):
    return bvp.solve_strong_singularity(P, mesh)


@pytest.fixture(scope="module")
def omega(mesh):
    return bvp.omega_on_mesh(P, mesh)


def test_mesh_invariants():
    with pytest.raises(ValueError):
        bvp.PolarMesh(1e-3, 0.97)
    with pytest.raises(ValueError):
        bvp.PolarMesh(1e-3, 0.5)
    with pytest.raises(ValueError):
        bvp.PolarMesh(5e-5)
    m = bvp.PolarMesh(1e-4)
    r = m.radii
    assert r[0] == pytest.approx(1e-4) and r[-1] == 1.0
    ratio = r[:-1] / r[1:]
    assert np.all((ratio >= 0.9 - 1e-12) & (ratio < 1.0))
    d = m.d
    assert np.all(d[1:-1, :-1] > 0)


def test_zero_data_gives_zero(mesh):
    sol = bvp.solve_dirac(P, mesh, 0.0)
    assert np.all(sol.u.values == 0.0)


def test_refuses_supercritical(mesh):
    with pytest.raises(bvp.NotAdmissibleError):
        bvp.solve_dirac(HardyParams(2, 0.25, 6.0), mesh, 1.0)
    with pytest.raises(bvp.NotAdmissibleError):
        bvp.solve_strong_singularity(HardyParams(2, 0.25, 6.0), mesh)


def test_refusal_matches_admissibility(mesh):
    from hardylab.admissibility import dirac_admissible
    for q in (1.5, 3.0, 4.9, 5.0, 5.5):
        p = HardyParams(2, 0.25, q)
        if dirac_admissible(p):
            bvp.solve_dirac(p, mesh, 0.5)
        else:
            with pytest.raises(bvp.NotAdmissibleError):
                bvp.solve_dirac(p, mesh, 0.5)


def test_monotone_in_k(dirac):
    assert bvp.comparison_check(dirac[1.0].u, dirac[2.0].u)
    assert bvp.comparison_check(dirac[2.0].u, dirac[4.0].u)
    assert not bvp.comparison_check(dirac[4.0].u, dirac[1.0].u)


def test_identical_data_compare_equal(dirac):
    assert bvp.comparison_check(dirac[1.0].u, dirac[1.0].u, tol=0.0)


def test_comparison_mesh_mismatch(dirac):
    other = bvp.solve_dirac(P, bvp.PolarMesh(2e-3), 1.0)
    with pytest.raises(bvp.MeshMismatchError):
        bvp.comparison_check(dirac[1.0].u, other.u)


def test_nonnegative_and_bracketed(dirac, mesh):
    for k, sol in dirac.items():
        assert np.all(sol.u.values >= 0)
        assert np.all(sol.sub <= sol.sup + 1e-12 * np.abs(sol.sup).max())
        h = bvp.PolarOperator(P, mesh).h[1:]
        u = sol.u.values[1:]
        tol = 1e-9 * np.abs(sol.u.values).max()
        assert np.all(u >= h * sol.sub.reshape(h.shape) - tol)
        assert np.all(u <= h * sol.sup.reshape(h.shape) + tol)


def test_newton_and_monotone_agree(mesh, dirac):
    mono = bvp.solve_dirac(P, mesh, 4.0, method="monotone-truncation")
    hist = mono.report.residual_history
    assert all(b <= a * (1 + 1e-12) for a, b in zip(hist, hist[1:]))
    u1, u2 = dirac[4.0].u.values, mono.u.values
    assert np.max(np.abs(u1 - u2)) <= 1e-8 * np.max(np.abs(u1))


def test_monotone_iterates_decrease_from_supersolution(mesh):
    op = bvp.PolarOperator(P, mesh)
    u_in = bvp.dirac_data(P, mesh, 4.0)
    b = op.rhs(u_in)
    from scipy.sparse.linalg import splu
    sup = splu(op.A).solve(b)
    rec = []
    bvp.monotone_solve(op, b, sup, sup, rtol=1e-8, record=rec)
    for a, c in zip(rec, rec[1:]):
        assert np.all(c <= a + 1e-12 * np.abs(sup).max())


def test_weak_limit_ratio_improves_under_refinement():
    spread = []
    for r_in in (1e-3, 5e-4, 2.5e-4):
        sol = bvp.solve_dirac(P, bvp.PolarMesh(r_in), 4.0)
        ratio = sol.report.constants["ray_ratio"]
        spread.append(max(1 - ratio["min"], ratio["max"] - 1))
    assert spread[0] > spread[1] > spread[2]
    assert spread[2] <= 0.02


def test_scaling_probe(mesh):
    rep = bvp.scaling_probe(P, mesh, 2.0, 0.5)
    assert rep["rel_error"] <= 1e-8


def test_report_hash_is_stable(mesh):
    a = bvp.solve_dirac(P, mesh, 1.0).report.to_dict()
    b = bvp.solve_dirac(P, mesh, 1.0).report.to_dict()
    assert a == b
    assert len(a["config_hash"]) == 16


def test_strong_profiles(strong, omega, mesh):
    assert strong.saturated
    mask = bvp.interior_mask(mesh)
    for r in (1e-2, 3e-3):
        assert bvp.profile_distance(strong.profiles[r], omega, mask) <= 0.05
    prof = strong.profiles[1e-2]
    assert np.all(prof[:-1] > 0)
    a = 0.5 * derive_exponents(P).alpha_plus
    assert abs(bvp.boundary_log_slope(mesh, prof) - a) <= 0.05


def test_a_priori_bound(strong, mesh):
    C = bvp.a_priori_constant(P, mesh, strong.u.values)
    assert np.isfinite(C) and C > 0
    C2 = bvp.a_priori_constant(P, mesh, strong.u.values * 0.5)
    assert C2 == pytest.approx(0.5 * C)


def test_dirac_ladder_is_spurious(mesh):
    """Plain Dirac data at every rung overshoots the spherical profile."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", bvp.LadderWarning)
        res = bvp.solve_strong_singularity(P, mesh, inner_data="dirac", max_steps=8)
    om = bvp.omega_on_mesh(P, mesh)
    mask = bvp.interior_mask(mesh)
    assert bvp.profile_distance(res.profiles[1e-2], om, mask) > 0.05


def test_dichotomy_is_exclusive(dirac, strong, omega, mesh):
    weak = bvp.dichotomy(P, mesh, dirac[1.0].u.values, omega)
    assert weak["weak"] and not weak["strong"] and weak["exclusive"]
    assert weak["k_hat"] == pytest.approx(1.0, rel=0.02)
    st = bvp.dichotomy(P, mesh, strong.u.values, omega)
    assert st["strong"] and not st["weak"] and st["exclusive"]


@pytest.fixture(scope="module")
def maximal():
    return bvp.solve_maximal(P)


def test_maximal_trace(maximal):
    assert maximal["ell_kappa"] == pytest.approx(25 / 4)
    assert maximal["rel_error"] <= 0.05


def test_keller_osserman_mesh_stable(maximal):
    C = maximal["keller_osserman_C"]
    assert all(np.isfinite(C))
    assert (max(C) - min(C)) / min(C) <= 0.05


def test_saturation():
    assert bvp.saturation_check(P, 4e-4, 1e10) <= 0.01


def test_cartesian_requires_supersolution():
    with pytest.raises(ValueError):
        bvp.solve_cartesian_large(P, bvp.CartesianMesh(1e-3), 1.0)
