import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hardylab import HardyParams
from hardylab import barriers as br
from hardylab import bvp


def spec316(**kw):
    base = dict(params=HardyParams(3, 3 / 16, 2.0), R=1.0, beta=3.0, gamma=0.5)
    base.update(kw)
    return br.BarrierSpec(**base)


def crit(**kw):
    base = dict(params=HardyParams(4, 0.25, 2.0), R=1.0, beta=3.0)
    base.update(kw)
    return br.BarrierSpec(**base)


def test_direct_evaluation_value():
    s = spec316()
    # |x - z| = 1/2 with d = 1/4
    rho = math.sqrt(0.25 - 0.0625)
    assert br.barrier_eval(s, rho, 0.25) == pytest.approx(32 / 27, rel=1e-14)


def test_vanishes_at_flat_boundary():
    for s in (spec316(), crit()):
        vals = [br.barrier_eval(s, 0.3, d) for d in (1e-2, 1e-4, 1e-8)]
        assert vals[0] > vals[1] > vals[2]
        assert vals[2] < 1e-3


def test_blows_up_at_rim():
    s = spec316()
    vals = [br.barrier_eval(s, math.sqrt((1 - e) ** 2 - 0.01), 0.1) for e in (1e-2, 1e-4, 1e-6)]
    assert vals[0] < vals[1] < vals[2]
    assert vals[2] > 1e15


def test_domain_errors():
    s = spec316()
    with pytest.raises(br.BarrierDomainError):
        br.barrier_eval(s, 1.0, 0.1)
    with pytest.raises(br.BarrierDomainError):
        br.barrier_eval(s, 0.1, 0.0)
    with pytest.raises(br.BarrierDomainError):
        br.barrier_eval(s, 0.1, -0.1)


@pytest.mark.parametrize("kw", [dict(gamma=0.8), dict(gamma=0.2), dict(beta=2.0), dict(gamma=None),
                                dict(R=-1.0), dict(Lambda=-1.0)])
def test_constraint_violations(kw):
    with pytest.raises(br.ConstraintViolation):
        br.barrier_eval(spec316(**kw), 0.1, 0.1)


def test_critical_log_scale_must_cover_ball():
    with pytest.raises(br.ConstraintViolation):
        br.barrier_eval(crit(log_scale=0.5), 0.1, 0.1)
    assert crit().D == pytest.approx(math.e)


def _fd_residual(s, rho, xN, h=1e-4):
    f = lambda a, b: br.barrier_eval(s, a, b)
    N, kap, q = s.params.N, s.params.kappa, s.params.q
    c = f(rho, xN)
    frr = (f(rho + h, xN) - 2 * c + f(rho - h, xN)) / h**2
    fr = (f(rho + h, xN) - f(rho - h, xN)) / (2 * h)
    fzz = (f(rho, xN + h) - 2 * c + f(rho, xN - h)) / h**2
    lap = frr + (N - 2) / rho * fr + fzz
    return -lap - kap / xN**2 * c + c**q


@pytest.mark.parametrize("s", [spec316(Lambda=2.0), crit(Lambda=3.0),
                               br.BarrierSpec(HardyParams(3, 1 / 8, 3.0), 1.0, 2.0, 0.3, 0.7)])
def test_closed_form_matches_finite_differences(s):
    for rho, xN in [(0.2, 0.3), (0.5, 0.1), (0.1, 0.6), (0.4, 0.05)]:
        exact = br.pointwise_residual(s, rho, xN)
        fd = _fd_residual(s, rho, xN)
        assert fd == pytest.approx(float(exact), rel=1e-4, abs=1e-6 * abs(br.barrier_eval(s, rho, xN)))


def test_grid_is_interior():
    rho, xN = br.verification_grid(1.0, 200)
    assert np.all(rho**2 + xN**2 < 1.0) and np.all(xN > 0)
    assert rho.size > 30000


@pytest.mark.parametrize("s", [spec316(), crit()])
def test_closed_form_minimum_matches_bisection(s):
    a = br.grid_lambda_min(s, 60)
    b = br.bisect_lambda(s, 60)
    assert b == pytest.approx(a, rel=1e-8)


def test_threshold_at_unit_radius_is_the_constant():
    s = spec316()
    assert br.lambda_threshold(s) == pytest.approx(br.certified_constant(s), rel=1e-14)
    assert br.threshold_powers(s) == (1.0, 1.0)


def test_power_ratio_half_radius():
    p1, p2 = br.threshold_powers(spec316(R=0.5))
    assert p2 / p1 == pytest.approx(2**1.5, rel=1e-13)


@given(st.floats(1.0, 5.0))
@settings(max_examples=25, deadline=None)
def test_doubling_radius_scales_dominant_term(R):
    s1, s2 = spec316(R=R), spec316(R=2 * R)
    assert max(br.threshold_powers(s2)) / max(br.threshold_powers(s1)) == pytest.approx(2**6, rel=1e-12)


def test_flat_grid_threshold_scales_exactly():
    # with grid points scaled along with R the minimal Lambda is homogeneous
    s1, s2 = spec316(R=1.0), spec316(R=0.5)
    ratio = br.grid_lambda_min(s1, 80) / br.grid_lambda_min(s2, 80)
    expo = 2 * 3.0 - 0.5 - 2 / (2.0 - 1)
    assert ratio == pytest.approx(2**expo, rel=1e-10)


def test_zero_and_tiny_amplitude():
    s = spec316()
    zero = br.supersolution_residual(s.with_lambda(0.0), 50)
    assert zero.min_residual == 0.0
    tiny = br.supersolution_residual(s.with_lambda(1e-6 * br.lambda_threshold(s, 50)), 50)
    assert tiny.min_residual < 0


def test_linear_part_of_test_field_has_fixed_sign():
    # -(gamma(gamma-1)+kappa) > 0 for gamma strictly between the roots
    for kap in (1 / 16, 1 / 8, 3 / 16):
        lo, hi = (1 - math.sqrt(1 - 4 * kap)) / 2, (1 + math.sqrt(1 - 4 * kap)) / 2
        for g in np.linspace(lo, hi, 9)[1:-1]:
            assert g * (g - 1) + kap < 0


CERT_SETS = [spec316(), br.BarrierSpec(HardyParams(3, 1 / 8, 3.0), 1.0, 2.0, 0.3),
             br.BarrierSpec(HardyParams(2, 1 / 16, 2.0), 1.0, 3.0, 0.2), crit(),
             br.BarrierSpec(HardyParams(3, 0.25, 3.0), 1.0, 2.0)]


@pytest.mark.parametrize("s", CERT_SETS)
def test_certified_on_fine_grid(s):
    out = br.certify(s, factor=10.0, n=200)
    assert out["certified"]
    assert out["ladder_monotone"]
    assert out["ladder"][0]["min_residual"] >= 0
    assert out["residual"]["argmin_region"] == "A^c"


def test_safety_factor_is_needed_only_once():
    s = spec316()
    lam = br.bisect_lambda(s, 100)
    below = br.supersolution_residual(s.with_lambda(0.9 * lam), 100)
    assert below.min_residual < 0


@pytest.fixture(scope="module")
def strong_solution():
    p = HardyParams(2, 0.25, 2.0)
    mesh = bvp.PolarMesh(1e-3, 0.9, 41)
    res = bvp.solve_strong_singularity(p, mesh)
    r, th = mesh.grids()
    return p, r * np.sin(th), r * np.cos(th), res.u.values


@pytest.mark.parametrize("z,R", [(0.3, 0.25), (0.12, 0.1)])
def test_dominates_strong_solution(strong_solution, z, R):
    p, x1, xN, u = strong_solution
    s = br.BarrierSpec(p, R=R, beta=3.0, z=z)
    s = s.with_lambda(br.lambda_threshold(s))
    out = br.dominance_check(s, x1, xN, u)
    assert out["n_nodes"] > 20
    assert out["holds"] and out["max_ratio"] < 1.0
