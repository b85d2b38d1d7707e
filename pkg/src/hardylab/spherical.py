"""Spherical problem on the upper hemisphere reduced to the azimuthal angle.

theta is measured from the pole e_N, so that e_N . sigma = cos(theta) and the
hemisphere boundary sits at theta = pi/2.  All profiles are axisymmetric.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import integrate, linalg, special
from scipy.integrate import solve_ivp

from .params import HardyParams, derive_exponents, ell_qN

HALF_PI = 0.5 * math.pi


class Verdict(str, enum.Enum):
    EXISTS = "Exists"
    NONEXISTENT = "Nonexistent"
    INCONCLUSIVE = "Inconclusive"


class ToleranceError(RuntimeError):
    pass


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class AzimuthalGrid:
    theta: np.ndarray
    eps0: float = 1e-6
    eps1: float = 1e-6

    def __post_init__(self):
        th = np.asarray(self.theta, dtype=float)
        if th.ndim != 1 or th.size < 5:
            raise ValueError("azimuthal grid needs at least 5 points")
        if th[0] <= 0.0 or th[-1] >= HALF_PI:
            raise ValueError("grid points must lie strictly inside (0, pi/2)")
        if np.any(np.diff(th) <= 0.0):
            raise ValueError("grid must be strictly increasing")
        object.__setattr__(self, "theta", th)

    @classmethod
    def uniform(cls, n: int, eps0: float = 1e-6, eps1: float = 1e-6) -> "AzimuthalGrid":
        return cls(np.linspace(eps0, HALF_PI - eps1, n), eps0, eps1)

    @property
    def n(self) -> int:
        return self.theta.size

    @property
    def h(self) -> float:
        return float(np.max(np.diff(self.theta)))

    def refined(self) -> "AzimuthalGrid":
        """Nested refinement: every old node survives, one new node per cell."""
        th = self.theta
        mid = 0.5 * (th[:-1] + th[1:])
        new = np.empty(2 * th.size - 1)
        new[0::2] = th
        new[1::2] = mid
        return AzimuthalGrid(new, self.eps0, self.eps1)


@dataclass
class EigenPair:
    theta: np.ndarray
    psi: np.ndarray
    mu: float
    residual: np.ndarray
    residual_norm: float


@dataclass
class SphericalSolution:
    params: HardyParams
    theta: np.ndarray
    omega: Optional[np.ndarray]
    psi: np.ndarray
    shoot_value: float
    residual_norm: float
    verdict: Verdict
    epsilon_sub: float
    method: str
    info: dict = field(default_factory=dict)

    def report(self) -> dict:
        out = {
            "params": self.params.to_dict(),
            "method": self.method,
            "verdict": self.verdict.value,
            "shoot_value": self.shoot_value,
            "residual_norm": self.residual_norm,
            "epsilon_sub": self.epsilon_sub,
            "n": int(self.theta.size),
        }
        out.update(self.info)
        return out


def psi_kappa(p: HardyParams, theta) -> np.ndarray:
    a = 0.5 * derive_exponents(p).alpha_plus
    return np.cos(np.asarray(theta, dtype=float)) ** a


def _sin_weight(theta, N):
    return np.sin(theta) ** (N - 2)


def azimuthal_laplacian(f: np.ndarray, theta: np.ndarray, N: int) -> np.ndarray:
    """Conservative 3-point approximation of sin^(2-N) d/dtheta(sin^(N-2) df/dtheta).

    Returned at interior nodes 1..n-2.
    """
    hm = theta[1:-1] - theta[:-2]
    hp = theta[2:] - theta[1:-1]
    wm = _sin_weight(0.5 * (theta[1:-1] + theta[:-2]), N)
    wp = _sin_weight(0.5 * (theta[2:] + theta[1:-1]), N)
    flux = wp * (f[2:] - f[1:-1]) / hp - wm * (f[1:-1] - f[:-2]) / hm
    return flux / (0.5 * (hp + hm) * _sin_weight(theta[1:-1], N))


def _window_mask(theta, window):
    lo, hi = window
    return (theta >= lo) & (theta <= hi)


DEFAULT_WINDOW = (0.1, HALF_PI - 0.1)


def first_eigen_check(p: HardyParams, g: AzimuthalGrid, window=DEFAULT_WINDOW) -> EigenPair:
    """Residual of -Lap' psi - kappa/cos^2 psi - mu psi for the analytic first pair."""
    ex = derive_exponents(p)
    th = g.theta
    psi = psi_kappa(p, th)
    inner = th[1:-1]
    res = -azimuthal_laplacian(psi, th, p.N) - p.kappa / np.cos(inner) ** 2 * psi[1:-1] - ex.mu_kappa * psi[1:-1]
    mask = _window_mask(inner, window)
    return EigenPair(th, psi, ex.mu_kappa, res, float(np.max(np.abs(res[mask]))))


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere S^n in R^(n+1)."""
    return 2.0 * math.pi ** ((n + 1) / 2.0) / special.gamma((n + 1) / 2.0)


def _first_harmonic_mean(N: int) -> float:
    """Integral of sigma'_1 over S^(N-2); zero by oddness, computed by Gauss-Jacobi."""
    if N == 2:
        return 1.0 + (-1.0)  # S^0 = {+1, -1}
    lam = (N - 4) / 2.0
    t, w = special.roots_jacobi(40, lam, lam)
    scale = sphere_area(N - 3) if N > 3 else 2.0
    return float(scale * np.sum(w * t))


def second_eigen_check(p: HardyParams, g: AzimuthalGrid, window=DEFAULT_WINDOW) -> dict:
    """Check the second pair with psi_j = cos^a(theta) sin(theta) (e_j . sigma').

    The e_j . sigma' factor is a degree-one harmonic on S^(N-2), so the
    tangential part of the Laplace-Beltrami operator contributes (N-2)/sin^2.
    """
    ex = derive_exponents(p)
    a = 0.5 * ex.alpha_plus
    th = g.theta
    f = np.cos(th) ** a * np.sin(th)
    inner = th[1:-1]
    lap = azimuthal_laplacian(f, th, p.N) - (p.N - 2) / np.sin(inner) ** 2 * f[1:-1]
    res = -lap - p.kappa / np.cos(inner) ** 2 * f[1:-1] - ex.mu_kappa_2 * f[1:-1]
    mask = _window_mask(inner, window)
    radial = float(
        integrate.trapezoid(np.cos(th) ** ex.alpha_plus * np.sin(th) ** (p.N - 1), th)
    )
    harmonic = _first_harmonic_mean(p.N)
    return {
        "mu_kappa_2": ex.mu_kappa_2,
        "mu_kappa_2_from_first": ex.mu_kappa + p.N - 1 + ex.alpha_plus,
        "residual": res,
        "residual_norm": float(np.max(np.abs(res[mask]))),
        "orthogonality": harmonic * radial,
        "harmonic_mean": harmonic,
    }


def _lap4(f: np.ndarray, theta: np.ndarray, N: int) -> np.ndarray:
    """Fourth-order 5-point azimuthal Laplacian on a uniform grid, nodes 2..n-3."""
    h = theta[1] - theta[0]
    d1 = (-f[4:] + 8 * f[3:-1] - 8 * f[1:-3] + f[:-4]) / (12 * h)
    d2 = (-f[4:] + 16 * f[3:-1] - 30 * f[2:-2] + 16 * f[1:-3] - f[:-4]) / (12 * h * h)
    th = theta[2:-2]
    return d2 + (N - 2) * np.cos(th) / np.sin(th) * d1


def nonlinear_residual(p: HardyParams, theta: np.ndarray, omega: np.ndarray, window=DEFAULT_WINDOW):
    """FD residual of Lap' w + (ell + kappa/cos^2) w - |w|^(q-1) w.

    Uses a fourth-order stencil on uniform grids and the conservative
    second-order one otherwise.  Returns (residual at stencil centres, max
    over the window divided by max(1, max|w|)).
    """
    q = p.require_q()
    ell = ell_qN(p.N, q)
    h = np.diff(theta)
    if np.allclose(h, h[0], rtol=1e-9, atol=0.0):
        inner = theta[2:-2]
        w = omega[2:-2]
        lap = _lap4(omega, theta, p.N)
    else:
        inner = theta[1:-1]
        w = omega[1:-1]
        lap = azimuthal_laplacian(omega, theta, p.N)
    res = lap + (ell + p.kappa / np.cos(inner) ** 2) * w - np.abs(w) ** (q - 1) * w
    mask = _window_mask(inner, window)
    scale = max(1.0, float(np.max(np.abs(omega))))
    return res, float(np.max(np.abs(res[mask]))) / scale


# ---------------------------------------------------------------------------
# shooting


@dataclass(frozen=True)
class ShootingConfig:
    amp_min: float = 1e-8
    amp_max: float = 1e3
    n_scan: int = 45
    ratio_cap: float = 1e3
    rtol: float = 1e-11
    atol: float = 1e-15
    bisect_rtol: float = 1e-14
    max_refinements: int = 2


def _rhs(p: HardyParams, ell: float):
    N, kappa, q = p.N, p.kappa, p.q

    def f(theta, y):
        w, dw = y
        cot = math.cos(theta) / math.sin(theta)
        c = math.cos(theta)
        d2 = -(N - 2) * cot * dw - (ell + kappa / (c * c)) * w + abs(w) ** (q - 1) * w
        return [dw, d2]

    return f


def _pole_start(p: HardyParams, ell: float, A: float, eps0: float):
    # omega ~ A (1 + c theta^2) with omega'(0) = 0
    c = (abs(A) ** (p.q - 1) - (ell + p.kappa)) / (2.0 * (p.N - 1))
    return [A * (1.0 + c * eps0**2), 2.0 * A * c * eps0]


def _shoot(p: HardyParams, ell: float, a_plus: float, A: float, g: AzimuthalGrid, cfg: ShootingConfig,
           rtol: float, dense: bool = False, terminal: bool = True):
    th0 = g.eps0
    th1 = HALF_PI - g.eps1

    def crossing(theta, y):
        return y[0]

    crossing.terminal = terminal
    crossing.direction = -1

    def blowup(theta, y):
        return cfg.ratio_cap * max(A, 1.0) - y[0] / math.cos(theta) ** a_plus

    blowup.terminal = terminal
    blowup.direction = -1

    sol = solve_ivp(_rhs(p, ell), (th0, th1), _pole_start(p, ell, A, th0), method="DOP853",
                    rtol=rtol, atol=cfg.atol * max(A, 1e-300), events=[crossing, blowup],
                    dense_output=dense)
    if sol.t_events[0].size:
        return -1.0, sol
    if sol.t_events[1].size:
        return 1.0, sol
    w, dw = sol.y[:, -1]
    t = HALF_PI - sol.t[-1]
    # a_plus*w - t*dw/dt annihilates the admissible branch cos^(a_plus)
    indicator = a_plus * w + t * dw
    return (1.0 if indicator > 0 else -1.0), sol


def _scan_bracket(p, ell, a_plus, g, cfg, rtol):
    """First (crossing, diverging) pair on a geometric amplitude scan, or a verdict if none."""
    # profiles scale like (ell + kappa)^(1/(q-1)), which is huge for q close to 1
    try:
        natural = 1e2 * (ell + p.kappa) ** (1.0 / (p.q - 1.0))
    except OverflowError:
        natural = math.inf
    top = max(cfg.amp_max, min(natural, 1e150))
    per_decade = (cfg.n_scan - 1) / math.log10(cfg.amp_max / cfg.amp_min)
    n = max(cfg.n_scan, int(math.ceil(per_decade * math.log10(top / cfg.amp_min))) + 1)
    amps = np.geomspace(cfg.amp_min, top, n)
    prev = None
    signs = []
    for A in amps:
        s = _shoot(p, ell, a_plus, A, g, cfg, rtol)[0]
        if prev is not None and prev < 0 < s:
            return amps[len(signs) - 1], A
        signs.append(s)
        prev = s
    if all(s > 0 for s in signs):
        return Verdict.NONEXISTENT
    return Verdict.INCONCLUSIVE


def existence_verdict(p: HardyParams, g: AzimuthalGrid, cfg: ShootingConfig = ShootingConfig()) -> Verdict:
    """Classify by the amplitude scan alone (no bisection, no analytic shortcut)."""
    ex = derive_exponents(p)
    found = _scan_bracket(p, ell_qN(p.N, p.require_q()), 0.5 * ex.alpha_plus, g, cfg, cfg.rtol)
    return found if isinstance(found, Verdict) else Verdict.EXISTS


def solve_omega_shooting(p: HardyParams, g: AzimuthalGrid, tol: float = 1e-3,
                         cfg: ShootingConfig = ShootingConfig(), force_analytic: bool = True,
                         bracket: Optional[tuple[float, float]] = None,
                         window=DEFAULT_WINDOW) -> SphericalSolution:
    """Shoot from the pole on omega(0) and bisect between zero-crossing and divergence."""
    q = p.require_q()
    ex = derive_exponents(p)
    a_plus = 0.5 * ex.alpha_plus
    ell = ell_qN(p.N, q)
    psi = psi_kappa(p, g.theta)
    nan = float("nan")

    def empty(verdict, **info):
        return SphericalSolution(p, g.theta, None, psi, nan, nan, verdict, nan, "shoot", info)

    if force_analytic and q >= ex.q_c:
        return empty(Verdict.NONEXISTENT, reason="q >= q_c")

    rtol = cfg.rtol
    for attempt in range(cfg.max_refinements + 1):
        if bracket is None:
            found = _scan_bracket(p, ell, a_plus, g, cfg, rtol)
            if isinstance(found, Verdict):
                reason = ("no zero crossing at any amplitude" if found is Verdict.NONEXISTENT
                          else "no bracket in amplitude range")
                return empty(found, reason=reason)
            lo, hi = found
        else:
            lo, hi = bracket
            s_lo = _shoot(p, ell, a_plus, lo, g, cfg, rtol)[0]
            s_hi = _shoot(p, ell, a_plus, hi, g, cfg, rtol)[0]
            if not (s_lo < 0 < s_hi):
                return empty(Verdict.INCONCLUSIVE, reason="supplied bracket does not separate")
        n_bisect = 0
        while hi - lo > cfg.bisect_rtol * hi and n_bisect < 200:
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            s = _shoot(p, ell, a_plus, mid, g, cfg, rtol)[0]
            if s < 0:
                lo = mid
            else:
                hi = mid
            n_bisect += 1
        A = hi
        _, sol = _shoot(p, ell, a_plus, A, g, cfg, rtol, dense=True, terminal=False)
        th = g.theta
        omega = np.empty_like(th)
        reach = th <= sol.t[-1]
        omega[reach] = sol.sol(th[reach])[0]
        if not np.all(reach):
            ratio = sol.y[0, -1] / math.cos(sol.t[-1]) ** a_plus
            omega[~reach] = ratio * psi[~reach]
        _, rnorm = nonlinear_residual(p, th, omega, window)
        if rnorm <= tol:
            break
        rtol *= 1e-1
    else:
        raise ToleranceError(f"residual {rnorm:.3e} exceeds tol {tol:.1e}")

    ratio = omega / psi
    eps_sub = float(np.min(ratio))
    verdict = Verdict.EXISTS if np.all(omega > 0) else Verdict.INCONCLUSIVE
    return SphericalSolution(p, g.theta, omega, psi, float(A), rnorm, verdict, eps_sub, "shoot",
                             {"bracket": [float(lo), float(hi)], "bisections": n_bisect,
                              "ode_rtol": rtol})


# ---------------------------------------------------------------------------
# variational oracle


def _fe_weights(p: HardyParams, theta: np.ndarray):
    psi = psi_kappa(p, theta)
    rho = psi**2 * _sin_weight(theta, p.N)
    h = np.diff(theta)
    stiff = 0.5 * (rho[:-1] + rho[1:]) / h  # trapezoid of rho over each cell / h^2 * h
    mass = np.zeros_like(theta)
    mass[:-1] += 0.5 * h * rho[:-1]
    mass[1:] += 0.5 * h * rho[1:]
    return psi, stiff, mass


@dataclass
class VariationalProblem:
    """Discrete J(w) = sum k_e (dw)^2 + (mu - ell) sum m w^2 + 2/(q+1) sum m psi^(q-1)|w|^(q+1)."""

    p: HardyParams
    theta: np.ndarray

    def __post_init__(self):
        ex = derive_exponents(self.p)
        self.q = self.p.require_q()
        self.shift = ex.mu_kappa - ell_qN(self.p.N, self.q)
        self.psi, self.stiff, self.mass = _fe_weights(self.p, self.theta)
        self.mq = self.mass * self.psi ** (self.q - 1)

    def energy(self, w):
        dw = np.diff(w)
        return float(np.sum(self.stiff * dw**2) + self.shift * np.sum(self.mass * w**2)
                     + 2.0 / (self.q + 1) * np.sum(self.mq * np.abs(w) ** (self.q + 1)))

    def _stiff_apply(self, w):
        flux = self.stiff * np.diff(w)
        out = np.zeros_like(w)
        out[:-1] -= flux
        out[1:] += flux
        return out

    def gradient(self, w):
        return 2.0 * (self._stiff_apply(w) + self.shift * self.mass * w
                      + self.mq * np.abs(w) ** (self.q - 1) * w)

    def hessian_banded(self, w):
        """Upper banded storage (2 x n) of the tridiagonal Hessian."""
        n = w.size
        diag = np.zeros(n)
        diag[:-1] += self.stiff
        diag[1:] += self.stiff
        diag += self.shift * self.mass + self.q * self.mq * np.abs(w) ** (self.q - 1)
        ab = np.zeros((2, n))
        ab[0, 1:] = -self.stiff
        ab[1] = diag
        return 2.0 * ab

    def preconditioner_banded(self):
        n = self.theta.size
        diag = np.zeros(n)
        diag[:-1] += self.stiff
        diag[1:] += self.stiff
        diag += self.mass
        ab = np.zeros((2, n))
        ab[0, 1:] = -self.stiff
        ab[1] = diag
        return 2.0 * ab


def minimize_energy(prob: VariationalProblem, w0: np.ndarray, max_iter: int = 200, gtol: float = 1e-10):
    """Damped Newton with Armijo backtracking; preconditioned gradient when the Hessian is indefinite.

    Returns the minimiser and the energy history of accepted iterates.
    """
    w = np.array(w0, dtype=float)
    J = prob.energy(w)
    history = [J]
    g = prob.gradient(w)
    g0 = max(np.linalg.norm(g), 1e-300)
    if np.linalg.norm(g) < 1e-300:
        # w0 is a critical point (e.g. zero); constants are a negative-curvature direction
        S = np.sum(prob.mass)
        Sq = np.sum(prob.mq)
        if prob.shift >= 0:
            return w, history
        t = (-prob.shift * S / Sq) ** (1.0 / (prob.q - 1))
        w = w + t
        J = prob.energy(w)
        history.append(J)
        g = prob.gradient(w)
        g0 = np.linalg.norm(g)
    for _ in range(max_iter):
        gn = np.linalg.norm(g)
        if gn <= gtol * max(g0, 1.0):
            return w, history
        try:
            step = -linalg.solveh_banded(prob.hessian_banded(w), g)
            if np.dot(step, g) >= 0:
                raise linalg.LinAlgError
        except linalg.LinAlgError:
            step = -linalg.solveh_banded(prob.preconditioner_banded(), g)
        t = 1.0
        slope = np.dot(step, g)
        if -slope <= 1e-14 * max(abs(J), 1e-300):
            # Newton decrement at roundoff level
            return w, history
        while True:
            w_new = w + t * step
            J_new = prob.energy(w_new)
            if J_new <= J + 1e-4 * t * slope or t < 1e-12:
                break
            t *= 0.5
        if J_new > J:
            # no further decrease resolvable in floating point
            return w, history
        if J_new == J and t < 1e-12:
            return w, history
        w, J = w_new, J_new
        history.append(J)
        g = prob.gradient(w)
    raise ConvergenceError("variational solve did not converge")


def solve_omega_variational(p: HardyParams, g: AzimuthalGrid, w0: Optional[np.ndarray] = None,
                            max_iter: int = 200, window=DEFAULT_WINDOW) -> SphericalSolution:
    q = p.require_q()
    ex = derive_exponents(p)
    prob = VariationalProblem(p, g.theta)
    psi = prob.psi
    if q >= ex.q_c:
        nan = float("nan")
        return SphericalSolution(p, g.theta, None, psi, nan, nan, Verdict.NONEXISTENT, nan,
                                 "variational", {"reason": "q >= q_c"})
    if w0 is None:
        w0 = np.zeros_like(g.theta)
    w, history = minimize_energy(prob, w0, max_iter=max_iter)
    omega = psi * w
    _, rnorm = nonlinear_residual(p, g.theta, omega, window)
    verdict = Verdict.EXISTS if np.all(w > 0) else Verdict.INCONCLUSIVE
    return SphericalSolution(p, g.theta, omega, psi, float(omega[0]), rnorm, verdict,
                             float(np.min(w)), "variational",
                             {"energy_history": [float(e) for e in history], "iterations": len(history) - 1})


def subsolution_residual(p: HardyParams, eps: float, theta) -> np.ndarray:
    """Residual of eps*psi in -Lap' w - ell w - kappa/cos^2 w + w^q (closed form); <= 0 means subsolution."""
    ex = derive_exponents(p)
    q = p.require_q()
    psi = psi_kappa(p, theta)
    return eps * psi * (ex.mu_kappa - ell_qN(p.N, q) + (eps * psi) ** (q - 1))


def subsolution_epsilon(p: HardyParams) -> float:
    """Largest eps for which eps*psi is a subsolution, (ell - mu)^(1/(q-1)); 0 if none."""
    ex = derive_exponents(p)
    gap = ell_qN(p.N, p.require_q()) - ex.mu_kappa
    return gap ** (1.0 / (p.q - 1.0)) if gap > 0 else 0.0


def separable_profile(p: HardyParams, sol: SphericalSolution, r):
    """u(r, theta) = r^(-2/(q-1)) omega(theta); r may be an array (rows = radii)."""
    if sol.verdict is not Verdict.EXISTS:
        raise ValueError("separable profile needs an existing spherical solution")
    q = p.require_q()
    r = np.asarray(r, dtype=float)
    return np.multiply.outer(r ** (-2.0 / (q - 1.0)), sol.omega)


def polar_residual(p: HardyParams, sol: SphericalSolution, radii: np.ndarray, window=DEFAULT_WINDOW) -> float:
    """Max FD residual of -Lap u - kappa/x_N^2 u + u^q for the separable field on a (r, theta) tensor grid."""
    q = p.require_q()
    u = separable_profile(p, sol, radii)
    th = sol.theta
    r = np.asarray(radii, dtype=float)
    hr = np.diff(r)
    if not np.allclose(hr, hr[0]):
        raise ValueError("polar_residual expects uniformly spaced radii")
    h = hr[0]
    ui = u[1:-1, 1:-1]
    ri = r[1:-1, None]
    u_rr = (u[2:, 1:-1] - 2 * ui + u[:-2, 1:-1]) / h**2
    u_r = (u[2:, 1:-1] - u[:-2, 1:-1]) / (2 * h)
    ang = np.array([azimuthal_laplacian(row, th, p.N) for row in u[1:-1]])
    lap = u_rr + (p.N - 1) / ri * u_r + ang / ri**2
    xN = ri * np.cos(th[None, 1:-1])
    res = -lap - p.kappa / xN**2 * ui + np.abs(ui) ** q
    mask = _window_mask(th[1:-1], window)
    return float(np.max(np.abs(res[:, mask])))


def threshold_scan(N: int, kappa: float, q_lo: float, q_hi: float, g: AzimuthalGrid,
                   resolution: float = 1e-4, force_analytic: bool = False) -> dict:
    """Bisect in q for the point where the shooting verdict stops being Exists."""
    def exists(q):
        p = HardyParams(N, kappa, q)
        if force_analytic and q >= derive_exponents(p).q_c:
            return False
        return existence_verdict(p, g) is Verdict.EXISTS

    if not exists(q_lo) or exists(q_hi):
        raise ValueError("scan interval does not bracket the existence threshold")
    lo, hi = q_lo, q_hi
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if exists(mid):
            lo = mid
        else:
            hi = mid
    return {"q_flip": 0.5 * (lo + hi), "q_lo": lo, "q_hi": hi,
            "q_c": derive_exponents(HardyParams(N, kappa, q_lo)).q_c}


def uniqueness_probe(p: HardyParams, g: AzimuthalGrid, brackets: Sequence[tuple[float, float]]) -> list[float]:
    return [solve_omega_shooting(p, g, bracket=b).shoot_value for b in brackets]
