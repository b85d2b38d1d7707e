"""Explicit boundary kernel of -Lap - kappa/x_N^2 in the half-space R^N_+.

K(x) = c x_N^a / |x - xi|^(N + alpha_+ - 2), a = alpha_+/2, is homogeneous of
degree 2 - N - a.  In polar form around xi (angle theta from e_N) it reads
c cos^a(theta) r^(-m) with m = N + a - 2, which makes level sets explicit:
{K > s} = {r < (c cos^a(theta) / s)^(1/m)}.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import integrate

from .params import HardyParams, derive_exponents
from .spherical import sphere_area


class SingularPointError(ValueError):
    pass


class QuadratureVarianceError(RuntimeError):
    pass


@dataclass(frozen=True)
class KernelConfig:
    params: HardyParams
    normalization: float = 1.0
    xi: Optional[tuple] = None

    def __post_init__(self):
        if not self.normalization > 0.0:
            raise ValueError("normalization must be positive")
        if self.xi is not None and len(self.xi) != self.params.N:
            raise ValueError("boundary point has wrong dimension")

    @property
    def a(self) -> float:
        return 0.5 * derive_exponents(self.params).alpha_plus

    @property
    def m(self) -> float:
        return self.params.N + self.a - 2.0

    @property
    def origin(self) -> np.ndarray:
        return np.zeros(self.params.N) if self.xi is None else np.asarray(self.xi, float)

    def normalized_at(self, x0) -> "KernelConfig":
        """Same kernel rescaled so that K(x0) = 1."""
        k = poisson_kernel(KernelConfig(self.params, 1.0, self.xi), x0)
        return KernelConfig(self.params, 1.0 / float(k), self.xi)


def poisson_kernel(cfg: KernelConfig, x) -> np.ndarray:
    """K at points x (shape (..., N)); x_N must be positive."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != cfg.params.N:
        raise ValueError("point dimension does not match N")
    y = x - cfg.origin
    r = np.linalg.norm(y, axis=-1)
    if np.any(r == 0.0):
        raise SingularPointError("kernel is singular at the boundary point")
    if np.any(x[..., -1] <= 0.0):
        raise ValueError("points must lie in the open half-space")
    ap = 2.0 * cfg.a
    out = cfg.normalization * x[..., -1] ** cfg.a / r ** (cfg.params.N + ap - 2.0)
    return out if out.ndim else float(out)


def operator_residual(f, points: np.ndarray, h: float, kappa: float) -> np.ndarray:
    """-Lap f - kappa f / x_N^2 at points using the 2N+1 point stencil of spacing h."""
    pts = np.asarray(points, dtype=float)
    N = pts.shape[-1]
    f0 = np.asarray(f(pts), dtype=float)
    lap = np.zeros_like(f0)
    for i in range(N):
        e = np.zeros(N)
        e[i] = h
        lap += f(pts + e) + f(pts - e) - 2.0 * f0
    lap /= h * h
    return -lap - kappa * f0 / pts[..., -1] ** 2


def box_points(lo: Sequence[float], hi: Sequence[float], n: int) -> np.ndarray:
    """n^N tensor points on the closed box [lo, hi]."""
    axes = [np.linspace(a, b, n) for a, b in zip(lo, hi)]
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grid], axis=-1)


def harmonicity_residual(cfg: KernelConfig, points: np.ndarray, h: float) -> float:
    """Max |L_kappa K| over the given points with stencil spacing h; O(h^2)."""
    pts = np.asarray(points, dtype=float)
    if np.any(pts[:, -1] - h <= 0.0):
        raise ValueError("stencil leaves the half-space")
    if np.any(np.linalg.norm(pts - cfg.origin, axis=-1) <= h):
        raise ValueError("stencil touches the singular point")
    res = operator_residual(lambda y: poisson_kernel(cfg, y), pts, h, cfg.params.kappa)
    return float(np.max(np.abs(res)))


def residual_ladder(cfg: KernelConfig, points: np.ndarray, h0: float, levels: int = 4) -> dict:
    hs = [h0 / 2**k for k in range(levels)]
    res = [harmonicity_residual(cfg, points, h) for h in hs]
    orders = [math.log2(res[k] / res[k + 1]) for k in range(levels - 1)]
    return {"h": hs, "residual": res, "order": orders}


def homogeneity_degree(cfg: KernelConfig, x: np.ndarray, lambdas: Optional[np.ndarray] = None) -> dict:
    """Regress log K(lambda x) on log lambda over the given rays."""
    if lambdas is None:
        lambdas = np.geomspace(0.1, 10.0, 21)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    ll = np.log(lambdas)
    slopes = []
    r2 = []
    for pt in x:
        vals = np.log([poisson_kernel(cfg, lam * pt) for lam in lambdas])
        coef = np.polyfit(ll, vals, 1)
        fit = np.polyval(coef, ll)
        ss_res = np.sum((vals - fit) ** 2)
        ss_tot = np.sum((vals - vals.mean()) ** 2)
        slopes.append(coef[0])
        r2.append(1.0 - ss_res / ss_tot)
    return {"degree": float(np.mean(slopes)), "degree_spread": float(np.ptp(slopes)),
            "r2_min": float(np.min(r2)), "expected": 2.0 - cfg.params.N - cfg.a}


# ---------------------------------------------------------------------------
# level sets


def level_radius(cfg: KernelConfig, theta, s: float):
    return (cfg.normalization * np.cos(theta) ** cfg.a / s) ** (1.0 / cfg.m)


def _angular_measure(N: int) -> float:
    return sphere_area(N - 2) if N > 2 else 2.0


def level_mass_quadrature(cfg: KernelConfig, s: float, R: float = 1.0) -> float:
    """int over {K > s} within the half-ball B_R^+ of x_N^a dx, by 1-D quadrature in theta."""
    N, a = cfg.params.N, cfg.a

    def integrand(th):
        rm = min(level_radius(cfg, th, s), R)
        return np.cos(th) ** a * np.sin(th) ** (N - 2) * rm ** (N + a) / (N + a)

    val, _ = integrate.quad(integrand, 0.0, 0.5 * math.pi, limit=200, epsabs=0.0, epsrel=1e-12)
    if N == 2:
        # theta runs over (-pi/2, pi/2); the integrand is even
        return 2.0 * val
    return _angular_measure(N) * val


def level_mass_grid(cfg: KernelConfig, s: float, n: int = 200, R: float = 1.0) -> float:
    """Midpoint-rule count of {K > s} weighted by x_N^a on a box enclosing the level set."""
    N = cfg.params.N
    r0 = min(float(level_radius(cfg, 0.0, s)), R)
    lo = [-r0] * (N - 1) + [0.0]
    hi = [r0] * N
    axes = []
    for k in range(N):
        m = n if k < N - 1 else n // 2
        edges = np.linspace(lo[k], hi[k], m + 1)
        axes.append(0.5 * (edges[:-1] + edges[1:]))
    cell = np.prod([(hi[k] - lo[k]) / axes[k].size for k in range(N)])
    total = 0.0
    # slab by slab over the first axis to bound memory
    rest = np.meshgrid(*axes[1:], indexing="ij")
    rest = np.stack([g.ravel() for g in rest], axis=-1)
    for x0 in axes[0]:
        pts = np.column_stack([np.full(rest.shape[0], x0), rest])
        inside = np.linalg.norm(pts, axis=1) < R
        k = poisson_kernel(cfg, pts)
        total += np.sum(pts[:, -1] ** cfg.a * ((k > s) & inside))
    return float(total * cell)


@dataclass
class MonteCarloResult:
    estimates: np.ndarray
    std_errors: np.ndarray
    n_samples: int
    seed: int

    @property
    def rel_ci(self) -> np.ndarray:
        return 1.96 * self.std_errors / self.estimates


def _hemisphere_directions(rng: np.random.Generator, n: int, N: int) -> np.ndarray:
    g = rng.standard_normal((n, N))
    g /= np.linalg.norm(g, axis=1)[:, None]
    g[:, -1] = np.abs(g[:, -1])
    return g


def _shell_volume(N: int, r0: float, r1: float) -> float:
    # half of the full-ball shell volume
    return 0.5 * math.pi ** (N / 2) / math.gamma(N / 2 + 1) * (r1**N - r0**N)


def _stratum(cfg, s_values, r0, r1, n, seed_seq):
    rng = np.random.default_rng(seed_seq)
    N = cfg.params.N
    u = rng.random(n)
    r = (r0**N + u * (r1**N - r0**N)) ** (1.0 / N)
    x = r[:, None] * _hemisphere_directions(rng, n, N)
    x[:, -1] = np.maximum(x[:, -1], 1e-300)
    k = poisson_kernel(cfg, x)
    w = x[:, -1] ** cfg.a
    vol = _shell_volume(N, r0, r1)
    means = []
    variances = []
    for s in s_values:
        y = w * (k > s)
        means.append(vol * y.mean())
        variances.append(vol**2 * y.var(ddof=1) / n)
    return np.array(means), np.array(variances)


def level_mass_montecarlo(cfg: KernelConfig, s_values: Sequence[float], n_samples: int = 1_000_000,
                          seed: int = 0, R: float = 1.0, n_strata: int = 16, jobs: int = 1) -> MonteCarloResult:
    """Radially stratified Monte Carlo over the half-ball with geometric shells.

    Each stratum draws from its own spawned seed sequence and results are
    summed in fixed stratum order, so the output does not depend on `jobs`.
    """
    s_values = np.asarray(s_values, dtype=float)
    r_in = level_radius(cfg, 0.0, float(s_values.max())) / 2.0 ** 2
    edges = np.geomspace(r_in, R, n_strata)
    edges = np.concatenate([[0.0], edges])
    children = np.random.SeedSequence(seed).spawn(n_strata)
    per = n_samples // n_strata
    tasks = [(edges[j], edges[j + 1], per, children[j]) for j in range(n_strata)]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(lambda t: _stratum(cfg, s_values, *t), tasks))
    else:
        parts = [_stratum(cfg, s_values, *t) for t in tasks]
    est = np.zeros_like(s_values)
    var = np.zeros_like(s_values)
    for m, v in parts:
        est += m
        var += v
    return MonteCarloResult(est, np.sqrt(var), per * n_strata, seed)


def marcinkiewicz_decay(cfg: KernelConfig, s_values: Sequence[float], method: str = "quadrature",
                        n_samples: int = 1_000_000, seed: int = 0, jobs: int = 1, ci_max: float = 0.05) -> dict:
    """Fit log F_s against log s; F_s is the x_N^a-mass of {K > s} in the unit half-ball."""
    s_values = np.asarray(s_values, dtype=float)
    if s_values.max() / s_values.min() < 100.0 - 1e-9:
        raise ValueError("s range must span at least two decades")
    report = {"method": method, "s": s_values.tolist()}
    if method == "quadrature":
        F = np.array([level_mass_quadrature(cfg, s) for s in s_values])
    elif method == "montecarlo":
        mc = level_mass_montecarlo(cfg, s_values, n_samples, seed, jobs=jobs)
        F = mc.estimates
        report.update(seed=seed, n_samples=mc.n_samples, rel_ci=mc.rel_ci.tolist())
        if np.any(mc.rel_ci > ci_max):
            raise QuadratureVarianceError(f"Monte Carlo CI {mc.rel_ci.max():.3g} exceeds {ci_max}")
    else:
        raise ValueError(f"unknown method {method!r}")
    slope = float(np.polyfit(np.log(s_values), np.log(F), 1)[0])
    expected = -(cfg.params.N + cfg.a) / cfg.m
    report.update(F=F.tolist(), slope=slope, expected_slope=expected,
                  rel_error=abs(slope - expected) / abs(expected))
    return report


# ---------------------------------------------------------------------------
# integrability of K^q against x_N^a


def shell_integral(cfg: KernelConfig, q: float, r0: float, r1: float) -> float:
    """int over r0 < |x| < r1 in R^N_+ of K^q x_N^a dx (separable: radial times angular quadrature)."""
    N, a, m = cfg.params.N, cfg.a, cfg.m
    c = cfg.normalization
    e = N - 1 + a - q * m
    radial = math.log(r1 / r0) if abs(e + 1.0) < 1e-14 else (r1 ** (e + 1) - r0 ** (e + 1)) / (e + 1)
    ang, _ = integrate.quad(lambda th: np.cos(th) ** ((q + 1) * a) * np.sin(th) ** (N - 2),
                            0.0, 0.5 * math.pi, epsabs=0.0, epsrel=1e-12)
    ang *= 2.0 if N == 2 else _angular_measure(N)
    return c**q * radial * ang


@dataclass
class IntegrabilityReport:
    q: float
    verdict: str
    exponent_fit: float
    exponent_expected: float
    partial_integrals: list = field(default_factory=list)

    def to_dict(self):
        return {"q": self.q, "verdict": self.verdict, "exponent_fit": self.exponent_fit,
                "exponent_expected": self.exponent_expected, "partial_integrals": self.partial_integrals}


def kernel_Lq_integrability(cfg: KernelConfig, q: float, levels: int = 20, margin: float = 0.02) -> IntegrabilityReport:
    """Classify int_{B_1^+ \\ B_eps} K^q x_N^a as eps = 2^-j -> 0.

    The dyadic shell contributions are fitted to 2^(-j p); p > 0 means a
    convergent (Cauchy) sequence of truncated integrals, p < 0 growth.  The
    verdict is Inconclusive when |p| < margin * m, i.e. |q - q_c| < margin.
    """
    if q <= 1.0:
        raise ValueError("q must exceed 1")
    shells = np.array([shell_integral(cfg, q, 2.0 ** -(j + 1), 2.0**-j) for j in range(levels)])
    partial = np.cumsum(shells)
    j = np.arange(levels)
    p_fit = float(-np.polyfit(j * math.log(2.0), np.log(shells), 1)[0])
    p_expected = cfg.params.N + cfg.a - q * cfg.m
    if abs(p_fit) < margin * cfg.m:
        verdict = "Inconclusive"
    elif p_fit > 0:
        verdict = "Finite"
    else:
        verdict = "Divergent"
    return IntegrabilityReport(q, verdict, p_fit, p_expected, partial.tolist())


def integrability_flip(cfg: KernelConfig, q_lo: float, q_hi: float, resolution: float = 1e-3) -> dict:
    """Bisect for the largest q with verdict Finite and the smallest with verdict Divergent."""
    def verdict(q):
        return kernel_Lq_integrability(cfg, q).verdict

    def edge(lo, hi, good):
        while hi - lo > resolution:
            mid = 0.5 * (lo + hi)
            if verdict(mid) == good:
                lo = mid
            else:
                hi = mid
        return lo, hi

    q_c = derive_exponents(cfg.params).q_c
    fin = edge(q_lo, q_c, "Finite")[0]
    hi, lo = q_hi, q_c
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if verdict(mid) == "Divergent":
            hi = mid
        else:
            lo = mid
    return {"last_finite": fin, "first_divergent": hi, "q_c": q_c}
