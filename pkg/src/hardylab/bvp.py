"""Semilinear problem -Lap u - kappa u/d^2 + |u|^(q-1) u = 0 on the half-ball B_R^+.

Polar solver
------------
Coordinates are s = ln r and the polar angle theta measured from e_N, kept on
[0, pi/2] by reflection symmetry; theta = pi/2 is the flat boundary.  With
d = min(x_N, R - r) and the substitution u = h v, h = cos^a(theta) (R - r)^a,
the equation becomes the symmetric, degenerate problem

    -div(h^2 grad v) + Q v + h^(q+1) |v|^(q-1) v = 0,
    Q = h^2 [kappa / max(x_N, R - r)^2 + a (N - 1) / (r (R - r)) + mu / r^2] >= 0,

in which both the flat part and the outer arc carry natural boundary
conditions (the weight h^2 vanishes there).  The only essential condition is
on the inner arc r = r_in, where boundary data (for instance k K) is imposed.
The discrete operator is a 5-point flux scheme in (s, theta), hence an
M-matrix, so sub/supersolution ordering carries over to the grid.

Cartesian solver
----------------
The maximal solution is approximated on {d > delta} with large data M on the
level set d = delta.  Here u blows up rather than vanishes, so a plain
5-point scheme on a tensor mesh conforming to x_N = delta is used.
"""

from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate, sparse
from scipy.sparse.linalg import splu

from .admissibility import dirac_admissible
from .params import HardyParams, derive_exponents, ell_kappa
from .spherical import AzimuthalGrid, solve_omega_shooting, Verdict


class NotAdmissibleError(ValueError):
    pass


class BracketError(RuntimeError):
    pass


class MeshMismatchError(ValueError):
    pass


class LadderWarning(UserWarning):
    pass


class ExtrapolationWarning(UserWarning):
    pass


def config_hash(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True, default=float).encode()).hexdigest()[:16]


@dataclass
class SolveReport:
    params: dict
    mesh: dict
    method: str
    iterations: int
    residual_history: list
    constants: dict = field(default_factory=dict)
    seed: Optional[int] = None
    config_hash: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# polar mesh and operator


def _sin_power_integrals(edges: np.ndarray, power: int) -> np.ndarray:
    if power == 0:
        return np.diff(edges)
    return np.array([integrate.quad(lambda t: math.sin(t) ** power, lo, hi)[0]
                     for lo, hi in zip(edges[:-1], edges[1:])])


@dataclass(frozen=True)
class PolarMesh:
    r_in: float
    rho: float = 0.9
    n_theta: int = 41
    R: float = 1.0
    N: int = 2

    def __post_init__(self):
        if not 0.5 < self.rho < 0.95:
            raise ValueError("radial ratio must lie in (0.5, 0.95)")
        if self.r_in < 1e-4 * self.R * (1 - 1e-12) or self.r_in >= self.R:
            raise ValueError("r_in must lie in [1e-4 R, R)")
        if self.n_theta < 5:
            raise ValueError("need at least 5 angles")

    @property
    def s(self) -> np.ndarray:
        L = math.log(self.R / self.r_in)
        n = max(2, int(math.ceil(L / -math.log(self.rho))))
        return np.linspace(math.log(self.r_in), math.log(self.R), n + 1)

    @property
    def radii(self) -> np.ndarray:
        r = np.exp(self.s)
        r[-1] = self.R
        return r

    @property
    def theta(self) -> np.ndarray:
        return np.linspace(0.0, 0.5 * math.pi, self.n_theta)

    @property
    def shape(self) -> tuple:
        return (self.s.size, self.n_theta)

    def grids(self):
        r, th = np.meshgrid(self.radii, self.theta, indexing="ij")
        return r, th

    @property
    def d(self) -> np.ndarray:
        r, th = self.grids()
        return np.minimum(r * np.cos(th), self.R - r)

    def dilated(self, factor: float) -> "PolarMesh":
        return PolarMesh(self.r_in * factor, self.rho, self.n_theta, self.R * factor, self.N)

    def describe(self) -> dict:
        return {"type": "polar", "r_in": self.r_in, "rho": self.rho, "n_theta": self.n_theta,
                "R": self.R, "N": self.N, "n_r": int(self.s.size)}


@dataclass
class Field2D:
    mesh: object
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.mesh.shape:
            raise ValueError("field shape does not match mesh")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field has non-finite values")


class PolarOperator:
    """Discrete weighted operator on a PolarMesh for given (kappa, q)."""

    def __init__(self, p: HardyParams, mesh: PolarMesh):
        if p.N != mesh.N:
            raise ValueError("mesh dimension differs from parameters")
        self.p = p
        self.mesh = mesh
        ex = derive_exponents(p)
        self.a = a = 0.5 * ex.alpha_plus
        self.q = p.q
        N, R = p.N, mesh.R
        s, th = mesh.s, mesh.theta
        ds = s[1] - s[0]
        dth = th[1] - th[0]
        nr, nt = s.size, th.size
        r = np.exp(s)
        r[-1] = R

        def hfun(rr, tt):
            return np.cos(tt) ** a * np.maximum(R - rr, 0.0) ** a

        # angular dual-cell measures of sin^(N-2)
        th_edges = np.concatenate([[0.0], 0.5 * (th[:-1] + th[1:]), [th[-1]]])
        sw = _sin_power_integrals(th_edges, N - 2)
        # radial dual-cell lengths (half cells at both ends)
        sl = np.full(nr, ds)
        sl[0] = sl[-1] = 0.5 * ds

        self.h = hfun(r[:, None], th[None, :])
        R2, T2 = np.meshgrid(r, th, indexing="ij")
        xN = R2 * np.cos(T2)
        big = np.maximum(xN, R - R2)
        with np.errstate(divide="ignore", invalid="ignore"):
            bracket = (p.kappa / big**2 + a * (N - 1) / (R2 * (R - R2)) + ex.mu_kappa / R2**2)
            Q = np.where(self.h > 0, self.h**2 * bracket, 0.0)
        Q[-1, :] = 0.0
        self.Q = Q
        self.w = (r**N)[:, None] * sl[:, None] * sw[None, :]
        self.wh = self.w * self.h ** (self.q + 1) if self.q is not None else None

        # radial faces (between i and i+1)
        rf = np.exp(0.5 * (s[:-1] + s[1:]))
        cr = (rf ** (N - 2))[:, None] * hfun(rf[:, None], th[None, :]) ** 2 * sw[None, :] / ds
        # angular faces (between j and j+1)
        tf = 0.5 * (th[:-1] + th[1:])
        stf = np.sin(tf) ** (N - 2)
        ct = (r ** (N - 2) * sl)[:, None] * stf[None, :] * hfun(r[:, None], tf[None, :]) ** 2 / dth
        self.cr, self.ct = cr, ct

        idx = np.arange(nr * nt).reshape(nr, nt)
        rows, cols, vals = [], [], []
        diag = self.w * Q

        for arrs in ((idx[:-1, :], idx[1:, :], cr), (idx[:, :-1], idx[:, 1:], ct)):
            i0, i1, c = (a_.ravel() for a_ in arrs)
            rows.extend([i0, i1, i0, i1])
            cols.extend([i1, i0, i0, i1])
            vals.extend([-c, -c, c, c])
        rows = np.concatenate([np.atleast_1d(x) for x in rows] + [idx.ravel()])
        cols = np.concatenate([np.atleast_1d(x) for x in cols] + [idx.ravel()])
        vals = np.concatenate([np.atleast_1d(x) for x in vals] + [diag.ravel()])
        full = sparse.csr_matrix((vals, (rows, cols)), shape=(nr * nt, nr * nt))
        inner = idx[1:, :].ravel()
        bnd = idx[0, :].ravel()
        self.A = full[inner][:, inner].tocsc()
        self.B = full[inner][:, bnd].tocsc()
        self.nr, self.nt = nr, nt

    # u = h v ; data are given for u on the inner arc
    def data_to_v(self, u_in: np.ndarray) -> np.ndarray:
        h0 = self.h[0]
        return np.where(h0 > 0, u_in / np.where(h0 > 0, h0, 1.0), 0.0)

    def rhs(self, u_in: np.ndarray) -> np.ndarray:
        return -(self.B @ self.data_to_v(u_in))

    def residual(self, v: np.ndarray, b: np.ndarray) -> np.ndarray:
        wh = self.wh[1:].ravel()
        return self.A @ v - b + wh * np.abs(v) ** (self.q - 1) * v

    def assemble_u(self, v_inner: np.ndarray, u_in: np.ndarray) -> np.ndarray:
        v = np.vstack([self.data_to_v(u_in)[None, :], v_inner.reshape(self.nr - 1, self.nt)])
        u = self.h * v
        u[0] = u_in
        return u

    def v_of(self, u: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            v = np.where(self.h > 0, u / np.where(self.h > 0, self.h, 1.0), 0.0)
        return v[1:].ravel()


def newton_solve(op: PolarOperator, b: np.ndarray, v0: np.ndarray, rtol: float = 1e-10,
                 max_iter: int = 200) -> tuple[np.ndarray, list]:
    """Newton on the convex M-function F(v) = A v - b + w h^(q+1) g(v).

    From a supersolution the undamped iterates decrease monotonically; a
    residual-based backtracking guards against overflow.
    """
    wh = op.wh[1:].ravel()
    q = op.q
    v = v0.copy()
    F = op.residual(v, b)
    scale = max(np.linalg.norm(b), np.linalg.norm(op.A @ v), 1e-300)
    hist = [float(np.linalg.norm(F) / scale)]
    for _ in range(max_iter):
        if hist[-1] <= rtol:
            return v, hist
        J = op.A + sparse.diags(q * wh * np.abs(v) ** (q - 1))
        step = splu(J.tocsc()).solve(-F)
        t = 1.0
        while True:
            vn = v + t * step
            Fn = op.residual(vn, b)
            rn = float(np.linalg.norm(Fn) / scale)
            if np.isfinite(rn) and (rn < hist[-1] or t < 1e-6):
                break
            t *= 0.5
        v, F = vn, Fn
        hist.append(rn)
        if t < 1e-6 and rn >= hist[-2]:
            break
    raise RuntimeError("Newton did not converge")


def monotone_solve(op: PolarOperator, b: np.ndarray, v_start: np.ndarray, v_upper: np.ndarray,
                   rtol: float = 1e-10, max_iter: int = 5000, record: Optional[list] = None):
    """Shifted fixed-point iteration (A + S) v' = b + S v - w h^(q+1) g(v).

    S is the nodewise Lipschitz bound of the nonlinearity on [.., v_upper], so
    the map is order preserving: from a supersolution the iterates decrease,
    from a subsolution they increase.
    """
    wh = op.wh[1:].ravel()
    q = op.q
    S = q * wh * np.abs(v_upper) ** (q - 1)
    lu = splu((op.A + sparse.diags(S)).tocsc())
    v = v_start.copy()
    scale = max(np.linalg.norm(b), 1e-300)
    hist = []
    for it in range(max_iter):
        if record is not None:
            record.append(v.copy())
        F = op.residual(v, b)
        hist.append(float(np.linalg.norm(F) / scale))
        if hist[-1] <= rtol:
            return v, hist
        v = lu.solve(b + S * v - wh * np.abs(v) ** (q - 1) * v)
    return v, hist


def dirac_data(p: HardyParams, mesh: PolarMesh, k: float) -> np.ndarray:
    """k K on the inner arc (half-space kernel with unit normalisation)."""
    a = 0.5 * derive_exponents(p).alpha_plus
    m = p.N + a - 2.0
    return k * mesh.r_in ** (-m) * np.cos(mesh.theta) ** a


def kernel_field(p: HardyParams, mesh: PolarMesh) -> np.ndarray:
    a = 0.5 * derive_exponents(p).alpha_plus
    m = p.N + a - 2.0
    r, th = mesh.grids()
    return r ** (-m) * np.cos(th) ** a


@dataclass
class DiracSolution:
    u: Field2D
    report: SolveReport
    sub: Optional[np.ndarray] = None
    sup: Optional[np.ndarray] = None


def solve_boundary_data(p: HardyParams, mesh: PolarMesh, u_in: np.ndarray, method: str = "damped-newton",
                        rtol: float = 1e-10, v_guess: Optional[np.ndarray] = None, op: Optional[PolarOperator] = None):
    """Solve with data u_in on the inner arc and natural conditions elsewhere.

    Returns (u array, report-like dict, v, sub, sup) with v the inner unknowns.
    """
    op = op or PolarOperator(p, mesh)
    b = op.rhs(u_in)
    lin = splu(op.A)
    sup = lin.solve(b)
    wh = op.wh[1:].ravel()
    sub = sup - lin.solve(wh * np.abs(sup) ** (op.q - 1) * sup)
    if np.any(sub > sup + 1e-12 * np.abs(sup).max()):
        raise BracketError("discrete sub/supersolution are not ordered")
    info = {"method": method}
    if method == "damped-newton":
        start = sup if v_guess is None else np.minimum(np.maximum(v_guess, sub), sup)
        try:
            v, hist = newton_solve(op, b, start, rtol)
        except RuntimeError:
            info["fallback"] = "monotone-truncation"
            v, hist = monotone_solve(op, b, sup, sup, rtol)
    elif method == "monotone-truncation":
        v, hist = monotone_solve(op, b, sup, sup, rtol)
    else:
        raise ValueError(f"unknown method {method!r}")
    info["history"] = hist
    return op.assemble_u(v, u_in), info, v, sub, sup


def solve_dirac(p: HardyParams, mesh: PolarMesh, k: float, method: str = "damped-newton",
                rtol: float = 1e-10) -> DiracSolution:
    """u_{k delta_0} via inner-arc truncation: u = k K on r = r_in."""
    q = p.require_q()
    if not dirac_admissible(p):
        raise NotAdmissibleError("Dirac boundary data are not admissible for q >= q_c")
    if k < 0:
        raise ValueError("k must be nonnegative")
    u_in = dirac_data(p, mesh, k)
    u, info, v, sub, sup = solve_boundary_data(p, mesh, u_in, method, rtol)
    ratio = ray_ratio(p, mesh, u, k) if k > 0 else None
    rep = SolveReport(p.to_dict(), mesh.describe(), info.get("fallback", method), len(info["history"]) - 1,
                      info["history"], {"k": k, "ray_ratio": ratio},
                      config_hash=config_hash({"p": p.to_dict(), "mesh": mesh.describe(), "k": k, "method": method}))
    return DiracSolution(Field2D(mesh, u), rep, sub, sup)


def ray_ratio(p: HardyParams, mesh: PolarMesh, u: np.ndarray, k: float, window=(3.0, 10.0)) -> dict:
    """u / (k K) along theta = 0 for r in window * r_in."""
    r = mesh.radii
    sel = (r >= window[0] * mesh.r_in * (1 - 1e-12)) & (r <= window[1] * mesh.r_in * (1 + 1e-12))
    K = kernel_field(p, mesh)[:, 0]
    ratios = u[sel, 0] / (k * K[sel])
    return {"r": r[sel].tolist(), "ratio": ratios.tolist(), "min": float(ratios.min()), "max": float(ratios.max())}


def comparison_check(u1: Field2D, u2: Field2D, tol: float = 1e-9) -> bool:
    """True iff u1 <= u2 + tol * max|u2| nodewise (same mesh required)."""
    if u1.mesh != u2.mesh:
        raise MeshMismatchError("fields live on different meshes")
    return bool(np.all(u1.values <= u2.values + tol * np.max(np.abs(u2.values))))


# ---------------------------------------------------------------------------
# strong singularity


def scaled_profile(p: HardyParams, mesh: PolarMesh, u: np.ndarray, r_target: float) -> np.ndarray:
    """r^(2/(q-1)) u(r, theta) at r_target, linear in s between mesh radii."""
    b = 2.0 / (p.require_q() - 1.0)
    s = mesh.s
    st = math.log(r_target)
    if not s[0] <= st <= s[-1]:
        raise ValueError("target radius outside the mesh")
    i = min(int(np.searchsorted(s, st, side="right")) - 1, s.size - 2)
    t = (st - s[i]) / (s[i + 1] - s[i])
    P = np.exp(b * s)[:, None] * u
    return (1 - t) * P[i] + t * P[i + 1]


def omega_on_mesh(p: HardyParams, mesh: PolarMesh, n: int = 1024) -> np.ndarray:
    sol = solve_omega_shooting(p, AzimuthalGrid.uniform(n))
    if sol.verdict is not Verdict.EXISTS:
        raise ValueError("no positive spherical solution for these parameters")
    th = np.concatenate([[0.0], sol.theta, [0.5 * math.pi]])
    om = np.concatenate([[sol.omega[0]], sol.omega, [0.0]])
    return np.interp(mesh.theta, th, om)


def interior_mask(mesh: PolarMesh, margin: float = 0.05 * math.pi) -> np.ndarray:
    return mesh.theta <= 0.5 * math.pi - margin


def boundary_log_slope(mesh: PolarMesh, profile: np.ndarray, n_fit: int = 4) -> float:
    """Slope of log(profile) against log(cos theta) at the last interior angles."""
    th = mesh.theta[-1 - n_fit:-1]
    P = profile[-1 - n_fit:-1]
    return float(np.polyfit(np.log(np.cos(th)), np.log(P), 1)[0])


@dataclass
class StrongResult:
    u: Field2D
    report: SolveReport
    profiles: dict
    ladder: list
    saturated: bool


def _relative_increment(u, prev, sel):
    pos = sel[:, None] & (np.abs(u) > 0)
    return float(np.max(np.abs(u[pos] - prev[pos]) / np.abs(u[pos])))


def solve_strong_singularity(p: HardyParams, mesh: PolarMesh, k0: float = 1.0, max_steps: int = 60,
                             radii: Sequence[float] = (1e-2, 3e-3, 1e-3), tol: float = 1e-6,
                             probe_min: float = 3.0, inner_data: str = "self-similar") -> StrongResult:
    """Follow u_{k delta_0} up the ladder k_j = 4^j k0 until successive solutions agree to tol.

    inner_data="dirac" imposes k K on r = r_in at every rung.  That is only a
    faithful proxy while k K(r_in) is small compared with r_in^(-2/(q-1)); for
    larger k it drives a spurious large solution from the inner arc.

    inner_data="self-similar" (default) imposes k0 K at the first rung only.
    Afterwards the data come from the previous rung through the half-space
    scaling law u_{4k}(x) = lam^b u_k(lam x) with lam = 4^(1/(b-m)), evaluated
    at lam r_in inside the mesh.  The data then track u_{k delta_0} itself
    along the whole ladder.
    """
    q = p.require_q()
    if not dirac_admissible(p):
        raise NotAdmissibleError("Dirac boundary data are not admissible for q >= q_c")
    if inner_data not in ("self-similar", "dirac"):
        raise ValueError(f"unknown inner_data {inner_data!r}")
    a = 0.5 * derive_exponents(p).alpha_plus
    b = 2.0 / (q - 1.0)
    m = p.N + a - 2.0
    lam = 4.0 ** (1.0 / (b - m))
    if lam * mesh.r_in >= mesh.R:
        raise ValueError("mesh too short for the self-similar ladder")
    op = PolarOperator(p, mesh)
    sel = mesh.radii >= probe_min * mesh.r_in
    prev = None
    v_prev = None
    ladder = []
    saturated = False
    hist = []
    k = k0
    for step in range(max_steps):
        if prev is None or inner_data == "dirac":
            u_in = dirac_data(p, mesh, k)
        else:
            u_in = scaled_profile(p, mesh, prev, lam * mesh.r_in) * mesh.r_in ** (-b)
        u, info, v, _, _ = solve_boundary_data(p, mesh, u_in, rtol=1e-10, v_guess=v_prev, op=op)
        hist = info["history"]
        inc = None if prev is None else _relative_increment(u, prev, sel)
        ladder.append({"k": float(k), "increment": inc})
        prev, v_prev = u, v
        if inc is not None and inc < tol:
            saturated = True
            break
        k *= 4.0
    if not saturated:
        warnings.warn("k-ladder did not saturate", LadderWarning)
    u = prev
    profiles = {}
    for r in radii:
        if mesh.r_in <= r <= mesh.R:
            profiles[float(r)] = scaled_profile(p, mesh, u, r)
    rep = SolveReport(p.to_dict(), mesh.describe(), "damped-newton", len(hist) - 1, hist,
                      {"k_max": ladder[-1]["k"], "saturated": saturated, "inner_data": inner_data,
                       "steps": len(ladder)},
                      config_hash=config_hash({"p": p.to_dict(), "mesh": mesh.describe(), "k0": k0,
                                               "inner_data": inner_data, "tol": tol}))
    return StrongResult(Field2D(mesh, u), rep, profiles, ladder, saturated)


def profile_distance(profile: np.ndarray, omega: np.ndarray, mask: np.ndarray) -> float:
    """Relative max-norm distance on the masked angles."""
    return float(np.max(np.abs(profile[mask] - omega[mask])) / np.max(np.abs(omega[mask])))


def a_priori_constant(p: HardyParams, mesh: PolarMesh, u: np.ndarray) -> float:
    """max of u / (d^a |x|^(-2/(q-1) - a)) over interior nodes with d > 0."""
    a = 0.5 * derive_exponents(p).alpha_plus
    b = 2.0 / (p.require_q() - 1.0)
    r, _ = mesh.grids()
    d = mesh.d
    ok = d > 0
    ok[0] = False
    return float(np.max(u[ok] / (d[ok] ** a * r[ok] ** (-b - a))))


def dichotomy(p: HardyParams, mesh: PolarMesh, u: np.ndarray, omega: np.ndarray,
              window=(3.0, 10.0), tol: float = 0.05) -> dict:
    """Weak pipeline: u/K on the axis has a finite stable limit.  Strong: r^b u matches omega.

    Both are evaluated on the same radial window (multiples of r_in).
    """
    r = mesh.radii
    sel = (r >= window[0] * mesh.r_in) & (r <= window[1] * mesh.r_in)
    K = kernel_field(p, mesh)[:, 0]
    ratio = u[sel, 0] / K[sel]
    spread = float((ratio.max() - ratio.min()) / ratio.mean())
    weak_ok = bool(spread < tol)
    mask = interior_mask(mesh)
    dists = [profile_distance(scaled_profile(p, mesh, u, rr), omega, mask) for rr in r[sel]]
    strong_ok = bool(max(dists) < tol)
    return {"weak": weak_ok, "k_hat": float(ratio.mean()), "weak_spread": spread,
            "strong": strong_ok, "profile_distance": float(max(dists)), "exclusive": weak_ok != strong_ok}


def scaling_probe(p: HardyParams, mesh: PolarMesh, k: float, ell: float = 0.5) -> dict:
    """Solve on the dilated mesh mesh/ell with transformed data and compare with T_ell u."""
    a = 0.5 * derive_exponents(p).alpha_plus
    b = 2.0 / (p.require_q() - 1.0)
    m = p.N + a - 2.0
    base = solve_dirac(p, mesh, k)
    big = mesh.dilated(1.0 / ell)
    k2 = ell ** (b - m) * k
    other = solve_dirac(p, big, k2)
    Tu = ell**b * base.u.values
    err = float(np.max(np.abs(other.u.values - Tu)) / np.max(np.abs(Tu)))
    return {"ell": ell, "k_dilated": k2, "rel_error": err}


# ---------------------------------------------------------------------------
# maximal solution on a Cartesian mesh


@dataclass(frozen=True)
class CartesianMesh:
    """Tensor mesh on [0, R] x [delta, R] (half of the half-disk by symmetry in x_1).

    x_2 is graded geometrically away from the line x_2 = delta; nodes with
    r >= R - delta are treated as lying on the level set d = delta.
    """

    delta: float
    R: float = 1.0
    n1: int = 41
    eta: float = 1e-3
    grade: float = 1.15

    @property
    def x1(self) -> np.ndarray:
        return np.linspace(0.0, self.R, self.n1)

    @property
    def x2(self) -> np.ndarray:
        top = self.R - self.delta
        h_max = self.R / (self.n1 - 1)
        t = [0.0]
        step = self.eta * self.delta
        while t[-1] + step < top:
            t.append(t[-1] + step)
            step = min(step * self.grade, h_max)
        t.append(top)
        return self.delta + np.array(t)

    @property
    def shape(self):
        return (self.n1, self.x2.size)

    def grids(self):
        return np.meshgrid(self.x1, self.x2, indexing="ij")

    @property
    def d(self):
        X1, X2 = self.grids()
        return np.minimum(X2, self.R - np.hypot(X1, X2))

    def describe(self):
        return {"type": "cartesian", "delta": self.delta, "R": self.R, "n1": self.n1,
                "eta": self.eta, "grade": self.grade, "n2": int(self.x2.size)}


def _cartesian_system(p: HardyParams, mesh: CartesianMesh, M: float):
    x1, x2 = mesh.x1, mesh.x2
    n1, n2 = x1.size, x2.size
    X1, X2 = mesh.grids()
    r = np.hypot(X1, X2)
    dirichlet = (X2 <= mesh.delta * (1 + 1e-14)) | (r >= mesh.R - mesh.delta)
    d = np.minimum(X2, mesh.R - r)
    idx = -np.ones((n1, n2), dtype=int)
    free = ~dirichlet
    idx[free] = np.arange(free.sum())
    rows, cols, vals = [], [], []
    b = np.zeros(free.sum())
    diag = np.zeros(free.sum())
    h1 = np.diff(x1)
    h2 = np.diff(x2)
    for i in range(n1):
        for j in range(n2):
            k = idx[i, j]
            if k < 0:
                continue
            # x1 direction, mirror at x1 = 0
            if i == 0:
                hp = h1[0]
                nbrs = [((1, j), 2.0 / (hp * hp))]
            else:
                hm = h1[i - 1]
                hp = h1[i] if i < n1 - 1 else None
                if hp is None:
                    raise RuntimeError("free node on the outer x1 edge")
                nbrs = [((i - 1, j), 2.0 / (hm * (hm + hp))), ((i + 1, j), 2.0 / (hp * (hm + hp)))]
            hm2, hp2 = h2[j - 1], h2[j]
            nbrs += [((i, j - 1), 2.0 / (hm2 * (hm2 + hp2))), ((i, j + 1), 2.0 / (hp2 * (hm2 + hp2)))]
            c_sum = 0.0
            for (ii, jj), c in nbrs:
                c_sum += c
                kk = idx[ii, jj]
                if kk >= 0:
                    rows.append(k)
                    cols.append(kk)
                    vals.append(-c)
                else:
                    b[k] += c * M
            diag[k] = c_sum - p.kappa / d[i, j] ** 2
    n = free.sum()
    A = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n)) + sparse.diags(diag)
    return A.tocsc(), b, idx, free


def solve_cartesian_large(p: HardyParams, mesh: CartesianMesh, M: float, rtol: float = 1e-10,
                          max_iter: int = 200) -> tuple[np.ndarray, list]:
    """Newton from the constant supersolution M (requires M^(q-1) >= kappa / delta^2)."""
    q = p.require_q()
    if M ** (q - 1) < p.kappa / mesh.delta**2:
        raise ValueError("constant M is not a supersolution; increase M")
    A, b, idx, free = _cartesian_system(p, mesh, M)
    v = np.full(free.sum(), M)
    hist = []
    for _ in range(max_iter):
        F = A @ v - b + np.abs(v) ** (q - 1) * v
        J = A + sparse.diags(q * np.abs(v) ** (q - 1))
        step = splu(J.tocsc()).solve(-F)
        v = v + step
        # residual is dominated by the huge Dirichlet couplings; monitor the relative update
        hist.append(float(np.max(np.abs(step) / np.abs(v))))
        if hist[-1] <= rtol:
            break
    else:
        raise RuntimeError("Newton did not converge on the Cartesian mesh")
    u = np.full(mesh.shape, M)
    u[free] = v
    return u, hist


def resolved_region(mesh: CartesianMesh, far: float = 10.0) -> np.ndarray:
    """Nodes with d >= far * delta inside the box [0, R/2]^2, away from the staircased arc.

    Next to the staircase the blow-up layer is not resolved and the discrete
    solution keeps growing with M (like M^(2^-j) j cells in), so statistics
    are restricted to the part of the mesh governed by the flat boundary.
    """
    X1, X2 = mesh.grids()
    return (mesh.d >= far * mesh.delta) & (X1 <= 0.5 * mesh.R) & (X2 <= 0.5 * mesh.R)


def keller_osserman_constant(p: HardyParams, mesh: CartesianMesh, u: np.ndarray) -> float:
    """max of d^(2/(q-1)) u over the resolved region (see `resolved_region`)."""
    b = 2.0 / (p.require_q() - 1.0)
    ok = resolved_region(mesh)
    return float(np.max(mesh.d[ok] ** b * u[ok]))


def _probe(mesh: CartesianMesh, u: np.ndarray, d_probe: np.ndarray) -> np.ndarray:
    """u(0, x_2) at x_2 = d_probe by log-log interpolation along x_1 = 0."""
    return np.exp(np.interp(np.log(d_probe), np.log(mesh.x2), np.log(u[0])))


def solve_maximal(p: HardyParams, deltas: Sequence[float] = (4e-4, 2e-4, 1e-4), d_layer: float = 0.01,
                  M_factor: float = 1e4, n1: int = 41, perturbation_exponent: Optional[float] = None) -> dict:
    """Approximate the maximal solution by data M on {d = delta} and extract lim d^(2/(q-1)) U.

    For each delta the probe values d^b u_delta(d) on the layer d in
    [d_layer, 4 d_layer] along x_1 = 0 are Richardson-extrapolated to
    delta = 0 using the decay exponent of the linearisation about ell d^(-b).
    """
    q = p.require_q()
    b = 2.0 / (q - 1.0)
    ell = ell_kappa(p.kappa, q)
    if perturbation_exponent is None:
        # perturbations of ell t^(-b) decay like t^(-b + beta), beta the negative root below
        lin = q * ell ** (q - 1) - p.kappa
        root = 0.5 * (1.0 - math.sqrt(1.0 + 4.0 * lin))
        perturbation_exponent = -(root + b)
    d_probe = d_layer * np.geomspace(1.0, 4.0, 7)
    rows = []
    KO = []
    for delta in deltas:
        M = M_factor * max((p.kappa / delta**2) ** (1.0 / (q - 1)), delta ** (-b))
        mesh = CartesianMesh(delta, n1=n1)
        u, hist = solve_cartesian_large(p, mesh, M)
        rows.append(d_probe**b * _probe(mesh, u, d_probe))
        KO.append(keller_osserman_constant(p, mesh, u))
    rows = np.array(rows)
    deltas = np.asarray(deltas, dtype=float)
    e = perturbation_exponent
    # fit  L(delta) = L0 + c delta^e  at each probe point using the two finest levels
    d1, d2 = deltas[-2], deltas[-1]
    L1, L2 = rows[-2], rows[-1]
    w = (d1 / d2) ** e
    L0 = (w * L2 - L1) / (w - 1.0)
    report = {
        "ell_kappa": ell,
        "ell_hat": float(np.mean(L0)),
        "ell_hat_layer": L0.tolist(),
        "raw_finest": rows[-1].tolist(),
        "deltas": deltas.tolist(),
        "d_probe": d_probe.tolist(),
        "perturbation_exponent": e,
        "keller_osserman_C": KO,
    }
    if len(deltas) >= 3:
        d0 = deltas[-3]
        w0 = (d0 / d1) ** e
        L0_prev = (w0 * L1 - rows[-3]) / (w0 - 1.0)
        drift = float(np.max(np.abs(L0 - L0_prev)) / ell)
        report["extrapolation_drift"] = drift
        if drift > 0.01:
            warnings.warn(f"Richardson extrapolation unstable (drift {drift:.3g})", ExtrapolationWarning)
    report["rel_error"] = abs(report["ell_hat"] - ell) / ell
    return report


def saturation_check(p: HardyParams, delta: float, M: float, n1: int = 41, far: float = 10.0) -> float:
    """Relative change of u between data M and 2M on d >= far * delta."""
    mesh = CartesianMesh(delta, n1=n1)
    u1, _ = solve_cartesian_large(p, mesh, M)
    u2, _ = solve_cartesian_large(p, mesh, 2 * M)
    sel = resolved_region(mesh, far)
    return float(np.max(np.abs(u2[sel] - u1[sel]) / u1[sel]))
