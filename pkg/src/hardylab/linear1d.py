"""Singular Sturm-Liouville problems for -u'' - kappa u/d^2 on (0, 1), d = min(x, 1 - x).

Endpoint-accurate solves use the substitution u = d^a v with a = alpha_+/2.
On each half of the interval this turns the operator into

    -u'' - kappa u / d^2 = -d^(-a) (d^(2a) v')'

and the kink of d at x = 1/2 leaves a point term a 2^(2-2a) v(1/2)^2 in the
quadratic form.  The weighted form is discretised with P1 finite elements;
natural boundary conditions select the admissible branch automatically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg
from scipy.integrate import solve_ivp

from .params import HardyParams, derive_exponents, weight_W

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(8)


class IterationError(RuntimeError):
    pass


class SingularWronskianError(RuntimeError):
    pass


def dist(x):
    x = np.asarray(x, dtype=float)
    return np.minimum(x, 1.0 - x)


@dataclass(frozen=True)
class IntervalMesh:
    """Nodes in (0, 1), geometric toward both endpoints, with a node at 1/2.

    The finite-element space also uses the endpoints 0 and 1; fields are
    reported on the interior nodes only.
    """

    nodes: np.ndarray
    ratio: Optional[float] = None

    def __post_init__(self):
        x = np.asarray(self.nodes, dtype=float)
        if x.ndim != 1 or x.size < 3:
            raise ValueError("mesh needs at least 3 nodes")
        if x[0] <= 0.0 or x[-1] >= 1.0 or np.any(np.diff(x) <= 0.0):
            raise ValueError("mesh nodes must be strictly increasing in (0, 1)")
        if not np.any(np.isclose(x, 0.5, rtol=0.0, atol=1e-15)):
            raise ValueError("mesh must contain the midpoint 1/2")
        if self.ratio is not None and not 0.0 < self.ratio < 1.0:
            raise ValueError("grading ratio must lie in (0, 1)")
        object.__setattr__(self, "nodes", x)

    @classmethod
    def graded(cls, d_min: float = 1e-8, ratio: float = 0.75, h_max: float = 5e-3) -> "IntervalMesh":
        if not 0.0 < ratio < 1.0:
            raise ValueError("grading ratio must lie in (0, 1)")
        if math.log(10.0) / -math.log(ratio) < 8.0 - 1e-9:
            raise ValueError("grading ratio gives fewer than 8 nodes per decade")
        left = [d_min]
        while True:
            nxt = left[-1] / ratio
            if nxt - left[-1] >= h_max or nxt >= 0.5:
                break
            left.append(nxt)
        start = left[-1]
        n_uni = max(1, int(math.ceil((0.5 - start) / h_max)))
        left.extend(np.linspace(start, 0.5, n_uni + 1)[1:-1])
        left = np.array(left)
        nodes = np.concatenate([left, [0.5], 1.0 - left[::-1]])
        return cls(nodes, ratio)

    @property
    def d(self) -> np.ndarray:
        return dist(self.nodes)

    @property
    def full(self) -> np.ndarray:
        return np.concatenate([[0.0], self.nodes, [1.0]])

    @property
    def mid_index(self) -> int:
        return int(np.argmin(np.abs(self.nodes - 0.5)))

    def nodes_per_decade(self) -> float:
        x = self.nodes[self.nodes < 1e-2]
        return (x.size - 1) / math.log10(x[-1] / x[0]) if x.size > 1 else 0.0

    def refined(self) -> "IntervalMesh":
        """Bisect every element, including the two end elements; the FE spaces are nested."""
        f = self.full
        mid = 0.5 * (f[:-1] + f[1:])
        new = np.empty(2 * f.size - 1)
        new[0::2] = f
        new[1::2] = mid
        return IntervalMesh(new[1:-1], None)

    def is_uniform(self) -> bool:
        h = np.diff(self.full)
        return bool(np.allclose(h, h[0]))


@dataclass
class Field1D:
    mesh: IntervalMesh
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.mesh.nodes.shape:
            raise ValueError("field length does not match mesh")


def _require_graded(mesh: IntervalMesh):
    if mesh.is_uniform():
        raise ValueError("exponent-resolving solves need a graded mesh")


def _element_quadrature(xl, xr):
    """Gauss points and weights on each element (vectorised)."""
    half = 0.5 * (xr - xl)[:, None]
    pts = 0.5 * (xl + xr)[:, None] + half * _GAUSS_X[None, :]
    return pts, half * _GAUSS_W[None, :]


def _weighted_system(p: HardyParams, mesh: IntervalMesh):
    """Tridiagonal stiffness/mass (upper banded) of the weighted form on the full FE node set."""
    a = 0.5 * derive_exponents(p).alpha_plus
    x = mesh.full
    xl, xr = x[:-1], x[1:]
    h = xr - xl
    left = xr <= 0.5
    # exact integral of d^(2a) over each element
    F = lambda t: t ** (2 * a + 1) / (2 * a + 1)
    wint = np.where(left, F(xr) - F(xl), F(1.0 - xl) - F(1.0 - xr))
    k = wint / h**2
    pts, wts = _element_quadrature(xl, xr)
    rho = dist(pts) ** (2 * a)
    lam = (pts - xl[:, None]) / h[:, None]
    m_ll = np.sum(wts * rho * (1 - lam) ** 2, axis=1)
    m_rr = np.sum(wts * rho * lam**2, axis=1)
    m_lr = np.sum(wts * rho * lam * (1 - lam), axis=1)
    n = x.size
    K = np.zeros((2, n))
    M = np.zeros((2, n))
    K[1, :-1] += k
    K[1, 1:] += k
    K[0, 1:] = -k
    M[1, :-1] += m_ll
    M[1, 1:] += m_rr
    M[0, 1:] = m_lr
    K[1, mesh.mid_index + 1] += a * 2.0 ** (2.0 - 2.0 * a)
    return K, M, a


def _banded_matvec(ab, v):
    out = ab[1] * v
    out[:-1] += ab[0, 1:] * v[1:]
    out[1:] += ab[0, 1:] * v[:-1]
    return out


@dataclass
class EigenResult:
    lambda_kappa: float
    phi: Field1D
    iterations: int
    history: list


def eigenpair(p: HardyParams, mesh: IntervalMesh, tol: float = 1e-13, max_iter: int = 500) -> EigenResult:
    """Smallest eigenvalue and positive eigenfunction by inverse iteration on the weighted form."""
    _require_graded(mesh)
    K, M, a = _weighted_system(p, mesh)
    chol = linalg.cholesky_banded(K)
    v = np.ones(K.shape[1])
    lam_old = np.inf
    history = []
    for it in range(1, max_iter + 1):
        v = linalg.cho_solve_banded((chol, False), _banded_matvec(M, v))
        v /= np.max(np.abs(v))
        lam = float(v @ _banded_matvec(K, v) / (v @ _banded_matvec(M, v)))
        history.append(lam)
        if abs(lam - lam_old) <= tol * abs(lam):
            break
        lam_old = lam
    else:
        raise IterationError("inverse iteration did not converge")
    v = v[1:-1] * np.sign(v[len(v) // 2])
    phi = mesh.d**a * v
    phi /= np.max(phi)
    return EigenResult(lam, Field1D(mesh, phi), it, history)


def local_exponent(field: Field1D, lo: float = 1e-5, hi: float = 1e-3) -> float:
    """Least-squares slope of log(field) against log(x) for nodes in [lo, hi]."""
    x = field.mesh.nodes
    mask = (x >= lo) & (x <= hi)
    if mask.sum() < 3:
        raise ValueError("too few nodes in the fitting window")
    return float(np.polyfit(np.log(x[mask]), np.log(field.values[mask]), 1)[0])


# ---------------------------------------------------------------------------
# Hardy constant


@dataclass
class HardyReport:
    constant: float
    gap: float
    n_dof: int

    def to_dict(self):
        return {"constant": self.constant, "gap_to_quarter": self.gap, "n_dof": self.n_dof}


def hardy_constant_check(mesh: IntervalMesh) -> HardyReport:
    """Minimum of int u'^2 / int u^2/d^2 over P1 functions vanishing at 0 and 1."""
    x = mesh.full
    xl, xr = x[:-1], x[1:]
    h = xr - xl
    pts, wts = _element_quadrature(xl, xr)
    inv = 1.0 / dist(pts) ** 2
    lam = (pts - xl[:, None]) / h[:, None]
    b_ll = np.sum(wts * inv * (1 - lam) ** 2, axis=1)
    b_rr = np.sum(wts * inv * lam**2, axis=1)
    b_lr = np.sum(wts * inv * lam * (1 - lam), axis=1)
    # end elements: the hat function is x/x1 there, so u^2/d^2 is constant
    b_rr[0] = 1.0 / h[0]
    b_ll[-1] = 1.0 / h[-1]
    n = x.size
    K = np.zeros((n, n))
    B = np.zeros((n, n))
    idx = np.arange(n - 1)
    np.add.at(K, (idx, idx), 1.0 / h)
    np.add.at(K, (idx + 1, idx + 1), 1.0 / h)
    K[idx, idx + 1] -= 1.0 / h
    K[idx + 1, idx] -= 1.0 / h
    np.add.at(B, (idx, idx), b_ll)
    np.add.at(B, (idx + 1, idx + 1), b_rr)
    B[idx, idx + 1] += b_lr
    B[idx + 1, idx] += b_lr
    K, B = K[1:-1, 1:-1], B[1:-1, 1:-1]
    val = float(linalg.eigh(K, B, eigvals_only=True, subset_by_index=[0, 0])[0])
    return HardyReport(val, val - 0.25, n - 2)


def rayleigh_quotient(u, du, pieces=((0.0, 0.5), (0.5, 1.0))) -> float:
    """int u'^2 / int u^2/d^2 by adaptive quadrature for callables u, du."""
    from scipy.integrate import quad

    num = sum(quad(lambda t: du(t) ** 2, lo, hi, limit=200)[0] for lo, hi in pieces)
    den = sum(quad(lambda t: u(t) ** 2 / dist(t) ** 2, lo, hi, limit=200)[0] for lo, hi in pieces)
    return num / den


# ---------------------------------------------------------------------------
# homogeneous solutions, Green function, Dirichlet problem


def _euler_pair(p: HardyParams):
    """Closed-form homogeneous solutions of -u'' - kappa u/t^2 = 0 in the variable t: (admissible, other)."""
    a = 0.5 * derive_exponents(p).alpha_plus
    if p.critical_kappa:
        f1 = lambda t: np.sqrt(t)
        d1 = lambda t: 0.5 / np.sqrt(t)
        f2 = lambda t: np.sqrt(t) * np.log(t)
        d2 = lambda t: (0.5 * np.log(t) + 1.0) / np.sqrt(t)
    else:
        b = 1.0 - a
        f1 = lambda t: t**a
        d1 = lambda t: a * t ** (a - 1)
        f2 = lambda t: t**b
        d2 = lambda t: b * t ** (b - 1)
    return (f1, d1), (f2, d2)


def continuation_coefficients(p: HardyParams) -> tuple[float, float]:
    """(C1, C2) with u0 = C1 f1(1-x) + C2 f2(1-x) on [1/2, 1), where u0 = x^a on (0, 1/2].

    Obtained from the two Wronskians at x = 1/2.
    """
    a = 0.5 * derive_exponents(p).alpha_plus
    (f1, d1), (f2, d2) = _euler_pair(p)
    t = 0.5
    val = 0.5**a
    dval_t = -a * 0.5 ** (a - 1)  # derivative in t = 1 - x
    wr = f1(t) * d2(t) - d1(t) * f2(t)
    if abs(wr) < 1e-300:
        raise SingularWronskianError("Euler solutions are dependent")
    C1 = (val * d2(t) - dval_t * f2(t)) / wr
    C2 = (f1(t) * dval_t - d1(t) * val) / wr
    return float(C1), float(C2)


def homogeneous_solutions(p: HardyParams, x: np.ndarray, rtol: float = 1e-12):
    """u0 (admissible at 0) and u1(x) = u0(1 - x) (admissible at 1) at the points x.

    u0 is x^a on (0, 1/2] and is continued across 1/2 by ODE marching.
    """
    a = 0.5 * derive_exponents(p).alpha_plus
    x = np.asarray(x, dtype=float)
    kappa = p.kappa

    def march(targets):
        out = np.empty_like(targets)
        left = targets <= 0.5
        out[left] = targets[left] ** a
        right = np.sort(np.unique(targets[~left]))
        if right.size:
            def rhs(s, y):
                return [y[1], -kappa * y[0] / (1.0 - s) ** 2]

            sol = solve_ivp(rhs, (0.5, right[-1]), [0.5**a, a * 0.5 ** (a - 1)], method="DOP853",
                            rtol=rtol, atol=1e-300, t_eval=right)
            if not sol.success:
                raise IterationError(sol.message)
            out[~left] = np.interp(targets[~left], sol.t, sol.y[0])
        return out

    u0 = march(x)
    u1 = march(1.0 - x)
    return u0, u1


def green_wronskian(p: HardyParams) -> float:
    """u0' u1 - u0 u1' (constant); evaluated at x = 1/2 where both are x^a-type."""
    a = 0.5 * derive_exponents(p).alpha_plus
    w = 2.0 * a * 0.5 ** (2 * a - 1)
    if abs(w) < 1e-300:
        raise SingularWronskianError("homogeneous solutions are linearly dependent")
    return w


class GreenFunction:
    """G(x, y) = u0(min) u1(max) / (u0' u1 - u0 u1') on a mesh."""

    def __init__(self, p: HardyParams, mesh: IntervalMesh):
        self.p = p
        self.mesh = mesh
        self.u0, self.u1 = homogeneous_solutions(p, mesh.nodes)
        self.w = green_wronskian(p)

    def matrix(self) -> np.ndarray:
        n = self.mesh.nodes.size
        i = np.arange(n)
        lo = np.minimum.outer(i, i)
        hi = np.maximum.outer(i, i)
        return self.u0[lo] * self.u1[hi] / self.w

    def column(self, j: int) -> Field1D:
        n = self.mesh.nodes.size
        i = np.arange(n)
        vals = np.where(i <= j, self.u0 * self.u1[j], self.u0[j] * self.u1) / self.w
        return Field1D(self.mesh, vals)


def green_function(p: HardyParams, mesh: IntervalMesh, y_index: int) -> Field1D:
    if not 0 <= y_index < mesh.nodes.size:
        raise IndexError("y must be an interior mesh node")
    return GreenFunction(p, mesh).column(y_index)


def green_envelope(p: HardyParams, x, y):
    """One-dimensional comparison function for G.

    With rho = |x-y| + d(x) + d(y):
      kappa < 1/4:  d(x)^a d(y)^a / rho^(2a-1)
      kappa = 1/4:  sqrt(d(x) d(y)) (1 + ln(2/rho))
    """
    a = 0.5 * derive_exponents(p).alpha_plus
    dx, dy = dist(x), dist(y)
    rho = np.abs(np.asarray(x) - np.asarray(y)) + dx + dy
    if p.critical_kappa:
        return np.sqrt(dx * dy) * (1.0 + np.log(2.0 / rho))
    return (dx * dy) ** a / rho ** (2 * a - 1)


def envelope_bounds(p: HardyParams, mesh: IntervalMesh, stride: int = 1) -> tuple[float, float]:
    """(min, max) of G / envelope over mesh node pairs."""
    G = GreenFunction(p, mesh).matrix()[::stride, ::stride]
    x = mesh.nodes[::stride]
    E = green_envelope(p, x[:, None], x[None, :])
    r = G / E
    return float(r.min()), float(r.max())


@dataclass
class DirichletSolution:
    u: Field1D
    Z0: Field1D
    Z1: Field1D
    h0: float
    h1: float
    params: HardyParams

    def normalized(self) -> np.ndarray:
        """u / W at the mesh nodes."""
        return self.u.values / weight_W(self.params, self.u.mesh.d, 1.0)


def dirichlet_W(p: HardyParams, mesh: IntervalMesh, h0: float, h1: float) -> DirichletSolution:
    """L_kappa-harmonic u with u/W -> h0 at x = 0 and u/W -> h1 at x = 1 (D0 = 1).

    u = h0 Z0 + h1 Z1, where Z0 = u1 / B is admissible at 1 and has unit W-trace at 0.
    """
    _require_graded(mesh)
    C1, C2 = continuation_coefficients(p)
    # near 0, u1 = C1 f1(x) + C2 f2(x); f2 / W -> 1 below 1/4 and -> -1 at 1/4 (D0 = 1)
    B = -C2 if p.critical_kappa else C2
    if abs(B) < 1e-300:
        raise SingularWronskianError("no W-normalisable solution")
    u0, u1 = homogeneous_solutions(p, mesh.nodes)
    Z0 = u1 / B
    Z1 = u0 / B
    return DirichletSolution(Field1D(mesh, h0 * Z0 + h1 * Z1), Field1D(mesh, Z0), Field1D(mesh, Z1), h0, h1, p)


def boundary_limit(p: HardyParams, sol: DirichletSolution, n_inner: int = 12) -> dict:
    """Estimate lim u/W at x = 0 from the innermost graded nodes.

    Below 1/4 the innermost value is returned directly.  At 1/4 the ratio
    approaches its limit like 1/|ln d|, so a fit in that variable is used.
    """
    ratio = sol.normalized()
    x = sol.u.mesh.nodes
    if not p.critical_kappa:
        return {"limit": float(ratio[0]), "innermost": float(ratio[0]), "method": "direct"}
    s = 1.0 / np.abs(np.log(x[:n_inner]))
    coef = np.polyfit(s, ratio[:n_inner], 1)
    return {"limit": float(coef[1]), "innermost": float(ratio[0]), "method": "fit in 1/|ln d|"}
