"""Local boundary barriers f = Lambda (R^2 - |x - z|^2)^(-beta) g(d) in the flat model.

The boundary is the hyperplane x_N = 0 and d = x_N.  Points are described by
(rho, x_N) with rho = |x' - z'|, so that |x - z|^2 = rho^2 + x_N^2; this is
exact for the radially symmetric barrier in any dimension N.

For kappa < 1/4 the profile is g(d) = d^gamma.  At kappa = 1/4 it is
g(d) = sqrt(d) * sqrt(log(D/d)) with D = e*R by default.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .params import HardyParams, derive_exponents


class BarrierDomainError(ValueError):
    """Evaluation point outside the open ball or outside the half-space."""


class ConstraintViolation(ValueError):
    """Exponents (beta, gamma) violate the admissibility constraints."""


@dataclass(frozen=True)
class BarrierSpec:
    params: HardyParams
    R: float = 1.0
    beta: float = 3.0
    gamma: Optional[float] = None
    Lambda: float = 1.0
    z: float = 0.0
    log_scale: Optional[float] = None

    @property
    def critical(self) -> bool:
        return self.params.kappa == 0.25

    @property
    def D(self) -> float:
        return self.log_scale if self.log_scale is not None else math.e * self.R

    def with_lambda(self, Lambda: float) -> "BarrierSpec":
        return replace(self, Lambda=float(Lambda))

    def to_dict(self) -> dict:
        return {"params": self.params.to_dict(), "R": self.R, "beta": self.beta,
                "gamma": self.gamma, "Lambda": self.Lambda, "z": self.z, "log_scale": self.D}


def validate(spec: BarrierSpec) -> None:
    p = spec.params
    q = p.require_q()
    ex = derive_exponents(p)
    if spec.R <= 0:
        raise ConstraintViolation("R must be positive")
    if spec.Lambda < 0:
        raise ConstraintViolation("Lambda must be nonnegative")
    if spec.critical:
        g_eff = 0.5
        if spec.D < spec.R:
            raise ConstraintViolation("log scale must be at least R")
    else:
        if spec.gamma is None:
            raise ConstraintViolation("gamma is required when kappa < 1/4")
        lo, hi = 0.5 * ex.alpha_minus, 0.5 * ex.alpha_plus
        if not lo < spec.gamma < hi:
            raise ConstraintViolation(f"gamma must lie in ({lo:.6g}, {hi:.6g})")
        g_eff = spec.gamma
    bmin = max(2.0 / (q - 1.0) + g_eff, 0.5 * (p.N - 2), 1.0)
    if spec.beta < bmin - 1e-14:
        raise ConstraintViolation(f"beta must be >= {bmin:.6g}")


def _profile(spec: BarrierSpec, d: np.ndarray):
    """Return g, g', and g'' + kappa g / d^2."""
    if spec.critical:
        L = np.log(spec.D / d)
        sq = np.sqrt(d)
        g = sq * np.sqrt(L)
        g1 = 0.5 / sq * (np.sqrt(L) - 1.0 / np.sqrt(L))
        lk = -0.25 * d ** -1.5 * L ** -1.5
        return g, g1, lk
    gam, kap = spec.gamma, spec.params.kappa
    g = d ** gam
    g1 = gam * d ** (gam - 1.0)
    lk = (gam * (gam - 1.0) + kap) * d ** (gam - 2.0)
    return g, g1, lk


def _coords(spec: BarrierSpec, rho, xN):
    rho = np.abs(np.asarray(rho, dtype=float) - spec.z)
    xN = np.asarray(xN, dtype=float)
    r2 = rho ** 2 + xN ** 2
    if np.any(xN <= 0):
        raise BarrierDomainError("points must satisfy x_N > 0")
    if np.any(r2 >= spec.R ** 2):
        raise BarrierDomainError("points must satisfy |x - z| < R")
    if spec.critical and np.any(xN >= spec.D):
        raise BarrierDomainError("d must stay below the log scale")
    return r2, xN


def barrier_eval(spec: BarrierSpec, rho, xN):
    """Barrier value at tangential offset rho (from z) and height xN."""
    validate(spec)
    r2, d = _coords(spec, rho, xN)
    g, _, _ = _profile(spec, d)
    out = spec.Lambda * (spec.R ** 2 - r2) ** (-spec.beta) * g
    return float(out) if out.ndim == 0 else out


def _split(spec: BarrierSpec, rho, xN):
    """Linear and nonlinear parts with L f + f^q = -Lambda*lin + Lambda^q*nl."""
    r2, d = _coords(spec, rho, xN)
    N, R, b = spec.params.N, spec.R, spec.beta
    q = spec.params.require_q()
    P = R ** 2 - r2
    g, g1, lk = _profile(spec, d)
    lin = (P ** (-b) * lk
           + g * 2.0 * b * P ** (-b - 2.0) * (N * R ** 2 + (2.0 * b + 2.0 - N) * r2)
           + 4.0 * b * P ** (-b - 1.0) * d * g1)
    nl = P ** (-q * b) * g ** q
    return lin, nl


def pointwise_residual(spec: BarrierSpec, rho, xN):
    """L_kappa f + f^q evaluated from the closed form."""
    validate(spec)
    lin, nl = _split(spec, rho, xN)
    q = spec.params.q
    return -spec.Lambda * lin + spec.Lambda ** q * nl


def verification_grid(R: float, n: int = 200, z: float = 0.0):
    """Cell-centred n x n grid on (0,R)^2 in (rho, x_N), kept inside the open ball."""
    t = (np.arange(n) + 0.5) / n * R
    rho, xN = np.meshgrid(t, t, indexing="ij")
    keep = rho ** 2 + xN ** 2 < R ** 2 * (1.0 - 1e-12)
    return rho[keep] + z, xN[keep]


def proof_sets(spec: BarrierSpec, rho, xN, eps0: Optional[float] = None):
    """Membership in the near-boundary set A = {d <= eps0 P / (16 beta R [L^2])}."""
    r2, d = _coords(spec, rho, xN)
    P = spec.R ** 2 - r2
    if spec.critical:
        eps0 = 0.25 if eps0 is None else eps0
        bound = eps0 * P / (16 * spec.beta * spec.R * np.log(spec.D / d) ** 2)
    else:
        if eps0 is None:
            g = spec.gamma
            eps0 = -(g * (g - 1.0) + spec.params.kappa)
        bound = eps0 * P / (16 * spec.beta * spec.R)
    return d <= bound


@dataclass
class ResidualReport:
    min_residual: float
    min_normalized: float
    argmin: tuple
    argmin_in_A: bool
    n_points: int
    Lambda: float

    def to_dict(self) -> dict:
        return {"min_residual": self.min_residual, "min_normalized": self.min_normalized,
                "argmin": list(self.argmin), "argmin_region": "A" if self.argmin_in_A else "A^c",
                "n_points": self.n_points, "Lambda": self.Lambda}


def supersolution_residual(spec: BarrierSpec, n: int = 200, grid=None) -> ResidualReport:
    """Minimum of L_kappa f + f^q over the flat verification grid.

    The normalised residual divides by |Lambda*lin| + Lambda^q*nl, so it lies in
    [-1, 1] and is insensitive to the huge dynamic range near the rim.
    """
    validate(spec)
    rho, xN = verification_grid(spec.R, n, spec.z) if grid is None else grid
    lin, nl = _split(spec, rho, xN)
    q = spec.params.q
    lam = spec.Lambda
    lin_part = -lam * lin
    nl_part = lam ** q * nl
    res = lin_part + nl_part
    scale = np.abs(lin_part) + nl_part
    norm = np.divide(res, scale, out=np.zeros_like(res), where=scale > 0)
    k = int(np.argmin(norm))
    inA = bool(proof_sets(spec, rho[k], xN[k]))
    return ResidualReport(float(res.min()), float(norm[k]), (float(rho[k]), float(xN[k])),
                          inA, int(res.size), lam)


def grid_lambda_min(spec: BarrierSpec, n: int = 200) -> float:
    """Smallest Lambda making the grid residual nonnegative, in closed form.

    At each point the residual is -Lambda*lin + Lambda^q*nl, which changes sign
    once, at (lin/nl)^(1/(q-1)) when lin > 0.
    """
    validate(spec)
    rho, xN = verification_grid(spec.R, n, spec.z)
    lin, nl = _split(spec, rho, xN)
    q = spec.params.q
    pos = lin > 0
    if not np.any(pos):
        return 0.0
    return float(np.max((lin[pos] / nl[pos]) ** (1.0 / (q - 1.0))))


def _grid_ok(spec: BarrierSpec, Lambda: float, n: int) -> bool:
    rep = supersolution_residual(spec.with_lambda(Lambda), n)
    return rep.min_normalized >= 0.0


def bisect_lambda(spec: BarrierSpec, n: int = 200, rtol: float = 1e-10) -> float:
    """Smallest Lambda with nonnegative grid residual, by bisection on Lambda."""
    validate(spec)
    hi = 1.0
    while not _grid_ok(spec, hi, n):
        hi *= 4.0
    lo = hi / 4.0 if hi > 1.0 else 0.0
    if lo == 0.0:
        lo = 1.0
        while _grid_ok(spec, lo, n) and lo > 1e-300:
            lo /= 4.0
        if _grid_ok(spec, lo, n):
            return 0.0
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if _grid_ok(spec, mid, n):
            hi = mid
        else:
            lo = mid
    return hi


def threshold_powers(spec: BarrierSpec) -> tuple:
    """The two candidate powers of R whose maximum sets the threshold scale."""
    q, b, R = spec.params.require_q(), spec.beta, spec.R
    if spec.critical:
        return (R ** (2 * b - 2 / (q - 1) - 0.5), R ** (3 * b - 2 / (q - 1)))
    return (R ** (2 * b), R ** (2 * b - spec.gamma - 1 / (q - 1)))


SAFETY = 2.0


@lru_cache(maxsize=256)
def _certified(spec_key: BarrierSpec, n: int) -> float:
    return SAFETY * bisect_lambda(spec_key, n)


def certified_constant(spec: BarrierSpec, n: int = 200) -> float:
    """c = SAFETY * Lambda_grid / max(powers); cached per exponent set and R."""
    key = spec.with_lambda(1.0)
    return _certified(key, n) / max(threshold_powers(spec))


def lambda_threshold(spec: BarrierSpec, n: int = 200) -> float:
    """Certified threshold c * max(powers of R); Lambda in spec is ignored."""
    return certified_constant(spec, n) * max(threshold_powers(spec))


def residual_ladder(spec: BarrierSpec, factors: Sequence[float] = (1, 2, 4, 8), n: int = 200,
                    base: Optional[float] = None) -> list:
    base = lambda_threshold(spec, n) if base is None else base
    out = []
    for f in factors:
        rep = supersolution_residual(spec.with_lambda(base * f), n)
        out.append({"factor": float(f), "Lambda": base * f, "min_residual": rep.min_residual,
                    "min_normalized": rep.min_normalized})
    return out


def ladder_monotone(ladder: list) -> bool:
    vals = [row["min_normalized"] for row in ladder]
    return all(b >= a - 1e-14 for a, b in zip(vals, vals[1:]))


def certify(spec: BarrierSpec, factor: float = 10.0, n: int = 200) -> dict:
    thr = lambda_threshold(spec, n)
    rep = supersolution_residual(spec.with_lambda(factor * thr), n)
    ladder = residual_ladder(spec, n=n, base=thr)
    return {"spec": spec.with_lambda(factor * thr).to_dict(), "threshold": thr,
            "constant": certified_constant(spec, n), "powers": list(threshold_powers(spec)),
            "residual": rep.to_dict(), "certified": rep.min_residual >= 0.0,
            "ladder": ladder, "ladder_monotone": ladder_monotone(ladder)}


def dominance_check(spec: BarrierSpec, x1: np.ndarray, xN: np.ndarray, u: np.ndarray,
                    tol: float = 1e-10) -> dict:
    """Compare a nodal solution u at points (x1, xN) with the barrier centred at (z, 0).

    Only nodes strictly inside the half-ball are compared.
    """
    x1, xN, u = (np.asarray(v, dtype=float).ravel() for v in (x1, xN, u))
    inside = ((x1 - spec.z) ** 2 + xN ** 2 < spec.R ** 2) & (xN > 0)
    if not np.any(inside):
        raise ValueError("no nodes inside the barrier ball")
    f = barrier_eval(spec, x1[inside], xN[inside])
    gap = u[inside] - f
    k = int(np.argmax(gap / f))
    return {"n_nodes": int(inside.sum()), "holds": bool(np.all(gap <= tol * np.maximum(f, 1.0))),
            "max_ratio": float(np.max(u[inside] / f)),
            "worst_node": (float(x1[inside][k]), float(xN[inside][k]))}
