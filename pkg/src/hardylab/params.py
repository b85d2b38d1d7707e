"""Parameter triple (N, kappa, q) and the closed-form exponent calculus."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

KAPPA_CRIT = 0.25
# inputs within this distance of 1/4 are snapped onto the critical branch
KAPPA_BRANCH_TOL = 1e-12


class ParameterError(ValueError):
    """Raised when (N, kappa, q) lies outside the admissible domain."""


@dataclass(frozen=True)
class HardyParams:
    N: int
    kappa: float
    q: Optional[float] = None

    def __post_init__(self):
        if isinstance(self.N, bool) or int(self.N) != self.N or self.N < 2:
            raise ParameterError(f"N must be an integer >= 2, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        k = float(self.kappa)
        if not math.isfinite(k) or k <= 0.0 or k > KAPPA_CRIT + KAPPA_BRANCH_TOL:
            raise ParameterError(f"kappa must lie in (0, 1/4], got {self.kappa!r}")
        if abs(k - KAPPA_CRIT) <= KAPPA_BRANCH_TOL:
            k = KAPPA_CRIT
        object.__setattr__(self, "kappa", k)
        if self.q is not None:
            q = float(self.q)
            if not math.isfinite(q) or q <= 1.0:
                raise ParameterError(f"q must be > 1, got {self.q!r}")
            object.__setattr__(self, "q", q)

    @property
    def critical_kappa(self) -> bool:
        return self.kappa == KAPPA_CRIT

    def require_q(self) -> float:
        if self.q is None:
            raise ParameterError("this computation needs the nonlinearity exponent q")
        return self.q

    def with_q(self, q: float) -> "HardyParams":
        return HardyParams(self.N, self.kappa, q)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ExponentSet:
    alpha_plus: float
    alpha_minus: float
    q_c: float
    q_e: float
    mu_kappa: float
    mu_kappa_2: float
    ell_qN: Optional[float] = None
    ell_kappa: Optional[float] = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda_flag"] = "lambda_kappa is computed numerically (linear1d.eigenpair)"
        return d


def alpha_pm(kappa: float) -> tuple[float, float]:
    root = math.sqrt(max(1.0 - 4.0 * kappa, 0.0))
    return 1.0 + root, 1.0 - root


def critical_exponent(N: int, alpha_plus: float) -> float:
    a = 0.5 * alpha_plus
    return (N + a) / (N + a - 2.0)


def ell_qN(N: int, q: float) -> float:
    """Coefficient of the linear term in the separable-solution equation on the sphere."""
    b = 2.0 / (q - 1.0)
    return b * (b + 2.0 - N)


def ell_kappa(kappa: float, q: float) -> float:
    """Boundary blow-up constant of the maximal solution, u ~ ell * d^(-2/(q-1))."""
    base = 2.0 * (q + 1.0) / (q - 1.0) ** 2 + kappa
    try:
        return base ** (1.0 / (q - 1.0))
    except OverflowError:  # q very close to 1
        return math.inf


def derive_exponents(p: HardyParams) -> ExponentSet:
    ap, am = alpha_pm(p.kappa)
    a = 0.5 * ap
    N = p.N
    q_c = critical_exponent(N, ap)
    q_e = (2.0 * N + 2.0 + ap) / (2.0 * N - 2.0 + ap)
    mu = a * (N + a - 2.0)
    mu2 = (a + 1.0) * (N + a - 1.0)
    lq = lk = None
    if p.q is not None:
        lq = ell_qN(N, p.q)
        lk = ell_kappa(p.kappa, p.q)
    return ExponentSet(ap, am, q_c, q_e, mu, mu2, lq, lk)


def weight_W(p: HardyParams, d, D0: float = 1.0):
    """Boundary normalising weight: d^(alpha_-/2) below 1/4, sqrt(d)|ln(d/D0)| at 1/4.

    Accepts scalars or arrays.
    """
    d_arr = np.asarray(d, dtype=float)
    if np.any(d_arr <= 0.0):
        raise ParameterError("weight_W needs d > 0")
    if D0 <= 0.0:
        raise ParameterError("weight_W needs D0 > 0")
    if p.critical_kappa:
        out = np.sqrt(d_arr) * np.abs(np.log(d_arr / D0))
    else:
        out = d_arr ** (0.5 * alpha_pm(p.kappa)[1])
    return float(out) if out.ndim == 0 else out


def subcritical(p: HardyParams) -> bool:
    q = p.require_q()
    return q < derive_exponents(p).q_c


def truncated_power(u, q: float, level: Optional[float] = None):
    """g_k(u) = sgn(u) min(|u|^q, level^q); plain odd power when level is None."""
    u = np.asarray(u, dtype=float)
    g = np.abs(u) ** q
    if level is not None:
        g = np.minimum(g, level**q)
    return np.sign(u) * g
