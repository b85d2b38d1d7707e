"""Besov-capacity index of boundary points and the Dirac admissibility predicate."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .params import HardyParams, derive_exponents


@dataclass(frozen=True)
class CapacityIndex:
    s: float
    q_prime: float
    dim: int

    @property
    def product(self) -> float:
        """s * q', compared against the boundary dimension N - 1."""
        return self.s * self.q_prime

    def to_dict(self) -> dict:
        d = asdict(self)
        d["s_times_q_prime"] = self.product
        return d


def capacity_index(p: HardyParams) -> CapacityIndex:
    q = p.require_q()
    ap = derive_exponents(p).alpha_plus
    qp = q / (q - 1.0)
    s = 2.0 - (2.0 + ap) / (2.0 * qp)
    return CapacityIndex(s=s, q_prime=qp, dim=p.N - 1)


def points_have_zero_capacity(p: HardyParams) -> bool:
    """Singletons are capacity-null exactly when s*q' <= N - 1."""
    c = capacity_index(p)
    return c.product <= c.dim


def dirac_admissible(p: HardyParams) -> bool:
    """True iff k*delta_a is admissible boundary data, i.e. q < q_c."""
    q = p.require_q()
    return q < derive_exponents(p).q_c
