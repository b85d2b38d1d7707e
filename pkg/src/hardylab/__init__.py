"""Numerical lab for -Lap u - kappa u / d^2 + |u|^(q-1) u = 0 near boundary points."""

from .params import ExponentSet, HardyParams, ParameterError, derive_exponents, weight_W

__all__ = ["ExponentSet", "HardyParams", "ParameterError", "derive_exponents", "weight_W"]
__version__ = "0.1.0"
