"""Weight functions and integrating measures for the pairwise moments."""
from __future__ import annotations

import enum
import math

import numpy as np

__all__ = ["WeightKind", "IntegratorKind", "eval_weight", "cf_kernel", "default_integrator"]


class WeightKind(str, enum.Enum):
    INDICATOR = "indicator"
    COMPLEX_EXP = "cf"

    @classmethod
    def parse(cls, value) -> "WeightKind":
        if isinstance(value, cls):
            return value
        aliases = {"indicator": cls.INDICATOR, "i": cls.INDICATOR,
                   "cf": cls.COMPLEX_EXP, "c": cls.COMPLEX_EXP, "exp": cls.COMPLEX_EXP,
                   "complexexp": cls.COMPLEX_EXP, "complex_exp": cls.COMPLEX_EXP}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown weight {value!r}") from None


class IntegratorKind(str, enum.Enum):
    EMPIRICAL_CDF = "empirical_cdf"
    STANDARD_NORMAL = "standard_normal"


def default_integrator(kind: WeightKind) -> IntegratorKind:
    """Indicator weights integrate against the empirical CDF of the lagged
    series, complex exponentials against the standard normal CDF."""
    kind = WeightKind.parse(kind)
    if kind is WeightKind.INDICATOR:
        return IntegratorKind.EMPIRICAL_CDF
    return IntegratorKind.STANDARD_NORMAL


def eval_weight(kind, z, x):
    """
    Evaluate ``w(z, x)``.

    ``indicator`` gives ``1(z <= x)``; ``cf`` gives ``exp(i x z)``. Both return
    complex values and broadcast over array inputs.
    """
    kind = WeightKind.parse(kind)
    z = np.asarray(z, dtype=float)
    x = np.asarray(x, dtype=float)
    if kind is WeightKind.INDICATOR:
        out = (z <= x).astype(complex)
    else:
        arg = x * z
        out = np.cos(arg) + 1j * np.sin(arg)
    return out[()] if out.ndim == 0 else out


def cf_kernel(a, b):
    """``exp(-(a-b)**2 / 2)``: the standard-normal integral of
    ``exp(i x a) * conj(exp(i x b))``."""
    if np.ndim(a) == 0 and np.ndim(b) == 0:
        d = float(a) - float(b)
        return math.exp(-0.5 * d * d)
    d = np.subtract(a, b, dtype=float)
    return np.exp(-0.5 * d * d)
