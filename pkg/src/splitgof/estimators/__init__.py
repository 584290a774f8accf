"""Model families, descriptor parsing and fitting-sample estimators."""
from __future__ import annotations

import re

from .base import FittedModel, ModelFamily, count_fits, fit_calls
from .garch import GARCH, garch_quasi_loglik, garch_variance
from .linear import AR, ARMA, BoundarySolutionWarning, Constant, pi_coefficients
from .tar import TAR, default_threshold_grid

__all__ = [
    "FittedModel",
    "ModelFamily",
    "Constant",
    "AR",
    "ARMA",
    "GARCH",
    "TAR",
    "BoundarySolutionWarning",
    "parse_model",
    "fit_model",
    "fit_constant",
    "fit_ar",
    "fit_arma",
    "fit_garch",
    "fit_tar",
    "pi_coefficients",
    "garch_variance",
    "garch_quasi_loglik",
    "default_threshold_grid",
    "fit_calls",
    "count_fits",
]

_INT_LIST = r"(\d+(?:,\d+)*)"


def parse_model(descriptor: str) -> ModelFamily:
    """
    Build a model family from its text form.

    Recognised forms: ``const``, ``ar:p``, ``ar:p:c``, ``arma:p,q``,
    ``garch:p,q``, ``arch:p``, ``tar:p1,...,pk:d=D`` and ``tar:...:d=D:c``.
    The ``:c`` suffix adds an intercept.

    Examples
    --------
    >>> parse_model("tar:1,1,1:d=1").orders
    (1, 1, 1)
    """
    if isinstance(descriptor, ModelFamily):
        return descriptor
    text = str(descriptor).strip().lower().replace(" ", "")
    if text in ("const", "constant", "mean"):
        return Constant()
    m = re.fullmatch(r"ar:(\d+)(:c)?", text)
    if m:
        return AR(int(m.group(1)), intercept=bool(m.group(2)))
    m = re.fullmatch(r"arma:(\d+),(\d+)", text)
    if m:
        return ARMA(int(m.group(1)), int(m.group(2)))
    m = re.fullmatch(r"garch:(\d+),(\d+)", text)
    if m:
        return GARCH(int(m.group(1)), int(m.group(2)))
    m = re.fullmatch(r"arch:(\d+)", text)
    if m:
        return GARCH(int(m.group(1)), 0)
    m = re.fullmatch(rf"tar:{_INT_LIST}(?::d=(\d+))?(:c)?", text)
    if m:
        orders = [int(v) for v in m.group(1).split(",")]
        return TAR(orders, delay=int(m.group(2) or 1), intercept=bool(m.group(3)))
    raise ValueError(f"unrecognised model descriptor {descriptor!r}")


def _values(series):
    return getattr(series, "values", series)


def _f_n(series, split):
    if split is None:
        return None
    return getattr(split, "f_n", split)


def fit_model(family, series, split=None, response=None) -> FittedModel:
    """Fit ``family`` (descriptor or instance) on the fitting sample of ``split``."""
    return parse_model(family).fit(_values(series), _f_n(series, split), response)


def fit_constant(series, split=None) -> FittedModel:
    return Constant().fit(_values(series), _f_n(series, split))


def fit_ar(series, split=None, p: int = 1, intercept: bool = False) -> FittedModel:
    return AR(p, intercept).fit(_values(series), _f_n(series, split))


def fit_arma(series, split=None, p: int = 1, q: int = 1) -> FittedModel:
    return ARMA(p, q).fit(_values(series), _f_n(series, split))


def fit_garch(series, split=None, p: int = 1, q: int = 1) -> FittedModel:
    return GARCH(p, q).fit(_values(series), _f_n(series, split))


def fit_tar(series, split=None, regime_ar_orders=(1, 1, 1), delay: int = 1,
            threshold_grid=None, intercept: bool = False) -> FittedModel:
    family = TAR(regime_ar_orders, delay=delay, intercept=intercept, grid=threshold_grid)
    return family.fit(_values(series), _f_n(series, split))
