"""
Multiplier bootstrap for the split-sample tests and the full-sample
fixed-design wild bootstrap used as the re-estimating benchmark.
"""
from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field

import numpy as np

from . import streams
from .errors import (
    BootstrapEstimationFailure,
    DegenerateResidualsError,
    EstimationError,
    InvalidLevelError,
)
from .estimators import parse_model
from .spectral import GramStatistic
from .split import SIGMA_FLOOR, ResidualSet, _residual_scale, compute_residuals, make_split
from .weights import WeightKind, default_integrator

__all__ = [
    "MultiplierKind",
    "TestResult",
    "draw_multipliers",
    "multiplier_matrix",
    "p_value",
    "split_bootstrap_test",
    "split_sample_test",
    "full_sample_fdwb_test",
    "MAMMEN_LOW",
    "MAMMEN_HIGH",
    "MAMMEN_P_LOW",
]

SQRT5 = np.sqrt(5.0)
MAMMEN_LOW = (1.0 - SQRT5) / 2.0
MAMMEN_HIGH = (1.0 + SQRT5) / 2.0
MAMMEN_P_LOW = (1.0 + SQRT5) / (2.0 * SQRT5)
MAX_ATTEMPTS = 5
POSITIVE_FLOOR = 1e-12
_REFIT_ERRORS = (EstimationError, DegenerateResidualsError, np.linalg.LinAlgError, FloatingPointError)


class MultiplierKind(str, enum.Enum):
    """Two-point multiplier laws with mean 0 and variance 1."""

    MAMMEN = "mammen"
    RADEMACHER = "rademacher"

    @classmethod
    def parse(cls, value) -> "MultiplierKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"unknown multiplier {value!r}; use 'mammen' or 'rademacher'") from None


def draw_multipliers(kind, count: int, stream) -> np.ndarray:
    """
    Draw ``count`` i.i.d. multipliers.

    Parameters
    ----------
    kind : MultiplierKind or str
    count : int
        Number of draws, at least 1.
    stream : numpy.random.Generator, int or tuple
        Source of randomness; ints and tuples are turned into a keyed stream.

    Returns
    -------
    numpy.ndarray
    """
    kind = MultiplierKind.parse(kind)
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = streams.as_generator(stream)
    u = rng.random(count)
    if kind is MultiplierKind.MAMMEN:
        return np.where(u < MAMMEN_P_LOW, MAMMEN_LOW, MAMMEN_HIGH)
    return np.where(u < 0.5, -1.0, 1.0)


def _seed_key(seed) -> tuple:
    if isinstance(seed, (tuple, list)):
        return tuple(int(s) for s in seed)
    return (int(seed),)


def multiplier_matrix(kind, B: int, l_n: int, seed) -> np.ndarray:
    """``(B, l_n)`` multipliers; row ``b`` comes from the stream ``(seed, BOOT, b)``."""
    if callable(kind):
        return np.vstack([np.asarray(kind(b, l_n), dtype=float) for b in range(B)])
    key = _seed_key(seed)
    out = np.empty((B, l_n))
    for b in range(B):
        out[b] = draw_multipliers(kind, l_n, streams.stream(*key, streams.BOOT, b))
    return out


def p_value(statistic: float, draws) -> float:
    """Share of bootstrap draws at or above ``statistic``."""
    draws = np.asarray(draws, dtype=float)
    return float(np.count_nonzero(draws >= statistic)) / draws.size


def _check_level(alpha):
    if not 0.0 < alpha < 1.0:
        raise InvalidLevelError(f"alpha must lie in (0, 1), got {alpha!r}")


@dataclass(frozen=True)
class TestResult:
    """
    Outcome of one bootstrap test.

    ``reject`` applies the quantile rule: the statistic exceeds the
    empirical ``1 - alpha`` quantile of the draws.
    """

    __test__ = False  # keep pytest from collecting the class

    statistic: float
    boot_draws: np.ndarray
    p_value: float
    critical_value: float
    elapsed: float
    provenance: dict = field(default_factory=dict)

    @property
    def B(self) -> int:
        return int(self.boot_draws.size)

    @property
    def alpha(self) -> float:
        return float(self.provenance.get("alpha", np.nan))

    @property
    def reject(self) -> bool:
        return bool(self.statistic > self.critical_value)

    def to_dict(self, draws: bool = False) -> dict:
        out = {
            "statistic": float(self.statistic),
            "p_value": float(self.p_value),
            "critical_value": float(self.critical_value),
            "reject": self.reject,
            "B": self.B,
            "elapsed_s": float(self.elapsed),
            "provenance": dict(self.provenance),
        }
        if draws:
            out["boot_draws"] = [float(d) for d in self.boot_draws]
        return out


def _finish(stat, draws, alpha, started, provenance) -> TestResult:
    draws = np.asarray(draws, dtype=float)
    draws.setflags(write=False)
    crit = float(np.quantile(draws, 1.0 - alpha))
    return TestResult(float(stat), draws, p_value(stat, draws), crit,
                      time.perf_counter() - started, provenance)


def _provenance(seed, B, alpha, multiplier, weight, split, model, **extra) -> dict:
    weight = WeightKind.parse(weight)
    out = {
        "seed": list(_seed_key(seed)) if not isinstance(seed, int) else int(seed),
        "B": int(B),
        "alpha": float(alpha),
        "multiplier": multiplier if isinstance(multiplier, str) else getattr(multiplier, "value", "custom"),
        "weight": weight.value,
        "integrator": default_integrator(weight).value,
        "split": split.describe(),
        "model": model,
    }
    out.update(extra)
    return out


def split_bootstrap_test(res: ResidualSet, lagged=None, weight="indicator", B: int = 500,
                         multiplier="mammen", alpha: float = 0.05, seed=0,
                         gram: GramStatistic | None = None) -> TestResult:
    """
    Multiplier bootstrap test with the parameter estimate held fixed.

    Parameters
    ----------
    res : ResidualSet
        Checking-sample residuals of a model fitted on the fitting sample.
    lagged : array_like, optional
        Conditioning values replacing ``res.lagged``.
    weight : {"indicator", "cf"}
    B : int
        Number of bootstrap replications.
    multiplier : MultiplierKind, str or callable
        A callable ``f(b, l_n)`` supplies the multipliers of replication ``b``
        directly (useful for testing).
    alpha : float
        Level for the critical value.
    seed : int or tuple of int
        Key of the bootstrap streams.
    gram : GramStatistic, optional
        Precomputed aggregated kernel for these lagged values.

    Returns
    -------
    TestResult
    """
    started = time.perf_counter()
    _check_level(alpha)
    if B < 1:
        raise ValueError("B must be >= 1")
    weight = WeightKind.parse(weight)
    if lagged is not None:
        res = ResidualSet(res.residuals, res.sigma_e, np.asarray(lagged, dtype=float),
                          res.split, res.meta)
    if gram is None:
        gram = GramStatistic.from_residual_set(res, weight)
    stat = float(gram.evaluate(res.residuals, res.sigma_e)[0])
    mult = multiplier if callable(multiplier) else MultiplierKind.parse(multiplier)
    V = multiplier_matrix(mult, B, res.split.l_n, seed)
    draws = gram.evaluate(res.residuals, res.sigma_e, V)
    prov = _provenance(seed, B, alpha, mult, weight, res.split, res.meta.get("model"),
                       scheme="split")
    return _finish(stat, draws, alpha, started, prov)


def split_sample_test(series, model, split=None, weight="indicator", B: int = 500,
                      multiplier="mammen", alpha: float = 0.05, seed=0) -> TestResult:
    """
    Fit ``model`` on the fitting sample and run :func:`split_bootstrap_test`.

    The elapsed time covers estimation as well as the bootstrap.
    """
    started = time.perf_counter()
    y = np.asarray(series, dtype=float).ravel()
    split = make_split(y.size) if split is None else split
    fitted = parse_model(model).fit(y, split.f_n)
    res = compute_residuals(fitted, y, split)
    out = split_bootstrap_test(res, weight=weight, B=B, multiplier=multiplier, alpha=alpha, seed=seed)
    out.provenance["converged"] = fitted.converged
    object.__setattr__(out, "elapsed", time.perf_counter() - started)
    return out


def full_sample_fdwb_test(series, model_family, B: int = 500, multiplier="mammen",
                          alpha: float = 0.05, seed=0, weight="indicator") -> TestResult:
    """
    Fixed-design wild bootstrap on the full sample, re-estimating every draw.

    The model is fitted on all ``n`` points. Each replication forms
    ``Y*_t = m_t(theta_hat) + e_t V_t`` with the original regressors, refits,
    recomputes residuals and their scale, and evaluates the statistic. For
    variance models the bootstrap response lives on the squared scale and is
    floored at ``1e-12``. A failed refit is retried with fresh multipliers up
    to five times.
    """
    started = time.perf_counter()
    _check_level(alpha)
    if B < 1:
        raise ValueError("B must be >= 1")
    weight = WeightKind.parse(weight)
    mult = multiplier if callable(multiplier) else MultiplierKind.parse(multiplier)
    family = parse_model(model_family)
    y = np.asarray(series, dtype=float).ravel()
    split = make_split(y.size, "full")
    fitted = family.fit(y, split.n)
    res = compute_residuals(fitted, y, split)
    gram = GramStatistic.from_residual_set(res, weight)
    stat = float(gram.evaluate(res.residuals, res.sigma_e)[0])

    mean = fitted.conditional_mean(y)
    resid = family.response(y) - mean
    positive = getattr(family, "positive_response", False)
    key = _seed_key(seed)

    def bootstrap_response(b, attempt):
        if callable(mult):
            V = np.asarray(mult(b, split.n), dtype=float)
        else:
            V = draw_multipliers(mult, split.n, streams.stream(*key, streams.FDWB, b, attempt))
        y_star = mean + resid * V
        return np.maximum(y_star, POSITIVE_FLOOR) if positive else y_star

    draws = np.full(B, np.nan)
    failures = 0
    first_attempt = np.zeros(B, dtype=int)
    batch = family.fixed_design_refit(y, split.n)
    if batch is not None:
        # closed-form refits: one solve for every first-attempt draw
        Y_star = np.stack([bootstrap_response(b, 0) for b in range(B)])
        E_star = Y_star - batch(Y_star)
        sq = np.mean(E_star ** 2, axis=1)
        ok = np.isfinite(sq) & (np.sqrt(sq) >= SIGMA_FLOOR)
        if np.any(ok):
            draws[ok] = gram.evaluate_rows(E_star[ok], np.sqrt(sq[ok]))
        failures += int(np.sum(~ok))
        first_attempt[~ok] = 1
    for b in range(B):
        if batch is not None and first_attempt[b] == 0:
            continue
        for attempt in range(first_attempt[b], MAX_ATTEMPTS):
            y_star = bootstrap_response(b, attempt)
            try:
                refit = family.fit(y, split.n, response=y_star)
                e_star = y_star - refit.conditional_mean(y)
                sigma = _residual_scale(e_star)
            except _REFIT_ERRORS:
                failures += 1
                continue
            draws[b] = gram.evaluate(e_star, sigma)[0]
            break
        else:
            raise BootstrapEstimationFailure(
                f"replication {b} failed to re-estimate in {MAX_ATTEMPTS} attempts"
            )
    prov = _provenance(seed, B, alpha, mult, weight, split, family.descriptor,
                       scheme="full_fdwb", refit_failures=failures, converged=fitted.converged)
    return _finish(stat, draws, alpha, started, prov)
