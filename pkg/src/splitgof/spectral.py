"""
Generalized spectral moments, the diagnostic process and the Cramer-von
Mises statistics for the indicator and complex-exponential weights.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import GridOutOfRangeError, KernelMemoryError, LagOutOfRangeError
from .split import ResidualSet
from .weights import IntegratorKind, WeightKind, default_integrator, eval_weight

__all__ = [
    "SpectralWeights",
    "StatisticValue",
    "GramStatistic",
    "gamma_hat",
    "statistic_indicator",
    "statistic_cf",
    "statistic",
    "gram_statistic",
    "h_hat_diagnostic",
    "centered_process",
    "DEFAULT_MEMORY_BUDGET",
]

DEFAULT_MEMORY_BUDGET = 2 * 1024 ** 3


@dataclass(frozen=True)
class SpectralWeights:
    """Deterministic lag weights ``1/(j pi)^2`` and the finite-sample
    correction ``sqrt(n_j / l_n)`` for lags ``1..max_lag``."""

    max_lag: int

    @property
    def lags(self) -> np.ndarray:
        return np.arange(1, self.max_lag + 1)

    def lag_weight(self, j=None):
        j = self.lags if j is None else np.asarray(j)
        return 1.0 / (j * np.pi) ** 2

    def n_j(self, j=None):
        j = self.lags if j is None else np.asarray(j)
        return self.max_lag - j + 1

    def correction(self, j=None):
        return np.sqrt(self.n_j(j) / self.max_lag)


@dataclass(frozen=True)
class StatisticValue:
    value: float
    per_lag: np.ndarray
    weight: WeightKind
    integrator: IntegratorKind

    def __float__(self):
        return self.value


def _lagged_values(res: ResidualSet, lagged):
    lagged = res.lagged if lagged is None else np.asarray(lagged, dtype=float)
    if lagged.shape != (res.split.l_n,):
        raise ValueError("lagged values must have length l_n")
    c = np.ascontiguousarray(lagged[res.start:])
    if not np.all(np.isfinite(c)):
        raise ValueError("lagged values must be finite where observed")
    return c


def _weighted_residuals(res: ResidualSet, multipliers):
    if multipliers is None:
        return np.ascontiguousarray(res.residuals, dtype=float)
    v = np.asarray(multipliers, dtype=float)
    if v.shape != res.residuals.shape:
        raise ValueError("multipliers must have length l_n")
    return np.ascontiguousarray(res.residuals * v)


def gamma_hat(j: int, res: ResidualSet, x: float, kind=WeightKind.INDICATOR,
              multipliers=None, lagged=None) -> complex:
    """
    Lag-``j`` weighted moment ``(1/n_j) sum_t e_t V_t w(Y_{t-j}, x)``.

    The sum runs over checking-sample ``t`` whose lag ``Y_{t-j}`` is
    observed. Residuals are not standardised.
    """
    L = res.split.l_n
    if not 1 <= j <= L:
        raise LagOutOfRangeError(f"lag {j} outside 1..{L}")
    u = _weighted_residuals(res, multipliers)
    lag_vals = res.lagged if lagged is None else np.asarray(lagged, dtype=float)
    a = np.arange(res.start + j - 1, L)
    z = lag_vals[a - j + 1]
    return complex(np.sum(u[a] * eval_weight(kind, z, x)) / (L - j + 1))


def statistic_indicator(res: ResidualSet, lagged=None, multipliers=None) -> StatisticValue:
    """
    Indicator-weight statistic integrated against the empirical CDF of the
    lagged checking-sample values.

    Each lag costs one pass over a prefix-sum array built from a single sort
    of the lagged values, so the whole statistic is ``O(l_n^2)``.
    """
    L = res.split.l_n
    c = _lagged_values(res, lagged)
    u = _weighted_residuals(res, multipliers)
    order = np.argsort(c, kind="stable")
    upper = np.searchsorted(c[order], c, side="right")
    sums = _kernels.indicator_lag_sums(u, c, order, upper, res.start)
    sw = SpectralWeights(L)
    per_lag = sums * sw.lag_weight() / (L * sw.n_j() * res.sigma_e ** 2)
    return StatisticValue(float(np.sum(per_lag)), per_lag, WeightKind.INDICATOR,
                          IntegratorKind.EMPIRICAL_CDF)


def _check_budget(m: int, budget: int, what: str):
    need = 8 * m * m
    if need > budget:
        raise KernelMemoryError(
            f"{what} needs {need / 2**20:.1f} MiB, over the {budget / 2**20:.1f} MiB budget"
        )


def statistic_cf(res: ResidualSet, lagged=None, multipliers=None,
                 memory_budget: int = DEFAULT_MEMORY_BUDGET) -> StatisticValue:
    """
    Complex-exponential statistic integrated against the standard normal CDF,
    evaluated in closed form through the Gaussian kernel
    ``exp(-(Y_a - Y_b)^2 / 2)``.
    """
    L = res.split.l_n
    c = _lagged_values(res, lagged)
    _check_budget(c.size, memory_budget, "kernel matrix")
    u = _weighted_residuals(res, multipliers)
    K = _kernels.gaussian_gram(c)
    forms = _kernels.window_quadratic_forms(u, K, res.start)
    sw = SpectralWeights(L)
    per_lag = forms * sw.lag_weight() / (sw.n_j() * res.sigma_e ** 2)
    return StatisticValue(float(np.sum(per_lag)), per_lag, WeightKind.COMPLEX_EXP,
                          IntegratorKind.STANDARD_NORMAL)


def statistic(res: ResidualSet, kind, lagged=None, multipliers=None, **kwargs) -> StatisticValue:
    kind = WeightKind.parse(kind)
    if kind is WeightKind.INDICATOR:
        return statistic_indicator(res, lagged, multipliers)
    return statistic_cf(res, lagged, multipliers, **kwargs)


class GramStatistic:
    """
    A statistic collapsed to a single quadratic form ``u' G u / sigma^2``.

    ``G`` depends only on the lagged values and the split, so it is built once
    per dataset and then shared by every bootstrap replication, each of which
    costs ``O(l_n^2)``. Instances are read-only after construction.
    """

    def __init__(self, lagged_available: np.ndarray, l_n: int, start: int, kind,
                 memory_budget: int = DEFAULT_MEMORY_BUDGET):
        self.kind = WeightKind.parse(kind)
        c = np.ascontiguousarray(lagged_available, dtype=float)
        _check_budget(max(c.size, l_n), memory_budget // 2, "aggregated kernel")
        sw = SpectralWeights(l_n)
        if self.kind is WeightKind.INDICATOR:
            K = _kernels.min_count_gram(c)
            lag_weight = sw.lag_weight() / (l_n * sw.n_j())
        else:
            K = _kernels.gaussian_gram(c)
            lag_weight = sw.lag_weight() / sw.n_j()
        self.G = _kernels.aggregate_gram(K, np.ascontiguousarray(lag_weight), start, l_n)
        self.G.setflags(write=False)
        self.l_n = l_n

    @classmethod
    def from_residual_set(cls, res: ResidualSet, kind, **kwargs) -> "GramStatistic":
        return cls(res.available_lagged, res.split.l_n, res.start, kind, **kwargs)

    def evaluate(self, residuals, sigma_e: float, multipliers=None) -> np.ndarray:
        """Statistic for each row of ``multipliers`` (shape ``(B, l_n)``);
        ``None`` means a single row of ones."""
        e = np.ascontiguousarray(residuals, dtype=float)
        if multipliers is None:
            multipliers = np.ones((1, e.size))
        V = np.ascontiguousarray(np.atleast_2d(multipliers), dtype=float)
        return _kernels.batched_quadratic_form(self.G, e, V) / sigma_e ** 2

    def evaluate_rows(self, residual_rows, sigmas) -> np.ndarray:
        """Statistic for each row of residuals with its own scale."""
        U = np.ascontiguousarray(np.atleast_2d(residual_rows), dtype=float)
        return _kernels.batched_quadratic_form_rows(self.G, U) / np.asarray(sigmas) ** 2


def gram_statistic(res: ResidualSet, kind, **kwargs) -> GramStatistic:
    return GramStatistic.from_residual_set(res, kind, **kwargs)


def _check_lambda(lams):
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    if lams.size == 0:
        raise GridOutOfRangeError("empty lambda grid")
    if np.any((lams < 0) | (lams > 1)):
        raise GridOutOfRangeError("lambda values must lie in [0, 1]")
    return lams


def _gamma_matrix(res: ResidualSet, kind, xs, standardize=False, lagged=None):
    """Rows ``j = 0..l_n``, columns ``x``: the weighted moments."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if xs.size == 0:
        raise GridOutOfRangeError("empty x grid")
    L = res.split.l_n
    lag_vals = res.lagged if lagged is None else np.asarray(lagged, dtype=float)
    e = res.residuals / res.sigma_e if standardize else res.residuals
    out = np.zeros((L + 1, xs.size), dtype=complex)
    a0 = np.arange(res.start, L)
    out[0] = e[a0] @ eval_weight(kind, lag_vals[a0][:, None], xs[None, :]) / L
    for j in range(1, L + 1):
        a = np.arange(res.start + j - 1, L)
        if a.size:
            w = eval_weight(kind, lag_vals[a - j + 1][:, None], xs[None, :])
            out[j] = e[a] @ w / (L - j + 1)
    return out


def h_hat_diagnostic(res: ResidualSet, lagged=None, kind=WeightKind.INDICATOR,
                     grid=None) -> np.ndarray:
    """
    Sample generalized spectral distribution on a ``(lambda, x)`` grid.

    Returns a complex array of shape ``(len(lambdas), len(xs))``.
    """
    if grid is None:
        raise GridOutOfRangeError("grid=(lambdas, xs) is required")
    lams = _check_lambda(grid[0])
    gam = _gamma_matrix(res, kind, grid[1], lagged=lagged)
    sw = SpectralWeights(res.split.l_n)
    j = sw.lags
    basis = 2.0 * np.sin(np.outer(lams, j) * np.pi) / (j * np.pi) * sw.correction()
    return np.outer(lams, gam[0]) + basis @ gam[1:]


def centered_process(res: ResidualSet, kind, lambdas, xs, standardize=True,
                     lagged=None) -> np.ndarray:
    """``S(lambda, x) = sum_j sqrt(n_j) gamma_j(x) sqrt(2) sin(j pi lambda)/(j pi)``;
    with ``standardize`` the residuals are divided by ``sigma_e`` first."""
    lams = _check_lambda(lambdas)
    gam = _gamma_matrix(res, kind, xs, standardize, lagged=lagged)
    sw = SpectralWeights(res.split.l_n)
    j = sw.lags
    basis = np.sqrt(2.0) * np.sin(np.outer(lams, j) * np.pi) / (j * np.pi) * np.sqrt(sw.n_j())
    return basis @ gam[1:]
