"""Self-exciting threshold AR with least-squares grid search over thresholds."""
from __future__ import annotations

import itertools

import numpy as np

from ..errors import NoAdmissibleThresholdError
from .base import ModelFamily, lag_matrix

__all__ = ["TAR", "default_threshold_grid"]


def default_threshold_grid(z) -> np.ndarray:
    """Empirical 10%..90% quantiles of ``z`` in 2-point steps, duplicates dropped."""
    return np.unique(np.quantile(np.asarray(z, dtype=float), np.arange(10, 91, 2) / 100.0))


class TAR(ModelFamily):
    """
    k-regime SETAR with regime chosen by ``Y_{t-d}``.

    Regime ``i`` (0-based) holds when exactly ``i`` thresholds are
    ``<= Y_{t-d}``. theta = regime blocks ``([c_i,] phi_i1..phi_ip_i)`` in
    regime order followed by the ``k - 1`` increasing thresholds.
    """

    def __init__(self, orders, delay: int = 1, intercept: bool = False, grid=None):
        orders = tuple(int(o) for o in orders)
        if len(orders) < 2 or min(orders) < 0 or delay < 1:
            raise ValueError("TAR needs at least two regimes, orders >= 0 and delay >= 1")
        if not intercept and min(orders) == 0:
            raise ValueError("a regime without intercept needs order >= 1")
        self.orders = orders
        self.delay = int(delay)
        self.intercept = bool(intercept)
        self.grid = None if grid is None else np.sort(np.asarray(grid, dtype=float))
        self.k = len(orders)
        self.block_sizes = tuple(o + int(self.intercept) for o in orders)
        self.n_params = sum(self.block_sizes) + self.k - 1
        self.required_history = max(max(orders), self.delay)
        self.descriptor = (f"tar:{','.join(map(str, orders))}:d={self.delay}"
                           + (":c" if self.intercept else ""))

    def backcast(self, y_fit):
        return float(np.mean(y_fit)) if self.intercept else 0.0

    def blocks(self, theta):
        theta = np.asarray(theta, dtype=float)
        out, pos = [], 0
        for size in self.block_sizes:
            out.append(theta[pos:pos + size])
            pos += size
        return out, theta[pos:]

    def _designs(self, y, backcast):
        pmax = max(self.orders)
        L = lag_matrix(y, max(pmax, self.delay), backcast)
        z = L[:, self.delay - 1]
        X = L[:, :pmax]
        if self.intercept:
            X = np.column_stack([np.ones(y.size), X])
        return X, z

    def _regime_columns(self, i):
        c = int(self.intercept)
        return slice(0, c + self.orders[i])

    def conditional_mean(self, theta, y, backcast):
        X, z = self._designs(y, backcast)
        coefs, thr = self.blocks(theta)
        regime = np.searchsorted(thr, z, side="right")
        m = np.empty(y.size)
        for i in range(self.k):
            mask = regime == i
            m[mask] = X[mask][:, self._regime_columns(i)] @ coefs[i]
        return m

    def _estimate(self, y_fit, r_fit, backcast):
        P = self.required_history
        X, z = self._designs(y_fit, backcast)
        X, z, target = X[P:], z[P:], r_fit[P:]
        grid = self.grid if self.grid is not None else default_threshold_grid(z)
        min_obs = max(self.orders) + 5
        cols = [X[:, self._regime_columns(i)] for i in range(self.k)]

        best_ssr, best = np.inf, None
        cache = {}
        order = np.argsort(z, kind="stable")
        zs = z[order]

        def regime_fit(i, lo, hi):
            # observations with thr[lo] <= z < thr[hi] remain cached per (regime, bounds)
            key = (i, lo, hi)
            if key not in cache:
                a = 0 if lo is None else np.searchsorted(zs, grid[lo], side="left")
                b = zs.size if hi is None else np.searchsorted(zs, grid[hi], side="left")
                idx = order[a:b]
                res = None
                if idx.size >= min_obs:
                    Xi = cols[i][idx]
                    if np.linalg.matrix_rank(Xi) == Xi.shape[1]:
                        beta, *_ = np.linalg.lstsq(Xi, target[idx], rcond=None)
                        r = target[idx] - Xi @ beta
                        res = (float(r @ r), beta)
                cache[key] = res
            return cache[key]

        for combo in itertools.combinations(range(grid.size), self.k - 1):
            bounds = (None,) + combo + (None,)
            total, betas = 0.0, []
            for i in range(self.k):
                fit = regime_fit(i, bounds[i], bounds[i + 1])
                if fit is None:
                    break
                total += fit[0]
                betas.append(fit[1])
            else:
                if total < best_ssr:
                    best_ssr, best = total, (betas, grid[list(combo)])
        if best is None:
            raise NoAdmissibleThresholdError("no threshold tuple leaves every regime estimable")
        betas, thr = best
        return np.concatenate(betas + [thr]), best_ssr, 1, True, {"grid_size": int(grid.size)}
