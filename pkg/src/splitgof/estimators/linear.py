"""Constant-mean, AR(p) least squares and ARMA(p, q) conditional sum of squares."""
from __future__ import annotations

import warnings

import numpy as np
from scipy import optimize, signal

from ..errors import NonConvergenceError, SingularDesignError
from . import base
from .base import ModelFamily, lag_matrix

__all__ = [
    "Constant",
    "AR",
    "ARMA",
    "pi_coefficients",
    "BoundarySolutionWarning",
    "ols",
]

COND_LIMIT = 1e12


class BoundarySolutionWarning(UserWarning):
    pass


def ols(X, y):
    """Least squares via the normal equations, refusing ill-conditioned designs."""
    XtX = X.T @ X
    if X.shape[0] < X.shape[1] or not np.all(np.isfinite(XtX)):
        raise SingularDesignError("design has fewer rows than columns")
    if np.linalg.cond(XtX) > COND_LIMIT:
        raise SingularDesignError("normal-equations matrix is rank deficient")
    beta = np.linalg.solve(XtX, X.T @ y)
    resid = y - X @ beta
    return beta, float(resid @ resid)


class Constant(ModelFamily):
    """``Y_t = mu + e_t``; theta = (mu,)."""

    descriptor = "const"
    n_params = 1
    required_history = 0

    def conditional_mean(self, theta, y, backcast):
        return np.full(y.size, theta[0])

    def _estimate(self, y_fit, r_fit, backcast):
        if r_fit.size < 2:
            raise SingularDesignError("constant mean needs at least two observations")
        mu = float(np.mean(r_fit))
        return np.array([mu]), float(np.sum((r_fit - mu) ** 2)), 1, True, {}


class AR(ModelFamily):
    """
    ``Y_t = [c] + sum_k phi_k Y_{t-k} + e_t`` fitted by OLS over ``t = p+1..f_n``.

    theta = ([c,] phi_1..phi_p). Pre-sample values are set to the
    fitting-sample mean when an intercept is present and to zero otherwise.
    """

    def __init__(self, p: int, intercept: bool = False):
        if p < 0:
            raise ValueError("AR order must be >= 0")
        self.p = int(p)
        self.intercept = bool(intercept)
        self.n_params = self.p + int(self.intercept)
        self.required_history = self.p
        self.descriptor = f"ar:{self.p}" + (":c" if self.intercept else "")
        if self.n_params == 0:
            raise ValueError("AR(0) without intercept has no parameters")

    def backcast(self, y_fit):
        return float(np.mean(y_fit)) if self.intercept else 0.0

    def design(self, y, backcast):
        X = lag_matrix(y, self.p, backcast)
        if self.intercept:
            X = np.column_stack([np.ones(y.size), X])
        return X

    def conditional_mean(self, theta, y, backcast):
        return self.design(y, backcast) @ theta

    def _estimate(self, y_fit, r_fit, backcast):
        f_n = y_fit.size
        if f_n <= self.p + 2:
            raise SingularDesignError(f"need f_n > p + 2, got f_n={f_n}, p={self.p}")
        X = self.design(y_fit, backcast)[self.p:]
        target = r_fit[self.p:]
        if self.p and np.any(np.ptp(X[:, int(self.intercept):], axis=0) == 0.0):
            raise SingularDesignError("a lagged regressor has zero variance")
        beta, ssr = ols(X, target)
        return beta, ssr, 1, True, {}

    def fixed_design_refit(self, y, f_n=None):
        """
        Least-squares refits for many responses sharing the regressors of ``y``.

        Returns a callable taking responses of shape ``(B, n)`` and returning
        the refitted conditional means, same shape. Each row counts as one
        estimator call and matches ``fit(y, f_n, response=row)``.
        """
        y = np.asarray(y, dtype=float)
        f_n = y.size if f_n is None else int(f_n)
        y_fit = y[:f_n]
        backcast = self.backcast(y_fit)
        X = self.design(y_fit, backcast)[self.p:]
        XtX = X.T @ X
        if f_n <= self.p + 2 or np.linalg.cond(XtX) > COND_LIMIT:
            return None
        X_all = self.design(y, backcast)

        def refit(responses):
            R = np.atleast_2d(responses)
            base._FIT_CALLS[0] += R.shape[0]
            beta = np.linalg.solve(XtX, X.T @ R[:, self.p:f_n].T)
            return (X_all @ beta).T

        return refit


def _pacf_to_ar(x):
    """Map unconstrained values to coefficients of a stationary ``1 - sum a_k z^k``."""
    r = np.tanh(np.asarray(x, dtype=float) / 2.0)
    a = r.copy()
    for j in range(1, r.size):
        prev = a[:j].copy()
        a[:j] = prev - r[j] * prev[::-1]
    return a


def _ar_to_pacf(a, clip=0.99):
    a = np.array(a, dtype=float)
    r = np.empty(a.size)
    for k in range(a.size - 1, -1, -1):
        r[k] = np.clip(a[k], -clip, clip)
        if k:
            a[:k] = (a[:k] + r[k] * a[:k][::-1]) / (1.0 - r[k] ** 2)
    return 2.0 * np.arctanh(r)


def pi_coefficients(phi, psi, K: int) -> np.ndarray:
    """
    Coefficients ``pi_0..pi_K`` of ``phi(z) / psi(z)`` with
    ``phi(z) = 1 - sum phi_k z^k`` and ``psi(z) = 1 + sum psi_l z^l``.
    """
    phi = np.asarray(phi, dtype=float)
    psi = np.asarray(psi, dtype=float)
    pi = np.zeros(K + 1)
    pi[0] = 1.0
    for k in range(1, K + 1):
        acc = -phi[k - 1] if k <= phi.size else 0.0
        for l in range(1, min(k, psi.size) + 1):
            acc -= psi[l - 1] * pi[k - l]
        pi[k] = acc
    return pi


class ARMA(ModelFamily):
    """
    ``Y_t = sum phi_k Y_{t-k} + e_t + sum psi_l e_{t-l}``, no intercept.

    Residuals follow the truncated AR(infinity) expansion
    ``e_t = Y_t + sum_{k=1}^{t-1} pi_k Y_{t-k}``. theta = (phi_1..phi_p,
    psi_1..psi_q). Estimation minimises the conditional sum of squares over
    ``t = 1..f_n`` inside the causal and invertible region.
    """

    max_nfev = 2000

    def __init__(self, p: int, q: int):
        if p < 0 or q < 0 or p + q == 0:
            raise ValueError("ARMA needs p, q >= 0 with p + q > 0")
        self.p, self.q = int(p), int(q)
        self.n_params = self.p + self.q
        self.required_history = max(self.p, self.q)
        self.descriptor = f"arma:{self.p},{self.q}"

    def _polys(self, theta):
        phi, psi = theta[: self.p], theta[self.p:]
        return np.r_[1.0, -phi], np.r_[1.0, psi]

    def innovations(self, theta, y):
        b, a = self._polys(np.asarray(theta, dtype=float))
        return signal.lfilter(b, a, y)

    def conditional_mean(self, theta, y, backcast):
        return y - self.innovations(theta, y)

    def _unpack(self, x):
        phi = _pacf_to_ar(x[: self.p]) if self.p else np.empty(0)
        psi = -_pacf_to_ar(x[self.p:]) if self.q else np.empty(0)
        return np.r_[phi, psi]

    def _pack(self, theta):
        parts = []
        if self.p:
            parts.append(_ar_to_pacf(theta[: self.p]))
        if self.q:
            parts.append(_ar_to_pacf(-np.asarray(theta[self.p:])))
        return np.concatenate(parts)

    def _start_values(self, y):
        """Hannan-Rissanen two-stage regression."""
        n = y.size
        m = min(max(10, 2 * (self.p + self.q)), n // 4)
        X = lag_matrix(y, m, 0.0)[m:]
        try:
            beta, _ = ols(X, y[m:])
        except SingularDesignError:
            return np.zeros(self.n_params)
        eps = np.zeros(n)
        eps[m:] = y[m:] - X @ beta
        cols = [lag_matrix(y, self.p, 0.0)] if self.p else []
        if self.q:
            cols.append(lag_matrix(eps, self.q, 0.0))
        Z = np.column_stack(cols)[m + self.q:]
        try:
            theta, _ = ols(Z, y[m + self.q:])
        except SingularDesignError:
            return np.zeros(self.n_params)
        return theta

    def _estimate(self, y_fit, r_fit, backcast):
        f_n = y_fit.size
        if f_n <= 10 * (self.p + self.q):
            raise SingularDesignError(f"need f_n > 10(p+q), got f_n={f_n}")
        offset = r_fit - y_fit

        def resid(x):
            return offset + self.innovations(self._unpack(x), y_fit)

        best = None
        for theta0 in (self._start_values(y_fit), np.zeros(self.n_params)):
            x0 = self._pack(theta0)
            sol = optimize.least_squares(resid, x0, method="trf", max_nfev=self.max_nfev,
                                         ftol=1e-12, xtol=1e-12, gtol=1e-12)
            if best is None or sol.cost < best.cost:
                best = sol
        if best.status <= 0:
            raise NonConvergenceError(f"CSS did not converge: {best.message}")
        theta = self._unpack(best.x)
        self._warn_boundary(theta)
        return theta, 2.0 * best.cost, best.nfev, True, {}

    def _warn_boundary(self, theta, tol=1e-3):
        b, a = self._polys(theta)
        for name, poly in (("AR", b), ("MA", a)):
            if poly.size > 1 and np.any(poly[1:]):
                roots = np.roots(poly[::-1])
                if roots.size and np.min(np.abs(roots)) < 1.0 + tol:
                    warnings.warn(f"{name} root within {tol} of the unit circle",
                                  BoundarySolutionWarning, stacklevel=3)
