"""GARCH(p, q) quasi-maximum likelihood on the squared-series recursion."""
from __future__ import annotations

import numba
import numpy as np
from scipy import optimize

from ..errors import ConstraintViolationError, DegenerateDataError, NonConvergenceError, SingularDesignError
from .base import ModelFamily

__all__ = ["GARCH", "garch_variance", "garch_quasi_loglik"]


@numba.njit(cache=True)
def garch_variance(omega, phi, psi, y2, backcast):
    """sigma2_t = omega + sum phi_i y2_{t-i} + sum psi_j sigma2_{t-j}, pre-sample = backcast."""
    n = y2.shape[0]
    p = phi.shape[0]
    q = psi.shape[0]
    s2 = np.empty(n)
    for t in range(n):
        v = omega
        for i in range(p):
            k = t - i - 1
            v += phi[i] * (y2[k] if k >= 0 else backcast)
        for j in range(q):
            k = t - j - 1
            v += psi[j] * (s2[k] if k >= 0 else backcast)
        s2[t] = v
    return s2


@numba.njit(cache=True)
def _neg_quasi_loglik(omega, phi, psi, y2, target, backcast):
    s2 = garch_variance(omega, phi, psi, y2, backcast)
    acc = 0.0
    for t in range(s2.shape[0]):
        if s2[t] <= 0.0:
            return np.inf
        acc += 0.5 * np.log(s2[t]) + 0.5 * target[t] / s2[t]
    return acc


def garch_quasi_loglik(theta, y, p, q, backcast) -> float:
    """Sum of ``-log sigma_t - y_t^2 / (2 sigma_t^2)`` at fixed ``theta``."""
    theta = np.asarray(theta, dtype=float)
    y2 = np.asarray(y, dtype=float) ** 2
    return -float(_neg_quasi_loglik(theta[0], theta[1:1 + p], theta[1 + p:1 + p + q], y2, y2, backcast))


class GARCH(ModelFamily):
    """
    GARCH(p, q) for a raw return series ``y``.

    The response is ``y**2`` and its conditional mean is the variance
    recursion, so residuals are ``y_t^2 - sigma_t^2``. theta = (omega,
    phi_1..phi_p, psi_1..psi_q). Pre-sample ``y^2`` and ``sigma^2`` are set
    to the fitting-sample variance of ``y``.
    """

    positive_response = True
    min_obs = 50
    maxiter = 2000
    fatol = 1e-9

    def __init__(self, p: int, q: int):
        if p < 1 or q < 0:
            raise ValueError("GARCH needs p >= 1 and q >= 0")
        self.p, self.q = int(p), int(q)
        self.n_params = 1 + self.p + self.q
        self.required_history = self.p
        self.descriptor = f"garch:{self.p},{self.q}"

    def response(self, y):
        return np.asarray(y, dtype=float) ** 2

    def backcast(self, y_fit):
        return float(np.var(y_fit))

    def split_theta(self, theta):
        theta = np.asarray(theta, dtype=float)
        return theta[0], np.ascontiguousarray(theta[1:1 + self.p]), np.ascontiguousarray(theta[1 + self.p:])

    def conditional_mean(self, theta, y, backcast):
        omega, phi, psi = self.split_theta(theta)
        return garch_variance(omega, phi, psi, self.response(y), backcast)

    # unconstrained z -> (omega, phi, psi): omega > 0, phi_i > 0, psi_j > 0 with
    # sum(psi) < 1; sum(phi) + sum(psi) is not bounded (strict stationarity only)
    def _unpack(self, z):
        z = np.clip(np.asarray(z, dtype=float), -50.0, 50.0)
        omega = np.exp(z[0])
        phi = np.exp(z[1:1 + self.p])
        b = np.r_[0.0, z[1 + self.p:]]
        b = np.exp(b - b.max())
        psi = b[1:] / b.sum()
        return np.r_[omega, phi, psi]

    def _pack(self, theta):
        theta = np.asarray(theta, dtype=float)
        psi = theta[1 + self.p:]
        slack = 1.0 - psi.sum()
        return np.r_[np.log(theta[0]), np.log(theta[1:1 + self.p]), np.log(psi / slack)]

    def _starts(self, y2, var):
        p, q = self.p, self.q
        if y2.size > 1 and np.std(y2) > 0:
            rho = float(np.corrcoef(y2[1:], y2[:-1])[0, 1])
        else:
            rho = 0.1
        out = []
        # moment-matched, high persistence, low persistence
        arch_tot = float(np.clip(rho, 0.05, 0.5))
        for a_tot, b_tot in ((arch_tot, max(0.9 - arch_tot, 0.05)), (0.05, 0.93), (0.15, 0.15)):
            if q == 0:
                a_tot, b_tot = min(a_tot + b_tot, 0.9), 0.0
            phi = np.full(p, a_tot / p)
            psi = np.full(q, b_tot / q) if q else np.empty(0)
            omega = max(var * (1.0 - a_tot - b_tot), 1e-8 * max(var, 1e-300))
            out.append(np.r_[omega, phi, psi])
        return out

    def _estimate(self, y_fit, r_fit, backcast):
        if y_fit.size < self.min_obs:
            raise SingularDesignError(f"GARCH needs f_n >= {self.min_obs}, got {y_fit.size}")
        y2 = y_fit ** 2
        if not np.any(y2 > 0):
            raise DegenerateDataError("series is identically zero")
        target = np.ascontiguousarray(r_fit, dtype=float)
        p = self.p
        var = float(np.var(y_fit))
        if var <= 0:
            var = float(np.mean(y2))
            backcast = var

        def objective(z):
            th = self._unpack(z)
            val = _neg_quasi_loglik(th[0], th[1:1 + p], th[1 + p:], y2, target, backcast)
            return val if np.isfinite(val) else 1e300

        best = None
        for theta0 in self._starts(y2, var):
            sol = optimize.minimize(objective, self._pack(theta0), method="Nelder-Mead",
                                    options={"maxiter": self.maxiter, "fatol": self.fatol,
                                             "xatol": 1e-7, "adaptive": self.n_params > 3})
            if best is None or sol.fun < best.fun:
                best = sol
        if not np.isfinite(best.fun) or best.fun >= 1e300:
            raise NonConvergenceError("quasi-likelihood not finite at any start")
        theta = self._unpack(best.x)
        if not (np.all(np.isfinite(theta)) and theta[0] > 0
                and np.all(theta[1:] > 0) and theta[1 + p:].sum() < 1.0):
            raise ConstraintViolationError("optimizer left the feasible region")
        return theta, float(best.fun), int(best.nit), bool(best.success), {"backcast_used": backcast}

    def fit(self, y, f_n=None, response=None):
        model = super().fit(y, f_n, response)
        used = model.info.get("backcast_used", model.backcast)
        if used != model.backcast:
            object.__setattr__(model, "backcast", used)
        return model
