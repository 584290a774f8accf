"""
Slow, literal reference implementations used as test oracles.

Everything here is written straight from the textbook sums with explicit
1-based time indices and no shared code with the package kernels.
"""
import math

import numpy as np


def _checking(n, L):
    return range(n - L + 1, n + 1)


def naive_indicator(y, e, L, sigma=None):
    """
    D_I by triple loop.

    ``y`` holds Y_1..Y_n (``y[t - 1]`` is Y_t); ``e`` maps a checking time
    ``t`` to its residual. Unobserved Y_0 is skipped.
    """
    n = len(y)
    times = list(_checking(n, L))
    if sigma is None:
        sigma = math.sqrt(sum(e[t] ** 2 for t in times) / L)

    def Y(t):
        return None if t < 1 else y[t - 1]

    total = 0.0
    for j in range(1, L + 1):
        n_j = L - j + 1
        inner = 0.0
        for t in times:
            x = Y(t - 1)
            if x is None:
                continue
            g = 0.0
            for k in range(n - L + j, n + 1):
                z = Y(k - j)
                if z is not None and z <= x:
                    g += e[k]
            g /= sigma * n_j
            inner += g * g
        total += n_j / (L * (j * math.pi) ** 2) * inner
    return total


def naive_cf(y, e, L, sigma=None):
    """D_C by the displayed double sum for every lag."""
    n = len(y)
    times = list(_checking(n, L))
    if sigma is None:
        sigma = math.sqrt(sum(e[t] ** 2 for t in times) / L)

    def Y(t):
        return None if t < 1 else y[t - 1]

    total = 0.0
    for j in range(1, L + 1):
        n_j = L - j + 1
        acc = 0.0
        for t in range(n - L + j, n + 1):
            for s in range(n - L + j, n + 1):
                a, b = Y(t - j), Y(s - j)
                if a is None or b is None:
                    continue
                acc += e[t] * e[s] * math.exp(-0.5 * (a - b) ** 2)
        total += acc / (sigma ** 2 * n_j * (j * math.pi) ** 2)
    return total


def quadrature_cf(y, e, L, sigma=None, n_hermite=200, n_lambda=2001):
    """
    Integrate |S_n(lambda, x)|^2 against dPhi(x) dlambda numerically.

    S_n(lambda, x) = sum_j sqrt(n_j) g_j(x) sqrt(2) sin(j pi lambda) / (j pi)
    with g_j(x) = (sigma n_j)^(-1) sum_t e_t exp(i x Y_{t-j}). The x integral
    uses probabilists' Gauss-Hermite nodes, the lambda integral the
    trapezoid rule on ``n_lambda`` points.
    """
    n = len(y)
    times = list(_checking(n, L))
    if sigma is None:
        sigma = math.sqrt(sum(e[t] ** 2 for t in times) / L)
    nodes, weights = np.polynomial.hermite_e.hermegauss(n_hermite)
    weights = weights / math.sqrt(2.0 * math.pi)
    lam = np.linspace(0.0, 1.0, n_lambda)
    S = np.zeros((n_lambda, n_hermite), dtype=complex)
    for j in range(1, L + 1):
        n_j = L - j + 1
        g = np.zeros(n_hermite, dtype=complex)
        for t in range(n - L + j, n + 1):
            if t - j >= 1:
                g += e[t] * np.exp(1j * nodes * y[t - j - 1])
        g /= sigma * n_j
        S += np.outer(math.sqrt(n_j) * math.sqrt(2.0) * np.sin(j * math.pi * lam) / (j * math.pi), g)
    inner = (np.abs(S) ** 2) @ weights
    return float(np.trapezoid(inner, lam) if hasattr(np, "trapezoid") else np.trapz(inner, lam))


def naive_gamma(j, y, e, L, w, x):
    """(1/n_j) sum_{t = n-L+j}^n e_t w(Y_{t-j}, x); j = 0 uses 1/L and Y_{t-1}."""
    n = len(y)
    acc = 0.0
    if j == 0:
        for t in _checking(n, L):
            if t - 1 >= 1:
                acc += e[t] * w(y[t - 2], x)
        return acc / L
    for t in range(n - L + j, n + 1):
        if t - j >= 1:
            acc += e[t] * w(y[t - j - 1], x)
    return acc / (L - j + 1)


def naive_h_hat(lam, y, e, L, w, x):
    h = naive_gamma(0, y, e, L, w, x) * lam
    for j in range(1, L + 1):
        n_j = L - j + 1
        h += 2 * naive_gamma(j, y, e, L, w, x) * math.sqrt(n_j / L) * math.sin(j * math.pi * lam) / (j * math.pi)
    return h


def long_division(num, den, K):
    """First K+1 coefficients of num(z)/den(z) by schoolbook long division."""
    num = list(num) + [0.0] * (K + 1)
    out = []
    for k in range(K + 1):
        c = num[k] / den[0]
        out.append(c)
        for i, d in enumerate(den):
            if k + i < len(num):
                num[k + i] -= c * d
    return np.array(out)


def garch_recursion(omega, phi, psi, y, init):
    """sigma^2 by hand with scalar loops; pre-sample y^2 and sigma^2 = init."""
    s2 = []
    for t in range(len(y)):
        v = omega
        for i, a in enumerate(phi, start=1):
            v += a * (y[t - i] ** 2 if t - i >= 0 else init)
        for k, b in enumerate(psi, start=1):
            v += b * (s2[t - k] if t - k >= 0 else init)
        s2.append(v)
    return np.array(s2)


def residual_map(res):
    """Checking-sample residuals of a ResidualSet keyed by 1-based time."""
    n, L = res.split.n, res.split.l_n
    return {t: float(res.residuals[t - (n - L + 1)]) for t in _checking(n, L)}
