"""
Compiled inner loops for the statistics and the multiplier bootstrap.

Index conventions: ``u`` holds (possibly multiplied) checking-sample
residuals, ``u[a]`` for ``t = n-l_n+1+a``. ``c`` holds the *available*
lagged values; ``c[k]`` is ``Y_{n-l_n+start+k}``. For lag ``j`` the pair
``(u[a], c[k])`` is admissible when ``a = k + start + j - 1``.

All loops run in a fixed order so results are bit-reproducible and do not
depend on how many replications are evaluated together.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def indicator_lag_sums(u, c, order, upper, start):
    """Per-lag ``sum_i (sum_k u[k+start+j-1] 1(c_k <= c_i))**2``.

    ``order`` sorts ``c``; ``upper[i]`` counts the ``c`` values ``<= c[i]``.
    """
    L = u.shape[0]
    m = c.shape[0]
    out = np.zeros(L)
    prefix = np.empty(m + 1)
    for j in range(1, L + 1):
        kmax = L - j - start
        if kmax < 0:
            continue
        shift = start + j - 1
        prefix[0] = 0.0
        for r in range(m):
            k = order[r]
            if k <= kmax:
                prefix[r + 1] = prefix[r] + u[k + shift]
            else:
                prefix[r + 1] = prefix[r]
        acc = 0.0
        for i in range(m):
            v = prefix[upper[i]]
            acc += v * v
        out[j - 1] = acc
    return out


@njit(cache=True)
def window_quadratic_forms(u, K, start):
    """Per-lag ``sum_{k,k'} u[k+s] u[k'+s] K[k,k']`` with ``s = start+j-1``,
    using symmetry of ``K``."""
    L = u.shape[0]
    out = np.zeros(L)
    for j in range(1, L + 1):
        kmax = L - j - start
        if kmax < 0:
            continue
        shift = start + j - 1
        acc = 0.0
        for k in range(kmax + 1):
            uk = u[k + shift]
            row = 0.0
            for k2 in range(k + 1, kmax + 1):
                row += K[k, k2] * u[k2 + shift]
            acc += uk * (K[k, k] * uk + 2.0 * row)
        out[j - 1] = acc
    return out


@njit(cache=True)
def gaussian_gram(c):
    m = c.shape[0]
    K = np.empty((m, m))
    for a in range(m):
        K[a, a] = 1.0
        for b in range(a + 1, m):
            d = c[a] - c[b]
            v = np.exp(-0.5 * d * d)
            K[a, b] = v
            K[b, a] = v
    return K


@njit(cache=True)
def min_count_gram(c):
    """``K[k,k'] = #{i : c_i >= max(c_k, c_k')}``."""
    m = c.shape[0]
    q = np.empty(m)
    for k in range(m):
        cnt = 0
        for i in range(m):
            if c[i] >= c[k]:
                cnt += 1
        q[k] = cnt
    K = np.empty((m, m))
    for a in range(m):
        for b in range(m):
            K[a, b] = min(q[a], q[b])
    return K


@njit(cache=True)
def aggregate_gram(K, lag_weight, start, L):
    """Collapse all lags into one ``L x L`` matrix ``G`` with
    ``u' G u = sum_j lag_weight[j-1] * window form of lag j``."""
    G = np.zeros((L, L))
    for a in range(L):
        for a2 in range(a, L):
            jmax = a - start + 1
            s = 0.0
            for j in range(1, jmax + 1):
                s += lag_weight[j - 1] * K[a - start - j + 1, a2 - start - j + 1]
            G[a, a2] = s
            G[a2, a] = s
    return G


@njit(cache=True)
def batched_quadratic_form(G, e, V):
    """``out[b] = w' G w`` with ``w = e * V[b]`` for every row of ``V``."""
    B = V.shape[0]
    L = e.shape[0]
    out = np.empty(B)
    w = np.empty(L)
    for b in range(B):
        for a in range(L):
            w[a] = e[a] * V[b, a]
        acc = 0.0
        for a in range(L):
            row = 0.0
            for a2 in range(a + 1, L):
                row += G[a, a2] * w[a2]
            acc += w[a] * (G[a, a] * w[a] + 2.0 * row)
        out[b] = acc
    return out


@njit(cache=True)
def batched_quadratic_form_rows(G, U):
    """``out[b] = U[b]' G U[b]``."""
    B = U.shape[0]
    L = U.shape[1]
    out = np.empty(B)
    for b in range(B):
        acc = 0.0
        for a in range(L):
            row = 0.0
            for a2 in range(a + 1, L):
                row += G[a, a2] * U[b, a2]
            acc += U[b, a] * (G[a, a] * U[b, a] + 2.0 * row)
        out[b] = acc
    return out
