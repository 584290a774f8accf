"""
Seeded simulators for the data-generating processes of the Monte Carlo
study and a local-alternative wrapper.

Each process is a short Python recursion over innovations drawn up front
from a counter-based stream, so a path depends only on ``(spec, n, seed)``.
Mean-type processes accept an additive drift ``a_t / sqrt(l_n)`` that
is injected inside the recursion, where ``a_t`` is a function of past values.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import streams
from .errors import ExplosivePathError
from .split import MIN_LENGTH, Series

__all__ = [
    "DgpSpec",
    "DgpInfo",
    "REGISTRY",
    "available",
    "dgp",
    "simulate",
    "simulate_local_alternative",
    "parse_drift",
    "temmap_step",
    "logistic_step",
]

EXPLOSIVE_BOUND = 1e12
SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


def temmap_step(y: float, alpha: float = 0.49999) -> float:
    """One step of the skewed tent map on ``[0, 1]``."""
    return y / alpha if y < alpha else (1.0 - y) / (1.0 - alpha)


def logistic_step(y: float, r: float = 4.0) -> float:
    return r * y * (1.0 - y)


def _sign(x):
    return 1.0 if x > 0 else (-1.0 if x < 0 else 0.0)


# Each generator fills and returns an array of ``N`` values.  ``shift`` is
# either None or a callable ``shift(y, t)`` giving the drift added at ``t``.

def _linear_ar(coefs):
    coefs = tuple(coefs)

    def gen(params, N, rng, shift, init):
        phi = params
        e = rng.standard_normal(N)
        y = np.zeros(N)
        p = len(phi)
        for t in range(p, N):
            acc = e[t]
            for k in range(p):
                acc += phi[k] * y[t - k - 1]
            y[t] = acc
            if shift is not None:
                y[t] += shift(y, t)
        return y

    return gen, coefs


def _gen_ar1_exp(params, N, rng, shift, init):
    (phi,) = params
    e = rng.standard_exponential(N) - 1.0
    y = np.zeros(N)
    for t in range(1, N):
        y[t] = phi * y[t - 1] + e[t]
        if shift is not None:
            y[t] += shift(y, t)
    return y


def _gen_ar1_het(params, N, rng, shift, init):
    phi, h0, h1 = params
    e = rng.standard_normal(N)
    y = np.zeros(N)
    for t in range(1, N):
        h = math.sqrt(h0 + h1 * y[t - 1] ** 2)
        y[t] = phi * y[t - 1] + h * e[t]
        if shift is not None:
            y[t] += shift(y, t)
    return y


def _gen_ar1_bil(params, N, rng, shift, init):
    phi, b = params
    e = rng.standard_normal(N)
    y = np.zeros(N)
    for t in range(1, N):
        y[t] = phi * y[t - 1] + b * y[t - 1] * e[t] + e[t]
        if shift is not None:
            y[t] += shift(y, t)
    return y


def _gen_arma11(params, N, rng, shift, init):
    phi, psi = params
    e = rng.standard_normal(N)
    y = np.zeros(N)
    for t in range(1, N):
        y[t] = phi * y[t - 1] + psi * e[t - 1] + e[t]
        if shift is not None:
            y[t] += shift(y, t)
    return y


def _gen_bil(params, N, rng, shift, init):
    phi, b = params
    e = rng.standard_normal(N)
    y = np.zeros(N)
    for t in range(2, N):
        y[t] = phi * y[t - 1] + b * e[t - 1] * y[t - 2] + e[t]
        if shift is not None:
            y[t] += shift(y, t)
    return y


def _gen_nlma(params, N, rng, shift, init):
    phi, b = params
    e = rng.standard_normal(N)
    y = np.zeros(N)
    for t in range(2, N):
        y[t] = phi * y[t - 1] + b * e[t - 1] * e[t - 2] + e[t]
        if shift is not None:
            y[t] += shift(y, t)
    return y


def _gen_tar2(params, N, rng, shift, init):
    lo_coef, hi_coef, r = params
    e = rng.standard_normal(N)
    y = np.zeros(N)
    for t in range(1, N):
        coef = lo_coef if y[t - 1] < r else hi_coef
        y[t] = coef * y[t - 1] + e[t]
        if shift is not None:
            y[t] += shift(y, t)
    return y


def _gen_tar3(params, N, rng, shift, init):
    c1, c2, c3, r1, r2 = params
    e = rng.standard_normal(N)
    y = np.zeros(N)
    for t in range(1, N):
        prev = y[t - 1]
        coef = c1 if prev < r1 else (c2 if prev < r2 else c3)
        y[t] = coef * prev + e[t]
        if shift is not None:
            y[t] += shift(y, t)
    return y


def _gen_sign(params, N, rng, shift, init):
    (scale,) = params
    e = rng.standard_normal(N)
    y = np.zeros(N)
    for t in range(1, N):
        y[t] = _sign(y[t - 1]) + scale * e[t]
        if shift is not None:
            y[t] += shift(y, t)
    return y


def _gen_nar(params, N, rng, shift, init):
    phi, b, freq = params
    e = rng.standard_normal(N)
    y = np.zeros(N)
    for t in range(2, N):
        y[t] = phi * y[t - 1] + b * math.sin(freq * math.pi * y[t - 2]) + e[t]
        if shift is not None:
            y[t] += shift(y, t)
    return y


def _map_generator(step):
    def gen(params, N, rng, shift, init):
        y = np.empty(N)
        y0 = rng.uniform() if init is None else float(init)
        prev = y0
        for t in range(N):
            prev = step(prev, *params)
            y[t] = prev
        return y

    return gen


def _gen_arch(params, N, rng, shift, init):
    omega, *phi = params
    p = len(phi)
    eta = rng.standard_normal(N)
    y = np.zeros(N)
    for t in range(N):
        s2 = omega
        for i in range(p):
            if t - i - 1 >= 0:
                s2 += phi[i] * y[t - i - 1] ** 2
        y[t] = math.sqrt(s2) * eta[t]
    return y


def _garch_generator(p, q):
    def gen(params, N, rng, shift, init):
        omega = params[0]
        phi = params[1:1 + p]
        psi = params[1 + p:1 + p + q]
        eta = rng.standard_normal(N)
        persistence = sum(phi) + sum(psi)
        s2_0 = omega / (1.0 - persistence) if persistence < 1 else omega
        y = np.zeros(N)
        s2 = np.full(N, s2_0)
        for t in range(N):
            v = omega
            for i in range(p):
                v += phi[i] * (y[t - i - 1] ** 2 if t - i - 1 >= 0 else s2_0)
            for j in range(q):
                v += psi[j] * (s2[t - j - 1] if t - j - 1 >= 0 else s2_0)
            s2[t] = v
            y[t] = math.sqrt(v) * eta[t]
        return y

    return gen


def _gen_egarch11(params, N, rng, shift, init):
    omega, beta, gamma, theta = params
    eta = rng.standard_normal(N)
    y = np.zeros(N)
    log_s2 = omega / (1.0 - beta)
    for t in range(N):
        if t > 0:
            log_s2 = (omega + beta * log_s2
                      + gamma * (abs(eta[t - 1]) - SQRT_2_OVER_PI) + theta * eta[t - 1])
        y[t] = math.exp(0.5 * log_s2) * eta[t]
    return y


def _gen_sv(params, N, rng, shift, init):
    a, b = params
    eta = rng.standard_normal(N)
    v = rng.standard_normal(N)
    y = np.zeros(N)
    s2 = 1.0
    for t in range(N):
        if t > 0:
            s2 = a * y[t - 1] ** 2 + math.exp(b * math.log(s2) + v[t])
        y[t] = math.sqrt(s2) * eta[t]
    return y


def _gen_bil_vol(params, N, rng, shift, init):
    (b,) = params
    eta = rng.standard_normal(N)
    y = np.zeros(N)
    y[0] = eta[0]
    for t in range(1, N):
        y[t] = b * eta[t - 1] * y[t - 1] + eta[t]
    return y


def _gen_nlma_vol(params, N, rng, shift, init):
    (b,) = params
    eta = rng.standard_normal(N)
    y = np.zeros(N)
    y[0] = eta[0]
    for t in range(1, N):
        y[t] = b * eta[t - 1] ** 2 + eta[t]
    return y


@dataclass(frozen=True)
class DgpInfo:
    name: str
    generator: Callable
    defaults: tuple
    section: str  # "mean", "variance" or "threshold"
    formula: str
    additive: bool = True


def _info(name, gen, defaults, section, formula, additive=True):
    return DgpInfo(name, gen, tuple(float(v) for v in defaults), section, formula, additive)


_ar_gen, _ = _linear_ar(())

REGISTRY: dict[str, DgpInfo] = {
    d.name: d
    for d in [
        _info("ar1", _ar_gen, (0.6,), "mean", "Y_t = 0.6 Y_{t-1} + e_t"),
        _info("ar1-exp", _gen_ar1_exp, (0.6,), "mean", "Y_t = 0.6 Y_{t-1} + (exp(1) - 1)"),
        _info("ar1-het", _gen_ar1_het, (0.6, 0.1, 0.1), "mean",
              "Y_t = 0.6 Y_{t-1} + h_t e_t, h_t^2 = 0.1 + 0.1 Y_{t-1}^2"),
        _info("ar1-bil", _gen_ar1_bil, (0.6, 0.1), "mean",
              "Y_t = 0.6 Y_{t-1} + 0.1 Y_{t-1} e_t + e_t"),
        _info("ar2", _ar_gen, (0.6, -0.5), "mean", "Y_t = 0.6 Y_{t-1} - 0.5 Y_{t-2} + e_t"),
        _info("arma11", _gen_arma11, (0.6, 0.9), "mean", "Y_t = 0.6 Y_{t-1} + 0.9 e_{t-1} + e_t"),
        _info("bil", _gen_bil, (0.6, 0.7), "mean", "Y_t = 0.6 Y_{t-1} + 0.7 e_{t-1} Y_{t-2} + e_t"),
        _info("nlma", _gen_nlma, (0.6, 0.7), "mean", "Y_t = 0.6 Y_{t-1} + 0.7 e_{t-1} e_{t-2} + e_t"),
        _info("tar2", _gen_tar2, (0.6, -0.5, 1.0), "mean",
              "Y_t = 0.6 Y_{t-1} + e_t if Y_{t-1} < 1 else -0.5 Y_{t-1} + e_t"),
        _info("sign", _gen_sign, (0.43,), "mean", "Y_t = sign(Y_{t-1}) + 0.43 e_t"),
        _info("temmap", _map_generator(temmap_step), (0.49999,), "mean",
              "tent map with alpha = 0.49999, Y_0 ~ U[0, 1]", additive=False),
        _info("nar", _gen_nar, (0.6, 0.7, 0.3), "mean",
              "Y_t = 0.6 Y_{t-1} + 0.7 sin(0.3 pi Y_{t-2}) + e_t"),
        _info("arch1", _gen_arch, (0.9, 0.1), "variance", "s2_t = 0.9 + 0.1 y_{t-1}^2"),
        _info("arch2", _gen_arch, (0.9, 0.1, 0.8), "variance",
              "s2_t = 0.9 + 0.1 y_{t-1}^2 + 0.8 y_{t-2}^2"),
        _info("arch4", _gen_arch, (0.9, 0.1, 0.2, 0.2, 0.1), "variance",
              "s2_t = 0.9 + 0.1 y_{t-1}^2 + 0.2 y_{t-2}^2 + 0.2 y_{t-3}^2 + 0.1 y_{t-4}^2"),
        _info("arch5", _gen_arch, (0.9, 0.1, 0.2, 0.2, 0.1, 0.3), "variance",
              "arch4 plus 0.3 y_{t-5}^2"),
        _info("garch11", _garch_generator(1, 1), (0.01, 0.29, 0.7), "variance",
              "s2_t = 0.01 + 0.29 y_{t-1}^2 + 0.7 s2_{t-1}"),
        _info("garch22", _garch_generator(2, 2), (0.1, 0.2, 0.2, 0.3, 0.1), "variance",
              "s2_t = 0.1 + 0.2 y_{t-1}^2 + 0.2 y_{t-2}^2 + 0.3 s2_{t-1} + 0.1 s2_{t-2}"),
        _info("egarch11", _gen_egarch11, (0.01, 0.9, 0.3, -0.8), "variance",
              "log s2_t = 0.01 + 0.9 log s2_{t-1} + 0.3(|eta_{t-1}| - sqrt(2/pi)) - 0.8 eta_{t-1}"),
        _info("sv", _gen_sv, (0.1, 0.98), "variance",
              "s2_t = 0.1 y_{t-1}^2 + exp(0.98 log s2_{t-1} + v_t), v_t ~ N(0, 1)"),
        _info("bil-vol", _gen_bil_vol, (0.8,), "variance", "y_t = 0.8 eta_{t-1} y_{t-1} + eta_t"),
        _info("lm", _map_generator(logistic_step), (4.0,), "variance",
              "y_t = 4 y_{t-1}(1 - y_{t-1}), y_0 ~ U[0, 1]", additive=False),
        _info("nlma-vol", _gen_nlma_vol, (0.8,), "variance", "y_t = 0.8 eta_{t-1}^2 + eta_t"),
        _info("tar3", _gen_tar3, (0.6, -0.5, 0.3, -1.0, 1.0), "threshold",
              "0.6 Y_{t-1} if Y_{t-1} < -1; -0.5 Y_{t-1} if -1 <= Y_{t-1} < 1; 0.3 Y_{t-1} otherwise"),
    ]
}

_ALIASES = {
    "ar-exp": "ar1-exp", "ar-het": "ar1-het", "ar-bil": "ar1-bil", "tem-map": "temmap",
    "tem_map": "temmap", "tar": "tar2", "logistic": "lm", "logistic_map": "lm",
    "bil_vol": "bil-vol", "nlma_vol": "nlma-vol", "tar3regime": "tar3", "tar2regime": "tar2",
}


def available(section: str | None = None) -> list[str]:
    """Registered process names, optionally filtered by section."""
    return [k for k, v in REGISTRY.items() if section is None or v.section == section]


def dgp(name: str) -> DgpInfo:
    key = str(name).strip().lower()
    key = _ALIASES.get(key, key)
    if key not in REGISTRY:
        raise ValueError(f"unknown DGP {name!r}; available: {', '.join(REGISTRY)}")
    return REGISTRY[key]


@dataclass(frozen=True)
class DgpSpec:
    """
    A process name with its parameter vector and burn-in.

    ``params=None`` selects the registered defaults. ``initial`` fixes the
    starting value of the deterministic maps (otherwise drawn uniformly).
    ``local_drift`` is an optional ``(drift, l_n)`` pair.
    """

    kind: str
    params: tuple | None = None
    burn_in: int = 200
    initial: float | None = None
    local_drift: tuple | None = field(default=None)

    def __post_init__(self):
        info = dgp(self.kind)
        object.__setattr__(self, "kind", info.name)
        params = info.defaults if self.params is None else tuple(float(v) for v in self.params)
        object.__setattr__(self, "params", params)
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")

    @property
    def info(self) -> DgpInfo:
        return REGISTRY[self.kind]

    @classmethod
    def coerce(cls, value) -> "DgpSpec":
        return value if isinstance(value, cls) else cls(str(value))


def parse_drift(drift):
    """
    Turn a drift descriptor into ``a(y, t)``.

    Accepted forms: ``None``/``"zero"``, ``"sin:f,k"`` for
    ``sin(f pi Y_{t-k})``, ``"lin:c,k"`` for ``c Y_{t-k}``, ``"sq:c,k"``
    for ``c Y_{t-k}^2``, or a callable ``a(past)`` receiving ``Y`` up to
    ``t - 1``.
    """
    if drift is None:
        return None
    if callable(drift):
        return lambda y, t: float(drift(y[:t]))
    text = str(drift).strip().lower()
    if text in ("zero", "0", "none"):
        return lambda y, t: 0.0
    m = re.fullmatch(r"(sin|lin|sq):([-+0-9.e]+),(\d+)", text)
    if not m:
        raise ValueError(f"cannot parse drift {drift!r}")
    kind, c, k = m.group(1), float(m.group(2)), int(m.group(3))
    if k < 1:
        raise ValueError("drift lag must be >= 1")

    def lagged(y, t):
        return y[t - k] if t - k >= 0 else 0.0

    if kind == "sin":
        return lambda y, t: math.sin(c * math.pi * lagged(y, t))
    if kind == "lin":
        return lambda y, t: c * lagged(y, t)
    return lambda y, t: c * lagged(y, t) ** 2


def _key(seed) -> tuple:
    return tuple(int(s) for s in seed) if isinstance(seed, (tuple, list)) else (int(seed),)


def _run(spec: DgpSpec, n: int, seed, shift) -> Series:
    if n < MIN_LENGTH:
        raise ValueError(f"n must be >= {MIN_LENGTH}")
    info = spec.info
    rng = streams.stream(*_key(seed), streams.DATA)
    N = spec.burn_in + int(n)
    with np.errstate(over="ignore", invalid="ignore"):
        try:
            path = info.generator(spec.params, N, rng, shift, spec.initial)
        except OverflowError:
            raise ExplosivePathError(f"{spec.kind} diverged") from None
        if not np.all(np.isfinite(path)) or np.max(np.abs(path)) > EXPLOSIVE_BOUND:
            raise ExplosivePathError(f"{spec.kind} path exceeded {EXPLOSIVE_BOUND:g} in magnitude")
    return Series(path[spec.burn_in:], name=spec.kind)


def simulate(spec, n: int, seed=0) -> Series:
    """
    Simulate ``n`` observations after discarding ``spec.burn_in`` values.

    Parameters
    ----------
    spec : DgpSpec or str
    n : int
        Output length, at least 8.
    seed : int or tuple of int
        Key of the innovation stream.

    Returns
    -------
    Series
    """
    spec = DgpSpec.coerce(spec)
    if spec.local_drift is not None:
        drift, l_n = spec.local_drift
        return simulate_local_alternative(spec, drift, l_n, n, seed)
    return _run(spec, n, seed, None)


def simulate_local_alternative(base, drift, l_n: int, n: int, seed=0) -> Series:
    """
    Simulate ``Y_t = f(I_{t-1}) + a_t / sqrt(l_n) + e_t`` around a mean-type null.

    The drift enters the recursion, so later values feel earlier drifts.
    A zero drift reproduces :func:`simulate` exactly.
    """
    base = DgpSpec.coerce(base)
    if base.info.section == "variance" or not base.info.additive:
        raise ValueError(f"{base.kind} has no additive mean innovation for a local drift")
    if l_n < 1:
        raise ValueError("l_n must be >= 1")
    a = parse_drift(drift)
    scale = 1.0 / math.sqrt(l_n)
    shift = None if a is None else (lambda y, t: a(y, t) * scale)
    return _run(base, n, seed, shift)
