"""Common machinery for model families and fitted models."""
from __future__ import annotations

import contextlib
from dataclasses import dataclass, field

import numpy as np

__all__ = ["FittedModel", "ModelFamily", "fit_calls", "count_fits"]

_FIT_CALLS = [0]


def fit_calls() -> int:
    """Number of estimator invocations in this process so far."""
    return _FIT_CALLS[0]


@contextlib.contextmanager
def count_fits():
    """Context manager yielding a callable that reports fits made inside it."""
    start = _FIT_CALLS[0]
    yield lambda: _FIT_CALLS[0] - start


@dataclass(frozen=True)
class FittedModel:
    """
    Estimated parameters plus the residual rule of their family.

    ``theta`` layout is family specific (see each family's docstring).
    ``fit_span`` is the 1-based inclusive range of observations used.
    """

    family: "ModelFamily"
    theta: np.ndarray
    fit_span: tuple[int, int]
    objective: float = float("nan")
    iterations: int = 0
    converged: bool = True
    backcast: float = 0.0
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float).ravel()
        if theta.size != self.family.n_params:
            raise ValueError(
                f"{self.family.descriptor} expects {self.family.n_params} parameters, got {theta.size}"
            )
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)

    @classmethod
    def from_params(cls, family, theta, backcast=0.0, fit_span=(1, 1)) -> "FittedModel":
        """Wrap known parameter values (e.g. the true DGP values) as a model."""
        return cls(family, theta, fit_span, backcast=backcast)

    @property
    def descriptor(self) -> str:
        return self.family.descriptor

    @property
    def required_history(self) -> int:
        return self.family.required_history

    def conditional_mean(self, y) -> np.ndarray:
        return self.family.conditional_mean(self.theta, np.asarray(y, dtype=float), self.backcast)

    def residuals(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        return self.family.response(y) - self.conditional_mean(y)


class ModelFamily:
    """
    Base class for model families.

    Subclasses implement ``_estimate``, ``conditional_mean`` and the
    ``descriptor``/``n_params``/``required_history`` properties. ``fit``
    only ever sees the first ``f_n`` observations.
    """

    descriptor: str = ""
    n_params: int = 0
    required_history: int = 0

    def response(self, y: np.ndarray) -> np.ndarray:
        """The series whose conditional mean the model specifies."""
        return np.asarray(y, dtype=float)

    def conditional_mean(self, theta, y, backcast) -> np.ndarray:
        raise NotImplementedError

    def backcast(self, y_fit: np.ndarray) -> float:
        return 0.0

    def _estimate(self, y_fit, response_fit, backcast):
        raise NotImplementedError

    def fixed_design_refit(self, y, f_n=None):
        """Batched refits on the design built from ``y``; None when unavailable."""
        return None

    def fit(self, y, f_n: int | None = None, response=None) -> FittedModel:
        """
        Estimate on ``y[:f_n]``.

        ``response`` replaces the dependent variable while keeping the
        regressors built from ``y`` (fixed-design refits in the wild
        bootstrap). It is given on the response scale.
        """
        _FIT_CALLS[0] += 1
        y = np.asarray(y, dtype=float)
        f_n = y.size if f_n is None else int(f_n)
        y_fit = np.array(y[:f_n])
        r_fit = self.response(y_fit) if response is None else np.array(response[:f_n], dtype=float)
        backcast = self.backcast(y_fit)
        theta, objective, iterations, converged, info = self._estimate(y_fit, r_fit, backcast)
        return FittedModel(self, theta, (1, f_n), float(objective), int(iterations),
                           bool(converged), float(backcast), info)

    def __repr__(self):
        return f"<{type(self).__name__} {self.descriptor}>"

    def __eq__(self, other):
        return type(self) is type(other) and self.descriptor == other.descriptor

    def __hash__(self):
        return hash((type(self).__name__, self.descriptor))


def lag_matrix(y: np.ndarray, p: int, backcast: float) -> np.ndarray:
    """Columns ``Y_{t-1}..Y_{t-p}`` for every ``t``, pre-sample set to ``backcast``."""
    n = y.size
    padded = np.concatenate([np.full(p, backcast), y])
    out = np.empty((n, p))
    for k in range(1, p + 1):
        out[:, k - 1] = padded[p - k: p - k + n]
    return out
