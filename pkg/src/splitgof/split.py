"""
Sample-splitting geometry and the residual pipeline.

The first ``f_n`` observations form the fitting sample and the last ``l_n``
observations form the checking sample. Indices in this module are 1-based in
documentation (``Y_1..Y_n``) and 0-based in code.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DegenerateResidualsError, InvalidSplitError, ModelMismatchError

__all__ = [
    "Series",
    "SplitSpec",
    "ResidualSet",
    "make_split",
    "parse_split",
    "compute_residuals",
    "read_series_csv",
]

MIN_LENGTH = 8
SIGMA_FLOOR = 1e-300


@dataclass(frozen=True)
class Series:
    """A finite univariate time series ``Y_1..Y_n`` with ``n >= 8``."""

    values: np.ndarray
    name: str | None = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        if values.size < MIN_LENGTH:
            raise ValueError(f"series length must be >= {MIN_LENGTH}, got {values.size}")
        if not np.all(np.isfinite(values)):
            raise ValueError("series contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


@dataclass(frozen=True)
class SplitSpec:
    """
    Fitting/checking geometry ``(n, f_n, l_n)``.

    The fitting sample is ``Y_1..Y_{f_n}`` and the checking sample is
    ``Y_{n-l_n+1}..Y_n``; the two may overlap.
    """

    n: int
    f_n: int
    l_n: int

    def __post_init__(self):
        for name in ("n", "f_n", "l_n"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise InvalidSplitError(f"{name} must be a positive integer, got {value!r}")
        if self.f_n > self.n or self.l_n > self.n:
            raise InvalidSplitError(
                f"need 1 <= f_n, l_n <= n; got n={self.n}, f_n={self.f_n}, l_n={self.l_n}"
            )

    def n_j(self, j):
        """Effective size ``l_n - j + 1`` of lag ``j`` (vectorised)."""
        j = np.asarray(j)
        if np.any((j < 1) | (j > self.l_n)):
            raise InvalidSplitError(f"lag must lie in 1..{self.l_n}")
        out = self.l_n - j + 1
        return int(out) if out.ndim == 0 else out

    @property
    def checking_start(self) -> int:
        """0-based index of the first checking-sample observation."""
        return self.n - self.l_n

    @property
    def overlap(self) -> float:
        return max(0.0, (self.f_n + self.l_n - self.n) / self.f_n)

    @property
    def ratio(self) -> float:
        return self.l_n / self.f_n

    def describe(self) -> str:
        return f"{self.f_n}:{self.l_n}"


def make_split(n: int, rule: str = "half_overlap", f_n: int | None = None,
               l_n: int | None = None) -> SplitSpec:
    """
    Build a :class:`SplitSpec`.

    ``half_overlap`` uses ``f_n = floor(n/2)`` and ``l_n = n`` so the
    checking-to-fitting ratio is twice the overlap coefficient. ``custom``
    takes the pair verbatim.
    """
    if int(n) != n or n < MIN_LENGTH:
        raise InvalidSplitError(f"n must be an integer >= {MIN_LENGTH}, got {n!r}")
    if rule in ("half_overlap", "half"):
        return SplitSpec(int(n), int(n) // 2, int(n))
    if rule == "custom":
        if f_n is None or l_n is None:
            raise InvalidSplitError("custom split needs f_n and l_n")
        return SplitSpec(int(n), f_n, l_n)
    if rule == "full":
        return SplitSpec(int(n), int(n), int(n))
    raise InvalidSplitError(f"unknown split rule {rule!r}")


def parse_split(text: str, n: int) -> SplitSpec:
    """Parse ``"half"``, ``"full"`` or ``"f:l"`` into a split of length ``n``."""
    text = text.strip().lower()
    if text in ("half", "half_overlap", "full"):
        return make_split(n, text)
    try:
        f, l = (int(part) for part in text.split(":"))
    except ValueError:
        raise InvalidSplitError(f"cannot parse split {text!r}; use 'half' or 'f:l'") from None
    return make_split(n, "custom", f, l)


@dataclass(frozen=True)
class ResidualSet:
    """
    Checking-sample residuals and the lagged values the weights act on.

    Attributes
    ----------
    residuals : ndarray, shape (l_n,)
        ``e_t`` for ``t = n-l_n+1..n``.
    sigma_e : float
        ``sqrt(mean(e_t**2))``.
    lagged : ndarray, shape (l_n,)
        ``Y_{n-l_n}..Y_{n-1}`` on the response scale. When ``l_n = n`` the
        first entry refers to ``Y_0``, which is not observed, and is NaN.
    split : SplitSpec
    """

    residuals: np.ndarray
    sigma_e: float
    lagged: np.ndarray
    split: SplitSpec
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.residuals.shape != (self.split.l_n,):
            raise ValueError("residuals must have length l_n")
        if self.lagged.shape != (self.split.l_n,):
            raise ValueError("lagged values must have length l_n")

    @classmethod
    def from_arrays(cls, residuals, lagged, split: SplitSpec, meta=None) -> "ResidualSet":
        residuals = np.array(residuals, dtype=float)
        lagged = np.array(lagged, dtype=float)
        sigma_e = _residual_scale(residuals)
        residuals.setflags(write=False)
        lagged.setflags(write=False)
        return cls(residuals, sigma_e, lagged, split, dict(meta or {}))

    @property
    def start(self) -> int:
        """Number of leading unobserved lagged values (0 or 1)."""
        return int(self.split.n == self.split.l_n)

    @property
    def available_lagged(self) -> np.ndarray:
        return self.lagged[self.start:]

    def with_residuals(self, residuals) -> "ResidualSet":
        """Same geometry and lagged values, new residuals (sigma recomputed)."""
        return ResidualSet.from_arrays(residuals, self.lagged, self.split, self.meta)


def _residual_scale(residuals: np.ndarray) -> float:
    if not np.all(np.isfinite(residuals)):
        raise DegenerateResidualsError("residuals contain non-finite values")
    if not np.any(residuals):
        raise DegenerateResidualsError("all residuals are exactly zero")
    sigma = float(np.sqrt(np.mean(residuals ** 2)))
    if sigma < SIGMA_FLOOR:
        raise DegenerateResidualsError(f"residual scale {sigma:g} below {SIGMA_FLOOR:g}")
    return sigma


def compute_residuals(model, series, split: SplitSpec) -> ResidualSet:
    """
    Evaluate a fitted model's residual rule on the checking sample.

    Parameters
    ----------
    model : FittedModel
        Model fitted on the fitting sample of ``series``.
    series : Series or array_like
        Raw observations ``y_1..y_n``. For variance models the statistic acts
        on the squared series, which the model supplies.
    split : SplitSpec

    Returns
    -------
    ResidualSet
    """
    y = np.asarray(series, dtype=float).ravel()
    if y.size != split.n:
        raise ModelMismatchError(f"series length {y.size} differs from split.n={split.n}")
    if model.required_history >= split.n:
        raise ModelMismatchError(
            f"{model.descriptor} needs {model.required_history} lags but only {split.n} points exist"
        )
    if model.fit_span[1] > split.n:
        raise ModelMismatchError("model was fitted on more observations than the series holds")
    response = model.family.response(y)
    resid = response - model.conditional_mean(y)
    lo = split.checking_start
    lagged = np.empty(split.l_n)
    if lo == 0:
        lagged[0] = np.nan
        lagged[1:] = response[: split.n - 1]
    else:
        lagged[:] = response[lo - 1: split.n - 1]
    return ResidualSet.from_arrays(
        resid[lo:], lagged, split, {"model": model.descriptor}
    )


def read_series_csv(path, column: str | int | None = None) -> Series:
    """
    Read a series from a single- or multi-column CSV file.

    A header row is detected automatically. ``column`` selects a named or
    positional column; by default the last column is used, which suits both
    single-column files and ``date,value`` layouts.
    """
    path = Path(path)
    text = path.read_text()
    rows = [row for row in csv.reader(io.StringIO(text)) if row and any(c.strip() for c in row)]
    if not rows:
        raise ValueError(f"{path} is empty")
    header = None
    try:
        [float(c) for c in rows[0] if c.strip()]
    except ValueError:
        header, rows = [c.strip() for c in rows[0]], rows[1:]
    if column is None:
        idx = -1
    elif isinstance(column, int):
        idx = column
    else:
        if header is None or column not in header:
            raise ValueError(f"column {column!r} not found in {path}")
        idx = header.index(column)
    values = [float(row[idx]) for row in rows]
    name = header[idx] if header else path.stem
    return Series(np.array(values), name=name)
