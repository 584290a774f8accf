"""
Sample-splitting generalized spectral goodness-of-fit tests for
parametric conditional-mean time-series models.

The usual entry points are :func:`split_sample_test` (fit on the fitting
sample, test on the checking sample with a multiplier bootstrap) and
:func:`full_sample_fdwb_test` (the re-estimating benchmark).
"""
from . import dgps, estimators, harness, spectral, streams
from .bootstrap import (
    MultiplierKind,
    TestResult,
    draw_multipliers,
    full_sample_fdwb_test,
    split_bootstrap_test,
    split_sample_test,
)
from .dgps import DgpSpec, simulate, simulate_local_alternative
from .errors import *  # noqa: F401,F403
from .estimators import FittedModel, fit_model, parse_model
from .harness import McConfig, McReport, run_bench, run_empirical, run_mc
from .spectral import StatisticValue, h_hat_diagnostic, statistic, statistic_cf, statistic_indicator
from .split import ResidualSet, Series, SplitSpec, compute_residuals, make_split, parse_split, read_series_csv
from .weights import IntegratorKind, WeightKind, eval_weight

__version__ = "0.1.0"

__all__ = [
    "MultiplierKind", "TestResult", "draw_multipliers", "full_sample_fdwb_test",
    "split_bootstrap_test", "split_sample_test", "DgpSpec", "simulate",
    "simulate_local_alternative", "FittedModel", "fit_model", "parse_model", "McConfig",
    "McReport", "run_bench", "run_empirical", "run_mc", "StatisticValue", "h_hat_diagnostic",
    "statistic", "statistic_cf", "statistic_indicator", "ResidualSet", "Series", "SplitSpec",
    "compute_residuals", "make_split", "parse_split", "read_series_csv", "IntegratorKind",
    "WeightKind", "eval_weight", "load_sunspots", "dgps", "estimators", "harness",
    "spectral", "streams",
]


def load_sunspots() -> Series:
    """Annual sunspot numbers 1700-1979 shipped with the package."""
    from importlib import resources

    path = resources.files(__package__) / "data" / "sunspots.csv"
    with resources.as_file(path) as p:
        return read_series_csv(p, "sunactivity")
