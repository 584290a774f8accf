"""
Monte Carlo engine: rejection rates, p-value collections and timing.

Replication ``r`` simulates from the stream keyed ``(seed, r)`` and uses the
same key for its bootstrap streams, so results do not depend on how
replications are distributed over worker processes.
"""
from __future__ import annotations

import concurrent.futures as cf
import csv
import functools
import multiprocessing as mp
import os
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import dgps
from .bootstrap import full_sample_fdwb_test, split_bootstrap_test
from .errors import (
    BootstrapEstimationFailure,
    DegenerateResidualsError,
    EstimationError,
    ExplosivePathError,
    HarnessAbort,
    InvalidLevelError,
)
from .estimators import count_fits, parse_model
from .spectral import GramStatistic
from .split import Series, compute_residuals, parse_split
from .weights import WeightKind

__all__ = [
    "McConfig",
    "McReport",
    "TestSummary",
    "run_mc",
    "run_bench",
    "run_empirical",
    "write_outputs",
    "load_config",
    "load_config_dicts",
    "default_threads",
    "REPS_COLUMNS",
    "TIMING_COLUMNS",
    "REPORT_COLUMNS",
]

SCHEMES = ("split", "full_fdwb")
MAX_FAILURE_SHARE = 0.10
REPS_COLUMNS = ("rep", "test", "statistic", "p_value", "critical_value", "reject", "converged", "failed")
TIMING_COLUMNS = ("rep", "test", "elapsed_s")
REPORT_COLUMNS = ("test", "R", "valid", "failures", "rejections", "rejection_rate", "mc_se",
                  "mean_elapsed_s", "total_elapsed_s")
_REP_ERRORS = (EstimationError, DegenerateResidualsError, BootstrapEstimationFailure,
               ExplosivePathError, np.linalg.LinAlgError)


def _parse_test(item) -> tuple[str, str]:
    if isinstance(item, str):
        parts = item.replace("/", ":").split(":")
        item = parts if len(parts) == 2 else (parts[0], "split")
    variant, scheme = item
    variant = WeightKind.parse(variant).value
    scheme = {"full": "full_fdwb", "fdwb": "full_fdwb"}.get(scheme, scheme)
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; use one of {SCHEMES}")
    return variant, scheme


@dataclass(frozen=True)
class McConfig:
    """
    One Monte Carlo experiment.

    ``tests`` lists ``(variant, scheme)`` pairs with variant in
    ``{"indicator", "cf"}`` and scheme in ``{"split", "full_fdwb"}``.
    ``threads`` is the number of worker processes. ``drift`` and
    ``drift_l_n`` turn the process into a local alternative.
    """

    dgp: str
    null_model: str
    n: int = 200
    R: int = 500
    B: int = 500
    alpha: float = 0.05
    tests: tuple = (("indicator", "split"), ("cf", "split"))
    seed: int = 0
    threads: int = 1
    multiplier: str = "mammen"
    split: str = "half"
    burn_in: int = 200
    drift: str | None = None
    drift_l_n: int | None = None

    def __post_init__(self):
        if self.R < 1 or self.B < 1:
            raise ValueError("R and B must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise InvalidLevelError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        tests = tuple(_parse_test(t) for t in self.tests)
        if not tests:
            raise ValueError("at least one test is required")
        object.__setattr__(self, "tests", tests)
        dgps.dgp(self.dgp)
        parse_model(self.null_model)
        parse_split(self.split, self.n)

    @property
    def labels(self) -> list[str]:
        return [f"{scheme}-{variant}" for variant, scheme in self.tests]

    def dgp_spec(self) -> dgps.DgpSpec:
        drift = None if self.drift is None else (self.drift, self.drift_l_n or self.n)
        return dgps.DgpSpec(self.dgp, burn_in=self.burn_in, local_drift=drift)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["tests"] = [f"{v}:{s}" for v, s in self.tests]
        return out

    @classmethod
    def from_dict(cls, data: dict, **overrides) -> "McConfig":
        data = {**data, **{k: v for k, v in overrides.items() if v is not None}}
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "tests" in data:
            data["tests"] = tuple(data["tests"])
        return cls(**data)


def load_config_dicts(path) -> list[dict]:
    """Raw experiment dictionaries from a TOML file (see :func:`load_config`)."""
    try:
        import tomllib
    except ModuleNotFoundError:  # Python < 3.11
        import tomli as tomllib
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    experiments = data.pop("experiment", None)
    if experiments is None:
        return [data]
    return [{**data, **exp} for exp in experiments]


def load_config(path) -> list[McConfig]:
    """
    Read one or more experiments from a TOML file.

    Top-level keys form a single experiment. A ``[[experiment]]`` array
    gives several, each inheriting the top-level keys as defaults.
    """
    return [McConfig.from_dict(d) for d in load_config_dicts(path)]


@dataclass
class TestSummary:
    __test__ = False

    test: str
    R: int
    valid: int
    failures: int
    rejections: int
    mean_elapsed: float
    total_elapsed: float
    p_values: np.ndarray = field(repr=False)
    statistics: np.ndarray = field(repr=False)

    @property
    def rejection_rate(self) -> float:
        return self.rejections / self.valid if self.valid else float("nan")

    @property
    def mc_se(self) -> float:
        r = self.rejection_rate
        return float(np.sqrt(r * (1.0 - r) / self.valid)) if self.valid else float("nan")


@dataclass
class McReport:
    config: McConfig
    summaries: dict
    rows: list = field(repr=False)
    timing: list = field(repr=False)
    estimator_calls: int = 0

    def __getitem__(self, label) -> TestSummary:
        return self.summaries[label]

    def rejection_rate(self, label) -> float:
        return self.summaries[label].rejection_rate

    def table(self) -> list[dict]:
        out = []
        for s in self.summaries.values():
            out.append({
                "test": s.test, "R": s.R, "valid": s.valid, "failures": s.failures,
                "rejections": s.rejections, "rejection_rate": s.rejection_rate,
                "mc_se": s.mc_se, "mean_elapsed_s": s.mean_elapsed,
                "total_elapsed_s": s.total_elapsed,
            })
        return out


def _replicate(config: McConfig, r: int):
    """Run every requested test on replication ``r``; returns rows, timings and fit count."""
    key = (int(config.seed), int(r))
    labels = config.labels
    rows, timing = [], []
    with count_fits() as fits:
        try:
            y = dgps.simulate(config.dgp_spec(), config.n, key).values
        except ExplosivePathError:
            y = None
        split_stage = None
        if y is not None and any(s == "split" for _, s in config.tests):
            started = time.perf_counter()
            try:
                split_spec = parse_split(config.split, config.n)
                fitted = parse_model(config.null_model).fit(y, split_spec.f_n)
                res = compute_residuals(fitted, y, split_spec)
                split_stage = (fitted, res)
            except _REP_ERRORS:
                split_stage = None
            fit_elapsed = time.perf_counter() - started
        for (variant, scheme), label in zip(config.tests, labels):
            started = time.perf_counter()
            out, converged = None, False
            if y is not None:
                try:
                    if scheme == "split":
                        if split_stage is not None:
                            fitted, res = split_stage
                            gram = GramStatistic.from_residual_set(res, variant)
                            out = split_bootstrap_test(res, weight=variant, B=config.B,
                                                       multiplier=config.multiplier,
                                                       alpha=config.alpha, seed=key, gram=gram)
                            converged = fitted.converged
                    else:
                        out = full_sample_fdwb_test(y, config.null_model, B=config.B,
                                                    multiplier=config.multiplier,
                                                    alpha=config.alpha, seed=key, weight=variant)
                        converged = bool(out.provenance.get("converged", True))
                except _REP_ERRORS:
                    out = None
            elapsed = time.perf_counter() - started
            if scheme == "split" and y is not None:
                elapsed += fit_elapsed
            if out is None:
                rows.append((r, label, float("nan"), float("nan"), float("nan"), False, False, True))
            else:
                rows.append((r, label, out.statistic, out.p_value, out.critical_value,
                             out.reject, converged, False))
            timing.append((r, label, elapsed))
        n_fits = fits()
    return rows, timing, n_fits


def _map_replications(config: McConfig):
    work = functools.partial(_replicate, config)
    if config.threads == 1 or config.R == 1:
        return [work(r) for r in range(config.R)]
    ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else None
    workers = min(config.threads, config.R)
    chunk = max(1, config.R // (4 * workers))
    with cf.ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
        return list(pool.map(work, range(config.R), chunksize=chunk))


def run_mc(config: McConfig, out_dir=None) -> McReport:
    """
    Run ``config.R`` replications and aggregate them per test.

    Failed replications are excluded from the rejection rate and counted;
    more than 10% failures for any test raises :class:`HarnessAbort`.
    Writes ``reps.csv``, ``timing.csv`` and ``report.csv`` when ``out_dir``
    is given.
    """
    results = _map_replications(config)
    rows = [row for res in results for row in res[0]]
    timing = [row for res in results for row in res[1]]
    calls = sum(res[2] for res in results)
    summaries = {}
    for label in config.labels:
        mine = [row for row in rows if row[1] == label]
        secs = np.array([row[2] for row in timing if row[1] == label])
        good = [row for row in mine if not row[7]]
        failures = len(mine) - len(good)
        summaries[label] = TestSummary(
            test=label, R=config.R, valid=len(good), failures=failures,
            rejections=sum(1 for row in good if row[5]),
            mean_elapsed=float(secs.mean()), total_elapsed=float(secs.sum()),
            p_values=np.array([row[3] for row in good]),
            statistics=np.array([row[2] for row in good]),
        )
    report = McReport(config, summaries, rows, timing, calls)
    if out_dir is not None:
        write_outputs(report, out_dir)
    worst = max(s.failures for s in summaries.values())
    if worst > MAX_FAILURE_SHARE * config.R:
        raise HarnessAbort(f"{worst} of {config.R} replications failed (limit 10%)", report)
    return report


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_outputs(report: McReport, out_dir) -> dict:
    """Persist replication rows, timings and the aggregate table as CSV."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {name: out_dir / f"{name}.csv" for name in ("reps", "timing", "report")}
    _write_csv(paths["reps"], REPS_COLUMNS, report.rows)
    _write_csv(paths["timing"], TIMING_COLUMNS, report.timing)
    _write_csv(paths["report"], REPORT_COLUMNS,
               [[row[c] for c in REPORT_COLUMNS] for row in report.table()])
    return paths


def run_bench(configs, repeats: int = 1, out_path=None, warmup: bool = True) -> list[dict]:
    """
    Mean wall-clock seconds per Monte Carlo experiment for every test.

    Each config is run ``repeats`` times; one experiment's time is the sum of
    its per-replication times (estimation, statistic and bootstrap). With
    ``warmup`` an untimed single replication runs first so that one-off
    kernel compilation is not charged to whichever test happens to need a
    kernel first.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    table = []
    for config in configs:
        if warmup:
            run_mc(replace(config, R=1, B=min(config.B, 5), threads=1))
        totals = {label: [] for label in config.labels}
        for _ in range(repeats):
            report = run_mc(config)
            for label in config.labels:
                totals[label].append(report[label].total_elapsed)
        for label, vals in totals.items():
            table.append({
                "dgp": config.dgp, "null_model": config.null_model, "n": config.n,
                "R": config.R, "B": config.B, "test": label, "repeats": repeats,
                "mean_seconds": float(np.mean(vals)),
                "per_replication_s": float(np.mean(vals)) / config.R,
            })
    if out_path is not None:
        cols = list(table[0]) if table else []
        _write_csv(Path(out_path), cols, [[row[c] for c in cols] for row in table])
    return table


def run_empirical(series, models, tests=(("indicator", "split"), ("cf", "split")),
                  B: int = 500, seed: int = 0, split: str = "half", multiplier: str = "mammen",
                  alpha: float = 0.05) -> list[dict]:
    """
    Fit each model to an observed series and tabulate the test p-values.

    Returns one row per (model, test) in the order given.
    """
    y = np.asarray(series.values if isinstance(series, Series) else series, dtype=float)
    split_spec = parse_split(split, y.size)
    tests = [_parse_test(t) for t in tests]
    table = []
    for descriptor in models:
        family = parse_model(descriptor)
        res = None
        for variant, scheme in tests:
            if scheme == "split":
                if res is None:
                    fitted = family.fit(y, split_spec.f_n)
                    res = compute_residuals(fitted, y, split_spec)
                out = split_bootstrap_test(res, weight=variant, B=B, multiplier=multiplier,
                                           alpha=alpha, seed=seed)
            else:
                out = full_sample_fdwb_test(y, family, B=B, multiplier=multiplier,
                                            alpha=alpha, seed=seed, weight=variant)
            table.append({
                "model": family.descriptor, "test": f"{scheme}-{variant}",
                "statistic": out.statistic, "p_value": out.p_value,
                "critical_value": out.critical_value, "reject": out.reject,
                "elapsed_s": out.elapsed,
            })
    return table


def default_threads() -> int:
    env = os.environ.get("SPLITGOF_THREADS")
    if env:
        return max(1, int(env))
    return max(1, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count() or 1)
