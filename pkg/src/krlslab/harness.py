"""Experiment engine: rate experiments, paired schedule comparisons,
timing benchmarks, and report files.

A rate experiment fits each configured estimator over an ascending n grid
with scheduled (or explicitly listed) parameters, replicated under derived
seeds, and summarizes each estimator by the OLS slope of log mean-MISE
against log n next to the theoretical exponent. Every (estimator, n, rep)
unit derives its own seed from the master seed, so runs are deterministic
and units are independent; a fit failure taints only its own row.
"""

from __future__ import annotations

import csv
import json
import math
import pathlib
import time
import zlib
from dataclasses import dataclass

import numpy as np

from . import synth
from .exceptions import ContractError
from .localized import (
    fit_distributed_average,
    fit_localized,
    fit_localized_nystrom,
)
from .krls import fit_krls
from .nystrom import fit_nystrom
from .partition import build_grid_partition
from .synth import SyntheticTask, gen_inputs, mise_estimate, sample_labels
from .theory import l_schedule, lambda_schedule, m_schedule, rate_exponent

ESTIMATORS = ("krls", "localized", "nystrom", "localized_nystrom", "distributed_avg")

CSV_HEADER = "estimator,n,m,l,lambda,rep,mise,fit_seconds,min_cell_count,warning"


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a rate or schedule-comparison run needs.

    schedule_mode "auto" derives lambda, m, l from the task's model
    parameters; "explicit" takes them from the per-n lists, which must then
    match the n grid in length.
    """

    task: SyntheticTask
    estimators: tuple
    n_grid: tuple
    replications: int
    n_test: int
    master_seed: int
    schedule_mode: str = "auto"
    lambdas: tuple | None = None
    ms: tuple | None = None
    ls: tuple | None = None
    output_path: str | None = None
    experiment: str = "rate"

    def __post_init__(self):
        object.__setattr__(self, "estimators", tuple(self.estimators))
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        for est in self.estimators:
            if est not in ESTIMATORS:
                raise ContractError(f"unknown estimator {est!r}")
        if not self.estimators:
            raise ContractError("need at least one estimator")
        if not self.n_grid:
            raise ContractError("need at least one n")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ContractError("n grid must be strictly ascending")
        if self.replications < 1:
            raise ContractError("replications must be at least 1")
        if self.n_test < 1:
            raise ContractError("n_test must be at least 1")
        if self.schedule_mode not in ("auto", "explicit"):
            raise ContractError(f"unknown schedule mode {self.schedule_mode!r}")
        if self.schedule_mode == "explicit":
            for name, vals in (("lambdas", self.lambdas), ("ms", self.ms), ("ls", self.ls)):
                if vals is None:
                    continue
                if len(vals) != len(self.n_grid):
                    raise ContractError(f"{name} must match the n grid in length")
        if self.experiment not in ("rate", "improved_bound"):
            raise ContractError(f"unknown experiment kind {self.experiment!r}")


@dataclass(frozen=True)
class Row:
    """One fitted unit. m, l and min_cell_count are None when not applicable."""

    estimator: str
    n: int
    m: int | None
    l: int | None
    lam: float
    rep: int
    mise: float
    fit_seconds: float
    min_cell_count: int | None
    warning: str = ""


@dataclass(frozen=True)
class RateReport:
    """Rows plus per-estimator (slope, stderr) and the theoretical exponent.

    A slope is None when fewer than two n values produced positive mean
    MISE for that estimator.
    """

    rows: tuple
    slopes: dict
    theoretical_exponent: float | None


def estimator_seed_id(name: str) -> int:
    """Stable integer tag for an estimator name (crc32 of the bytes)."""
    return zlib.crc32(name.encode("ascii"))


def row_seeds(master_seed: int, estimator: str, n: int, rep: int):
    """Independent child seeds (data, labels, fit, test) for one unit."""
    root = np.random.SeedSequence(
        [int(master_seed), estimator_seed_id(estimator), int(n), int(rep)]
    )
    return root.spawn(4)


def _seed_int(seed_seq) -> int:
    return int(seed_seq.generate_state(1, np.uint64)[0])


def schedule_values(config: ExperimentConfig, i: int, r: float | None = None):
    """(lambda, m, l) for grid position i, honoring the schedule mode."""
    n = config.n_grid[i]
    params = config.task.model_params()
    lam = lambda_schedule(n, params, r=r)
    m = m_schedule(n, params, r=r)
    l = l_schedule(n, params, r=r)
    if config.schedule_mode == "explicit":
        if config.lambdas is not None:
            lam = float(config.lambdas[i])
        if config.ms is not None:
            m = int(config.ms[i])
        if config.ls is not None:
            l = int(config.ls[i])
    if not lam > 0:
        raise ContractError("scheduled lambda must be positive")
    if m < 1 or l < 1:
        raise ContractError("scheduled m and l must be at least 1")
    return lam, m, l


def _marginal_partition(task: SyntheticTask, m: int):
    _, lo, hi = task.marginal
    return build_grid_partition(((lo, hi),), m)


def fit_estimator(estimator: str, task: SyntheticTask, x, y, lam, m, l, fit_seed):
    """Dispatch a single fit. Returns (model, used_m, used_l, min_cell_count)."""
    spec = task.kernel
    if estimator == "krls":
        return fit_krls(x, y, lam, spec), None, None, None
    if estimator == "nystrom":
        model = fit_nystrom(x, y, lam, min(l, len(y)), _seed_int(fit_seed), spec)
        return model, None, min(l, len(y)), None
    if estimator == "localized":
        part = _marginal_partition(task, m)
        model = fit_localized(x, y, part, lam, spec)
        return model, m, None, model.cell_stats.min_count
    if estimator == "localized_nystrom":
        part = _marginal_partition(task, m)
        model = fit_localized_nystrom(x, y, part, lam, l, _seed_int(fit_seed), spec)
        return model, m, l, model.cell_stats.min_count
    if estimator == "distributed_avg":
        model = fit_distributed_average(x, y, min(m, len(y)), lam, spec, _seed_int(fit_seed))
        return model, min(m, len(y)), None, None
    raise ContractError(f"unknown estimator {estimator!r}")


def _run_units(config: ExperimentConfig, estimators, lam_for):
    """Shared loop over (estimator, n, rep). lam_for(i) -> per-n lambda."""
    rows = []
    for estimator in estimators:
        for i, n in enumerate(config.n_grid):
            lam, m, l = lam_for(i)
            for rep in range(config.replications):
                data_s, label_s, fit_s, test_s = row_seeds(
                    config.master_seed, estimator, n, rep
                )
                x = gen_inputs(config.task, n, data_s)
                y = sample_labels(config.task, x, label_s)
                warning = ""
                mise = math.nan
                fit_seconds = math.nan
                used_m = used_l = mcc = None
                try:
                    tic = time.perf_counter()
                    model, used_m, used_l, mcc = fit_estimator(
                        estimator, config.task, x, y, lam, m, l, fit_s
                    )
                    fit_seconds = time.perf_counter() - tic
                    mise = mise_estimate(model, config.task, config.n_test, test_s)
                    if mcc is not None and mcc < 1:
                        warning = "empty_cell"
                except Exception as exc:  # keep the grid running; taint this row only
                    warning = f"error:{type(exc).__name__}"
                rows.append(
                    Row(
                        estimator=estimator,
                        n=n,
                        m=used_m,
                        l=used_l,
                        lam=lam,
                        rep=rep,
                        mise=mise,
                        fit_seconds=fit_seconds,
                        min_cell_count=mcc,
                        warning=warning,
                    )
                )
    return rows


def mean_mise_curve(rows, estimator: str):
    """Per-n mean MISE over replications for one estimator; skips NaN rows."""
    by_n = {}
    for row in rows:
        if row.estimator != estimator or not math.isfinite(row.mise):
            continue
        by_n.setdefault(row.n, []).append(row.mise)
    return sorted((n, float(np.mean(v))) for n, v in by_n.items())


def fit_loglog_slope(points) -> tuple:
    """OLS slope and standard error of log(mise) against log(n).

    Needs at least two points with positive mise; with exactly two the fit
    is exact and the standard error is 0.
    """
    pts = [(float(n), float(mise)) for n, mise in points]
    if len(pts) < 2:
        raise ContractError("need at least two points for a slope")
    if any(mise <= 0 for _, mise in pts):
        raise ContractError("mise values must be positive for a log-log fit")
    lx = np.log([n for n, _ in pts])
    ly = np.log([m for _, m in pts])
    sxx = float(np.sum((lx - lx.mean()) ** 2))
    if sxx == 0:
        raise ContractError("need at least two distinct n values")
    slope = float(np.sum((lx - lx.mean()) * (ly - ly.mean())) / sxx)
    intercept = ly.mean() - slope * lx.mean()
    resid = ly - (intercept + slope * lx)
    dof = len(pts) - 2
    stderr = math.sqrt(float(resid @ resid) / dof / sxx) if dof > 0 else 0.0
    return slope, stderr


def _slopes(rows, estimators):
    out = {}
    for est in estimators:
        curve = mean_mise_curve(rows, est)
        usable = [(n, m) for n, m in curve if m > 0]
        out[est] = fit_loglog_slope(usable) if len(usable) >= 2 else None
    return out


def run_rate_experiment(config: ExperimentConfig) -> RateReport:
    """Fit every configured estimator across the n grid and summarize slopes."""
    rows = _run_units(config, config.estimators, lambda i: schedule_values(config, i))
    params = config.task.model_params()
    return RateReport(
        rows=tuple(rows),
        slopes=_slopes(rows, config.estimators),
        theoretical_exponent=rate_exponent(params),
    )


def run_improved_bound_experiment(config: ExperimentConfig):
    """Schedule comparison on a two-smoothness task; returns (rough, smooth).

    Runs the localized estimator twice on identical data streams: once with
    the lambda schedule driven by the low smoothness r_l and once by the
    high smoothness r_h. Everything else (partition size, seeds, test
    draws) is shared, so replications pair exactly. The exceptional-mass
    bound is checked at the largest n before any fitting.
    """
    target = config.task.target
    if not isinstance(target, synth.PiecewiseTarget):
        raise ContractError("improved-bound runs need a piecewise target")
    mass, bound, ok = config.task.exceptional_mass_bound(config.n_grid[-1])
    if not ok:
        raise ContractError(
            f"exceptional mass {mass:.4g} exceeds the allowed bound {bound:.4g} "
            f"at n={config.n_grid[-1]}"
        )
    params = config.task.model_params()

    def arm(r_value):
        # Only lambda differs between arms; m and l follow the shared schedule.
        def lam_for(i):
            _, m, l = schedule_values(config, i)
            return lambda_schedule(config.n_grid[i], params, r=r_value), m, l

        rows = _run_units(config, ("localized",), lam_for)
        return RateReport(
            rows=tuple(rows),
            slopes=_slopes(rows, ("localized",)),
            theoretical_exponent=rate_exponent(params, r=r_value),
        )

    return arm(target.r_l), arm(target.r_h)


def paired_contrast(report_a: RateReport, report_b: RateReport):
    """Per-n paired statistics of MISE(a) - MISE(b) matched on (n, rep).

    Returns a list of dicts with the mean difference, its standard error
    over replications, and the z score. Positive z favors b.
    """
    info_a = {(r.n, r.rep): r.mise for r in report_a.rows}
    info_b = {(r.n, r.rep): r.mise for r in report_b.rows}
    if set(info_a) != set(info_b):
        raise ContractError("reports do not cover the same (n, rep) units")
    out = []
    for n in sorted({key[0] for key in info_a}):
        diffs = np.array(
            [
                info_a[(n, rep)] - info_b[(n, rep)]
                for (nn, rep) in sorted(info_a)
                if nn == n
            ]
        )
        if not np.all(np.isfinite(diffs)):
            raise ContractError(f"non-finite mise in the contrast at n={n}")
        mean = float(diffs.mean())
        se = float(diffs.std(ddof=1) / math.sqrt(len(diffs))) if len(diffs) > 1 else 0.0
        z = mean / se if se > 0 else math.inf * np.sign(mean) if mean else 0.0
        out.append({"n": n, "mean_diff": mean, "se": se, "z": float(z)})
    return out


@dataclass(frozen=True)
class TimingRow:
    estimator: str
    n: int
    median_fit_seconds: float


@dataclass(frozen=True)
class TimingTable:
    rows: tuple
    scaling_exponents: dict


def run_timing_benchmark(config: ExperimentConfig, repeats: int = 5) -> TimingTable:
    """Median-of-``repeats`` fit wall time per (estimator, n), run serially.

    Times cover the fit call only; data generation and prediction are
    excluded. Scaling exponents are log-log slopes of median time vs n.
    """
    rows = []
    for estimator in config.estimators:
        for i, n in enumerate(config.n_grid):
            lam, m, l = schedule_values(config, i)
            data_s, label_s, fit_s, _ = row_seeds(config.master_seed, estimator, n, 0)
            x = gen_inputs(config.task, n, data_s)
            y = sample_labels(config.task, x, label_s)
            times = []
            for _ in range(repeats):
                tic = time.perf_counter()
                fit_estimator(estimator, config.task, x, y, lam, m, l, fit_s)
                times.append(time.perf_counter() - tic)
            rows.append(TimingRow(estimator, n, float(np.median(times))))
    exponents = {}
    for estimator in config.estimators:
        pts = [(r.n, r.median_fit_seconds) for r in rows if r.estimator == estimator]
        pts = [(n, t) for n, t in pts if t > 0]
        exponents[estimator] = fit_loglog_slope(pts)[0] if len(pts) >= 2 else None
    return TimingTable(rows=tuple(rows), scaling_exponents=exponents)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_opt_int(text: str):
    return int(text) if text else None


def emit_report(report: RateReport, path, task: SyntheticTask | None = None):
    """Write rows.csv and summary.json under ``path`` (a directory).

    Overwrites idempotently. When the task is given, its target coefficient
    vectors go to coefficients.json for audit. Rows are sorted by
    (estimator, n, rep) before writing, so emission is order-independent.
    """
    out = pathlib.Path(path)
    out.mkdir(parents=True, exist_ok=True)
    rows_path = out / "rows.csv"
    ordered = sorted(report.rows, key=lambda r: (r.estimator, r.n, r.rep))
    with open(rows_path, "w", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        for r in ordered:
            writer.writerow(
                [
                    r.estimator,
                    r.n,
                    _fmt(r.m),
                    _fmt(r.l),
                    _fmt(r.lam),
                    r.rep,
                    _fmt(r.mise),
                    _fmt(r.fit_seconds),
                    _fmt(r.min_cell_count),
                    r.warning,
                ]
            )
    summary = {
        "theoretical_exponent": report.theoretical_exponent,
        "slopes": {
            est: (None if val is None else {"slope": val[0], "stderr": val[1]})
            for est, val in report.slopes.items()
        },
        "row_count": len(report.rows),
        "failed_rows": sum(1 for r in report.rows if r.warning.startswith("error:")),
    }
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if task is not None:
        from . import serialize

        with open(out / "coefficients.json", "w") as fh:
            json.dump(serialize.target_coefficients(task.target), fh, indent=2)
            fh.write("\n")
    return rows_path, out / "summary.json"


def parse_report(path) -> RateReport:
    """Rebuild a RateReport from a report directory (rows.csv inverse of emit)."""
    out = pathlib.Path(path)
    rows_path = out if out.suffix == ".csv" else out / "rows.csv"
    rows = []
    with open(rows_path, newline="") as fh:
        header = fh.readline().rstrip("\n")
        if header != CSV_HEADER:
            raise ContractError(f"unexpected CSV header {header!r}")
        for record in csv.reader(fh):
            if not record:
                continue
            rows.append(
                Row(
                    estimator=record[0],
                    n=int(record[1]),
                    m=_parse_opt_int(record[2]),
                    l=_parse_opt_int(record[3]),
                    lam=float(record[4]),
                    rep=int(record[5]),
                    mise=float(record[6]),
                    fit_seconds=float(record[7]),
                    min_cell_count=_parse_opt_int(record[8]),
                    warning=record[9],
                )
            )
    summary_path = rows_path.parent / "summary.json"
    slopes = {}
    exponent = None
    if summary_path.exists():
        with open(summary_path) as fh:
            summary = json.load(fh)
        exponent = summary.get("theoretical_exponent")
        for est, val in summary.get("slopes", {}).items():
            slopes[est] = None if val is None else (val["slope"], val["stderr"])
    else:
        estimators = sorted({r.estimator for r in rows})
        slopes = _slopes(rows, estimators)
    return RateReport(rows=tuple(rows), slopes=slopes, theoretical_exponent=exponent)
