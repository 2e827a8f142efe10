"""Experiment orchestration: sweeps, scaling regression, slope-table checks.

A sweep walks a (tau12, tau/eps) grid, estimating the mean log escape time
at each point; ordinary least squares of <ln T> + ln tau against tau/eps
then recovers the scaling slope per tau12, which the slope-table routine
compares against the closed-form value 2*(U(SP) - U(FP)).  Records persist
as JSON lines with full float precision.
"""

import datetime
import json
import math
import warnings
from dataclasses import asdict, dataclass, field, fields

import numpy as np
from numpy.random import SeedSequence

from . import __version__
from .mfpt import DEFAULT_CAP, estimate_mfpt
from .model import MapParams, coexistence_window
from .theory import scaling_slope

SCHEMA_VERSION = 1

DEFAULT_TAU12_LIST = (0.8, 0.9, 1.0, 1.1, 1.2)
DEFAULT_RATIO_LIST = (2.0, 3.0, 4.0, 5.0, 6.0, 7.0)

# |simulated - theory| gate for a slope-table row
SLOPE_GATE_FLOOR = 0.05
SLOPE_GATE_SIGMAS = 3.0


@dataclass(frozen=True)
class SweepSpec:
    """Parameter grid and budget for one scaling experiment."""

    a: float = 0.25
    b: float = 0.5
    tau: float = 0.05
    tau12_list: tuple = DEFAULT_TAU12_LIST
    ratio_list: tuple = DEFAULT_RATIO_LIST
    trials: int = 500
    seed: int = 0
    cap: int = DEFAULT_CAP
    out_dir: str = ""

    def __post_init__(self):
        if not (100 <= self.trials <= 10 ** 6):
            raise ValueError(f"trials must lie in [100, 1e6], got {self.trials}")
        if len(self.tau12_list) == 0 or len(self.ratio_list) == 0:
            raise ValueError("tau12_list and ratio_list must be non-empty")
        if min(self.ratio_list) <= 0:
            raise ValueError("tau/eps ratios must be positive")
        if min(self.ratio_list) < 2.0 or max(self.ratio_list) > 7.0:
            warnings.warn(
                "tau/eps ratios outside the usual asymptotic range [2, 7]",
                stacklevel=2,
            )
        for t12 in self.tau12_list:
            if not coexistence_window(self.params_for(t12, self.ratio_list[0])):
                raise ValueError(f"tau12={t12} lies outside the coexistence window")

    def params_for(self, tau12, ratio):
        return MapParams.from_ratio(
            tau12, tau=self.tau, a=self.a, b=self.b, epsilon=self.tau / ratio
        )


@dataclass(frozen=True)
class RunRecord:
    """One persisted grid point of a sweep."""

    tau12: float
    ratio: float
    a: float
    b: float
    tau: float
    epsilon: float
    trials: int
    seed: int
    cap: int
    mean_ln_t: float
    stderr_ln_t: float
    mean_t: float
    censored_count: int
    usable: bool
    timestamp: str
    code_version: str
    schema: int = SCHEMA_VERSION


@dataclass(frozen=True)
class RegressionResult:
    """OLS fit of <ln T> + ln tau against tau/eps for one tau12 series."""

    tau12: float
    slope: float
    slope_stderr: float
    intercept: float
    intercept_stderr: float
    r_squared: float
    points_used: int


@dataclass(frozen=True)
class Table1Row:
    tau12: float
    theory_slope: float
    simulated_slope: float
    simulated_stderr: float
    gate: float
    passed: bool


@dataclass(frozen=True)
class Table1Report:
    rows: list
    records: list

    @property
    def all_passed(self):
        return all(r.passed for r in self.rows)


def point_seed(master_seed, tau12_index, ratio_index):
    """Stable per-grid-point master seed, independent of execution order."""
    seq = SeedSequence(master_seed, spawn_key=(tau12_index, ratio_index))
    return int(seq.generate_state(1, np.uint64)[0])


def run_sweep(spec, progress=None):
    """Run every (tau12, ratio) grid point of ``spec`` and return RunRecords.

    Fully deterministic for a fixed spec seed: each grid point derives its
    own master seed from (seed, grid indices) and each trial within a point
    has its own counter-based noise stream.  Unreliable estimates (censored
    fraction above 1%) are kept but marked unusable for regression.
    """
    records = []
    for i, tau12 in enumerate(spec.tau12_list):
        for j, ratio in enumerate(spec.ratio_list):
            params = spec.params_for(tau12, ratio)
            est = estimate_mfpt(
                params, spec.trials, seed=point_seed(spec.seed, i, j), cap=spec.cap
            )
            if not est.reliable:
                warnings.warn(
                    f"unreliable estimate at tau12={tau12}, ratio={ratio}: "
                    f"{est.censored_count}/{est.trials} trials censored",
                    stacklevel=2,
                )
            record = RunRecord(
                tau12=float(tau12),
                ratio=float(ratio),
                a=spec.a,
                b=spec.b,
                tau=spec.tau,
                epsilon=spec.tau / ratio,
                trials=spec.trials,
                seed=spec.seed,
                cap=spec.cap,
                mean_ln_t=est.mean_ln_t,
                stderr_ln_t=est.stderr_ln_t,
                mean_t=est.mean_t,
                censored_count=est.censored_count,
                usable=est.reliable,
                timestamp=datetime.datetime.now(datetime.timezone.utc).isoformat(),
                code_version=__version__,
            )
            records.append(record)
            if progress is not None:
                progress(record)
    return records


def fit_scaling(records, weighted=False):
    """OLS of y = mean_ln_t + ln(tau) against x = tau/eps for one tau12.

    The slope estimates twice the barrier and the intercept estimates the
    log prefactor.  ``weighted=True`` uses inverse-variance weights from the
    per-point standard errors instead of the default unweighted fit.
    """
    usable = [r for r in records if r.usable]
    if len(usable) < 3:
        raise ValueError(f"need at least 3 usable records to fit, got {len(usable)}")
    tau12s = {r.tau12 for r in usable}
    if len(tau12s) != 1:
        raise ValueError(f"records mix tau12 values: {sorted(tau12s)}")
    x = np.array([r.ratio for r in usable])
    y = np.array([r.mean_ln_t + math.log(r.tau) for r in usable])
    if weighted:
        w = np.array([1.0 / max(r.stderr_ln_t, 1e-12) ** 2 for r in usable])
    else:
        w = np.ones_like(x)
    wsum = w.sum()
    xbar = (w * x).sum() / wsum
    ybar = (w * y).sum() / wsum
    sxx = (w * (x - xbar) ** 2).sum()
    slope = (w * (x - xbar) * (y - ybar)).sum() / sxx
    intercept = ybar - slope * xbar
    resid = y - (slope * x + intercept)
    n = len(x)
    dof = n - 2
    sigma2 = (w * resid ** 2).sum() / dof if dof > 0 else 0.0
    slope_stderr = math.sqrt(sigma2 / sxx)
    intercept_stderr = math.sqrt(sigma2 * (1.0 / wsum + xbar ** 2 / sxx))
    ss_tot = (w * (y - ybar) ** 2).sum()
    r_squared = 1.0 - (w * resid ** 2).sum() / ss_tot if ss_tot > 0 else 1.0
    return RegressionResult(
        tau12=usable[0].tau12,
        slope=float(slope),
        slope_stderr=float(slope_stderr),
        intercept=float(intercept),
        intercept_stderr=float(intercept_stderr),
        r_squared=float(r_squared),
        points_used=n,
    )


def reproduce_table1(spec=None, records=None, progress=None):
    """Theory versus simulated scaling slopes over the default tau12 grid.

    For each tau12 the closed-form slope 2*(U(SP) - U(FP)) is compared with
    the fitted Monte Carlo slope; a row passes when the difference is within
    max(3 * slope_stderr, 0.05).  Supply ``records`` to re-check an existing
    sweep instead of running a new one.
    """
    spec = spec if spec is not None else SweepSpec()
    if records is None:
        records = run_sweep(spec, progress=progress)
    rows = []
    for tau12 in spec.tau12_list:
        series = [r for r in records if r.tau12 == tau12]
        theory = scaling_slope(spec.params_for(tau12, spec.ratio_list[0]))
        fit = fit_scaling(series)
        gate = max(SLOPE_GATE_SIGMAS * fit.slope_stderr, SLOPE_GATE_FLOOR)
        rows.append(
            Table1Row(
                tau12=float(tau12),
                theory_slope=theory,
                simulated_slope=fit.slope,
                simulated_stderr=fit.slope_stderr,
                gate=gate,
                passed=abs(fit.slope - theory) <= gate,
            )
        )
    return Table1Report(rows=rows, records=list(records))


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

_RECORD_FIELDS = [f.name for f in fields(RunRecord)]


def persist_records(records, path):
    """Append-friendly JSON-lines dump, one record per line, full precision."""
    with open(path, "w") as fh:
        for record in records:
            fh.write(json.dumps(asdict(record)) + "\n")


def load_records(path):
    """Load records written by :func:`persist_records`.

    Malformed lines are skipped with a warning naming the line number;
    lines missing a field are skipped with a warning naming the field.
    """
    records = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                payload = json.loads(line)
            except json.JSONDecodeError as exc:
                warnings.warn(f"{path}:{lineno}: malformed JSON line skipped ({exc})",
                              stacklevel=2)
                continue
            missing = [name for name in _RECORD_FIELDS if name not in payload]
            if missing:
                warnings.warn(
                    f"{path}:{lineno}: record missing field(s) {missing}, skipped",
                    stacklevel=2,
                )
                continue
            records.append(RunRecord(**{k: payload[k] for k in _RECORD_FIELDS}))
    return records
