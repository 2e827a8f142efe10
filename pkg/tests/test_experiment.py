"""Sweeps, scaling regression, slope-table reproduction and persistence."""

import dataclasses
import math

import numpy as np
import pytest

import mapescape as me
from mapescape.experiment import RunRecord, SCHEMA_VERSION

SMALL_SPEC = me.SweepSpec(tau12_list=(1.0,), ratio_list=(2.0, 3.0, 4.0), trials=100, seed=13)


@pytest.fixture(scope="module")
def small_records():
    return me.run_sweep(SMALL_SPEC)


# ---------------------------------------------------------------------------
# spec validation
# ---------------------------------------------------------------------------

def test_spec_rejects_bad_budgets():
    with pytest.raises(ValueError, match="trials"):
        me.SweepSpec(trials=50)
    with pytest.raises(ValueError, match="trials"):
        me.SweepSpec(trials=2 * 10 ** 6)
    with pytest.raises(ValueError, match="positive"):
        me.SweepSpec(ratio_list=(2.0, -1.0))
    with pytest.raises(ValueError, match="non-empty"):
        me.SweepSpec(tau12_list=())
    with pytest.raises(ValueError, match="coexistence"):
        me.SweepSpec(tau12_list=(0.3,))


def test_spec_warns_on_unusual_ratios():
    with pytest.warns(UserWarning, match="asymptotic"):
        me.SweepSpec(ratio_list=(1.5, 3.0, 9.0))


def test_default_spec_matches_published_protocol():
    spec = me.SweepSpec()
    assert spec.tau12_list == (0.8, 0.9, 1.0, 1.1, 1.2)
    assert spec.ratio_list == (2.0, 3.0, 4.0, 5.0, 6.0, 7.0)
    assert spec.trials == 500
    assert (spec.a, spec.b, spec.tau) == (0.25, 0.5, 0.05)


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def test_single_point_sweep_yields_one_record():
    spec = me.SweepSpec(tau12_list=(1.0,), ratio_list=(2.0,), trials=100, seed=4)
    records = me.run_sweep(spec)
    assert len(records) == 1
    rec = records[0]
    assert rec.epsilon == pytest.approx(spec.tau / 2.0, abs=1e-15)
    assert rec.trials == 100 and rec.usable
    assert rec.schema == SCHEMA_VERSION
    assert rec.code_version == me.__version__


def test_sweep_deterministic_modulo_timestamp(small_records):
    again = me.run_sweep(SMALL_SPEC)
    strip = lambda r: dataclasses.replace(r, timestamp="")
    assert [strip(r) for r in small_records] == [strip(r) for r in again]


def test_point_seed_stable_and_distinct():
    assert me.point_seed(0, 0, 0) == me.point_seed(0, 0, 0)
    seeds = {me.point_seed(0, i, j) for i in range(5) for j in range(6)}
    assert len(seeds) == 30


def test_mean_ln_t_increases_with_ratio(small_records):
    ordered = sorted(small_records, key=lambda r: r.ratio)
    values = [r.mean_ln_t for r in ordered]
    assert values == sorted(values)


# ---------------------------------------------------------------------------
# regression
# ---------------------------------------------------------------------------

def _synthetic_records(x, y, stderr=0.05):
    rows = []
    for xi, yi in zip(x, y):
        rows.append(
            RunRecord(
                tau12=1.0, ratio=float(xi), a=0.25, b=0.5, tau=1.0,
                epsilon=1.0 / xi, trials=500, seed=0, cap=10 ** 8,
                mean_ln_t=float(yi), stderr_ln_t=stderr, mean_t=math.exp(yi),
                censored_count=0, usable=True, timestamp="", code_version="x",
            )
        )
    return rows


def test_fit_recovers_exact_line():
    x = np.array([2.0, 3.0, 4.0, 5.0, 6.0, 7.0])
    y = 0.66 * x + 1.0  # tau = 1 so ln tau = 0
    fit = me.fit_scaling(_synthetic_records(x, y))
    assert fit.slope == pytest.approx(0.66, abs=1e-12)
    assert fit.intercept == pytest.approx(1.0, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.slope_stderr == pytest.approx(0.0, abs=1e-9)
    assert fit.points_used == 6


def test_fit_requires_three_usable_points():
    x = np.array([2.0, 3.0])
    with pytest.raises(ValueError, match="at least 3"):
        me.fit_scaling(_synthetic_records(x, 0.5 * x))
    rows = _synthetic_records(np.array([2.0, 3.0, 4.0]), np.zeros(3))
    rows[0] = dataclasses.replace(rows[0], usable=False)
    with pytest.raises(ValueError, match="at least 3"):
        me.fit_scaling(rows)


def test_fit_rejects_mixed_series():
    rows = _synthetic_records(np.array([2.0, 3.0, 4.0]), np.zeros(3))
    rows[1] = dataclasses.replace(rows[1], tau12=0.9)
    with pytest.raises(ValueError, match="mix"):
        me.fit_scaling(rows)


def test_fit_coverage_on_noisy_synthetic_lines(rng):
    # slope error is Gaussian with sd sigma/sqrt(Sxx); 3-sigma coverage 99.7%
    x = np.array([2.0, 3.0, 4.0, 5.0, 6.0, 7.0])
    sigma = 0.3
    bound = 3.0 * sigma / math.sqrt(((x - x.mean()) ** 2).sum())
    hits = 0
    for _ in range(1000):
        y = 0.66 * x + 1.0 + sigma * rng.standard_normal(len(x))
        fit = me.fit_scaling(_synthetic_records(x, y, stderr=sigma))
        hits += abs(fit.slope - 0.66) <= bound
    assert hits >= 990


def test_weighted_fit_matches_unweighted_for_equal_errors():
    x = np.array([2.0, 3.0, 4.0, 5.0])
    y = 0.5 * x + 0.2
    plain = me.fit_scaling(_synthetic_records(x, y))
    weighted = me.fit_scaling(_synthetic_records(x, y), weighted=True)
    assert weighted.slope == pytest.approx(plain.slope, abs=1e-12)
    assert weighted.intercept == pytest.approx(plain.intercept, abs=1e-12)


def test_fit_on_real_small_sweep(small_records):
    fit = me.fit_scaling(small_records)
    assert fit.points_used == 3
    assert 0.4 < fit.slope < 0.9  # barrier 1/3 ballpark at short ratios
    assert fit.slope_stderr >= 0


# ---------------------------------------------------------------------------
# slope-table report
# ---------------------------------------------------------------------------

def test_reproduce_table_structure(small_records):
    report = me.reproduce_table1(SMALL_SPEC, records=small_records)
    assert len(report.rows) == 1
    row = report.rows[0]
    assert row.tau12 == 1.0
    assert row.theory_slope == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert row.gate == max(3.0 * row.simulated_stderr, 0.05)
    assert report.all_passed == row.passed
    assert report.records == small_records


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

def test_records_round_trip(tmp_path, small_records):
    target = tmp_path / "records.jsonl"
    me.persist_records(small_records, target)
    loaded = me.load_records(target)
    assert loaded == small_records


def test_load_empty_file(tmp_path):
    target = tmp_path / "empty.jsonl"
    target.write_text("")
    assert me.load_records(target) == []


def test_load_skips_malformed_lines(tmp_path, small_records):
    target = tmp_path / "records.jsonl"
    me.persist_records(small_records, target)
    lines = target.read_text().splitlines()
    lines.insert(1, "{not json")
    target.write_text("\n".join(lines) + "\n")
    with pytest.warns(UserWarning, match="malformed"):
        loaded = me.load_records(target)
    assert loaded == small_records


def test_load_warns_on_missing_field(tmp_path, small_records):
    import json

    target = tmp_path / "records.jsonl"
    me.persist_records(small_records, target)
    rows = [json.loads(line) for line in target.read_text().splitlines()]
    del rows[0]["mean_ln_t"]
    target.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
    with pytest.warns(UserWarning, match="mean_ln_t"):
        loaded = me.load_records(target)
    assert loaded == small_records[1:]
