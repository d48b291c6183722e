import csv
import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gramdp import bench
from gramdp.bench import (
    SweepConfig,
    collect_trials,
    default_epsilon_grid,
    emit_report,
    epsilon_grid,
    error_metrics,
    load_report,
    run_sweep,
    synthetic_column,
    trial_rng,
)
from gramdp.errors import EmptyResults, TrueValueZero
from gramdp.mechanisms import PrivacyParams
from gramdp.queries import QuerySpec, prepare
from gramdp.sensitivity import BoundedDomain

AGE = BoundedDomain(18, 90)


def test_error_metrics_examples():
    m = error_metrics(10, [10, 10])
    assert (m.mean_scaled_error, m.mse, m.rmspe_percent) == (0, 0, 0)
    m = error_metrics(10, [8, 12])
    assert m.mean_scaled_error == 0
    assert m.mse == 4
    assert m.rmspe_percent == pytest.approx(20.0)
    with pytest.raises(TrueValueZero):
        error_metrics(0, [1])
    with pytest.raises(EmptyResults):
        error_metrics(1, [])


@given(t=st.floats(-1e3, 1e3).filter(lambda x: abs(x) > 1e-3),
       rs=st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=50))
def test_mse_dominates_squared_bias(t, rs):
    m = error_metrics(t, rs)
    bias = float(np.mean(np.asarray(rs) - t))
    assert m.mse >= bias**2 - 1e-9 * max(1.0, m.mse)
    assert m.mse >= 0 and m.rmspe_percent >= 0


def test_default_grid():
    g = default_epsilon_grid()
    assert len(g) == 25
    assert g[0] == 0.01 and g[-1] == 0.49
    assert all(b - a == pytest.approx(0.02) for a, b in zip(g, g[1:]))
    assert all(x > 0 for x in g)
    assert g == [round(0.01 + 0.02 * k, 12) for k in range(25)]


def test_epsilon_grid_guards():
    for args in [(0.01, 0.5, 0), (0, 0.5, 0.1), (0.5, 0.1, 0.1), (0.1, 0.5, -0.1)]:
        with pytest.raises(ValueError):
            epsilon_grid(*args)
    assert epsilon_grid(0.1, 0.1, 0.05) == [0.1]


@pytest.mark.parametrize("kw", [dict(epsilons=()), dict(epsilons=(0.2, 0.1)), dict(epsilons=(0.1, 0.1)),
                                dict(epsilons=(0.0,)), dict(epsilons=(0.1,), iterations=0),
                                dict(epsilons=(0.1,), master_seed=-1)])
def test_sweep_config_rejects(kw):
    with pytest.raises(ValueError):
        SweepConfig(**kw)


def test_vanishing_noise_epsilon():
    col = synthetic_column(50)
    cfg = SweepConfig(tuple(default_epsilon_grid()) + (1e9,), 1, "mean", AGE, master_seed=3)
    rep = run_sweep(col, cfg)
    assert rep.records[-1].metrics.mse < 1e-8
    assert [r.epsilon for r in rep.records] == list(cfg.epsilons)


def test_sweep_is_deterministic(tmp_path):
    col = synthetic_column(100)
    cfg = SweepConfig(tuple(default_epsilon_grid()), 5, "sum", AGE, master_seed=9)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_report(run_sweep(col, cfg), "csv", a)
    emit_report(run_sweep(col, cfg), "csv", b)
    assert a.read_bytes() == b.read_bytes()
    assert run_sweep(col, cfg) == run_sweep(col, cfg)


def test_each_trial_depends_only_on_its_own_indices():
    col = synthetic_column(100)
    eps = (0.1, 0.2, 0.3)
    full = collect_trials(col, SweepConfig(eps, 4, "mean", AGE, master_seed=2))[1]
    prepared = prepare("mean", col.values, QuerySpec("mean", PrivacyParams(0.1), AGE))
    for i in reversed(range(3)):
        for j in reversed(range(4)):
            value, _ = prepared.release(PrivacyParams(eps[i]), trial_rng(2, i, j))
            assert full[i][j] == value


def test_mean_rmspe_decreases():
    col = synthetic_column(1000)
    rep = run_sweep(col, SweepConfig(tuple(default_epsilon_grid()), 100, "mean", AGE, master_seed=1))
    assert rep.records[-1].metrics.rmspe_percent < rep.records[0].metrics.rmspe_percent


def test_true_value_zero_becomes_null_metric():
    col = [-1.0, 1.0, -2.0, 2.0]
    cfg = SweepConfig((0.5, 1.0), 3, "sum", BoundedDomain(-2, 2))
    with pytest.warns(RuntimeWarning):
        rep = run_sweep(col, cfg)
    assert rep.records[0].metrics.rmspe_percent is None
    assert rep.records[0].metrics.mean_scaled_error is None
    assert rep.records[0].metrics.mse >= 0
    assert rep.warnings


def test_csv_report(tmp_path):
    rep = run_sweep(synthetic_column(100), SweepConfig(tuple(default_epsilon_grid()), 3, "mean", AGE))
    path = emit_report(rep, "csv", tmp_path / "r.csv")
    lines = path.read_text().splitlines()
    assert len(lines) == 26
    assert lines[0] == "epsilon,mean_dp,mean_scaled_error,mse,rmspe_percent,iterations"
    row = next(csv.DictReader(lines))
    assert float(row["epsilon"]) == 0.01 and row["iterations"] == "3"
    assert row["mse"] == format(rep.records[0].metrics.mse, ".12g")


def test_json_round_trip(tmp_path):
    col = [1.0, -1.0, 3.0]
    rep = run_sweep(col, SweepConfig((0.2, 0.4), 2, "variance", BoundedDomain(-1, 3)), timestamp="2026-01-01T00:00:00+00:00")
    path = emit_report(rep, "json", tmp_path / "r.json")
    assert load_report(path) == rep
    doc = json.loads(path.read_text())
    assert doc["mode"] == bench.MODE


def test_null_metric_round_trip(tmp_path):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = run_sweep([-1.0, 1.0], SweepConfig((1.0,), 2, "sum", BoundedDomain(-1, 1)))
    assert load_report(emit_report(rep, "json", tmp_path / "n.json")) == rep
    line = emit_report(rep, "csv", tmp_path / "n.csv").read_text().splitlines()[1]
    assert line.split(",")[2] == "" and line.split(",")[4] == ""


def test_unknown_format(tmp_path):
    rep = run_sweep([1.0, 2.0], SweepConfig((1.0,), 1, "count"))
    with pytest.raises(ValueError):
        emit_report(rep, "xml", tmp_path / "r.xml")


def test_synthetic_column():
    col = synthetic_column()
    assert len(col) == 1000
    assert min(col.values) >= 18 and max(col.values) <= 90
    assert all(float(v).is_integer() for v in col.values)
    assert synthetic_column() == col


def test_mean_pre_clamp_mse_matches_analytic():
    col = synthetic_column(200)
    cfg = SweepConfig((0.5,), 20_000, "mean", AGE, master_seed=4)
    true, trials, _, _ = collect_trials(col, cfg, pre_clamp=True)
    mse = float(np.mean((trials[0] - true) ** 2))
    assert mse == pytest.approx(2 * (72 / 200 / 0.5) ** 2, rel=0.10)
    assert math.isfinite(mse)
