"""Epsilon-sweep benchmark harness.

For every epsilon on a grid the query is re-run ``iterations`` times and
scored against the non-private answer with three metrics:

    mean_scaled_error  (1/K) * sum((r - t) / |t|)         signed, shows bias
    mse                (1/K) * sum((r - t) ** 2)
    rmspe_percent      100 * sqrt((1/K) * sum(((r - t) / t) ** 2))

Each trial draws from its own random stream derived from
``(master_seed, epsilon_index, iteration)``, so a sweep gives the same
numbers whatever order (or process) the trials run in. Sweeps are
benchmarks, not releases: nothing is charged to a budget and the report
says so.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import EmptyResults, TrueValueZero
from .ingest import NumericColumn, infer_bounds
from .mechanisms import PrivacyParams, RngStream
from .queries import QuerySpec, prepare
from .sensitivity import BoundedDomain, QueryKind

MODE = "benchmark (non-release)"
CSV_HEADER = ("epsilon", "mean_dp", "mean_scaled_error", "mse", "rmspe_percent", "iterations")


@dataclass(frozen=True)
class ErrorMetrics:
    mean_scaled_error: float | None
    mse: float
    rmspe_percent: float | None


def error_metrics(true_value: float, results: Sequence[float]) -> ErrorMetrics:
    r = np.asarray(results, dtype=float)
    if r.size == 0:
        raise EmptyResults()
    if true_value == 0:
        raise TrueValueZero()
    err = r - true_value
    return ErrorMetrics(
        mean_scaled_error=float(np.mean(err / abs(true_value))),
        mse=float(np.mean(err**2)),
        rmspe_percent=float(100.0 * math.sqrt(np.mean((err / true_value) ** 2))),
    )


def epsilon_grid(start: float, stop: float, step: float) -> list[float]:
    """``start, start + step, ...`` up to ``stop`` inclusive, by integer stepping."""
    if not (start > 0 and step > 0 and stop >= start):
        raise ValueError(f"need 0 < start <= stop and step > 0, got {start}, {stop}, {step}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(count)]


def default_epsilon_grid() -> list[float]:
    """0.01, 0.03, ..., 0.49 (25 values)."""
    return epsilon_grid(0.01, 0.49, 0.02)


@dataclass(frozen=True)
class SweepConfig:
    epsilons: tuple[float, ...]
    iterations: int = 100
    kind: QueryKind = QueryKind.MEAN
    bounds: BoundedDomain | None = None
    clamp_inputs: bool = True
    master_seed: int = 0
    bounds_inferred: bool = False

    def __post_init__(self):
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))
        object.__setattr__(self, "kind", QueryKind.parse(self.kind))
        if not self.epsilons:
            raise ValueError("epsilon grid is empty")
        if any(not (e > 0 and math.isfinite(e)) for e in self.epsilons):
            raise ValueError("every epsilon must be positive and finite")
        if any(b <= a for a, b in zip(self.epsilons, self.epsilons[1:])):
            raise ValueError("epsilons must be strictly increasing")
        if int(self.iterations) != self.iterations or self.iterations < 1:
            raise ValueError(f"iterations must be a positive integer, got {self.iterations}")
        if int(self.master_seed) != self.master_seed or self.master_seed < 0:
            raise ValueError(f"master seed must be a non-negative integer, got {self.master_seed}")


@dataclass(frozen=True)
class SweepRecord:
    epsilon: float
    mean_dp: float
    metrics: ErrorMetrics
    iterations: int


@dataclass(frozen=True)
class SweepReport:
    query: str
    column: str
    n_rows: int
    bounds: tuple[float, float] | None
    bounds_inferred: bool
    master_seed: int
    iterations: int
    records: tuple[SweepRecord, ...]
    timestamp: str | None = None
    mode: str = MODE
    warnings: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SweepReport":
        records = tuple(
            SweepRecord(r["epsilon"], r["mean_dp"], ErrorMetrics(**r["metrics"]), r["iterations"])
            for r in d["records"]
        )
        bounds = tuple(d["bounds"]) if d["bounds"] is not None else None
        return cls(
            query=d["query"],
            column=d["column"],
            n_rows=d["n_rows"],
            bounds=bounds,
            bounds_inferred=d["bounds_inferred"],
            master_seed=d["master_seed"],
            iterations=d["iterations"],
            records=records,
            timestamp=d.get("timestamp"),
            mode=d.get("mode", MODE),
            warnings=tuple(d.get("warnings", ())),
        )


def trial_rng(master_seed: int, eps_index: int, iteration: int) -> RngStream:
    return RngStream(np.random.SeedSequence([master_seed, eps_index, iteration]))


def _values(column) -> list[float]:
    return list(column.values if isinstance(column, NumericColumn) else column)


def _resolve(column, cfg: SweepConfig) -> tuple[BoundedDomain | None, bool]:
    if cfg.bounds is not None or cfg.kind is QueryKind.COUNT:
        return cfg.bounds, cfg.bounds_inferred
    return infer_bounds(_values(column), warn=True)


def collect_trials(column, cfg: SweepConfig, *, pre_clamp: bool = False):
    """Run every trial of the sweep.

    Returns ``(true_value, per_epsilon_results, bounds, inferred)`` where
    ``per_epsilon_results[i]`` is an array of ``cfg.iterations`` released
    values for ``cfg.epsilons[i]``. With ``pre_clamp=True`` the arrays hold
    the noisy answers before output clamping and rounding instead; that is
    for calibration checks only and must never be published.
    """
    bounds, inferred = _resolve(column, cfg)
    spec = QuerySpec(cfg.kind, PrivacyParams(cfg.epsilons[0]), bounds, cfg.clamp_inputs, inferred)
    prepared = prepare(cfg.kind, _values(column), spec)
    out = []
    for i, eps in enumerate(cfg.epsilons):
        params = PrivacyParams(eps)
        vals = np.empty(cfg.iterations)
        for j in range(cfg.iterations):
            released, raw = prepared.release(params, trial_rng(cfg.master_seed, i, j))
            vals[j] = raw if pre_clamp else released
        out.append(vals)
    return prepared.true_value, out, bounds, inferred


def run_sweep(column, cfg: SweepConfig, timestamp: str | None = None) -> SweepReport:
    """Sweep ``cfg.epsilons`` and score each against the true aggregate.

    When the true aggregate is 0 the scaled metrics are undefined; they are
    reported as None with a warning and the sweep carries on.
    """
    true_value, trials, bounds, inferred = collect_trials(column, cfg)
    notes = []
    if inferred:
        notes.append("bounds inferred from data; they leak the column's extremes")
    records = []
    for eps, vals in zip(cfg.epsilons, trials):
        try:
            metrics = error_metrics(true_value, vals)
        except TrueValueZero:
            mse = float(np.mean((vals - true_value) ** 2))
            metrics = ErrorMetrics(None, mse, None)
            msg = f"true value is 0 at epsilon={eps:g}; scaled metrics undefined"
            warnings.warn(msg, RuntimeWarning, stacklevel=2)
            notes.append(msg)
        records.append(SweepRecord(eps, float(np.mean(vals)), metrics, cfg.iterations))
    return SweepReport(
        query=cfg.kind.value,
        column=getattr(column, "name", ""),
        n_rows=len(_values(column)),
        bounds=(bounds.lower, bounds.upper) if bounds is not None else None,
        bounds_inferred=inferred,
        master_seed=cfg.master_seed,
        iterations=cfg.iterations,
        records=tuple(records),
        timestamp=timestamp,
        warnings=tuple(notes),
    )


def _fmt(x: float | None) -> str:
    return "" if x is None else format(x, ".12g")


def emit_report(r: SweepReport, fmt: str, path: str | Path) -> Path:
    """Write ``r`` as ``csv`` (one row per epsilon) or ``json`` (everything)."""
    path = Path(path)
    if fmt == "csv":
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for rec in r.records:
                m = rec.metrics
                w.writerow([_fmt(rec.epsilon), _fmt(rec.mean_dp), _fmt(m.mean_scaled_error),
                            _fmt(m.mse), _fmt(m.rmspe_percent), rec.iterations])
    elif fmt == "json":
        path.write_text(json.dumps(r.to_dict(), indent=2) + "\n", encoding="utf-8")
    else:
        raise ValueError(f"unknown report format {fmt!r}; use csv or json")
    return path


def load_report(path: str | Path) -> SweepReport:
    return SweepReport.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def synthetic_column(n: int = 1000, lower: int = 18, upper: int = 90, seed: int = 42,
                     name: str = "synthetic") -> NumericColumn:
    """``n`` uniform integers in ``[lower, upper]`` from a fixed seed."""
    values = np.random.default_rng(seed).integers(lower, upper + 1, size=n)
    return NumericColumn(name, tuple(float(v) for v in values), n)
