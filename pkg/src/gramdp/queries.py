"""Differentially private count, sum, mean and variance.

Each query clamps its inputs into the declared bounds (unless told the data
is already certified in range), adds Laplace noise calibrated to the
closed-form sensitivity, then clamps the answer into the query's feasible
range:

    count     [0, 2n], rounded to a non-negative integer
    sum       [n*lower, n*upper]
    mean      [lower, upper]
    variance  [0, (upper - lower)**2]

Variance is released as the 1/(n-1) sample variance. The noise is added to
the 1/n population variance, whose change-one sensitivity is exactly
``variance_sensitivity``, and the noisy value is then multiplied by
n/(n-1). Both that rescaling and the output clamps are post-processing.

Released results never carry the true aggregate. Tests that need it go
through :func:`run_query_exposing_true_value`.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import ingest
from .errors import EmptyColumn, NeedAtLeastTwoRows, PrivacyWarning, UnresolvedBounds
from .mechanisms import OutputRange, PrivacyParams, laplace_mechanism
from .sensitivity import (
    BoundedDomain,
    QueryKind,
    count_sensitivity,
    mean_sensitivity,
    sum_sensitivity,
    variance_sensitivity,
)


class PrivacyLevel(enum.Enum):
    VERY_HIGH = "very_high"
    HIGH = "high"
    MODERATE = "moderate"
    LOW = "low"
    VERY_LOW = "very_low"

    @classmethod
    def parse(cls, name: "str | PrivacyLevel") -> "PrivacyLevel":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name))
        except ValueError:
            choices = ", ".join(level.value for level in cls)
            raise ValueError(f"unknown privacy level {name!r}; choose one of {choices}") from None


# Ordered strongest to weakest privacy.
LEVEL_EPSILONS: dict[PrivacyLevel, float] = {
    PrivacyLevel.VERY_HIGH: 0.01,
    PrivacyLevel.HIGH: 0.1,
    PrivacyLevel.MODERATE: 0.5,
    PrivacyLevel.LOW: 1.0,
    PrivacyLevel.VERY_LOW: 5.0,
}


def level_to_epsilon(level: PrivacyLevel | str) -> PrivacyParams:
    return PrivacyParams(LEVEL_EPSILONS[PrivacyLevel.parse(level)])


@dataclass(frozen=True)
class QuerySpec:
    """What to compute and under which privacy parameters.

    ``privacy`` is either explicit :class:`PrivacyParams` or a named
    :class:`PrivacyLevel` (a level name string is accepted too).
    ``bounds=None`` means the bounds still have to be inferred.
    """

    kind: QueryKind
    privacy: PrivacyParams | PrivacyLevel
    bounds: BoundedDomain | None = None
    clamp_inputs: bool = True
    bounds_inferred: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", QueryKind.parse(self.kind))
        if isinstance(self.privacy, str):
            object.__setattr__(self, "privacy", PrivacyLevel.parse(self.privacy))
        if not isinstance(self.privacy, (PrivacyParams, PrivacyLevel)):
            raise TypeError("privacy must be PrivacyParams or a PrivacyLevel")
        if isinstance(self.privacy, PrivacyParams) and not self.privacy.is_pure:
            raise ValueError("queries use the Laplace mechanism and need delta = 0")

    @property
    def params(self) -> PrivacyParams:
        if isinstance(self.privacy, PrivacyLevel):
            return level_to_epsilon(self.privacy)
        return self.privacy

    @property
    def level(self) -> PrivacyLevel | None:
        return self.privacy if isinstance(self.privacy, PrivacyLevel) else None


@dataclass(frozen=True)
class DpResult:
    value: float
    epsilon_spent: float
    query: QueryKind
    bounds_used: BoundedDomain | None
    bounds_were_inferred: bool
    level: PrivacyLevel | None = None
    true_value_withheld: bool = field(default=True, init=False)

    def to_dict(self) -> dict:
        bounds = None
        if self.bounds_used is not None:
            bounds = {"lower": self.bounds_used.lower, "upper": self.bounds_used.upper}
        return {
            "query": self.query.value,
            "value": self.value,
            "epsilon_spent": self.epsilon_spent,
            "level": self.level.value if self.level else None,
            "bounds_used": bounds,
            "bounds_were_inferred": self.bounds_were_inferred,
            "true_value_withheld": self.true_value_withheld,
        }


class ReleaseTrace(NamedTuple):
    true_value: float
    pre_clamp: float


@dataclass(frozen=True)
class PreparedQuery:
    """A query with its true statistic and calibration fixed, ready for repeated noising."""

    kind: QueryKind
    n: int
    noised_statistic: float
    sensitivity: float
    rescale: float
    output_range: OutputRange
    true_value: float

    def release(self, params: PrivacyParams, rng) -> tuple[float, float]:
        """Return ``(value, pre_clamp)``; only ``value`` may be published."""
        noisy = laplace_mechanism(self.noised_statistic, self.sensitivity, params, rng)
        noisy *= self.rescale
        value = self.output_range.clamp(noisy)
        if self.kind is QueryKind.COUNT:
            value = float(math.floor(value + 0.5))
        return value, noisy


def _column_array(column) -> np.ndarray:
    values = column.values if isinstance(column, ingest.NumericColumn) else column
    return np.asarray(values, dtype=float)


def prepare(kind: QueryKind | str, column, spec: QuerySpec) -> PreparedQuery:
    kind = QueryKind.parse(kind)
    x = _column_array(column)
    n = int(x.size)
    if n == 0:
        raise EmptyColumn(getattr(column, "name", ""))
    if kind is QueryKind.COUNT:
        return PreparedQuery(kind, n, float(n), count_sensitivity(), 1.0,
                             OutputRange(0.0, 2.0 * n), float(n))

    d = spec.bounds
    if d is None:
        raise UnresolvedBounds(kind.value)
    if kind is QueryKind.VARIANCE and n < 2:
        raise NeedAtLeastTwoRows(n)
    if spec.clamp_inputs:
        x = np.clip(x, d.lower, d.upper)

    if kind is QueryKind.SUM:
        total = float(x.sum())
        return PreparedQuery(kind, n, total, sum_sensitivity(d), 1.0,
                             OutputRange(n * d.lower, n * d.upper), total)
    if kind is QueryKind.MEAN:
        mean = float(x.mean())
        return PreparedQuery(kind, n, mean, mean_sensitivity(d, n), 1.0,
                             OutputRange(d.lower, d.upper), mean)
    pop_var = float(x.var())
    rescale = n / (n - 1)
    return PreparedQuery(kind, n, pop_var, variance_sensitivity(d, n), rescale,
                         OutputRange(0.0, d.width**2), pop_var * rescale)


def _resolve_bounds(column, spec: QuerySpec) -> QuerySpec:
    if spec.bounds is not None or spec.kind is QueryKind.COUNT:
        return spec
    d, inferred = ingest.infer_bounds(_column_array(column).tolist(), warn=False)
    warnings.warn(
        f"{spec.kind.value} query bounds inferred from the data as [{d.lower:g}, {d.upper:g}]; "
        "data-derived bounds leak information",
        PrivacyWarning,
        stacklevel=3,
    )
    return QuerySpec(spec.kind, spec.privacy, d, spec.clamp_inputs, bounds_inferred=inferred)


def _execute(kind: QueryKind, column, spec: QuerySpec, rng) -> tuple[DpResult, ReleaseTrace]:
    prepared = prepare(kind, column, spec)
    params = spec.params
    value, pre_clamp = prepared.release(params, rng)
    result = DpResult(
        value=value,
        epsilon_spent=params.epsilon,
        query=kind,
        bounds_used=spec.bounds,
        bounds_were_inferred=spec.bounds_inferred,
        level=spec.level,
    )
    return result, ReleaseTrace(prepared.true_value, pre_clamp)


def dp_count(column, spec: QuerySpec, rng) -> DpResult:
    """Noisy number of rows, Laplace scale 1/epsilon."""
    return _execute(QueryKind.COUNT, column, spec, rng)[0]


def dp_sum(column, spec: QuerySpec, rng) -> DpResult:
    return _execute(QueryKind.SUM, column, spec, rng)[0]


def dp_mean(column, spec: QuerySpec, rng) -> DpResult:
    return _execute(QueryKind.MEAN, column, spec, rng)[0]


def dp_variance(column, spec: QuerySpec, rng) -> DpResult:
    """Noisy sample variance; needs at least two rows."""
    return _execute(QueryKind.VARIANCE, column, spec, rng)[0]


def run_query(column, spec: QuerySpec, rng) -> DpResult:
    """Dispatch on ``spec.kind``, inferring missing bounds with a :class:`PrivacyWarning`."""
    spec = _resolve_bounds(column, spec)
    return _execute(spec.kind, column, spec, rng)[0]


def run_query_exposing_true_value(column, spec: QuerySpec, rng) -> tuple[DpResult, ReleaseTrace]:
    """TEST/BENCHMARK HOOK. Returns the true aggregate and the pre-clamp noisy value.

    Never use this for a real release: the trace contains the unprotected answer.
    """
    spec = _resolve_bounds(column, spec)
    return _execute(spec.kind, column, spec, rng)
