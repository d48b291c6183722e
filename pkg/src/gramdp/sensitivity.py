"""Closed-form l1/l2 sensitivities for count, sum, mean and variance.

All bounds are for the bounded (change-one) neighbour model: two datasets
of the same size n that differ in the value of one record, every value
lying in ``[lower, upper]``. For scalar queries the l1 and l2
sensitivities coincide, so one number serves both.

Count keeps sensitivity 1 even though substituting one record never
changes the number of rows; the count is read as a predicate or
histogram-cell count, where one substitution moves at most one record in
or out of the cell.

The variance bound ``(n - 1) / n**2 * (upper - lower)**2`` is exactly the
change-one sensitivity of the *population* variance (divide by n). It does
not bound the 1/(n-1) sample variance, which can move n/(n-1) times
further. :mod:`gramdp.queries` therefore noises the population variance
and rescales afterwards; :func:`brute_force_sensitivity` measures the same
population statistic so the oracle checks the quantity actually noised.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import InfeasibleEnumeration, UnknownQueryKind

MAX_ENUMERATION = 10**6


class QueryKind(enum.Enum):
    COUNT = "count"
    SUM = "sum"
    MEAN = "mean"
    VARIANCE = "variance"

    @classmethod
    def parse(cls, name: "str | QueryKind") -> "QueryKind":
        """Look up a kind by name. ``var`` is accepted for variance."""
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower()
        if key == "var":
            key = "variance"
        try:
            return cls(key)
        except ValueError:
            raise UnknownQueryKind(str(name)) from None


@dataclass(frozen=True)
class BoundedDomain:
    """Declared value range ``[lower, upper]`` of a numeric column."""

    lower: float
    upper: float

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise ValueError("bounds must be finite")
        if not self.lower < self.upper:
            raise ValueError(
                f"lower bound must be strictly below upper bound, got [{self.lower}, {self.upper}]"
            )

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper


def count_sensitivity() -> float:
    return 1.0


def sum_sensitivity(d: BoundedDomain) -> float:
    return d.width


def _check_rows(n: int, minimum: int, what: str) -> None:
    if int(n) != n or n < minimum:
        raise ValueError(f"{what} sensitivity needs n >= {minimum}, got {n}")


def mean_sensitivity(d: BoundedDomain, n: int) -> float:
    _check_rows(n, 1, "mean")
    return d.width / n


def variance_sensitivity(d: BoundedDomain, n: int) -> float:
    _check_rows(n, 2, "variance")
    return (n - 1) / n**2 * d.width**2


def sensitivity_for(kind: QueryKind | str, d: BoundedDomain | None, n: int) -> float:
    kind = QueryKind.parse(kind)
    if kind is QueryKind.COUNT:
        return count_sensitivity()
    if d is None:
        raise ValueError(f"{kind.value} sensitivity needs a bounded domain")
    if kind is QueryKind.SUM:
        return sum_sensitivity(d)
    if kind is QueryKind.MEAN:
        return mean_sensitivity(d, n)
    return variance_sensitivity(d, n)


def _plain(kind: QueryKind, xs: Sequence[float]) -> float:
    n = len(xs)
    if kind is QueryKind.COUNT:
        return float(n)
    total = math.fsum(xs)
    if kind is QueryKind.SUM:
        return total
    mean = total / n
    if kind is QueryKind.MEAN:
        return mean
    return math.fsum((x - mean) ** 2 for x in xs) / n


def brute_force_sensitivity(
    kind: QueryKind | str, d: BoundedDomain, n: int, grid: Sequence[float]
) -> float:
    """Largest change-one difference of the query over every dataset on ``grid``.

    Enumerates all ``len(grid)**n`` datasets and, for each, every
    substitution of one position by another grid value. Variance is the
    population (1/n) variance, see the module docstring.
    """
    kind = QueryKind.parse(kind)
    grid = [float(g) for g in grid]
    if not grid:
        raise ValueError("grid must not be empty")
    if any(not d.contains(g) for g in grid):
        raise ValueError("grid values must lie inside the domain")
    _check_rows(n, 2 if kind is QueryKind.VARIANCE else 1, kind.value)
    if len(grid) ** n > MAX_ENUMERATION:
        raise InfeasibleEnumeration(
            f"{len(grid)}**{n} datasets exceeds the enumeration cap of {MAX_ENUMERATION}"
        )
    worst = 0.0
    for data in itertools.product(grid, repeat=n):
        base = _plain(kind, data)
        for i in range(n):
            for g in grid:
                if g == data[i]:
                    continue
                neighbour = data[:i] + (g,) + data[i + 1:]
                worst = max(worst, abs(_plain(kind, neighbour) - base))
    return worst
