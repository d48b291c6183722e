"""gramdp: differential privacy for people who just want a safe statistic.

Pick a column, a query (count, sum, mean, variance) and either an epsilon
or a named privacy level; gramdp handles sensitivity, Laplace noise and
clamping.
"""

from .errors import GramDPError, PrivacyWarning
from .mechanisms import PrivacyParams, ReplayRng, RngStream
from .queries import (
    LEVEL_EPSILONS,
    DpResult,
    PrivacyLevel,
    QuerySpec,
    dp_count,
    dp_mean,
    dp_sum,
    dp_variance,
    level_to_epsilon,
    run_query,
)
from .sensitivity import BoundedDomain, QueryKind

__version__ = "0.1.0"

__all__ = [
    "BoundedDomain",
    "DpResult",
    "GramDPError",
    "LEVEL_EPSILONS",
    "PrivacyLevel",
    "PrivacyParams",
    "PrivacyWarning",
    "QueryKind",
    "QuerySpec",
    "ReplayRng",
    "RngStream",
    "dp_count",
    "dp_mean",
    "dp_sum",
    "dp_variance",
    "level_to_epsilon",
    "run_query",
]
