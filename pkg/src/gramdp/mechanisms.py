"""Noise mechanisms: Laplace (plain and output-clamped), Gaussian,
randomized response and the exponential mechanism.

Every sampler takes an explicit random stream so results are reproducible
from a seed. A stream only has to provide ``uniform()`` (one draw in the
open interval (0, 1)) and ``uniforms(size)`` (a numpy array of such draws,
equal to the same number of successive ``uniform()`` calls).

"Bounded Laplace" here means: add ordinary Laplace noise, then clamp the
noisy answer into the query's feasible output range. Clamping is
post-processing, so the epsilon guarantee is exactly that of the plain
Laplace mechanism. It is *not* the truncated-Laplace distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, NamedTuple, Sequence

import numpy as np


class RngStream:
    """Seeded source of uniform draws in (0, 1).

    Backed by numpy's PCG64. A raw draw of exactly 0.0 is rejected and
    redrawn so ``log`` never sees zero; the generator never returns 1.0.

    Args:
        seed: an int, a ``numpy.random.SeedSequence``, or None for fresh
            OS entropy.
    """

    def __init__(self, seed: int | np.random.SeedSequence | None = None):
        self._gen = np.random.Generator(np.random.PCG64(seed))

    def uniform(self) -> float:
        u = self._gen.random()
        while u == 0.0:
            u = self._gen.random()
        return float(u)

    def uniforms(self, size: int) -> np.ndarray:
        u = self._gen.random(size)
        zeros = u == 0.0
        while zeros.any():
            u[zeros] = self._gen.random(int(zeros.sum()))
            zeros = u == 0.0
        return u


class ReplayRng:
    """Stream that replays a fixed list of uniforms, for seeded oracles and tests."""

    def __init__(self, values: Sequence[float]):
        for v in values:
            if not 0.0 < v < 1.0:
                raise ValueError(f"replayed uniforms must lie in (0, 1), got {v}")
        self._values = list(values)
        self._pos = 0

    def uniform(self) -> float:
        if self._pos >= len(self._values):
            raise IndexError("ReplayRng exhausted")
        u = self._values[self._pos]
        self._pos += 1
        return float(u)

    def uniforms(self, size: int) -> np.ndarray:
        return np.array([self.uniform() for _ in range(size)], dtype=float)


@dataclass(frozen=True)
class PrivacyParams:
    """Privacy parameters. ``delta == 0`` means pure epsilon-DP."""

    epsilon: float
    delta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise ValueError(f"epsilon must be a positive finite number, got {self.epsilon}")
        if not 0.0 <= self.delta < 1.0:
            raise ValueError(f"delta must lie in [0, 1), got {self.delta}")

    @property
    def is_pure(self) -> bool:
        return self.delta == 0.0


class OutputRange(NamedTuple):
    lo: float
    hi: float

    def clamp(self, x):
        return min(max(x, self.lo), self.hi)


def _as_params(params: PrivacyParams | float) -> PrivacyParams:
    return params if isinstance(params, PrivacyParams) else PrivacyParams(float(params))


def _check_scale(b: float) -> float:
    b = float(b)
    if not (b > 0 and math.isfinite(b)):
        raise ValueError(f"Laplace scale must be positive and finite, got {b}")
    return b


def laplace_from_uniform(b: float, u: float) -> float:
    """Inverse Laplace(0, b) CDF evaluated at ``u``."""
    d = u - 0.5
    if d == 0.0:
        return 0.0
    return -b * math.copysign(1.0, d) * math.log1p(-2.0 * abs(d))


def sample_laplace(b: float, rng) -> float:
    """One Laplace(0, b) draw by inverse-CDF sampling from a single uniform."""
    return laplace_from_uniform(_check_scale(b), rng.uniform())


def sample_laplace_many(b: float, rng, size: int) -> np.ndarray:
    """Vectorised :func:`sample_laplace`; identical to ``size`` scalar calls on the same stream."""
    b = _check_scale(b)
    d = rng.uniforms(size) - 0.5
    return -b * np.sign(d) * np.log1p(-2.0 * np.abs(d))


def _pure_params(params, sensitivity: float) -> PrivacyParams:
    params = _as_params(params)
    if not params.is_pure:
        raise ValueError("Laplace mechanism gives pure epsilon-DP; use the Gaussian mechanism when delta > 0")
    if not sensitivity >= 0:
        raise ValueError(f"sensitivity must be non-negative, got {sensitivity}")
    return params


def laplace_mechanism(true_value: float, sensitivity: float, params, rng) -> float:
    """Release ``true_value`` plus Laplace(sensitivity / epsilon) noise.

    A zero sensitivity releases the value unchanged and consumes no draw.
    """
    params = _pure_params(params, sensitivity)
    if sensitivity == 0:
        return float(true_value)
    return float(true_value) + sample_laplace(sensitivity / params.epsilon, rng)


def bounded_laplace_mechanism(
    true_value: float, sensitivity: float, params, output_range, rng
) -> float:
    """Laplace mechanism followed by clamping into ``output_range``."""
    lo, hi = output_range
    if lo > hi:
        raise ValueError(f"empty output range [{lo}, {hi}]")
    noisy = laplace_mechanism(true_value, sensitivity, params, rng)
    return float(min(max(noisy, lo), hi))


def gaussian_sigma(params: PrivacyParams, l2_sensitivity: float) -> float:
    """Classic analytic calibration sigma = l2 * sqrt(2 ln(1.25/delta)) / epsilon.

    Only valid for epsilon < 1, so larger epsilons are refused instead of
    silently under-noised.
    """
    if params.delta <= 0:
        raise ValueError("the Gaussian mechanism needs delta > 0")
    if not 0 < params.epsilon < 1:
        raise ValueError(f"Gaussian calibration requires 0 < epsilon < 1, got {params.epsilon}")
    if not l2_sensitivity >= 0:
        raise ValueError(f"sensitivity must be non-negative, got {l2_sensitivity}")
    return l2_sensitivity * math.sqrt(2.0 * math.log(1.25 / params.delta)) / params.epsilon


def sample_gaussian(sigma: float, rng) -> float:
    """N(0, sigma^2) via Box-Muller, cosine branch, two uniforms per draw."""
    u1 = rng.uniform()
    u2 = rng.uniform()
    return sigma * math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


def gaussian_mechanism(true_value: float, l2_sensitivity: float, params: PrivacyParams, rng) -> float:
    sigma = gaussian_sigma(params, l2_sensitivity)
    if sigma == 0:
        return float(true_value)
    return float(true_value) + sample_gaussian(sigma, rng)


def randomized_response_probability(epsilon: float) -> float:
    """Probability of answering truthfully, e^eps / (1 + e^eps)."""
    if epsilon < 0:
        raise ValueError(f"epsilon must be non-negative, got {epsilon}")
    return 1.0 / (1.0 + math.exp(-epsilon))


def randomized_response(true_bit: int, params, rng) -> int:
    params = _as_params(params)
    if not params.is_pure:
        raise ValueError("randomized response is a pure epsilon-DP mechanism")
    if true_bit not in (0, 1):
        raise ValueError(f"randomized response takes a bit, got {true_bit!r}")
    true_bit = int(true_bit)
    p = randomized_response_probability(params.epsilon)
    return true_bit if rng.uniform() < p else 1 - true_bit


def exponential_probabilities(
    utilities: Sequence[float], utility_sensitivity: float, epsilon: float
) -> np.ndarray:
    """Selection probabilities proportional to exp(eps * u / (2 * sensitivity))."""
    if not utility_sensitivity > 0:
        raise ValueError(f"utility sensitivity must be positive, got {utility_sensitivity}")
    u = np.asarray(utilities, dtype=float)
    if u.size == 0:
        raise ValueError("no candidates")
    logits = epsilon * u / (2.0 * utility_sensitivity)
    w = np.exp(logits - logits.max())
    return w / w.sum()


def exponential_mechanism(
    candidates: Sequence[Any],
    utilities: Sequence[float],
    utility_sensitivity: float,
    params,
    rng,
) -> Any:
    """Pick one candidate, favouring high utility. Uses one uniform draw."""
    params = _as_params(params)
    if not params.is_pure:
        raise ValueError("the exponential mechanism is a pure epsilon-DP mechanism")
    if len(candidates) == 0:
        raise ValueError("no candidates")
    if len(candidates) != len(utilities):
        raise ValueError(
            f"{len(candidates)} candidates but {len(utilities)} utilities"
        )
    probs = exponential_probabilities(utilities, utility_sensitivity, params.epsilon)
    cdf = np.cumsum(probs)
    idx = int(np.searchsorted(cdf, rng.uniform(), side="right"))
    return candidates[min(idx, len(candidates) - 1)]
