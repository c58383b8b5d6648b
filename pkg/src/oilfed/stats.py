"""Normal-distribution primitives used by the estimator and the allocation heuristics."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from oilfed.errors import ConfigError

_SQRT2 = math.sqrt(2.0)

TRUNCATION_RETRIES = 1000


@dataclass(frozen=True)
class NormalDist:
    """A normal distribution N(mean, stddev**2) over a duration or a length."""

    mean: float
    stddev: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mean) and math.isfinite(self.stddev)):
            raise ValueError(f"non-finite NormalDist({self.mean}, {self.stddev})")
        if self.stddev < 0:
            raise ValueError(f"negative stddev {self.stddev}")

    @property
    def variance(self) -> float:
        return self.stddev * self.stddev


@dataclass(frozen=True)
class OnlineStat:
    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    @property
    def variance(self) -> float:
        """Sample variance; 0 until at least two observations."""
        if self.count < 2:
            return 0.0
        return self.m2 / (self.count - 1)

    def to_dist(self) -> NormalDist:
        return NormalDist(self.mean, math.sqrt(self.variance))


def normal_cdf(z: float) -> float:
    """Standard normal CDF, evaluated through erfc so both tails keep full precision."""
    if not math.isfinite(z):
        raise ValueError(f"normal_cdf requires a finite argument, got {z!r}")
    return 0.5 * math.erfc(-z / _SQRT2)


def convolve_normals(a: NormalDist, b: NormalDist) -> NormalDist:
    """Distribution of the sum of two independent normals."""
    return NormalDist(a.mean + b.mean, math.hypot(a.stddev, b.stddev))


def prob_before(dist: NormalDist, budget: float) -> float:
    """P(X <= budget) for X ~ dist. A zero-variance dist is treated as a step at its mean."""
    if dist.stddev == 0.0:
        return 1.0 if budget >= dist.mean else 0.0
    z = (budget - dist.mean) / dist.stddev
    if math.isinf(z):  # a subnormal stddev can overflow the ratio
        return 1.0 if z > 0 else 0.0
    return normal_cdf(z)


def sample_truncated_normal(dist: NormalDist, floor: float, rng: random.Random) -> float:
    """Draw from ``dist`` conditioned on the result being >= ``floor``.

    Rejection sampling; after ``TRUNCATION_RETRIES`` rejections the floor itself
    is returned. Raises ConfigError if the floor sits so far in the upper tail
    that rejection would essentially never succeed.
    """
    reachable = floor < dist.mean + 10.0 * dist.stddev or (dist.stddev == 0.0 and floor <= dist.mean)
    if not reachable:
        raise ConfigError(f"truncation floor {floor} is beyond mean + 10 sd of {dist}")
    if dist.stddev == 0.0:
        return dist.mean
    for _ in range(TRUNCATION_RETRIES):
        x = rng.normalvariate(dist.mean, dist.stddev)
        if x >= floor:
            return x
    return floor


def welford_update(acc: OnlineStat, x: float) -> OnlineStat:
    if not math.isfinite(x):
        raise ValueError(f"cannot accumulate non-finite value {x!r}")
    count = acc.count + 1
    delta = x - acc.mean
    mean = acc.mean + delta / count
    m2 = acc.m2 + delta * (x - mean)
    return OnlineStat(count, mean, max(m2, 0.0))
