"""Seeded random primitives and the geometric-mean scale estimator.

Randomness comes from numpy's Philox counter-based generator keyed directly
by ``(seed, stream_id)``, so any (seed, stream) pair names the same sequence
on every platform and under any threading layout.  Substreams are cheap to
create, which lets callers assign one stream per replicate or per worker
without coordination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

_UINT64_MASK = (1 << 64) - 1


class RandomStream:
    """A reproducible stream addressed by ``(seed, stream_id)``.

    Single-owner: draw methods advance internal state, so concurrent callers
    must each hold their own stream.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed) & _UINT64_MASK
        self.stream_id = int(stream_id) & _UINT64_MASK
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        self.generator = np.random.Generator(np.random.Philox(key=key))

    def substream(self, stream_id: int) -> "RandomStream":
        """A fresh stream with the same seed and the given stream id."""
        return RandomStream(self.seed, stream_id)

    def random(self, size=None):
        return self.generator.random(size)

    def standard_normal(self, size=None):
        return self.generator.standard_normal(size)

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, stream_id={self.stream_id})"


def sample_cauchy(center: float, scale: float, rng: RandomStream, size=None):
    """Centered-and-scaled Cauchy draws via the tangent quantile transform."""
    if scale < 0:
        raise ParameterError(f"Cauchy scale must be >= 0, got {scale}")
    u = rng.random(size)
    return center + scale * np.tan(np.pi * (u - 0.5))


def sample_std_normal(rng: RandomStream, size=None):
    return rng.standard_normal(size)


def sample_chi2_1(rng: RandomStream, size=None):
    """Chi-squared with one degree of freedom: the square of a standard normal."""
    z = rng.standard_normal(size)
    return z * z


def required_sample_count(epsilon: float, delta: float, m: int) -> int:
    """Replicates needed so all pairwise scale estimates hit relative error
    ``epsilon`` with probability ``1 - delta``: ``ceil((8/eps)^2 ln(m^2/delta))``.

    ``epsilon`` must lie in ``(0, 1/2]``; the estimator's concentration bound
    is only stated on that range and we refuse to extrapolate.
    """
    if not (0.0 < epsilon <= 0.5):
        raise ParameterError(f"epsilon must be in (0, 1/2], got {epsilon}")
    if not (0.0 < delta < 1.0):
        raise ParameterError(f"delta must be in (0, 1), got {delta}")
    if m < 2:
        raise ParameterError(f"m must be >= 2, got {m}")
    return int(math.ceil((8.0 / epsilon) ** 2 * math.log(m * m / delta)))


@dataclass
class ScaleEstimate:
    """An estimated Cauchy scale with the targets it was computed for."""

    value: float
    t: int
    epsilon: float | None = None
    delta: float | None = None


def geometric_mean_estimate(
    samples, epsilon: float | None = None, delta: float | None = None
) -> ScaleEstimate:
    """Scale of centered Cauchy samples via the uncorrected geometric mean.

    Computed in log-space, ``exp(mean(log|x|))``, so products cannot
    overflow.  An exact zero sample short-circuits to 0 rather than
    propagating ``-inf``.
    """
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ParameterError("geometric_mean_estimate needs at least one sample")
    ax = np.abs(x)
    if np.any(ax == 0.0):
        return ScaleEstimate(value=0.0, t=int(x.size), epsilon=epsilon, delta=delta)
    value = float(np.exp(np.mean(np.log(ax))))
    return ScaleEstimate(value=value, t=int(x.size), epsilon=epsilon, delta=delta)


def median_scale_estimate(
    samples, epsilon: float | None = None, delta: float | None = None
) -> ScaleEstimate:
    """Scale via the sample median of ``|x|``.

    The median of ``|x|`` for a centered Cauchy equals its scale (the 75th
    percentile factor ``tan(pi/4)`` is 1).  No concentration bound is claimed
    for this estimator; it is provided as a configuration alternative.
    """
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ParameterError("median_scale_estimate needs at least one sample")
    value = float(np.median(np.abs(x)))
    return ScaleEstimate(value=value, t=int(x.size), epsilon=epsilon, delta=delta)
