"""Content catalog: Zipf popularity, per-content request rates, size law."""

from dataclasses import dataclass, field

import numpy as np


def zipf_popularity(n, s):
    """Return the Zipf(s) request probabilities of contents ranked 1..n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    weights = np.arange(1, n + 1, dtype=float) ** (-float(s))
    return weights / weights.sum()


@dataclass(frozen=True)
class SizeDistribution:
    """Exponential content size with the given mean (megabits)."""

    mean_size: float

    def __post_init__(self):
        if not self.mean_size > 0:
            raise ValueError("mean_size must be positive")

    @property
    def rate(self):
        return 1.0 / self.mean_size


def size_cdf_one(x, dist):
    """P(S <= x) for one exponential content size."""
    if x < 0:
        return 0.0
    return float(-np.expm1(-dist.rate * x))


def size_cdf_sum2(x, dist):
    """P(S_1 + S_2 <= x) for two i.i.d. exponential sizes (Erlang-2 CDF)."""
    if x < 0:
        return 0.0
    z = dist.rate * x
    return float(1.0 - np.exp(-z) * (1.0 + z))


@dataclass(frozen=True)
class ContentCatalog:
    n_contents: int
    zipf_s: float
    request_rate_total: float
    popularity: np.ndarray = field(init=False, repr=False, compare=False)
    request_rate: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.request_rate_total < 0:
            raise ValueError("request_rate_total must be nonnegative")
        pop = zipf_popularity(self.n_contents, self.zipf_s)
        pop.setflags(write=False)
        rates = pop * self.request_rate_total
        rates.setflags(write=False)
        object.__setattr__(self, "popularity", pop)
        object.__setattr__(self, "request_rate", rates)

    def with_rate(self, request_rate_total):
        return ContentCatalog(self.n_contents, self.zipf_s, request_rate_total)
