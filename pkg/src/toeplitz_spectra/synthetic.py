"""Synthetic level sequences with known statistics, used as estimator oracles."""

from __future__ import annotations

import numpy as np


def poisson_levels(rng: np.random.Generator, n_levels: int) -> np.ndarray:
    """Levels with i.i.d. unit-mean exponential spacings."""
    return np.cumsum(rng.exponential(1.0, size=n_levels))


def semi_poisson_levels(rng: np.random.Generator, n_levels: int) -> np.ndarray:
    """Levels with i.i.d. Gamma(2, 1/2) spacings (density 4 s e^{-2s}, unit mean)."""
    return np.cumsum(rng.gamma(2.0, 0.5, size=n_levels))


def sample_spacing_mixture(rng, size, amp_slow, rate_slow, amp_fast, rate_fast) -> np.ndarray:
    """Draws from the normalized two-exponential law A e^{-a s} + B e^{-b s}."""
    w_slow = amp_slow / rate_slow
    w_fast = amp_fast / rate_fast
    fast = rng.random(size) < w_fast / (w_slow + w_fast)
    rate = np.where(fast, rate_fast, rate_slow)
    return rng.exponential(1.0, size) / rate


def sample_ratio_rational(rng, size, scale, lin, quad, r_max=1e6) -> np.ndarray:
    """Draws from the normalized law c / (1 + alpha r + beta r^2) on [0, r_max] by inverse CDF."""
    grid = np.concatenate([[0.0], np.geomspace(1e-6, r_max, 400_000)])
    pdf = scale / (1.0 + lin * grid + quad * grid**2)
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (pdf[1:] + pdf[:-1]) * np.diff(grid))])
    cdf /= cdf[-1]
    return np.interp(rng.random(size), cdf, grid)
