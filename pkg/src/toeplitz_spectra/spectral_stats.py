"""Unfolding and spectral correlation estimators.

All estimators take pools (sequences) of per-realization spectra and reduce
them in pool order, so results depend only on the pool contents and order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .eigensolver import SpectrumRecord
from .ensemble import EnsembleSpec
from .errors import UnfoldingError

DEFAULT_RETAINED_FRACTION = 0.6
DEFAULT_POLY_DEGREE = 3
SPACING_BIN_WIDTH, SPACING_MAX = 0.1, 4.0
RATIO_BIN_WIDTH, RATIO_MAX = 0.1, 5.0
DEGENERATE_SPACING_TOL = 1e-12


def default_tau_grid(step: float = 0.02, tau_max: float = 3.0) -> np.ndarray:
    return step * np.arange(1, int(round(tau_max / step)) + 1)


@dataclass(frozen=True, eq=False)
class UnfoldedSpectrum:
    values: np.ndarray
    retained_fraction: float
    poly_degree: int
    source_meta: EnsembleSpec | None = None

    @property
    def size(self) -> int:
        return self.values.size


@dataclass(frozen=True, eq=False)
class HistogramEstimate:
    """Binned density; ``density * width`` summed plus ``overflow_mass`` is 1.

    ``excluded_count`` tracks samples that could not be formed at all (zero
    denominators of the ratio statistic); they are part of the overflow.
    """

    bin_edges: np.ndarray
    density: np.ndarray
    std_error: np.ndarray
    sample_count: int
    overflow_mass: float
    counts: np.ndarray | None = None
    excluded_count: int = 0

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)

    def total_mass(self) -> float:
        return float(np.sum(self.density * self.widths) + self.overflow_mass)


@dataclass(frozen=True, eq=False)
class FormFactorEstimate:
    tau_grid: np.ndarray
    k_values: np.ndarray
    std_error: np.ndarray
    realization_count: int
    levels_per_realization: int
    per_realization: np.ndarray | None = field(default=None, repr=False)


def _eigenvalues(spectrum) -> np.ndarray:
    if isinstance(spectrum, SpectrumRecord):
        return spectrum.eigenvalues
    if isinstance(spectrum, UnfoldedSpectrum):
        return spectrum.values
    return np.asarray(spectrum, dtype=float)


def central_window(n_levels: int, retained_fraction: float) -> slice:
    """Central ceil(fraction * n) indices around the median."""
    if not 0.0 < retained_fraction <= 1.0:
        raise ValueError(f"retained_fraction must lie in (0, 1], got {retained_fraction}")
    m = min(n_levels, math.ceil(retained_fraction * n_levels - 1e-9))
    start = (n_levels - m) // 2
    return slice(start, start + m)


def unfold(
    spectrum,
    retained_fraction: float = DEFAULT_RETAINED_FRACTION,
    poly_degree: int = DEFAULT_POLY_DEGREE,
) -> UnfoldedSpectrum:
    """Map the central part of a spectrum to unit mean spacing.

    A degree-``poly_degree`` polynomial is least-squares fitted to the
    staircase (e_j, j) on the retained window and evaluated at each retained
    level; the result is rescaled so the mean spacing is exactly 1.
    """
    e = _eigenvalues(spectrum)
    if e.size < 20:
        raise ValueError(f"need at least 20 eigenvalues to unfold, got {e.size}")
    win = central_window(e.size, retained_fraction)
    w = e[win]
    if w.size < poly_degree + 2:
        raise ValueError(f"{w.size} retained levels cannot support a degree-{poly_degree} fit")
    idx = np.arange(win.start, win.stop, dtype=float)
    poly = np.polynomial.Polynomial.fit(w, idx, poly_degree)
    grid = np.linspace(w[0], w[-1], 4 * w.size)
    x = poly(w)
    if np.any(poly.deriv()(grid) <= 0) or np.any(np.diff(x) < 0):
        raise UnfoldingError("fitted staircase is not monotone over the retained window")
    spacing = (x[-1] - x[0]) / (x.size - 1)
    if not spacing > 0:
        raise UnfoldingError("retained window has zero extent")
    meta = spectrum.ensemble_meta if isinstance(spectrum, SpectrumRecord) else None
    return UnfoldedSpectrum(x / spacing, float(retained_fraction), int(poly_degree), meta)


def histogram(samples: np.ndarray, edges: np.ndarray, excluded: int = 0) -> HistogramEstimate:
    """Normalized histogram; samples outside [edges[0], edges[-1]] and ``excluded`` go to overflow."""
    samples = np.asarray(samples, dtype=float)
    edges = np.asarray(edges, dtype=float)
    total = samples.size + excluded
    if total == 0:
        raise ValueError("no samples to histogram")
    counts, _ = np.histogram(samples, edges)
    width = np.diff(edges)
    density = counts / (total * width)
    std_error = np.sqrt(counts) / (total * width)
    inside = int(counts.sum())
    return HistogramEstimate(edges, density, std_error, int(total),
                             (total - inside) / total, counts, int(excluded))


def _edges(width: float, upper: float) -> np.ndarray:
    nbins = int(round(upper / width))
    return np.linspace(0.0, nbins * width, nbins + 1)


def nn_spacing_distribution(
    pool: Sequence,
    n: int = 0,
    bin_width: float = SPACING_BIN_WIDTH,
    s_max: float = SPACING_MAX,
) -> HistogramEstimate:
    """Histogram of s = x_{j+1+n} - x_j over all unfolded spectra in the pool."""
    if len(pool) == 0:
        raise ValueError("empty pool")
    if n < 0:
        raise ValueError("n must be non-negative")
    gaps = []
    for spec in pool:
        x = _eigenvalues(spec)
        if x.size <= n + 1:
            raise ValueError(f"spectrum with {x.size} levels is too short for n = {n}")
        gaps.append(x[n + 1:] - x[: -(n + 1)])
    return histogram(np.concatenate(gaps), _edges(bin_width, s_max))


def consecutive_ratios(levels: np.ndarray, tol: float = DEGENERATE_SPACING_TOL) -> tuple[np.ndarray, int]:
    """Ratios (e_{j+2} - e_{j+1}) / (e_{j+1} - e_j) and the number of zero denominators.

    A denominator below ``tol`` times the spectral radius counts as zero.
    """
    e = np.asarray(levels, dtype=float)
    d = np.diff(e)
    radius = np.max(np.abs(e)) if e.size else 0.0
    num, den = d[1:], d[:-1]
    zero = den <= tol * radius
    return num[~zero] / den[~zero], int(zero.sum())


def ratio_distribution(
    pool: Sequence,
    bin_width: float = RATIO_BIN_WIDTH,
    r_max: float = RATIO_MAX,
    retained_fraction: float = DEFAULT_RETAINED_FRACTION,
) -> HistogramEstimate:
    """Histogram of raw-eigenvalue ratios in the central retained window; no unfolding."""
    if len(pool) == 0:
        raise ValueError("empty pool")
    ratios, zeros = [], 0
    for spec in pool:
        e = _eigenvalues(spec)
        if e.size < 3:
            raise ValueError("ratio statistic needs at least 3 eigenvalues")
        r, z = consecutive_ratios(e[central_window(e.size, retained_fraction)])
        ratios.append(r)
        zeros += z
    return histogram(np.concatenate(ratios), _edges(bin_width, r_max), excluded=zeros)


def form_factor(pool: Sequence, tau_grid=None, chunk: int = 64) -> FormFactorEstimate:
    """K(tau) = < |sum_j exp(2 pi i x_j tau)|^2 > / M over the pool."""
    if len(pool) == 0:
        raise ValueError("empty pool")
    tau = default_tau_grid() if tau_grid is None else np.asarray(tau_grid, dtype=float)
    if np.any(tau <= 0):
        raise ValueError("tau grid must be positive")
    levels = [_eigenvalues(s) for s in pool]
    m = levels[0].size
    if any(x.size != m for x in levels):
        raise ValueError("form factor needs equal retained counts across the pool")
    xs = np.stack(levels)
    curves = np.empty((xs.shape[0], tau.size))
    for lo in range(0, xs.shape[0], chunk):
        block = xs[lo:lo + chunk]
        phase = np.exp(2j * np.pi * block[:, :, None] * tau[None, None, :]).sum(axis=1)
        curves[lo:lo + chunk] = np.abs(phase) ** 2 / m
    r = curves.shape[0]
    k = curves.mean(axis=0)
    se = curves.std(axis=0, ddof=1) / np.sqrt(r) if r > 1 else np.zeros_like(k)
    return FormFactorEstimate(tau, k, se, r, m, curves)


COMPRESSIBILITY_WINDOW = (0.05, 0.25)


def compressibility(ff: FormFactorEstimate, window=COMPRESSIBILITY_WINDOW) -> tuple[float, float]:
    """Mean of K(tau) over the small-tau window and its standard error.

    For exact semi-Poisson K this window averages to about 0.53, slightly
    above the tau -> 0 limit of 1/2.
    """
    lo, hi = window
    tau = np.asarray(ff.tau_grid)
    sel = (tau >= lo) & (tau <= hi)
    if tau.min() > lo or tau.max() < hi or not sel.any():
        raise ValueError(f"tau grid does not cover the window [{lo}, {hi}]")
    chi = float(np.mean(np.asarray(ff.k_values)[sel]))
    if ff.per_realization is not None and ff.per_realization.shape[0] > 1:
        per = ff.per_realization[:, sel].mean(axis=1)
        se = float(per.std(ddof=1) / np.sqrt(per.size))
    else:
        se = float(np.mean(np.asarray(ff.std_error)[sel]))
    return chi, se


def density_estimate(pool: Sequence, bin_width: float = 0.1) -> HistogramEstimate:
    """Histogram of e_j / sqrt(N) pooled over realizations, unit mass, bins symmetric about 0."""
    if len(pool) == 0:
        raise ValueError("empty pool")
    scaled = np.concatenate([_eigenvalues(s) / np.sqrt(_eigenvalues(s).size) for s in pool])
    half = max(math.ceil(np.max(np.abs(scaled)) / bin_width), 1) * bin_width
    nbins = int(round(2 * half / bin_width))
    edges = np.linspace(-half, half, nbins + 1)
    return histogram(scaled, edges)
