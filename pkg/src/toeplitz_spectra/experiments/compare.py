"""Deviation reports of an estimate against a reference curve on the estimate's own grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..reference_laws import Observable, ReferenceLaw, bin_average
from ..spectral_stats import FormFactorEstimate, HistogramEstimate


@dataclass(frozen=True)
class ComparisonReport:
    grid: np.ndarray
    estimate: np.ndarray
    reference: np.ndarray
    z_scores: np.ndarray
    sup_norm: float
    argmax: float
    chi2: float
    dof: int

    @property
    def max_abs_z(self) -> float:
        return float(np.max(np.abs(self.z_scores)))

    def to_dict(self) -> dict:
        return {
            "sup_norm": self.sup_norm,
            "argmax": self.argmax,
            "chi2": self.chi2,
            "dof": self.dof,
            "max_abs_z": self.max_abs_z,
        }


def reference_values(estimate, law) -> np.ndarray:
    """Reference on the estimate's grid: bin averages for histograms, point values for K(tau)."""
    if isinstance(estimate, HistogramEstimate):
        if isinstance(law, ReferenceLaw) and not law.is_density:
            raise ValueError(f"{law.observable.value} law cannot be compared with a histogram")
        if estimate.bin_edges[0] < 0:
            raise ValueError("histogram extends below 0, outside the reference domain")
        return bin_average(law, estimate.bin_edges)
    if isinstance(estimate, FormFactorEstimate):
        if isinstance(law, ReferenceLaw) and law.observable is not Observable.FORM_FACTOR:
            raise ValueError(f"{law.observable.value} law cannot be compared with a form factor")
        return np.asarray(law(estimate.tau_grid), dtype=float)
    raise TypeError(f"unsupported estimate type {type(estimate).__name__}")


def compare_to_reference(estimate, law, domain=None) -> ComparisonReport:
    """Sup-norm deviation, per-point z-scores and chi^2 of ``estimate`` against ``law``.

    ``law`` is a ReferenceLaw or any vectorized callable. ``domain`` restricts
    the comparison to bins (or tau points) inside [lo, hi].
    """
    ref = reference_values(estimate, law)
    if isinstance(estimate, HistogramEstimate):
        grid = estimate.centers
        est = np.asarray(estimate.density, dtype=float)
        # empty bins get the one-count error so z stays finite
        floor = 1.0 / (max(estimate.sample_count, 1) * estimate.widths)
        se = np.maximum(np.asarray(estimate.std_error, dtype=float), floor)
        lo_edge, hi_edge = estimate.bin_edges[:-1], estimate.bin_edges[1:]
    else:
        grid = np.asarray(estimate.tau_grid, dtype=float)
        est = np.asarray(estimate.k_values, dtype=float)
        se = np.asarray(estimate.std_error, dtype=float)
        se = np.where(se > 0, se, np.inf)
        lo_edge = hi_edge = grid
    if domain is not None:
        lo, hi = domain
        sel = (lo_edge >= lo - 1e-12) & (hi_edge <= hi + 1e-12)
        if not sel.any():
            raise ValueError(f"estimate grid has no overlap with the domain [{lo}, {hi}]")
        grid, est, ref, se = grid[sel], est[sel], ref[sel], se[sel]
    dev = est - ref
    z = dev / se
    k = int(np.argmax(np.abs(dev)))
    return ComparisonReport(grid, est, ref, z, float(np.abs(dev[k])), float(grid[k]),
                            float(np.sum(z * z)), int(grid.size))
