"""Closed-form reference laws and the two ad hoc histogram fits.

Reference laws (unfolded spectra, unit mean spacing):

=============  ===============================  ==================
observable     semi-Poisson                     Poisson
=============  ===============================  ==================
P_n(s)         2^{2(n+1)} s^{2n+1} e^{-2s}      s^n e^{-s} / n!
               / (2n+1)!
K(tau)         (2 + pi^2 tau^2)/(4 + pi^2 tau^2)  1
P(r)           6 r / (1 + r)^4                  1 / (1 + r)^2
=============  ===============================  ==================

plus the GOE Wigner surmise (pi/2) s exp(-pi s^2 / 4) for P_0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import least_squares

from .spectral_stats import HistogramEstimate


class Family(str, Enum):
    SEMI_POISSON = "semi-poisson"
    POISSON = "poisson"
    WIGNER_GOE = "wigner-goe"


class Observable(str, Enum):
    SPACING = "spacing"
    FORM_FACTOR = "form-factor"
    RATIO = "ratio"


@dataclass(frozen=True)
class ReferenceLaw:
    family: Family
    observable: Observable
    n: int = 0  # intervening levels, spacing observable only

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "observable", Observable(self.observable))
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if self.family is Family.WIGNER_GOE and (self.observable is not Observable.SPACING or self.n != 0):
            raise ValueError("the Wigner surmise is only defined for the nearest-neighbour spacing")

    @property
    def is_density(self) -> bool:
        return self.observable is not Observable.FORM_FACTOR

    def __call__(self, x):
        return evaluate_law(self, x)


def evaluate_law(law: ReferenceLaw, x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("reference laws are defined for x >= 0")
    fam, obs = law.family, law.observable
    if obs is Observable.SPACING:
        n = law.n
        if fam is Family.SEMI_POISSON:
            return 2.0 ** (2 * (n + 1)) / math.factorial(2 * n + 1) * x ** (2 * n + 1) * np.exp(-2.0 * x)
        if fam is Family.POISSON:
            return x**n / math.factorial(n) * np.exp(-x)
        return 0.5 * np.pi * x * np.exp(-0.25 * np.pi * x * x)
    if obs is Observable.FORM_FACTOR:
        if fam is Family.SEMI_POISSON:
            u = np.pi**2 * x * x
            return (2.0 + u) / (4.0 + u)
        return np.ones_like(x)
    if fam is Family.SEMI_POISSON:
        return 6.0 * x / (1.0 + x) ** 4
    # the normalized Poisson ratio law; 1/(1 + r^2) does not integrate to one
    return 1.0 / (1.0 + x) ** 2


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


def bin_average(func, edges) -> np.ndarray:
    """Mean of ``func`` over each bin [edges[i], edges[i+1]] by 12-point Gauss-Legendre."""
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    return 0.5 * (func(x) * _GL_WEIGHTS[None, :]).sum(axis=1)


CAPTION_SPACING_FIT = (0.92, 0.96, 0.68, 13.7)
CAPTION_RATIO_FIT = (1.51, 5.44, 0.90)


def spacing_mixture(s, amp_slow, rate_slow, amp_fast, rate_fast):
    s = np.asarray(s, dtype=float)
    return amp_slow * np.exp(-rate_slow * s) + amp_fast * np.exp(-rate_fast * s)


def ratio_rational(r, scale, lin, quad):
    r = np.asarray(r, dtype=float)
    return scale / (1.0 + lin * r + quad * r * r)


@dataclass
class FitResult:
    parameters: np.ndarray
    residual_norm: float
    converged: bool
    reduced_chi2: float = float("nan")
    gradient_norm: float = float("nan")
    bins_used: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def adequate(self) -> bool:
        """Converged and statistically compatible with the histogram."""
        return self.converged and self.reduced_chi2 <= ADEQUATE_CHI2


ADEQUATE_CHI2 = 2.0


def _weights(hist: HistogramEstimate) -> np.ndarray:
    se = np.asarray(hist.std_error, dtype=float)
    width = np.diff(hist.bin_edges)
    # empty bins: one-count standard error instead of an infinite weight
    floor = 1.0 / (max(hist.sample_count, 1) * width)
    return 1.0 / np.maximum(se, floor)


def _weighted_fit(hist, model, x0_list, lower, upper, to_params):
    if len(hist.density) <= len(x0_list[0]):
        raise ValueError(f"need more than {len(x0_list[0])} bins to fit, got {len(hist.density)}")
    edges = np.asarray(hist.bin_edges, dtype=float)
    y = np.asarray(hist.density, dtype=float)
    w = _weights(hist)

    def resid(theta):
        return (bin_average(lambda x: model(x, *to_params(theta)), edges) - y) * w

    best = None
    for x0 in x0_list:
        x0 = np.clip(np.asarray(x0, dtype=float), lower, upper)
        res = least_squares(resid, x0, bounds=(lower, upper), method="trf",
                            x_scale="jac", xtol=1e-12, ftol=1e-12, gtol=1e-10, max_nfev=5000)
        grad_ok = res.optimality <= 1e-6 * max(1.0, 2.0 * res.cost)
        ok = res.status > 0 and grad_ok
        if best is None or (ok and not best[1]) or (ok == best[1] and res.cost < best[0].cost):
            best = (res, ok)
        if ok:
            break
    res, ok = best
    dof = max(len(y) - len(res.x), 1)
    return FitResult(
        parameters=np.asarray(to_params(res.x), dtype=float),
        residual_norm=float(np.sqrt(2.0 * res.cost)),
        converged=bool(ok),
        reduced_chi2=float(2.0 * res.cost / dof),
        gradient_norm=float(res.optimality),
        bins_used=len(y),
    )


def fit_spacing_mixture(hist: HistogramEstimate, start=CAPTION_SPACING_FIT) -> FitResult:
    """Weighted fit of A e^{-a s} + B e^{-b s} (A, B >= 0, b > a > 0) to a spacing histogram.

    The model is averaged over each bin before comparison. Parameters are
    returned as (A, a, B, b).
    """
    a0, r0, b0, f0 = start
    # b = a + gap keeps the fast component fast
    to_params = lambda th: (th[0], th[1], th[2], th[1] + th[3])
    starts = [(a0, r0, b0, f0 - r0)]
    for scale in (0.5, 2.0, 0.25):
        starts.append((a0, r0, b0 * scale, (f0 - r0) * scale))
    starts.append((1.0, 1.0, 0.1, 3.0))
    lower = np.array([0.0, 1e-6, 0.0, 1e-6])
    upper = np.array([np.inf, np.inf, np.inf, 1e3])
    return _weighted_fit(hist, spacing_mixture, starts, lower, upper, to_params)


def fit_ratio_rational(hist: HistogramEstimate, start=CAPTION_RATIO_FIT) -> FitResult:
    """Weighted fit of c / (1 + alpha r + beta r^2) to a ratio histogram; returns (c, alpha, beta)."""
    c0, l0, q0 = start
    starts = [(c0, l0, q0), (c0 / 2, l0 / 2, q0 / 2), (0.5, 1.0, 0.1), (0.2, 0.0, 0.0)]
    lower = np.zeros(3)
    upper = np.full(3, np.inf)
    return _weighted_fit(hist, ratio_rational, starts, lower, upper, lambda th: tuple(th))
