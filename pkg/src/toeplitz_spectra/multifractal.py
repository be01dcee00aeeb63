"""Momentum-space eigenfunction moments and fractal dimensions.

For an eigenvector Psi (unit norm) its momentum components are

    Psi_hat_p = N^{-1/2} sum_{j=1}^N exp(2 pi i p j / N) Psi_j,

and M_q = < sum_p |Psi_hat_p|^{2q} > scales as C N^{-tau(q)} with
D_q = tau(q) / (q - 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .ensemble import Symmetry

DEFAULT_QS = (0.5, 1.5, 2.0)


def _phase(n: int) -> np.ndarray:
    # sites are numbered from 1, numpy's transform from 0
    return np.exp(2j * np.pi * np.arange(n) / n)


def fourier_transform_vector(v: np.ndarray) -> np.ndarray:
    """Unitary transform along axis 0 (columns of a matrix are transformed independently)."""
    v = np.asarray(v)
    n = v.shape[0]
    out = np.sqrt(n) * np.fft.ifft(v, axis=0)
    shape = (n,) + (1,) * (v.ndim - 1)
    return out * _phase(n).reshape(shape)


def inverse_fourier_transform_vector(v_hat: np.ndarray) -> np.ndarray:
    v_hat = np.asarray(v_hat)
    n = v_hat.shape[0]
    shape = (n,) + (1,) * (v_hat.ndim - 1)
    return np.fft.fft(v_hat * np.conj(_phase(n)).reshape(shape), axis=0) / np.sqrt(n)


def energy_window(eigenvalues: np.ndarray, n_dim: int, kind: Symmetry) -> np.ndarray:
    """Mask of levels with |e| <= 2 sqrt(N) (complex) or |e| <= sqrt(N) (real)."""
    half_width = (2.0 if Symmetry(kind) is Symmetry.COMPLEX else 1.0) * np.sqrt(n_dim)
    return np.abs(np.asarray(eigenvalues)) <= half_width


def vector_moments(vectors: np.ndarray, q: float) -> np.ndarray:
    """sum_n |Psi_n|^{2q} for each column."""
    if q <= 0 or q == 1:
        raise ValueError(f"q must be positive and different from 1, got {q}")
    vectors = np.asarray(vectors)
    if vectors.ndim == 1:
        vectors = vectors[:, None]
    return np.sum(np.abs(vectors) ** (2.0 * q), axis=0)


def moments(vectors: np.ndarray, q: float) -> float:
    """Equal-weight average of sum_n |Psi_n|^{2q} over the given (already windowed) vectors."""
    vectors = np.asarray(vectors)
    if vectors.size == 0 or (vectors.ndim == 2 and vectors.shape[1] == 0):
        raise ValueError("no eigenvectors in the energy window")
    return float(np.mean(vector_moments(vectors, q)))


@dataclass(frozen=True)
class ScalingSeries:
    q: float
    sizes: tuple
    moments: tuple
    tau_q: float
    d_q: float
    fit_stderr: float
    intercept: float = float("nan")


def fractal_dimension(sizes, moment_values, q: float) -> ScalingSeries:
    """Log-log least squares: slope of log M_q against log N is -tau(q)."""
    sizes = np.asarray(sizes, dtype=float)
    m = np.asarray(moment_values, dtype=float)
    if sizes.size < 3:
        raise ValueError("need at least 3 sizes for a scaling fit")
    if sizes.shape != m.shape:
        raise ValueError("sizes and moments differ in length")
    if np.any(m <= 0) or np.any(sizes <= 0):
        raise ValueError("sizes and moments must be positive")
    if q == 1:
        raise ValueError("q = 1 needs the entropy form, not supported")
    fit = stats.linregress(np.log(sizes), np.log(m))
    tau = -fit.slope
    return ScalingSeries(
        q=float(q),
        sizes=tuple(int(s) for s in sizes),
        moments=tuple(float(x) for x in m),
        tau_q=float(tau),
        d_q=float(tau / (q - 1.0)),
        fit_stderr=float(fit.stderr / abs(q - 1.0)),
        intercept=float(fit.intercept),
    )
