"""Random Toeplitz ensembles and their derived matrices.

A Toeplitz matrix is fixed by its symbol a_t, t = -(N-1)..(N-1), through
T[m, n] = a_{m-n}. Both ensembles here are hermitian, so only a_0..a_{N-1}
are stored; negative lags follow from a_{-t} = conj(a_t).

Besides the plain matrix this module builds

* the two half-dimension matrices whose spectra are the symmetric and
  skew-symmetric sub-spectra of a real symmetric Toeplitz matrix,
* the momentum-space matrix F T F^dagger written in closed form through the
  sequences xi_p and eta_p.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionError, SymmetryError


class Symmetry(str, Enum):
    COMPLEX = "complex"
    REAL = "real"


@dataclass(frozen=True)
class EnsembleSpec:
    kind: Symmetry
    n_dim: int
    master_seed: int = 0
    realization_index: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", Symmetry(self.kind))
        if not 0 <= self.master_seed < 2**64:
            raise ValueError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")
        if self.realization_index < 0:
            raise ValueError("realization_index must be non-negative")

    def seed_sequence(self) -> np.random.SeedSequence:
        return realization_seed(self.master_seed, self.realization_index)


def realization_seed(master_seed: int, realization_index: int) -> np.random.SeedSequence:
    """Independent substream for one realization.

    The spawn key hashes (master_seed, realization_index) into the generator
    state, so a realization draws the same numbers no matter which worker
    runs it or in what order.
    """
    return np.random.SeedSequence(int(master_seed), spawn_key=(int(realization_index),))


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """Toeplitz symbol a_0..a_{N-1}; a_{-t} is implied by the symmetry."""

    symmetry: Symmetry
    positive: np.ndarray

    def __post_init__(self):
        sym = Symmetry(self.symmetry)
        a = np.asarray(self.positive)
        if a.ndim != 1 or a.size < 1:
            raise DimensionError("coefficients must be a non-empty 1-d sequence a_0..a_{N-1}")
        if sym is Symmetry.REAL:
            if np.iscomplexobj(a):
                if np.any(a.imag != 0):
                    raise SymmetryError("real symmetric symbol has non-zero imaginary parts")
                a = a.real
            a = a.astype(np.float64)
        else:
            a = a.astype(np.complex128)
            if a[0].imag != 0:
                raise SymmetryError("hermitian symbol needs a real a_0")
        a.setflags(write=False)
        object.__setattr__(self, "symmetry", sym)
        object.__setattr__(self, "positive", a)

    @property
    def n_dim(self) -> int:
        return self.positive.size

    def __getitem__(self, t):
        """a_t for integer (or integer-array) lag t, |t| <= N-1."""
        t = np.asarray(t)
        vals = self.positive[np.abs(t)]
        if self.symmetry is Symmetry.COMPLEX:
            vals = np.where(t < 0, np.conj(vals), vals)
        return vals

    def entries(self) -> np.ndarray:
        """Full symbol ordered t = -(N-1), ..., N-1."""
        n = self.n_dim
        return self[np.arange(-(n - 1), n)]


def sample_coefficients(spec: EnsembleSpec) -> CoefficientVector:
    """Draw the i.i.d. Gaussian symbol for one realization.

    Complex: Re(a_t), Im(a_t) for t >= 1 are independent standard normals,
    a_0 is a single real standard normal. Real: a_0..a_{N-1} are
    independent standard normals.
    """
    if spec.n_dim < 2:
        raise DimensionError(f"n_dim must be >= 2, got {spec.n_dim}")
    rng = np.random.default_rng(spec.seed_sequence())
    n = spec.n_dim
    if spec.kind is Symmetry.REAL:
        return CoefficientVector(Symmetry.REAL, rng.standard_normal(n))
    z = rng.standard_normal((2, n))
    a = z[0] + 1j * z[1]
    a[0] = z[0, 0]
    return CoefficientVector(Symmetry.COMPLEX, a)


def build_toeplitz(coeffs: CoefficientVector) -> np.ndarray:
    n = coeffs.n_dim
    idx = np.arange(n)
    # lag m - n for every entry; hermiticity holds exactly by construction
    return coeffs[idx[:, None] - idx[None, :]]


def build_subspectrum_matrices(coeffs: CoefficientVector) -> tuple[np.ndarray, np.ndarray]:
    """Half-dimension matrices (T_plus, T_minus) of a real symmetric Toeplitz matrix.

    Their spectra are the eigenvalues of T with symmetric and skew-symmetric
    eigenvectors respectively; the union of both is the spectrum of T.
    """
    if coeffs.symmetry is not Symmetry.REAL:
        raise SymmetryError("sub-spectrum reduction needs a real symmetric (persymmetric) symbol")
    n = coeffs.n_dim
    if n < 2:
        raise DimensionError("n_dim must be >= 2")
    a = coeffs.positive
    h = n // 2
    m = np.arange(1, h + 1)
    diff = a[np.abs(m[:, None] - m[None, :])]
    if n % 2 == 0:
        mirror = a[m[:, None] + m[None, :] - 1]
        return diff + mirror, diff - mirror
    mirror = a[m[:, None] + m[None, :]]
    t_minus = diff - mirror
    t_plus = np.empty((h + 1, h + 1))
    t_plus[0, 0] = a[0]
    t_plus[0, 1:] = np.sqrt(2.0) * a[m]
    t_plus[1:, 0] = np.sqrt(2.0) * a[m]
    t_plus[1:, 1:] = diff + mirror
    return t_plus, t_minus


def _phase_sums(weighted: np.ndarray) -> np.ndarray:
    """S_p = sum_{t=1}^{N-1} c_t exp(2 pi i t p / N) along the last axis; c_0 is ignored."""
    n = weighted.shape[-1]
    c = np.array(weighted, dtype=np.complex128, copy=True)
    c[..., 0] = 0.0
    return n * np.fft.ifft(c, axis=-1)


def xi_eta_batch(positive: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized xi_p, eta_p for symbols stacked along the leading axes."""
    a = np.asarray(positive)
    n = a.shape[-1]
    t = np.arange(n)
    taper = 1.0 - t / n
    xi = np.real(a[..., :1]) + 2.0 * _phase_sums(a * taper).real
    eta = _phase_sums(a).imag
    return xi, eta


def xi_eta(coeffs: CoefficientVector) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal (xi) and off-diagonal generator (eta) of the momentum-space matrix, p = 0..N-1."""
    return xi_eta_batch(coeffs.positive)


def build_fourier_matrix(coeffs: CoefficientVector) -> np.ndarray:
    """Toeplitz matrix in the momentum representation.

    Equals F T F^dagger with F[p, m] = exp(2 pi i p m / N) / sqrt(N),
    m = 1..N, so its eigenvectors are the discrete Fourier transforms of the
    eigenvectors of T.
    """
    n = coeffs.n_dim
    xi, eta = xi_eta(coeffs)
    p = np.arange(n)
    dp = p[:, None] - p[None, :]
    denom = n * (np.exp(-2j * np.pi * dp / n) - 1.0)
    np.fill_diagonal(denom, 1.0)
    m_hat = 2j * (eta[:, None] - eta[None, :]) / denom
    m_hat[p, p] = xi
    return m_hat


@dataclass(frozen=True)
class VarianceRow:
    pair_class: str
    p: int
    r: int
    empirical: float
    predicted: float
    std_error: float

    @property
    def z_score(self) -> float:
        if self.std_error == 0:
            return 0.0 if self.empirical == self.predicted else float("inf")
        return (self.empirical - self.predicted) / self.std_error


def predicted_covariances(n_dim: int, p: int, r: int) -> dict[str, float]:
    """Closed-form second moments of (xi, eta) for the complex ensemble."""
    n = n_dim
    same = p == r
    if same:
        return {
            "eta_eta": n - 1.0,
            "xi_eta": 0.0,
            "xi_xi": -1.0 + (4.0 * n * n + 2.0) / (3.0 * n),
        }
    return {
        "eta_eta": -1.0,
        "xi_eta": 1.0 / np.tan(np.pi * (r - p) / n),
        "xi_xi": -1.0 + 2.0 / (n * np.sin(np.pi * (p - r) / n) ** 2),
    }


def default_variance_pairs(n_dim: int) -> list[tuple[int, int]]:
    n = n_dim
    return sorted({(0, 0), (1, 1), (1, 2), (2, 1), (1, n // 2), (3, n - 1), (n // 4, 3 * n // 4 + 1)})


def validate_fourier_variances(
    n_dim: int,
    sample_count: int,
    seed: int,
    pairs: list[tuple[int, int]] | None = None,
    chunk: int = 20_000,
) -> list[VarianceRow]:
    """Monte Carlo second moments of xi, eta against their closed forms.

    Draws ``sample_count`` fresh complex symbols and, for each (p, r) pair,
    reports the empirical mean of eta_p eta_r, xi_p eta_r and xi_p xi_r with
    its standard error.
    """
    if sample_count <= 0:
        raise ValueError("sample_count must be positive")
    if n_dim < 2:
        raise DimensionError(f"n_dim must be >= 2, got {n_dim}")
    pairs = default_variance_pairs(n_dim) if pairs is None else list(pairs)
    ps = np.array([p for p, _ in pairs])
    rs = np.array([r for _, r in pairs])
    classes = ("eta_eta", "xi_eta", "xi_xi")
    s1 = {c: np.zeros(len(pairs)) for c in classes}
    s2 = {c: np.zeros(len(pairs)) for c in classes}

    rng = np.random.default_rng(np.random.SeedSequence(int(seed)))
    done = 0
    while done < sample_count:
        k = min(chunk, sample_count - done)
        z = rng.standard_normal((k, 2, n_dim))
        a = z[:, 0] + 1j * z[:, 1]
        a[:, 0] = z[:, 0, 0]
        xi, eta = xi_eta_batch(a)
        prods = {
            "eta_eta": eta[:, ps] * eta[:, rs],
            "xi_eta": xi[:, ps] * eta[:, rs],
            "xi_xi": xi[:, ps] * xi[:, rs],
        }
        for c in classes:
            s1[c] += prods[c].sum(axis=0)
            s2[c] += (prods[c] ** 2).sum(axis=0)
        done += k

    rows = []
    for c in classes:
        mean = s1[c] / sample_count
        var = np.maximum(s2[c] / sample_count - mean**2, 0.0)
        se = np.sqrt(var / max(sample_count - 1, 1))
        for i, (p, r) in enumerate(pairs):
            rows.append(VarianceRow(c, int(p), int(r), float(mean[i]),
                                    float(predicted_covariances(n_dim, p, r)[c]), float(se[i])))
    return rows
