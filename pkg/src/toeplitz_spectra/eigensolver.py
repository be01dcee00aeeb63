"""Dense hermitian eigendecomposition with an explicit accuracy contract."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .ensemble import EnsembleSpec
from .errors import SolverError, ValidationError

HERMITIAN_TOL = 1e-12
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SpectrumRecord:
    """Ascending eigenvalues of one realization.

    ``eigenvectors`` (when present) holds unit-norm columns; column k pairs
    with ``eigenvalues[k]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None
    ensemble_meta: EnsembleSpec | None = None

    @property
    def n_dim(self) -> int:
        return self.eigenvalues.size


def check_hermitian(matrix: np.ndarray) -> float:
    """Return the Frobenius norm; raise if the matrix is not hermitian to 1e-12 relative."""
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    fro = float(np.linalg.norm(a))
    asym = float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0
    if asym > HERMITIAN_TOL * max(fro, np.finfo(float).tiny):
        raise ValidationError(f"matrix is not hermitian: max |A - A^H| = {asym:.3e}")
    return fro


def eigendecompose(
    matrix: np.ndarray,
    want_vectors: bool = False,
    meta: EnsembleSpec | None = None,
) -> SpectrumRecord:
    """Full spectrum of a hermitian matrix via LAPACK's divide-and-conquer driver.

    Real input (or complex input with vanishing imaginary part) is solved in
    real arithmetic. Near-degenerate eigenvalues are kept as distinct values.
    """
    a = np.asarray(matrix)
    check_hermitian(a)
    if np.iscomplexobj(a) and not np.any(a.imag):
        a = a.real
    try:
        if want_vectors:
            w, v = scipy.linalg.eigh(a, driver="evd", check_finite=True)
        else:
            w = scipy.linalg.eigh(a, eigvals_only=True, driver="evd", check_finite=True)
            v = None
    except (np.linalg.LinAlgError, ValueError) as exc:
        seed = None
        if meta is not None:
            seed = (meta.master_seed, meta.realization_index)
        raise SolverError(f"eigendecomposition failed: {exc}", seed=seed) from exc
    # LAPACK returns ascending order; enforce it rather than trust it
    if np.any(np.diff(w) < 0):
        order = np.argsort(w, kind="stable")
        w = w[order]
        if v is not None:
            v = v[:, order]
    return SpectrumRecord(w, v, meta)


def residuals(matrix: np.ndarray, record: SpectrumRecord) -> tuple[float, float]:
    """(max_k ||A v_k - e_k v_k|| / ||A||_F, max_jk |<v_j, v_k> - delta_jk|)."""
    if record.eigenvectors is None:
        raise ValueError("record carries no eigenvectors")
    a = np.asarray(matrix)
    v = record.eigenvectors
    fro = np.linalg.norm(a)
    res = np.linalg.norm(a @ v - v * record.eigenvalues, axis=0).max() / max(fro, np.finfo(float).tiny)
    gram = v.conj().T @ v
    ortho = np.abs(gram - np.eye(v.shape[1])).max()
    return float(res), float(ortho)
