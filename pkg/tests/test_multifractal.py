import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from toeplitz_spectra.eigensolver import eigendecompose
from toeplitz_spectra.ensemble import EnsembleSpec, Symmetry, build_fourier_matrix, build_toeplitz, sample_coefficients
from toeplitz_spectra.multifractal import (
    energy_window,
    fourier_transform_vector,
    fractal_dimension,
    inverse_fourier_transform_vector,
    moments,
)


def transform_by_sum(v):
    n = v.size
    j = np.arange(1, n + 1)
    return np.array([np.sum(np.exp(2j * np.pi * p * j / n) * v) for p in range(n)]) / np.sqrt(n)


def test_plane_wave_to_delta():
    n = 16
    out = fourier_transform_vector(np.ones(n) / np.sqrt(n))
    assert abs(out[0]) == pytest.approx(1)
    np.testing.assert_allclose(out[1:], 0, atol=1e-14)


def test_site_to_flat():
    v = np.zeros(10)
    v[0] = 1
    np.testing.assert_allclose(np.abs(fourier_transform_vector(v)), 1 / np.sqrt(10))


def test_matches_explicit_sum(rng):
    v = rng.standard_normal(12) + 1j * rng.standard_normal(12)
    np.testing.assert_allclose(fourier_transform_vector(v), transform_by_sum(v), atol=1e-12)


def test_round_trip(rng):
    v = rng.standard_normal(33) + 1j * rng.standard_normal(33)
    np.testing.assert_allclose(inverse_fourier_transform_vector(fourier_transform_vector(v)), v, atol=1e-12)


def test_unitarity_on_many_vectors(rng):
    v = rng.standard_normal((64, 1000)) + 1j * rng.standard_normal((64, 1000))
    v /= np.linalg.norm(v, axis=0)
    norms = np.linalg.norm(fourier_transform_vector(v), axis=0)
    assert np.max(np.abs(norms - 1)) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(v=arrays(np.float64, st.integers(1, 50), elements=st.floats(-1e3, 1e3)))
def test_norm_preserved_property(v):
    out = fourier_transform_vector(v)
    assert abs(np.linalg.norm(out) - np.linalg.norm(v)) <= 1e-12 * max(1.0, np.linalg.norm(v))


def test_moment_examples():
    n = 64
    loc = np.zeros(n)
    loc[0] = 1
    flat = np.full(n, 1 / np.sqrt(n))
    for q in (0.5, 1.5, 2, 3):
        assert moments(loc[:, None], q) == pytest.approx(1)
    assert moments(flat, 2) == pytest.approx(1 / n)
    assert moments(flat, 0.5) == pytest.approx(np.sqrt(n))


def test_moment_errors():
    with pytest.raises(ValueError):
        moments(np.zeros((8, 0)), 2)
    with pytest.raises(ValueError):
        moments(np.ones((4, 1)) / 2, 1.0)


def test_energy_window():
    e = np.array([-30.0, -10, 0, 10, 19.9, 21])
    np.testing.assert_array_equal(energy_window(e, 100, Symmetry.COMPLEX), [False, True, True, True, True, False])
    np.testing.assert_array_equal(energy_window(e, 100, Symmetry.REAL), [False, True, True, True, False, False])


def test_exact_power_law():
    sizes = [128, 256, 512, 1024]
    s = fractal_dimension(sizes, [n ** -0.37 for n in sizes], 2.0)
    assert s.tau_q == pytest.approx(0.37, abs=1e-12)
    assert s.d_q == pytest.approx(0.37, abs=1e-12)
    assert s.fit_stderr < 1e-12


def test_extended_limit():
    sizes = [128, 256, 512, 1024]
    s = fractal_dimension(sizes, [1 / n for n in sizes], 2.0)
    assert s.d_q == pytest.approx(1)
    half = fractal_dimension(sizes, [np.sqrt(n) for n in sizes], 0.5)
    assert half.d_q == pytest.approx(1)


def test_fractal_dimension_errors():
    with pytest.raises(ValueError):
        fractal_dimension([128, 256], [0.1, 0.05], 2)
    with pytest.raises(ValueError):
        fractal_dimension([128, 256, 512], [0.1, 0.0, 0.05], 2)


def test_two_momentum_routes_agree():
    # eigenvectors of the momentum-space matrix are the transformed Toeplitz eigenvectors
    for i in range(5):
        c = sample_coefficients(EnsembleSpec(Symmetry.COMPLEX, 64, 31, i))
        direct = eigendecompose(build_toeplitz(c), want_vectors=True)
        momentum = eigendecompose(build_fourier_matrix(c), want_vectors=True)
        np.testing.assert_allclose(direct.eigenvalues, momentum.eigenvalues, atol=1e-9)
        a = fourier_transform_vector(direct.eigenvectors)
        for q in (0.5, 1.5, 2.0):
            np.testing.assert_allclose(moments(a, q), moments(momentum.eigenvectors, q), rtol=1e-8)
        overlap = np.abs(np.sum(a.conj() * momentum.eigenvectors, axis=0))
        np.testing.assert_allclose(overlap, 1, atol=1e-8)


def test_coordinate_space_is_nearly_extended():
    sizes = [64, 128, 256]
    m2 = []
    for n in sizes:
        vals = []
        for i in range(20):
            rec = eigendecompose(build_toeplitz(sample_coefficients(EnsembleSpec("complex", n, 5, i))), True)
            sel = energy_window(rec.eigenvalues, n, Symmetry.COMPLEX)
            vals.append(moments(rec.eigenvectors[:, sel], 2.0))
        m2.append(np.mean(vals))
    assert fractal_dimension(sizes, m2, 2.0).d_q > 0.85
