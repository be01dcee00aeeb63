import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toeplitz_spectra.eigensolver import SpectrumRecord, eigendecompose
from toeplitz_spectra.ensemble import EnsembleSpec, Symmetry, build_toeplitz, sample_coefficients
from toeplitz_spectra.errors import UnfoldingError
from toeplitz_spectra.reference_laws import Family, Observable, ReferenceLaw, bin_average
from toeplitz_spectra.spectral_stats import (
    FormFactorEstimate,
    UnfoldedSpectrum,
    central_window,
    compressibility,
    consecutive_ratios,
    density_estimate,
    form_factor,
    histogram,
    nn_spacing_distribution,
    ratio_distribution,
    unfold,
)
from toeplitz_spectra.synthetic import poisson_levels, semi_poisson_levels


def levels_pool(gen, rng, n_sequences, n_levels):
    return [UnfoldedSpectrum(gen(rng, n_levels), 1.0, 0) for _ in range(n_sequences)]


def assert_within_sigma(hist, law, k=3.0):
    ref = bin_average(law, hist.bin_edges)
    # sigma from the expected count, which stays finite in empty bins
    sigma = np.sqrt(ref * hist.widths / hist.sample_count) / hist.widths
    z = (hist.density - ref) / sigma
    assert np.all(np.abs(z) <= k), (np.abs(z).max(), hist.centers[np.argmax(np.abs(z))])


# ---------------------------------------------------------------- unfolding

def test_equally_spaced_unfolds_to_unit_spacings():
    u = unfold(np.arange(1.0, 201.0), 0.6, 3)
    np.testing.assert_allclose(np.diff(u.values), 1.0, atol=1e-9)


def test_quadratic_staircase():
    u = unfold(np.arange(1, 101) ** 2.0, 0.6, 3)
    assert abs(np.mean(np.diff(u.values)) - 1) <= 0.01


def test_retained_count():
    u = unfold(np.sort(np.random.default_rng(0).standard_normal(200)), 0.6, 3)
    assert u.size == 120
    assert central_window(200, 0.6) == slice(40, 160)


def test_unfold_argument_errors():
    with pytest.raises(ValueError):
        unfold(np.arange(10.0))
    with pytest.raises(ValueError):
        unfold(np.arange(30.0), retained_fraction=0.1, poly_degree=3)
    with pytest.raises(ValueError):
        unfold(np.arange(30.0), retained_fraction=0.0)


def test_non_monotone_fit_is_flagged():
    # a huge gap in the middle of a cubic staircase window bends the fit backwards
    e = np.concatenate([np.linspace(0, 1, 15), [1000.0], np.linspace(1001, 1002, 15)])
    with pytest.raises(UnfoldingError):
        unfold(e, 1.0, 3)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32), kind=st.sampled_from(list(Symmetry)))
def test_unfolded_toeplitz_mean_spacing(seed, kind):
    t = build_toeplitz(sample_coefficients(EnsembleSpec(kind, 200, seed, 0)))
    u = unfold(eigendecompose(t), 0.6, 3)
    assert u.size >= 100
    assert 0.99 <= np.mean(np.diff(u.values)) <= 1.01


# ---------------------------------------------------------------- histograms

def test_spacings_hand_count():
    h = nn_spacing_distribution([np.array([0.0, 1, 2, 3])], 0)
    k = np.flatnonzero(h.counts)
    assert h.counts.sum() == 3
    assert len(k) == 1 and h.bin_edges[k[0]] <= 1.0 < h.bin_edges[k[0] + 1]


def test_second_neighbour_gaps():
    h = nn_spacing_distribution([np.array([0.0, 0.5, 1.5, 3.0])], 1, bin_width=0.5, s_max=4)
    np.testing.assert_array_equal(np.flatnonzero(h.counts), [3, 5])


def test_empty_pool_errors():
    for fn in (nn_spacing_distribution, ratio_distribution, density_estimate, form_factor):
        with pytest.raises(ValueError):
            fn([])


@settings(max_examples=30, deadline=None)
@given(data=st.lists(st.floats(0, 10, allow_nan=False), min_size=1, max_size=200),
       excluded=st.integers(0, 5))
def test_histogram_mass_is_one(data, excluded):
    h = histogram(np.array(data), np.linspace(0, 4, 41), excluded=excluded)
    assert abs(h.total_mass() - 1) <= 1e-12


def test_ratio_examples():
    r, z = consecutive_ratios([0.0, 1.0, 2.0])
    np.testing.assert_array_equal(r, [1.0])
    r, z = consecutive_ratios([0.0, 1.0, 4.0])
    np.testing.assert_array_equal(r, [3.0])


def test_ratio_zero_denominator_counted():
    r, z = consecutive_ratios([0.0, 1.0, 1.0, 2.0])
    assert z == 1
    h = ratio_distribution([np.array([0.0, 1.0, 1.0, 2.0])], retained_fraction=1.0)
    assert h.excluded_count == 1
    assert h.overflow_mass == pytest.approx(0.5)
    assert abs(h.total_mass() - 1) < 1e-12


def test_poisson_spacings_all_orders():
    rng = np.random.default_rng(101)
    pool = levels_pool(poisson_levels, rng, 1000, 1003)
    for n in range(3):
        h = nn_spacing_distribution(pool, n)
        assert h.sample_count == 1000 * (1002 - n)
        assert_within_sigma(h, ReferenceLaw(Family.POISSON, Observable.SPACING, n))


def test_semi_poisson_spacings():
    rng = np.random.default_rng(202)
    pool = levels_pool(semi_poisson_levels, rng, 1000, 1001)
    h = nn_spacing_distribution(pool, 0)
    assert h.sample_count == 10**6
    assert_within_sigma(h, ReferenceLaw(Family.SEMI_POISSON, Observable.SPACING, 0))
    # gaps of gamma(2) spacings are gamma(2(n+1)): the higher orders follow as well
    for n in (1, 2):
        assert_within_sigma(nn_spacing_distribution(pool, n), ReferenceLaw(Family.SEMI_POISSON, Observable.SPACING, n))


@pytest.mark.parametrize("family, gen", [(Family.POISSON, poisson_levels), (Family.SEMI_POISSON, semi_poisson_levels)])
def test_ratio_distribution_synthetic(family, gen):
    rng = np.random.default_rng(303)
    pool = [gen(rng, 1002) for _ in range(1000)]
    h = ratio_distribution(pool, retained_fraction=1.0)
    assert h.sample_count == 10**6
    assert_within_sigma(h, ReferenceLaw(family, Observable.RATIO))


def test_ratio_uses_central_window():
    e = np.arange(100.0)
    h = ratio_distribution([e], retained_fraction=0.6)
    assert h.sample_count == 58


# ---------------------------------------------------------------- form factor

def test_single_level_form_factor():
    ff = form_factor([np.array([0.37])], np.linspace(0.1, 3, 30))
    np.testing.assert_allclose(ff.k_values, 1.0)


def test_form_factor_mixed_sizes_rejected():
    with pytest.raises(ValueError):
        form_factor([np.arange(5.0), np.arange(6.0)], [0.5])


def test_form_factor_matches_definition(rng):
    pool = [np.sort(rng.uniform(0, 10, 7)) for _ in range(3)]
    tau = np.array([0.3, 1.1])
    ff = form_factor(pool, tau)
    ref = np.mean([[abs(sum(np.exp(2j * np.pi * x * t) for x in xs)) ** 2 / 7 for t in tau] for xs in pool], axis=0)
    np.testing.assert_allclose(ff.k_values, ref, rtol=1e-12)
    assert np.all(ff.k_values >= 0)


TAU_CHECK = np.arange(5, 31) * 0.1


def _ff_within_sigma(ff, law):
    ref = law(ff.tau_grid)
    z = (ff.k_values - ref) / ff.std_error
    assert np.all(np.abs(z) <= 3), (np.abs(z).max(), ff.tau_grid[np.argmax(np.abs(z))])


def test_poisson_form_factor_is_flat():
    rng = np.random.default_rng(404)
    ff = form_factor(levels_pool(poisson_levels, rng, 2000, 1000), TAU_CHECK)
    _ff_within_sigma(ff, ReferenceLaw(Family.POISSON, Observable.FORM_FACTOR))


def test_semi_poisson_form_factor():
    rng = np.random.default_rng(505)
    ff = form_factor(levels_pool(semi_poisson_levels, rng, 2000, 1000), TAU_CHECK)
    _ff_within_sigma(ff, ReferenceLaw(Family.SEMI_POISSON, Observable.FORM_FACTOR))


# ---------------------------------------------------------------- compressibility

def _analytic_ff(values):
    tau = np.arange(1, 151) * 0.02
    k = values(tau) if callable(values) else np.full(tau.size, values)
    return FormFactorEstimate(tau, k, np.zeros_like(k), 0, 0)


def test_compressibility_constant_curves():
    assert compressibility(_analytic_ff(1.0))[0] == pytest.approx(1.0)
    assert compressibility(_analytic_ff(0.5))[0] == pytest.approx(0.5)


def test_compressibility_semi_poisson_window_bias():
    law = ReferenceLaw(Family.SEMI_POISSON, Observable.FORM_FACTOR)
    chi, _ = compressibility(_analytic_ff(law))
    # window points 0.06, 0.08, ..., 0.24 averaged by hand
    taus = [0.02 * k for k in range(3, 13)]
    by_hand = sum((2 + math.pi**2 * t * t) / (4 + math.pi**2 * t * t) for t in taus) / len(taus)
    assert chi == pytest.approx(by_hand, rel=1e-12)
    assert chi == pytest.approx(0.53, abs=0.005)


def test_compressibility_window_not_covered():
    tau = np.linspace(0.3, 3, 10)
    ff = FormFactorEstimate(tau, np.ones(10), np.zeros(10), 1, 1)
    with pytest.raises(ValueError):
        compressibility(ff)


# ---------------------------------------------------------------- density

def test_density_of_scalar_gaussians():
    rng = np.random.default_rng(606)
    pool = [SpectrumRecord(np.array([x])) for x in rng.standard_normal(200_000)]
    h = density_estimate(pool, 0.25)
    assert abs(h.total_mass() - 1) < 1e-12
    normal = lambda x: np.exp(-x * x / 2) / np.sqrt(2 * np.pi)
    assert np.max(np.abs(h.density - bin_average(normal, h.bin_edges))) < 0.01


def test_density_real_pool_is_symmetric():
    pool = [eigendecompose(build_toeplitz(sample_coefficients(EnsembleSpec(Symmetry.REAL, 50, 8, i))))
            for i in range(400)]
    h = density_estimate(pool, 0.2)
    assert abs(h.total_mass() - 1) < 1e-12
    mirrored = h.density[::-1]
    se = np.sqrt(h.std_error**2 + h.std_error[::-1] ** 2)
    diff = np.abs(h.density - mirrored)
    ok = (diff <= 3 * se) | (diff == 0)
    assert ok.all()
    np.testing.assert_allclose(h.bin_edges, -h.bin_edges[::-1], atol=1e-12)
