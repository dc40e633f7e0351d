import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from sit_squeeze.core.constants import AMU
from sit_squeeze.physics.atomic_data import ATOMIC_MASS_U
from sit_squeeze.physics.lineshape import (
    LineshapeParams,
    discretize_lineshape,
    doppler_fwhm,
    mixing_parameter,
    voigt_fwhm,
    voigt_profile,
)

MASS_202 = ATOMIC_MASS_U[202] * AMU


def test_doppler_width_of_202_at_273_k():
    assert doppler_fwhm(273.0, MASS_202, 365.5e-9) == pytest.approx(4.29e9, rel=2e-3)
    assert doppler_fwhm(0.0, MASS_202, 365.5e-9) == 0.0


def test_doppler_rejects_negative_temperature():
    with pytest.raises(ValueError):
        doppler_fwhm(-1.0, MASS_202, 365.5e-9)


@pytest.mark.parametrize("lorentz, doppler, expected", [
    (0.0, 3.0e9, 3.0e9),
    (2.0e8, 0.0, 0.96541 * 2.0e8),
    (0.0, 0.0, 0.0),
])
def test_voigt_fwhm_limits(lorentz, doppler, expected):
    assert voigt_fwhm(lorentz, doppler) == pytest.approx(expected, rel=1e-4, abs=1e-12)


def test_voigt_fwhm_coefficient_is_configurable():
    assert voigt_fwhm(1.0, 0.0, lorentz_coefficient=0.5346) == pytest.approx(
        0.5346 + math.sqrt(0.2166))


def test_pure_gaussian_peak():
    params = LineshapeParams.from_widths(0.0, 4.0e9)
    assert mixing_parameter(params) == 0.0
    peak = (2.0 / 4.0e9) * math.sqrt(math.log(2.0) / math.pi)
    assert float(voigt_profile(0.0, params)) == pytest.approx(peak, rel=1e-12)


def test_pure_lorentzian_peak():
    params = LineshapeParams.from_widths(1.0e8, 0.0)
    assert mixing_parameter(params) == pytest.approx(1.0, abs=1e-3)
    assert float(voigt_profile(0.0, params)) == pytest.approx(
        2.0 / (math.pi * params.voigt_fwhm), rel=1e-3)


def test_profile_of_delta_line_raises():
    with pytest.raises(ValueError):
        voigt_profile(0.0, LineshapeParams.from_widths(0.0, 0.0))


def test_single_bin_is_delta():
    grid = discretize_lineshape(LineshapeParams.from_widths(1e8, 4e9, center=5.0), 1)
    assert grid.is_delta
    assert grid.bin_centers.tolist() == [5.0]
    assert grid.weights.tolist() == [1.0]


def test_zero_width_collapses_to_one_bin():
    grid = discretize_lineshape(LineshapeParams.from_widths(0.0, 0.0), 41)
    assert grid.size == 1


def test_gaussian_grid_normalized_and_peaked():
    grid = discretize_lineshape(LineshapeParams.from_widths(0.0, 4.0e9), 101, 6.0)
    assert grid.weights.sum() == pytest.approx(1.0)
    assert np.argmax(grid.weights) == 50
    np.testing.assert_allclose(grid.weights, grid.weights[::-1])


def test_gaussian_grid_second_moment():
    doppler = 4.0e9
    grid = discretize_lineshape(LineshapeParams.from_widths(0.0, doppler), 101, 6.0)
    assert grid.second_moment() == pytest.approx(doppler**2 / (8.0 * math.log(2.0)), rel=0.01)


def test_bins_span_requested_width():
    params = LineshapeParams.from_widths(1e8, 4e9)
    grid = discretize_lineshape(params, 41, 6.0)
    assert grid.bin_centers[-1] == pytest.approx(3.0 * params.voigt_fwhm)
    assert grid.bin_centers[20] == 0.0


@pytest.mark.parametrize("n_bins", [0, 2, 40])
def test_even_or_empty_bin_count_rejected(n_bins):
    with pytest.raises(ValueError, match="n_freq_bins"):
        discretize_lineshape(LineshapeParams.from_widths(1e8, 4e9), n_bins)


@pytest.mark.parametrize("lorentz, doppler", [
    (0.0, 4.0e9),
    (1.3e8, 4.29e9),
    (1.0e9, 1.0e9),
    (1.0e9, 0.0),
])
def test_profile_normalization_over_eight_widths(lorentz, doppler):
    params = LineshapeParams.from_widths(lorentz, doppler)
    width = params.voigt_fwhm
    x = np.linspace(-8.0 * width, 8.0 * width, 64001)
    total = trapezoid(voigt_profile(x, params), x)
    # Lorentzian weight beyond +-8 FWHM; the Gaussian part has none at this range.
    eta = mixing_parameter(params)
    expected = 1.0 - eta * (1.0 - 2.0 / math.pi * math.atan(16.0))
    assert total == pytest.approx(expected, abs=1e-4)
    if lorentz == 0.0:
        assert total == pytest.approx(1.0, abs=1e-4)


@pytest.mark.parametrize("coefficient", [0.5, 0.5346])
def test_voigt_fwhm_is_monotone(coefficient):
    widths = np.linspace(0.0, 5.0e9, 21)
    table = np.array([[voigt_fwhm(lw, dw, coefficient) for dw in widths] for lw in widths])
    assert np.all(np.diff(table, axis=0) >= 0)
    assert np.all(np.diff(table, axis=1) >= 0)
    np.testing.assert_allclose(table[0], widths, rtol=1e-12)


@pytest.mark.parametrize("lorentz, doppler", [(0.0, 4.0e9), (1.3e8, 4.29e9)])
def test_discretization_converges_when_bins_double(lorentz, doppler):
    params = LineshapeParams.from_widths(lorentz, doppler)
    coarse = discretize_lineshape(params, 41, 6.0)
    fine = discretize_lineshape(params, 81, 6.0)
    assert fine.second_moment() == pytest.approx(coarse.second_moment(), rel=5e-3)
    for grid in (coarse, fine):
        assert float(np.sum(grid.weights * grid.bin_centers)) == pytest.approx(
            0.0, abs=1e-9 * params.voigt_fwhm)
