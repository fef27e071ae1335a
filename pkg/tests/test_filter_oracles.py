"""Cross-checks of the production filters against the naive scalar oracles."""

import numpy as np
import pytest

from sonarmap.filters import (
    FilterParams,
    anisotropic_diffusion,
    enhanced_lee_filter,
    frost_filter,
    wavelet_denoise,
)

import oracles

PARAMS = FilterParams()


def random_images(count, seed=20240601, shape=(16, 16)):
    rng = np.random.default_rng(seed)
    return [rng.integers(0, 256, size=shape, dtype=np.uint8) for _ in range(count)]


@pytest.mark.parametrize("seed", range(10))
def test_frost_matches_scalar_oracle(seed):
    img = random_images(1, seed=seed)[0]
    expected = oracles.frost_oracle(img, PARAMS.window_radius, PARAMS.frost_damping)
    np.testing.assert_array_equal(frost_filter(img, PARAMS), expected)


def test_frost_checkerboard_reference_grid():
    img = np.zeros((9, 9), dtype=np.uint8)
    img[::2, ::2] = 255
    img[1::2, 1::2] = 255
    expected = oracles.frost_oracle(img, 3, 2.0)
    np.testing.assert_array_equal(frost_filter(img, FilterParams(frost_damping=2.0)), expected)


@pytest.mark.parametrize("seed", range(10))
def test_enhanced_lee_matches_scalar_oracle(seed):
    img = random_images(1, seed=100 + seed)[0]
    expected = oracles.enhanced_lee_oracle(
        img, PARAMS.window_radius, PARAMS.lee_cu, PARAMS.lee_cmax, PARAMS.lee_k
    )
    np.testing.assert_array_equal(enhanced_lee_filter(img, PARAMS), expected)


def test_enhanced_lee_intermediate_regime_value():
    # A window with mild texture lands between cu and cmax; the oracle
    # evaluates the mean + W*(center-mean) formula scalar-by-scalar.
    rng = np.random.default_rng(77)
    img = np.clip(rng.normal(120, 40, (9, 9)).round(), 0, 255).astype(np.uint8)
    expected = oracles.enhanced_lee_oracle(
        img, PARAMS.window_radius, PARAMS.lee_cu, PARAMS.lee_cmax, PARAMS.lee_k
    )
    np.testing.assert_array_equal(enhanced_lee_filter(img, PARAMS), expected)


@pytest.mark.parametrize("seed", range(10))
def test_anisodiff_matches_scalar_oracle(seed):
    img = random_images(1, seed=200 + seed)[0]
    expected = oracles.anisodiff_oracle(
        img, PARAMS.diffusion_iterations, PARAMS.diffusion_kappa, PARAMS.diffusion_lambda
    )
    np.testing.assert_array_equal(anisotropic_diffusion(img, PARAMS), expected)


@pytest.mark.parametrize("seed", range(10))
def test_wavelet_matches_scalar_oracle(seed):
    img = random_images(1, seed=300 + seed)[0]
    expected = oracles.wavelet_visushrink_oracle(img, PARAMS.wavelet_levels)
    np.testing.assert_array_equal(wavelet_denoise(img, PARAMS), expected)


def test_wavelet_oracle_on_odd_dimensions():
    img = random_images(1, seed=400, shape=(19, 23))[0]
    expected = oracles.wavelet_visushrink_oracle(img, PARAMS.wavelet_levels)
    np.testing.assert_array_equal(wavelet_denoise(img, PARAMS), expected)
