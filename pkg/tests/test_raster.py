from __future__ import annotations

import numpy as np
import pytest

from oracles import bilinear_resize_reference, gaussian_blur_naive, warp_gather_loop
from sbi_forge.core import ParameterError
from sbi_forge.raster import (
    bilinear_resize,
    center_fit,
    gaussian_blur,
    gaussian_blur_sigma,
    gaussian_kernel,
    kernel_for_sigma,
    scaled_size,
    translate_zero,
    warp_bilinear,
)


def checkerboard(n: int = 8) -> np.ndarray:
    ys, xs = np.indices((n, n))
    return ((ys + xs) % 2).astype(np.float64)


# ---------------------------------------------------------------------------
# bilinear resize
# ---------------------------------------------------------------------------

def test_resize_same_size_is_identity(np_rng):
    arr = np_rng.uniform(0, 1, (8, 8, 3))
    assert np.array_equal(bilinear_resize(arr, 8, 8), arr)


@pytest.mark.parametrize("out_h,out_w", [(4, 4), (16, 16), (5, 11), (1, 8)])
def test_resize_matches_reference(np_rng, out_h, out_w):
    arr = np_rng.uniform(0, 1, (8, 8))
    expected = bilinear_resize_reference(arr, out_h, out_w)
    assert np.max(np.abs(bilinear_resize(arr, out_h, out_w) - expected)) <= 1e-12


def test_resize_3d_matches_reference(np_rng):
    arr = np_rng.uniform(0, 1, (8, 6, 3))
    expected = bilinear_resize_reference(arr, 12, 9)
    assert np.max(np.abs(bilinear_resize(arr, 12, 9) - expected)) <= 1e-12


def test_resize_rejects_degenerate_target(np_rng):
    with pytest.raises(ParameterError):
        bilinear_resize(np_rng.uniform(0, 1, (4, 4)), 0, 4)


def test_scaled_size_rounds_half_away():
    assert scaled_size(8, 8, 0.5, 0.5) == (4, 4)
    assert scaled_size(5, 5, 0.5, 0.5) == (3, 3)  # 2.5 rounds away to 3
    with pytest.raises(ParameterError):
        scaled_size(8, 8, 0.05, 1.0)


# ---------------------------------------------------------------------------
# gaussian blur
# ---------------------------------------------------------------------------

def test_kernel_size_one_is_identity(np_rng):
    arr = np_rng.uniform(0, 1, (6, 6))
    assert np.array_equal(gaussian_blur(arr, 1), arr)


def test_kernel_rejects_even_sizes():
    with pytest.raises(ParameterError):
        gaussian_kernel(4)


def test_kernel_normalized():
    for k in (3, 5, 9, 15):
        assert abs(gaussian_kernel(k).sum() - 1.0) < 1e-12


@pytest.mark.parametrize("ksize", [3, 5, 9, 15])
def test_blur_matches_naive_convolution(np_rng, ksize):
    arr = np_rng.uniform(0, 1, (32, 32))
    expected = gaussian_blur_naive(arr, ksize)
    assert np.max(np.abs(gaussian_blur(arr, ksize) - expected)) <= 1e-5


def test_blur_constant_is_fixed_point():
    arr = np.full((16, 16), 0.37)
    out = gaussian_blur(arr, 9)
    assert np.max(np.abs(out - 0.37)) < 1e-12


def test_blur_sigma_variant_matches_naive(np_rng):
    arr = np_rng.uniform(0, 1, (24, 24))
    sigma = 1.7
    expected = gaussian_blur_naive(arr, kernel_for_sigma(sigma), sigma)
    assert np.max(np.abs(gaussian_blur_sigma(arr, sigma) - expected)) <= 1e-5


# ---------------------------------------------------------------------------
# center_fit / translate
# ---------------------------------------------------------------------------

def test_center_fit_pads_centered():
    arr = np.ones((4, 4))
    out = center_fit(arr, 8, 8)
    assert out.shape == (8, 8)
    assert out[2:6, 2:6].sum() == 16
    assert out.sum() == 16


def test_center_fit_odd_padding_goes_bottom_right():
    out = center_fit(np.ones((3, 3)), 4, 4)
    assert out[0:3, 0:3].sum() == 9 and out.sum() == 9


def test_center_fit_crops_centered_tie_trims_bottom_right():
    arr = np.arange(81, dtype=np.float64).reshape(9, 9)
    out = center_fit(arr, 8, 8)
    assert np.array_equal(out, arr[0:8, 0:8])
    out2 = center_fit(arr, 7, 7)
    assert np.array_equal(out2, arr[1:8, 1:8])


def test_center_fit_mixed_axes():
    arr = np.ones((4, 10))
    out = center_fit(arr, 8, 6)
    assert out.shape == (8, 6)
    assert out[2:6, :].sum() == 4 * 6


def test_translate_positive_is_down_right():
    arr = np.arange(16, dtype=np.float64).reshape(4, 4)
    out = translate_zero(arr, 1, 2)
    assert out[0].sum() == 0
    assert np.array_equal(out[1:, 2:], arr[:-1, :-2])


def test_translate_matches_roll_with_zero_fill(np_rng):
    arr = np_rng.uniform(0, 1, (8, 8))
    out = translate_zero(arr, 2, 0)
    rolled = np.roll(arr, 2, axis=0)
    rolled[:2] = 0
    assert np.array_equal(out, rolled)


def test_translate_everything_out_is_zero():
    assert translate_zero(np.ones((4, 4)), 4, 0).sum() == 0


# ---------------------------------------------------------------------------
# warp
# ---------------------------------------------------------------------------

def test_warp_identity_at_integer_grid(np_rng):
    arr = np_rng.uniform(0, 1, (6, 6))
    ys, xs = np.indices((6, 6)).astype(np.float64)
    assert np.array_equal(warp_bilinear(arr, xs, ys), arr)


def test_warp_matches_gather_loop_oracle(np_rng):
    arr = np_rng.uniform(0, 1, (32, 32))
    ys, xs = np.indices((32, 32)).astype(np.float64)
    dx = np_rng.uniform(-3, 3, (32, 32))
    dy = np_rng.uniform(-3, 3, (32, 32))
    out = warp_bilinear(arr, xs + dx, ys + dy)
    expected = warp_gather_loop(arr, xs + dx, ys + dy)
    assert np.max(np.abs(out - expected)) <= 1e-5


def test_warp_far_outside_is_zero(np_rng):
    arr = np_rng.uniform(0.5, 1, (5, 5))
    ys, xs = np.indices((5, 5)).astype(np.float64)
    assert warp_bilinear(arr, xs + 100.0, ys).sum() == 0
    assert warp_bilinear(arr, xs, ys - 100.0).sum() == 0
