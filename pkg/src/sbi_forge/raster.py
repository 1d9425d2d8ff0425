"""Shared raster primitives: bilinear resampling, Gaussian blur, warping.

These operate on bare float64 arrays, 2-D (H, W) or 3-D (H, W, C); the
domain wrappers in stg/mg adapt them to the value types. Conventions that
tests and oracles rely on:

- bilinear resize uses half-pixel centers: src = (dst + 0.5) * in/out - 0.5,
  corner samples clamped to the raster.
- Gaussian kernels are w_i = exp(-(i - c)^2 / (2 sigma^2)), normalized to
  sum 1; kernel size 1 is the identity. When only a size k is given,
  sigma = 0.3 * ((k - 1) / 2 - 1) + 0.8; when only a sigma is given,
  k = 2 * ceil(3 * sigma) + 1. Borders reflect without repeating the edge
  sample.
- warps gather with bilinear interpolation and a constant zero border.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.ndimage import correlate1d

from .core import ParameterError, round_half_away


def bilinear_resize(arr: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Resample to (out_h, out_w) with half-pixel-center bilinear weights."""
    if out_h < 1 or out_w < 1:
        raise ParameterError(f"resize target must be >= 1, got {(out_h, out_w)}")
    h, w = arr.shape[:2]
    if (out_h, out_w) == (h, w):
        return arr.copy()

    src_y = (np.arange(out_h, dtype=np.float64) + 0.5) * (h / out_h) - 0.5
    src_x = (np.arange(out_w, dtype=np.float64) + 0.5) * (w / out_w) - 0.5
    y0 = np.floor(src_y)
    x0 = np.floor(src_x)
    wy = src_y - y0
    wx = src_x - x0
    y0c = np.clip(y0, 0, h - 1).astype(np.intp)
    y1c = np.clip(y0 + 1, 0, h - 1).astype(np.intp)
    x0c = np.clip(x0, 0, w - 1).astype(np.intp)
    x1c = np.clip(x0 + 1, 0, w - 1).astype(np.intp)

    if arr.ndim == 3:
        wy = wy[:, None, None]
        wx = wx[None, :, None]
    else:
        wy = wy[:, None]
        wx = wx[None, :]

    top = arr[y0c][:, x0c] * (1.0 - wx) + arr[y0c][:, x1c] * wx
    bot = arr[y1c][:, x0c] * (1.0 - wx) + arr[y1c][:, x1c] * wx
    return top * (1.0 - wy) + bot * wy


def sigma_for_kernel(ksize: int) -> float:
    """Width implied by an odd kernel size (matches the common toolchain rule)."""
    return 0.3 * ((ksize - 1) * 0.5 - 1.0) + 0.8


def kernel_for_sigma(sigma: float) -> int:
    return 2 * math.ceil(3.0 * sigma) + 1


def gaussian_kernel(ksize: int, sigma: float | None = None) -> np.ndarray:
    """Normalized 1-D Gaussian taps for an odd kernel size."""
    if ksize < 1 or ksize % 2 == 0:
        raise ParameterError(f"kernel size must be odd and >= 1, got {ksize}")
    if ksize == 1:
        return np.array([1.0])
    if sigma is None:
        sigma = sigma_for_kernel(ksize)
    if sigma <= 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    half = (ksize - 1) // 2
    x = np.arange(-half, half + 1, dtype=np.float64)
    k = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return k / k.sum()


def gaussian_blur(arr: np.ndarray, ksize: int, sigma: float | None = None) -> np.ndarray:
    """Separable Gaussian blur; border mode reflects without edge repeat."""
    k = gaussian_kernel(ksize, sigma)
    if k.size == 1:
        return arr.copy()
    out = correlate1d(arr, k, axis=0, mode="mirror")
    return correlate1d(out, k, axis=1, mode="mirror")


def gaussian_blur_sigma(arr: np.ndarray, sigma: float) -> np.ndarray:
    """Blur with a width given directly; kernel size derived from sigma."""
    if sigma <= 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    return gaussian_blur(arr, kernel_for_sigma(sigma), sigma)


def center_fit(arr: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Center in a zero field when smaller, center-crop when larger.

    Ties place the extra padding pixel, or trim the extra crop pixel, on
    the bottom/right. Handled per axis, so an input may be padded in one
    axis and cropped in the other.
    """
    h, w = arr.shape[:2]
    out_shape = (out_h, out_w) + arr.shape[2:]
    out = np.zeros(out_shape, dtype=arr.dtype)

    src_y0 = max(0, (h - out_h) // 2)
    src_x0 = max(0, (w - out_w) // 2)
    dst_y0 = max(0, (out_h - h) // 2)
    dst_x0 = max(0, (out_w - w) // 2)
    copy_h = min(h, out_h)
    copy_w = min(w, out_w)
    out[dst_y0:dst_y0 + copy_h, dst_x0:dst_x0 + copy_w] = arr[
        src_y0:src_y0 + copy_h, src_x0:src_x0 + copy_w
    ]
    return out


def translate_zero(arr: np.ndarray, t_h: int, t_w: int) -> np.ndarray:
    """Shift content by whole pixels, positive = down/right, zero fill."""
    h, w = arr.shape[:2]
    out = np.zeros_like(arr)
    if abs(t_h) >= h or abs(t_w) >= w:
        return out
    src_y = slice(max(0, -t_h), min(h, h - t_h))
    src_x = slice(max(0, -t_w), min(w, w - t_w))
    dst_y = slice(max(0, t_h), min(h, h + t_h))
    dst_x = slice(max(0, t_w), min(w, w + t_w))
    out[dst_y, dst_x] = arr[src_y, src_x]
    return out


def warp_bilinear(arr: np.ndarray, map_x: np.ndarray, map_y: np.ndarray) -> np.ndarray:
    """Gather arr at fractional (map_x, map_y), zero outside the raster.

    out[y, x] = arr interpolated at (map_x[y, x], map_y[y, x]).
    """
    h, w = arr.shape[:2]
    if map_x.shape != (h, w) or map_y.shape != (h, w):
        raise ParameterError("displacement maps must match the raster shape")

    # One zero ring is enough: corner indices clipped into it contribute 0,
    # which realizes the constant-zero border for any out-of-range position.
    padded = np.zeros((h + 2, w + 2) + arr.shape[2:], dtype=arr.dtype)
    padded[1:-1, 1:-1] = arr

    x0 = np.floor(map_x)
    y0 = np.floor(map_y)
    wx = map_x - x0
    wy = map_y - y0
    x0i = np.clip(x0, -1, w).astype(np.intp) + 1
    x1i = np.clip(x0 + 1, -1, w).astype(np.intp) + 1
    y0i = np.clip(y0, -1, h).astype(np.intp) + 1
    y1i = np.clip(y0 + 1, -1, h).astype(np.intp) + 1

    if arr.ndim == 3:
        wx = wx[:, :, None]
        wy = wy[:, :, None]

    a = padded[y0i, x0i]
    b = padded[y0i, x1i]
    c = padded[y1i, x0i]
    d = padded[y1i, x1i]
    top = a * (1.0 - wx) + b * wx
    bot = c * (1.0 - wx) + d * wx
    return top * (1.0 - wy) + bot * wy


def scaled_size(height: int, width: int, u_h: float, u_w: float) -> tuple[int, int]:
    """Target raster size for scale factors, rounded half away from zero."""
    out_h = round_half_away(u_h * height)
    out_w = round_half_away(u_w * width)
    if out_h < 1 or out_w < 1:
        raise ParameterError(
            f"scaled size {(out_h, out_w)} collapses below one pixel "
            f"(u_h={u_h}, u_w={u_w})"
        )
    return out_h, out_w
