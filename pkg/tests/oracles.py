"""Independent reference implementations used to check the library.

Everything here is deliberately naive (scalar loops, direct convolution,
pair counting) and shares no code with the package beyond documented
conventions (half-pixel resize centers, the Gaussian tap formula,
reflect-without-edge-repeat borders).
"""
from __future__ import annotations

import math

import numpy as np
from scipy.spatial import ConvexHull


def blend_scalar_loop(source: np.ndarray, target: np.ndarray,
                      mask: np.ndarray) -> np.ndarray:
    h, w, c = source.shape
    out = np.zeros_like(source)
    for y in range(h):
        for x in range(w):
            m = mask[y, x]
            for ch in range(c):
                out[y, x, ch] = source[y, x, ch] * m + target[y, x, ch] * (1 - m)
    return out


def bilinear_resize_reference(arr: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    h, w = arr.shape[:2]
    out_shape = (out_h, out_w) + arr.shape[2:]
    out = np.zeros(out_shape)
    for j in range(out_h):
        sy = (j + 0.5) * h / out_h - 0.5
        y0 = math.floor(sy)
        wy = sy - y0
        y0c = min(max(y0, 0), h - 1)
        y1c = min(max(y0 + 1, 0), h - 1)
        for k in range(out_w):
            sx = (k + 0.5) * w / out_w - 0.5
            x0 = math.floor(sx)
            wx = sx - x0
            x0c = min(max(x0, 0), w - 1)
            x1c = min(max(x0 + 1, 0), w - 1)
            top = arr[y0c, x0c] * (1 - wx) + arr[y0c, x1c] * wx
            bot = arr[y1c, x0c] * (1 - wx) + arr[y1c, x1c] * wx
            out[j, k] = top * (1 - wy) + bot * wy
    return out


def gaussian_taps(ksize: int, sigma: float | None = None) -> np.ndarray:
    if ksize == 1:
        return np.array([1.0])
    if sigma is None:
        sigma = 0.3 * ((ksize - 1) * 0.5 - 1.0) + 0.8
    half = (ksize - 1) // 2
    xs = np.arange(-half, half + 1, dtype=np.float64)
    taps = np.exp(-(xs * xs) / (2.0 * sigma * sigma))
    return taps / taps.sum()


def _mirror_index(idx: int, n: int) -> int:
    if n == 1:
        return 0
    period = 2 * n - 2
    idx = abs(idx) % period
    return period - idx if idx >= n else idx


def gaussian_blur_naive(arr: np.ndarray, ksize: int,
                        sigma: float | None = None) -> np.ndarray:
    """Direct O(k^2) 2-D convolution with a mirrored border."""
    taps = gaussian_taps(ksize, sigma)
    kernel2d = np.outer(taps, taps)
    half = (ksize - 1) // 2
    h, w = arr.shape
    out = np.zeros_like(arr)
    for y in range(h):
        for x in range(w):
            acc = 0.0
            for dy in range(-half, half + 1):
                for dx in range(-half, half + 1):
                    yy = _mirror_index(y + dy, h)
                    xx = _mirror_index(x + dx, w)
                    acc += kernel2d[dy + half, dx + half] * arr[yy, xx]
            out[y, x] = acc
    return out


def warp_gather_loop(arr: np.ndarray, map_x: np.ndarray,
                     map_y: np.ndarray) -> np.ndarray:
    """Scalar bilinear gather with a constant-zero border."""
    h, w = arr.shape

    def at(y: int, x: int) -> float:
        if 0 <= y < h and 0 <= x < w:
            return arr[y, x]
        return 0.0

    out = np.zeros_like(arr)
    for y in range(h):
        for x in range(w):
            sx = map_x[y, x]
            sy = map_y[y, x]
            x0 = math.floor(sx)
            y0 = math.floor(sy)
            wx = sx - x0
            wy = sy - y0
            top = at(y0, x0) * (1 - wx) + at(y0, x0 + 1) * wx
            bot = at(y0 + 1, x0) * (1 - wx) + at(y0 + 1, x0 + 1) * wx
            out[y, x] = top * (1 - wy) + bot * wy
    return out


def hull_mask_half_plane(points: np.ndarray, height: int, width: int) -> np.ndarray:
    """Rasterize hull membership from Qhull vertices by half-plane signs.

    Points are clipped into the raster first, mirroring the documented
    contract of the operation under test.
    """
    pts = points.copy()
    pts[:, 0] = np.clip(pts[:, 0], 0, width - 1)
    pts[:, 1] = np.clip(pts[:, 1], 0, height - 1)
    hull = ConvexHull(pts)
    vertices = pts[hull.vertices]  # counterclockwise for 2-D inputs
    n = len(vertices)
    out = np.zeros((height, width))
    for y in range(height):
        for x in range(width):
            inside = True
            for i in range(n):
                ax, ay = vertices[i]
                bx, by = vertices[(i + 1) % n]
                if (bx - ax) * (y - ay) - (by - ay) * (x - ax) < 0.0:
                    inside = False
                    break
            out[y, x] = 1.0 if inside else 0.0
    return out


def auc_pair_counting(labels, scores) -> float:
    pos = [s for t, s in zip(labels, scores) if t == 1]
    neg = [s for t, s in zip(labels, scores) if t == 0]
    total = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                total += 1.0
            elif p == q:
                total += 0.5
    return total / (len(pos) * len(neg))


def bce_loss_reference(probs, labels) -> float:
    n = len(labels)
    return -sum(
        t * math.log(p) + (1 - t) * math.log(1 - p)
        for p, t in zip(probs, labels)
    ) / n
