"""Mask generator: convex-hull initialization, landmark jitter, elastic
deformation, two-stage Gaussian smoothing with a threshold, and blend-ratio
scaling.

The two-stage smoothing first blurs the binary hull and re-binarizes with
values below 1 - 1/255 set to 0, which erodes the support by roughly the
first kernel's radius; the second blur then produces the soft boundary.
A larger first kernel therefore erodes the mask, a larger second kernel
dilates it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    BlendMask,
    DegenerateHullError,
    Landmarks,
    ParameterError,
    RngStream,
    round_half_away,
)
from .raster import gaussian_blur, gaussian_blur_sigma, warp_bilinear
from .stg import ResizeTranslateParams, resize_translate_array

# Re-binarization threshold: "full" mask value on an 8-bit scale.
THRESHOLD_EPSILON = 1.0 / 255.0


@dataclass(frozen=True)
class MaskParams:
    """Concrete per-sample mask parameters."""

    landmark_jitter: float = 0.03
    elastic_alpha: float = 0.0
    elastic_sigma: float = 4.0
    k1: int = 1
    k2: int = 1
    ratio_choices: tuple[float, ...] = (0.25, 0.5, 0.75, 1.0, 1.0, 1.0)

    def __post_init__(self):
        for k in (self.k1, self.k2):
            if k < 1 or k % 2 == 0:
                raise ParameterError(f"kernel sizes must be odd and >= 1, got {k}")
        if self.elastic_alpha < 0:
            raise ParameterError(f"elastic alpha must be >= 0, got {self.elastic_alpha}")
        if self.elastic_sigma <= 0:
            raise ParameterError(f"elastic sigma must be > 0, got {self.elastic_sigma}")
        if self.landmark_jitter < 0:
            raise ParameterError(f"jitter must be >= 0, got {self.landmark_jitter}")
        if not self.ratio_choices or any(not 0 < r <= 1 for r in self.ratio_choices):
            raise ParameterError("ratio choices must be non-empty values in (0, 1]")


def nearest_odd(x: float) -> int:
    """Nearest odd integer to x (ties round away from zero), at least 1."""
    return max(1, 2 * round_half_away((x - 1.0) / 2.0) + 1)


# ---------------------------------------------------------------------------
# Convex hull
# ---------------------------------------------------------------------------

def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull_vertices(points: np.ndarray) -> np.ndarray:
    """Hull vertices in counterclockwise order (monotone chain).

    Collinear points on an edge are dropped; fewer than three surviving
    vertices means the input does not span a 2-D region.
    """
    pts = sorted(set(map(tuple, points.tolist())))
    if len(pts) < 3:
        raise DegenerateHullError(
            f"need >= 3 distinct landmarks for a hull, got {len(pts)}"
        )
    lower: list = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise DegenerateHullError("landmarks are collinear; hull has no area")
    return np.asarray(hull, dtype=np.float64)


def convex_hull_mask(landmarks: Landmarks, height: int, width: int) -> BlendMask:
    """Binary mask of pixel centers inside or on the landmark hull.

    Landmark coordinates are clipped into the raster before the hull is
    computed; the output raster is always height x width.
    """
    if height < 1 or width < 1:
        raise ParameterError(f"raster must be >= 1x1, got {(height, width)}")
    pts = landmarks.points.copy()
    pts[:, 0] = np.clip(pts[:, 0], 0, width - 1)
    pts[:, 1] = np.clip(pts[:, 1], 0, height - 1)
    hull = convex_hull_vertices(pts)

    xs = np.arange(width, dtype=np.float64)[None, :]
    ys = np.arange(height, dtype=np.float64)[:, None]
    inside = np.ones((height, width), dtype=bool)
    n = len(hull)
    for i in range(n):
        ax, ay = hull[i]
        bx, by = hull[(i + 1) % n]
        inside &= (bx - ax) * (ys - ay) - (by - ay) * (xs - ax) >= 0.0
    return BlendMask(inside.astype(np.float64))


# ---------------------------------------------------------------------------
# Deformations
# ---------------------------------------------------------------------------

def landmark_deform(landmarks: Landmarks, stream: RngStream, jitter: float) -> Landmarks:
    """Offset each point by uniform draws in +-(jitter * bbox diagonal).

    Offsets are drawn point-major, x before y.
    """
    if jitter < 0:
        raise ParameterError(f"jitter must be >= 0, got {jitter}")
    pts = landmarks.points
    span = pts.max(axis=0) - pts.min(axis=0)
    bound = jitter * math.hypot(span[0], span[1])
    offsets = stream.uniform_array(2 * landmarks.count, -bound, bound)
    return Landmarks(pts + offsets.reshape(-1, 2))


def elastic_warp(mask_data: np.ndarray, dx: np.ndarray, dy: np.ndarray) -> np.ndarray:
    """Resample mask at (x + dx, y + dy), bilinear, zero outside the raster."""
    h, w = mask_data.shape
    xs = np.arange(w, dtype=np.float64)[None, :]
    ys = np.arange(h, dtype=np.float64)[:, None]
    out = warp_bilinear(mask_data, xs + dx, ys + dy)
    return np.clip(out, 0.0, 1.0)


def elastic_fields(
    stream: RngStream, height: int, width: int, alpha: float, sigma: float
) -> tuple[np.ndarray, np.ndarray]:
    """Smoothed displacement fields; dx drawn before dy, row-major.

    Draws are consumed even when alpha is 0 so replayed streams stay
    aligned with the generating run.
    """
    n = height * width
    dx = stream.uniform_array(n, -1.0, 1.0).reshape(height, width)
    dy = stream.uniform_array(n, -1.0, 1.0).reshape(height, width)
    if alpha == 0.0:
        zero = np.zeros((height, width))
        return zero, zero
    dx = gaussian_blur_sigma(dx, sigma) * alpha
    dy = gaussian_blur_sigma(dy, sigma) * alpha
    return dx, dy


def elastic_deform(
    mask: BlendMask, stream: RngStream, alpha: float, sigma: float
) -> BlendMask:
    """Warp the mask by Gaussian-smoothed uniform displacement fields."""
    if alpha < 0:
        raise ParameterError(f"alpha must be >= 0, got {alpha}")
    if sigma <= 0:
        raise ParameterError(f"sigma must be > 0, got {sigma}")
    dx, dy = elastic_fields(stream, mask.height, mask.width, alpha, sigma)
    if alpha == 0.0:
        return mask
    return BlendMask(elastic_warp(mask.data, dx, dy), ratio=mask.ratio)


def binarize(mask: BlendMask, threshold: float = 0.5) -> BlendMask:
    """Snap fractional boundary values (from resampling) back to {0, 1}."""
    return BlendMask(np.where(mask.data >= threshold, 1.0, 0.0))


def dual_gaussian_smooth(mask: BlendMask, k1: int, k2: int) -> BlendMask:
    """Blur, re-binarize with the sub-full threshold, blur again.

    Requires a binary input. Values below 1 - 1/255 after the first blur
    become 0 and the rest become 1, eroding the support by about the k1
    radius; the second blur softens the boundary (and grows the support by
    its own radius), so k1 > k2 nets erosion and k2 > k1 nets dilation.
    """
    if not mask.is_binary():
        raise ParameterError("dual smoothing requires a binary mask input")
    for k in (k1, k2):
        if k < 1 or k % 2 == 0:
            raise ParameterError(f"kernel sizes must be odd and >= 1, got {k}")
    blurred = gaussian_blur(mask.data, k1)
    hard = np.where(blurred < 1.0 - THRESHOLD_EPSILON, 0.0, 1.0)
    soft = np.clip(gaussian_blur(hard, k2), 0.0, 1.0)
    return BlendMask(soft)


def apply_blend_ratio(mask: BlendMask, stream: RngStream, choices) -> BlendMask:
    """Scale the whole mask by a ratio drawn from the stated multiset."""
    if not len(choices) or any(not 0 < r <= 1 for r in choices):
        raise ParameterError("ratio choices must be non-empty values in (0, 1]")
    r = float(stream.choice(list(choices)))
    return scale_by_ratio(mask, r)


def scale_by_ratio(mask: BlendMask, r: float) -> BlendMask:
    if not 0 < r <= 1:
        raise ParameterError(f"ratio must be in (0, 1], got {r}")
    return BlendMask(mask.data * r, ratio=r)


# ---------------------------------------------------------------------------
# Full mask pipeline
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MaskDraw:
    """Sampled values recorded while generating one mask."""

    landmark_offsets: np.ndarray
    elastic_field_seed: int
    elastic_field_stream_id: int
    ratio: float


def mask_stages(
    deformed: Landmarks,
    height: int,
    width: int,
    params: MaskParams,
    rt: ResizeTranslateParams,
    field_stream: RngStream,
    ratio: float,
) -> BlendMask:
    """Deterministic mask stages given already-sampled values.

    Hull rasterization, the source image's exact resize/translate, elastic
    deformation, re-binarization (resampling leaves fractional edge values;
    the dual smoothing stage requires a binary input), dual Gaussian
    smoothing, then ratio scaling.
    """
    hull = convex_hull_mask(deformed, height, width)
    warped, _ = resize_translate_array(hull.data, rt)
    mask = BlendMask(np.clip(warped, 0.0, 1.0))
    mask = elastic_deform_with_stream(mask, field_stream, params)
    mask = binarize(mask)
    mask = dual_gaussian_smooth(mask, params.k1, params.k2)
    return scale_by_ratio(mask, ratio)


def elastic_deform_with_stream(
    mask: BlendMask, field_stream: RngStream, params: MaskParams
) -> BlendMask:
    return elastic_deform(mask, field_stream, params.elastic_alpha,
                          params.elastic_sigma)


def generate_mask(
    landmarks: Landmarks,
    height: int,
    width: int,
    params: MaskParams,
    rt: ResizeTranslateParams,
    stream: RngStream,
) -> tuple[BlendMask, MaskDraw]:
    """Sample the mask-side draws and run the full mask pipeline.

    Landmark offsets come from the "landmarks" child stream, elastic
    displacement fields from "elastic_field", and the blend ratio from
    "ratio"; the draw record is sufficient to replay the mask bit-exactly.
    """
    lm_stream = stream.child("landmarks")
    deformed = landmark_deform(landmarks, lm_stream, params.landmark_jitter)
    offsets = deformed.points - landmarks.points

    field_stream = stream.child("elastic_field")
    draw_record = (field_stream.seed, field_stream.stream_id)

    ratio_stream = stream.child("ratio")
    ratio = float(ratio_stream.choice(list(params.ratio_choices)))

    mask = mask_stages(deformed, height, width, params, rt, field_stream, ratio)
    return mask, MaskDraw(
        landmark_offsets=offsets,
        elastic_field_seed=draw_record[0],
        elastic_field_stream_id=draw_record[1],
        ratio=ratio,
    )
