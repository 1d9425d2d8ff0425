"""Source-target generator: statistical-inconsistency transforms plus the
parameter-captured resize/translate applied to the pseudo source image.

The augmentation procedure applies, in a fixed order, a color stage
(RGB shift, then hue/saturation/value, then brightness, then contrast)
followed by a frequency stage (either bilinear down-and-up resampling or
an unsharp mask). Sub-transforms at their identity values are skipped
outright so identity parameters reproduce the input bit-exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import ImageTensor, ParameterError, RngStream
from .raster import (
    bilinear_resize,
    center_fit,
    gaussian_blur_sigma,
    round_half_away,
    scaled_size,
    translate_zero,
)

# The five color sub-transforms gated by independent coins, in apply order.
# Brightness and contrast form one jointly-gated sub-transform.
COLOR_SUBTRANSFORMS = ("rgb_shift", "hue_shift", "sat_scale", "val_scale",
                       "brightness_contrast")


@dataclass(frozen=True)
class ColorParams:
    """Concrete color-stage parameters; defaults are the identity element."""

    rgb_shift: tuple[float, float, float] = (0.0, 0.0, 0.0)
    hue_shift_deg: float = 0.0
    sat_scale: float = 1.0
    val_scale: float = 1.0
    brightness_shift: float = 0.0
    contrast_scale: float = 1.0

    def is_identity(self) -> bool:
        return (
            self.rgb_shift == (0.0, 0.0, 0.0)
            and self.hue_shift_deg == 0.0
            and self.sat_scale == 1.0
            and self.val_scale == 1.0
            and self.brightness_shift == 0.0
            and self.contrast_scale == 1.0
        )


@dataclass(frozen=True)
class FrequencyParams:
    """Frequency-stage selection; mode "none" is the identity."""

    mode: str = "none"  # downscale | sharpen | none
    downscale_factor: float = 1.0
    sharpen_alpha: float = 0.0
    sharpen_sigma: float = 1.0

    def __post_init__(self):
        if self.mode not in ("downscale", "sharpen", "none"):
            raise ParameterError(f"unknown frequency mode {self.mode!r}")
        if not 0.0 < self.downscale_factor <= 1.0:
            raise ParameterError(
                f"downscale factor must be in (0, 1], got {self.downscale_factor}"
            )
        if not 0.0 <= self.sharpen_alpha <= 1.0:
            raise ParameterError(
                f"sharpen alpha must be in [0, 1], got {self.sharpen_alpha}"
            )


@dataclass(frozen=True)
class ResizeTranslateParams:
    """Scale factors and translation fractions of the geometric perturbation."""

    u_h: float = 1.0
    u_w: float = 1.0
    v_h: float = 0.0
    v_w: float = 0.0

    def resolved(self, height: int, width: int) -> dict:
        """Integer raster geometry implied by this raster size."""
        h_r, w_r = scaled_size(height, width, self.u_h, self.u_w)
        return {
            "h_r": h_r,
            "w_r": w_r,
            "t_h": round_half_away(self.v_h * height),
            "t_w": round_half_away(self.v_w * width),
        }


# ---------------------------------------------------------------------------
# HSV conversion (vectorized, matches the scalar colorsys formulas)
# ---------------------------------------------------------------------------

def rgb_to_hsv(rgb: np.ndarray) -> np.ndarray:
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    maxc = np.max(rgb, axis=-1)
    minc = np.min(rgb, axis=-1)
    delta = maxc - minc

    v = maxc
    s = np.where(maxc > 0, delta / np.where(maxc > 0, maxc, 1.0), 0.0)

    safe = np.where(delta > 0, delta, 1.0)
    rc = (maxc - r) / safe
    gc = (maxc - g) / safe
    bc = (maxc - b) / safe
    h = np.where(
        r == maxc, bc - gc, np.where(g == maxc, 2.0 + rc - bc, 4.0 + gc - rc)
    )
    h = np.where(delta > 0, (h / 6.0) % 1.0, 0.0)
    return np.stack([h, s, v], axis=-1)


def hsv_to_rgb(hsv: np.ndarray) -> np.ndarray:
    h, s, v = hsv[..., 0], hsv[..., 1], hsv[..., 2]
    i = np.floor(h * 6.0)
    f = h * 6.0 - i
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))
    i = i.astype(np.int64) % 6

    r = np.choose(i, [v, q, p, p, t, v])
    g = np.choose(i, [t, v, v, q, p, p])
    b = np.choose(i, [p, p, t, v, v, q])
    rgb = np.stack([r, g, b], axis=-1)
    return np.where(s[..., None] == 0.0, v[..., None], rgb)


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------

def color_transform(img: ImageTensor, params: ColorParams) -> ImageTensor:
    """Apply RGB shift, then HSV adjustment, then brightness, then contrast.

    Each stage clamps to [0, 1]; stages at their identity values are
    skipped so identity params return the input bit-identically.
    """
    data = img.data

    if params.rgb_shift != (0.0, 0.0, 0.0):
        data = np.clip(data + np.asarray(params.rgb_shift), 0.0, 1.0)

    if (params.hue_shift_deg, params.sat_scale, params.val_scale) != (0.0, 1.0, 1.0):
        hsv = rgb_to_hsv(data)
        hsv[..., 0] = (hsv[..., 0] + params.hue_shift_deg / 360.0) % 1.0
        hsv[..., 1] = np.clip(hsv[..., 1] * params.sat_scale, 0.0, 1.0)
        hsv[..., 2] = np.clip(hsv[..., 2] * params.val_scale, 0.0, 1.0)
        data = np.clip(hsv_to_rgb(hsv), 0.0, 1.0)

    if params.brightness_shift != 0.0:
        data = np.clip(data + params.brightness_shift, 0.0, 1.0)

    if params.contrast_scale != 1.0:
        data = np.clip((data - 0.5) * params.contrast_scale + 0.5, 0.0, 1.0)

    return img if data is img.data else ImageTensor(data)


def frequency_transform(img: ImageTensor, params: FrequencyParams) -> ImageTensor:
    """Downsample-and-restore or unsharp-mask the image; "none" is identity."""
    if params.mode == "none":
        return img

    if params.mode == "downscale":
        if params.downscale_factor == 1.0:
            return img
        h, w = img.height, img.width
        low_h, low_w = scaled_size(h, w, params.downscale_factor,
                                   params.downscale_factor)
        low = bilinear_resize(img.data, low_h, low_w)
        return ImageTensor(np.clip(bilinear_resize(low, h, w), 0.0, 1.0))

    # sharpen
    if params.sharpen_alpha == 0.0:
        return img
    blurred = gaussian_blur_sigma(img.data, params.sharpen_sigma)
    out = img.data + params.sharpen_alpha * (img.data - blurred)
    return ImageTensor(np.clip(out, 0.0, 1.0))


def resize_translate(
    img: ImageTensor, params: ResizeTranslateParams
) -> tuple[ImageTensor, dict]:
    """Bilinear-resize, re-fit to the original raster, then shift.

    The resized raster is centered in a zero field (when smaller) or
    center-cropped (when larger; ties trim the extra pixel bottom/right),
    then content shifts by (t_h, t_w) with positive meaning down/right;
    vacated pixels are zero, shifted-out pixels are discarded. Returns the
    output and the resolved integer geometry so the identical map can be
    replayed on the blending mask.
    """
    out, resolved = resize_translate_array(img.data, params)
    return ImageTensor(np.clip(out, 0.0, 1.0)), resolved


def resize_translate_array(
    arr: np.ndarray, params: ResizeTranslateParams
) -> tuple[np.ndarray, dict]:
    """resize_translate on a bare raster; shared by image and mask paths."""
    h, w = arr.shape[:2]
    resolved = params.resolved(h, w)
    out = bilinear_resize(arr, resolved["h_r"], resolved["w_r"])
    out = center_fit(out, h, w)
    out = translate_zero(out, resolved["t_h"], resolved["t_w"])
    return out, resolved


# ---------------------------------------------------------------------------
# Sampled source/target split (the branch coin plus procedure T)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AugmentDraw:
    """Everything sampled for one source/target split."""

    source_is_augmented: bool
    applied: dict = field(default_factory=dict)
    color: ColorParams = ColorParams()
    frequency: FrequencyParams = FrequencyParams()


def sample_augment_params(stream: RngStream, config) -> AugmentDraw:
    """Draw the branch coin and all transform parameters.

    Draw order (fixed for replay bookkeeping): branch coin from the
    "branch" child stream; then from the "augment" child one coin per
    sub-transform (five color sub-transforms plus the frequency transform,
    redrawn together until at least one applies), then the parameters of
    applied sub-transforms in apply order.
    """
    branch = stream.child("branch")
    source_is_augmented = branch.uniform() < 0.5

    aug = stream.child("augment")
    names = COLOR_SUBTRANSFORMS + ("frequency",)
    while True:
        coins = [aug.uniform() < config.transform_prob for _ in names]
        if any(coins):
            break
    applied = dict(zip(names, coins))

    rgb = (0.0, 0.0, 0.0)
    if applied["rgb_shift"]:
        lim = config.rgb_shift_limit
        rgb = tuple(aug.uniform(-lim, lim) for _ in range(3))
    hue = aug.uniform(-config.hue_shift_limit_deg, config.hue_shift_limit_deg) \
        if applied["hue_shift"] else 0.0
    sat = aug.uniform(*config.sat_scale_range) if applied["sat_scale"] else 1.0
    val = aug.uniform(*config.val_scale_range) if applied["val_scale"] else 1.0
    if applied["brightness_contrast"]:
        brightness = aug.uniform(-config.brightness_shift_limit,
                                 config.brightness_shift_limit)
        contrast = aug.uniform(*config.contrast_scale_range)
    else:
        brightness, contrast = 0.0, 1.0

    if applied["frequency"]:
        mode = aug.choice(("downscale", "sharpen"))
        if mode == "downscale":
            frequency = FrequencyParams(
                mode="downscale",
                downscale_factor=aug.uniform(*config.downscale_factor_range),
                sharpen_sigma=config.sharpen_sigma,
            )
        else:
            frequency = FrequencyParams(
                mode="sharpen",
                sharpen_alpha=aug.uniform(*config.sharpen_alpha_range),
                sharpen_sigma=config.sharpen_sigma,
            )
    else:
        frequency = FrequencyParams(sharpen_sigma=config.sharpen_sigma)

    color = ColorParams(
        rgb_shift=rgb,
        hue_shift_deg=hue,
        sat_scale=sat,
        val_scale=val,
        brightness_shift=brightness,
        contrast_scale=contrast,
    )
    return AugmentDraw(source_is_augmented, applied, color, frequency)


def apply_augmentation(img: ImageTensor, draw: AugmentDraw) -> tuple[ImageTensor, ImageTensor]:
    """Build (source, target): one side transformed, the other untouched."""
    transformed = frequency_transform(color_transform(img, draw.color),
                                      draw.frequency)
    if draw.source_is_augmented:
        return transformed, img
    return img, transformed


def augment_source_target(
    img: ImageTensor, stream: RngStream, config
) -> tuple[ImageTensor, ImageTensor, AugmentDraw]:
    """One coin decides which of (source, target) receives the transform."""
    draw = sample_augment_params(stream, config)
    source, target = apply_augmentation(img, draw)
    return source, target, draw


def sample_resize_translate(stream: RngStream, config) -> ResizeTranslateParams:
    """Scale/translate factors from the "resize_translate" child stream."""
    rt = stream.child("resize_translate")
    return ResizeTranslateParams(
        u_h=rt.uniform(*config.resize_scale_range),
        u_w=rt.uniform(*config.resize_scale_range),
        v_h=rt.uniform(*config.translate_frac_range),
        v_w=rt.uniform(*config.translate_frac_range),
    )
