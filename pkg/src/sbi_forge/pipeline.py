"""End-to-end sample generation: one pristine image plus landmarks in, one
self-blended sample (real/fake pair, mask, replayable recipe) out.

The per-sample procedure, in fixed order:

1. branch coin: which of (source, target) receives the augmentation
2. color + frequency transform parameters, applied to that side
3. resize/translate parameters, applied to the source image
4. landmark jitter, convex hull, the identical resize/translate on the
   mask, elastic deformation, dual Gaussian smoothing, ratio scaling
5. pixelwise blend of source over target through the mask

Every sampled value is logged to a RecipeRecord; replaying a recipe
reapplies the recorded values and reproduces the sample bit-exactly. The
emitted "real" member is always the target image (which may be the
augmented side), never the base image.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .core import (
    BlendMask,
    ConfigError,
    ImageTensor,
    Landmarks,
    ParameterError,
    RecipeError,
    RngStream,
    SbiForgeError,
    blend,
    quantize_unit,
    stream_for_sample,
)
from .mg import MaskParams, generate_mask, mask_stages, nearest_odd
from .stg import (
    COLOR_SUBTRANSFORMS,
    AugmentDraw,
    ColorParams,
    FrequencyParams,
    ResizeTranslateParams,
    apply_augmentation,
    resize_translate,
    sample_augment_params,
    sample_resize_translate,
)

RECIPE_VERSION = "sbi-forge/1"
CONFIG_SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# Config
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PipelineConfig:
    """All sampling ranges of the generation pipeline.

    Loaded from a JSON document with the same field names; unknown keys
    are rejected so typos cannot silently skew a dataset.
    """

    schema_version: int = CONFIG_SCHEMA_VERSION
    landmark_count: int = 81

    # color transform ranges
    rgb_shift_limit: float = 20.0 / 255.0
    hue_shift_limit_deg: float = 10.0
    sat_scale_range: tuple[float, float] = (0.7, 1.3)
    val_scale_range: tuple[float, float] = (0.7, 1.3)
    brightness_shift_limit: float = 0.1
    contrast_scale_range: tuple[float, float] = (0.85, 1.15)
    transform_prob: float = 0.5

    # frequency transform ranges
    downscale_factor_range: tuple[float, float] = (0.5, 0.95)
    sharpen_alpha_range: tuple[float, float] = (0.2, 0.5)
    sharpen_sigma: float = 1.0

    # geometric perturbation of the source image
    resize_scale_range: tuple[float, float] = (0.95, 1.05)
    translate_frac_range: tuple[float, float] = (-0.03, 0.03)

    # mask generation
    landmark_jitter: float = 0.03
    elastic_alpha_range: tuple[float, float] = (0.0, 6.0)
    elastic_sigma_range: tuple[float, float] = (4.0, 8.0)
    kernel_frac_range: tuple[float, float] = (0.05, 0.25)
    ratio_choices: tuple[float, ...] = (0.25, 0.5, 0.75, 1.0, 1.0, 1.0)

    # face cropping
    margin_range: tuple[float, float] = (0.04, 0.20)
    inference_margin: float = 0.125
    margin_mode: str = "per_side"  # per_side | total

    def __post_init__(self):
        if self.schema_version != CONFIG_SCHEMA_VERSION:
            raise ConfigError(
                f"unsupported config schema version {self.schema_version}; "
                f"this build reads version {CONFIG_SCHEMA_VERSION}"
            )
        ranges = {
            "sat_scale_range": self.sat_scale_range,
            "val_scale_range": self.val_scale_range,
            "contrast_scale_range": self.contrast_scale_range,
            "downscale_factor_range": self.downscale_factor_range,
            "sharpen_alpha_range": self.sharpen_alpha_range,
            "resize_scale_range": self.resize_scale_range,
            "translate_frac_range": self.translate_frac_range,
            "elastic_alpha_range": self.elastic_alpha_range,
            "elastic_sigma_range": self.elastic_sigma_range,
            "kernel_frac_range": self.kernel_frac_range,
            "margin_range": self.margin_range,
        }
        for name, (lo, hi) in ranges.items():
            if lo > hi:
                raise ConfigError(f"{name} is inverted: {lo} > {hi}")
        for name, value in (
            ("rgb_shift_limit", self.rgb_shift_limit),
            ("hue_shift_limit_deg", self.hue_shift_limit_deg),
            ("brightness_shift_limit", self.brightness_shift_limit),
            ("landmark_jitter", self.landmark_jitter),
        ):
            if value < 0:
                raise ConfigError(f"{name} must be >= 0, got {value}")
        if not 0.0 <= self.transform_prob <= 1.0:
            raise ConfigError(f"transform_prob must be in [0, 1], got {self.transform_prob}")
        if not 0.0 < self.downscale_factor_range[0]:
            raise ConfigError("downscale factors must be positive")
        if self.downscale_factor_range[1] > 1.0:
            raise ConfigError("downscale factors must be <= 1")
        if self.elastic_alpha_range[0] < 0:
            raise ConfigError("elastic alpha must be >= 0")
        if self.elastic_sigma_range[0] <= 0:
            raise ConfigError("elastic sigma must be > 0")
        if self.kernel_frac_range[0] < 0:
            raise ConfigError("kernel fractions must be >= 0")
        if not self.ratio_choices or any(not 0 < r <= 1 for r in self.ratio_choices):
            raise ConfigError("ratio_choices must be non-empty values in (0, 1]")
        if self.margin_range[0] < 0:
            raise ConfigError("margins must be >= 0")
        if not 0 <= self.inference_margin:
            raise ConfigError("inference margin must be >= 0")
        if self.margin_mode not in ("per_side", "total"):
            raise ConfigError(f"unknown margin_mode {self.margin_mode!r}")
        if self.landmark_count < 3:
            raise ConfigError("landmark_count must be >= 3")
        if self.sharpen_sigma <= 0:
            raise ConfigError("sharpen_sigma must be > 0")

    @classmethod
    def identity(cls, **overrides) -> "PipelineConfig":
        """All ranges collapsed so the whole pipeline is the identity map."""
        base = dict(
            rgb_shift_limit=0.0,
            hue_shift_limit_deg=0.0,
            sat_scale_range=(1.0, 1.0),
            val_scale_range=(1.0, 1.0),
            brightness_shift_limit=0.0,
            contrast_scale_range=(1.0, 1.0),
            downscale_factor_range=(1.0, 1.0),
            sharpen_alpha_range=(0.0, 0.0),
            resize_scale_range=(1.0, 1.0),
            translate_frac_range=(0.0, 0.0),
            landmark_jitter=0.0,
            elastic_alpha_range=(0.0, 0.0),
            kernel_frac_range=(0.0, 0.0),
            ratio_choices=(1.0,),
        )
        base.update(overrides)
        return cls(**base)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        known = {f.name: f.type for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - set(known))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        kwargs = {}
        for key, value in data.items():
            if isinstance(value, list):
                value = tuple(value)
            kwargs[key] = value
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
        return cls.from_dict(data)

    def to_file(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")


# ---------------------------------------------------------------------------
# Recipes
# ---------------------------------------------------------------------------

@dataclass
class RecipeRecord:
    """Complete log of one generation, in execution order.

    Replaying a record through the pipeline reproduces the sample
    bit-exactly; all values are validated against the embedded sampling
    config on load so a corrupted record fails loudly instead of silently
    producing a different dataset.
    """

    version: str
    manifest_key: str | None
    seed: int
    stream_id: int
    image_path: str | None
    image_digest: str | None
    margin: float | None
    crop_box: tuple[int, int, int, int] | None
    source_is_augmented: bool
    applied: dict
    color: dict
    frequency: dict
    resize_translate: dict
    landmark_offsets: list
    elastic: dict
    kernels: dict
    ratio: float
    config: dict

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "RecipeRecord":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise RecipeError(f"recipe is not valid JSON: {exc}") from exc
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise RecipeError(f"unknown recipe fields: {', '.join(unknown)}")
        missing = sorted(known - set(data))
        if missing:
            raise RecipeError(f"missing recipe fields: {', '.join(missing)}")
        if data["crop_box"] is not None:
            data["crop_box"] = tuple(data["crop_box"])
        record = cls(**data)
        record.validate()
        return record

    def validate(self) -> None:
        if self.version != RECIPE_VERSION:
            raise RecipeError(
                f"recipe version {self.version!r} does not match "
                f"{RECIPE_VERSION!r}"
            )
        try:
            cfg = PipelineConfig.from_dict(self.config)
        except ConfigError as exc:
            raise RecipeError(f"embedded config invalid: {exc}") from exc

        def check(name: str, value: float, lo: float, hi: float) -> None:
            if not lo <= value <= hi:
                raise RecipeError(
                    f"recorded {name}={value} outside sampling range "
                    f"[{lo}, {hi}]"
                )

        if not 0 < self.ratio <= 1:
            raise RecipeError(f"recorded ratio={self.ratio} outside (0, 1]")
        applied = self.applied
        color = self.color
        if applied.get("rgb_shift"):
            for v in color["rgb_shift"]:
                check("rgb_shift", v, -cfg.rgb_shift_limit, cfg.rgb_shift_limit)
        if applied.get("hue_shift"):
            check("hue_shift_deg", color["hue_shift_deg"],
                  -cfg.hue_shift_limit_deg, cfg.hue_shift_limit_deg)
        if applied.get("sat_scale"):
            check("sat_scale", color["sat_scale"], *cfg.sat_scale_range)
        if applied.get("val_scale"):
            check("val_scale", color["val_scale"], *cfg.val_scale_range)
        if applied.get("brightness_contrast"):
            check("brightness_shift", color["brightness_shift"],
                  -cfg.brightness_shift_limit, cfg.brightness_shift_limit)
            check("contrast_scale", color["contrast_scale"],
                  *cfg.contrast_scale_range)
        freq = self.frequency
        if freq["mode"] == "downscale":
            check("downscale_factor", freq["downscale_factor"],
                  *cfg.downscale_factor_range)
        elif freq["mode"] == "sharpen":
            check("sharpen_alpha", freq["sharpen_alpha"],
                  *cfg.sharpen_alpha_range)
        rt = self.resize_translate
        check("u_h", rt["u_h"], *cfg.resize_scale_range)
        check("u_w", rt["u_w"], *cfg.resize_scale_range)
        check("v_h", rt["v_h"], *cfg.translate_frac_range)
        check("v_w", rt["v_w"], *cfg.translate_frac_range)
        el = self.elastic
        check("elastic_alpha", el["alpha"], *cfg.elastic_alpha_range)
        check("elastic_sigma", el["sigma"], *cfg.elastic_sigma_range)
        check("kernel_frac_1", self.kernels["frac1"], *cfg.kernel_frac_range)
        check("kernel_frac_2", self.kernels["frac2"], *cfg.kernel_frac_range)
        if self.margin is not None and self.margin != cfg.inference_margin:
            check("margin", self.margin, *cfg.margin_range)


# ---------------------------------------------------------------------------
# Samples
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SbiSample:
    """One generated pair: the target image labeled Real, the blend Fake."""

    real_image: ImageTensor
    fake_image: ImageTensor
    mask: BlendMask
    recipe: RecipeRecord
    meta: dict = field(default_factory=dict)


def image_digest(img: ImageTensor) -> str:
    """Content digest of the decoded pixels (robust to file re-encoding)."""
    h = hashlib.sha256()
    h.update(f"{img.height}x{img.width}".encode())
    h.update(quantize_unit(img.data).tobytes())
    return h.hexdigest()


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------

def _kernel_sizes(landmarks: Landmarks, frac1: float, frac2: float) -> tuple[int, int]:
    """Kernel sizes from fractions of the larger landmark-bbox side."""
    span = landmarks.points.max(axis=0) - landmarks.points.min(axis=0)
    side = float(max(span[0], span[1]))
    return nearest_odd(frac1 * side), nearest_odd(frac2 * side)


def generate_sbi(
    img: ImageTensor,
    landmarks: Landmarks,
    config: PipelineConfig,
    stream: RngStream,
    *,
    manifest_key: str | None = None,
    image_path: str | None = None,
    margin: float | None = None,
    crop_box: tuple[int, int, int, int] | None = None,
    base_digest: str | None = None,
) -> SbiSample:
    """Run the full generation procedure on one cropped face."""
    draw = sample_augment_params(stream, config)
    source, target = apply_augmentation(img, draw)

    rt = sample_resize_translate(stream, config)
    source, resolved_rt = resize_translate(source, rt)

    el_stream = stream.child("elastic_params")
    alpha = el_stream.uniform(*config.elastic_alpha_range)
    sigma = el_stream.uniform(*config.elastic_sigma_range)

    k_stream = stream.child("kernels")
    frac1 = k_stream.uniform(*config.kernel_frac_range)
    frac2 = k_stream.uniform(*config.kernel_frac_range)
    k1, k2 = _kernel_sizes(landmarks, frac1, frac2)

    mask_params = MaskParams(
        landmark_jitter=config.landmark_jitter,
        elastic_alpha=alpha,
        elastic_sigma=sigma,
        k1=k1,
        k2=k2,
        ratio_choices=config.ratio_choices,
    )
    mask, mask_draw = generate_mask(
        landmarks, img.height, img.width, mask_params, rt, stream
    )

    fake = blend(source, target, mask)

    recipe = RecipeRecord(
        version=RECIPE_VERSION,
        manifest_key=manifest_key,
        seed=stream.seed,
        stream_id=stream.stream_id,
        image_path=image_path,
        image_digest=base_digest,
        margin=margin,
        crop_box=crop_box,
        source_is_augmented=draw.source_is_augmented,
        applied=dict(draw.applied),
        color=dataclasses.asdict(draw.color),
        frequency=dataclasses.asdict(draw.frequency),
        resize_translate={
            "u_h": rt.u_h, "u_w": rt.u_w, "v_h": rt.v_h, "v_w": rt.v_w,
            **resolved_rt,
        },
        landmark_offsets=mask_draw.landmark_offsets.tolist(),
        elastic={
            "alpha": alpha,
            "sigma": sigma,
            "field_seed": mask_draw.elastic_field_seed,
            "field_stream_id": mask_draw.elastic_field_stream_id,
        },
        kernels={"frac1": frac1, "frac2": frac2, "k1": k1, "k2": k2},
        ratio=mask_draw.ratio,
        config=config.to_dict(),
    )
    return SbiSample(real_image=target, fake_image=fake, mask=mask, recipe=recipe)


def replay(
    recipe: RecipeRecord, img: ImageTensor, landmarks: Landmarks
) -> SbiSample:
    """Reapply a recorded generation without any sampling.

    The provided image and landmarks must be in the same frame the recipe
    was generated from (the original frame when the recipe carries a crop
    box, the cropped frame otherwise). A digest mismatch against the
    recorded source image does not abort; it is flagged in the result's
    meta so provenance drift is visible.
    """
    recipe.validate()
    config = PipelineConfig.from_dict(recipe.config)

    meta: dict = {}
    if recipe.image_digest is not None:
        actual = image_digest(img)
        meta["provenance_mismatch"] = actual != recipe.image_digest
        meta["image_digest"] = actual

    if recipe.crop_box is not None:
        x0, y0, x1, y1 = recipe.crop_box
        if not (0 <= x0 < x1 <= img.width and 0 <= y0 < y1 <= img.height):
            raise RecipeError(f"recorded crop box {recipe.crop_box} exceeds image")
        img = ImageTensor(img.data[y0:y1, x0:x1])
        landmarks = landmarks.shifted(-x0, -y0)

    color = ColorParams(
        rgb_shift=tuple(recipe.color["rgb_shift"]),
        hue_shift_deg=recipe.color["hue_shift_deg"],
        sat_scale=recipe.color["sat_scale"],
        val_scale=recipe.color["val_scale"],
        brightness_shift=recipe.color["brightness_shift"],
        contrast_scale=recipe.color["contrast_scale"],
    )
    frequency = FrequencyParams(**recipe.frequency)
    draw = AugmentDraw(recipe.source_is_augmented, dict(recipe.applied),
                       color, frequency)
    source, target = apply_augmentation(img, draw)

    rt = ResizeTranslateParams(
        u_h=recipe.resize_translate["u_h"],
        u_w=recipe.resize_translate["u_w"],
        v_h=recipe.resize_translate["v_h"],
        v_w=recipe.resize_translate["v_w"],
    )
    resolved = rt.resolved(img.height, img.width)
    for key, value in resolved.items():
        if recipe.resize_translate.get(key) != value:
            raise RecipeError(
                f"recorded geometry {key}={recipe.resize_translate.get(key)} "
                f"inconsistent with {value} for this raster"
            )
    source, _ = resize_translate(source, rt)

    offsets = np.asarray(recipe.landmark_offsets, dtype=np.float64)
    if offsets.shape != landmarks.points.shape:
        raise RecipeError(
            f"recorded offsets shape {offsets.shape} does not match "
            f"{landmarks.points.shape} landmarks"
        )
    deformed = Landmarks(landmarks.points + offsets)

    mask_params = MaskParams(
        landmark_jitter=config.landmark_jitter,
        elastic_alpha=recipe.elastic["alpha"],
        elastic_sigma=recipe.elastic["sigma"],
        k1=recipe.kernels["k1"],
        k2=recipe.kernels["k2"],
        ratio_choices=config.ratio_choices,
    )
    field_stream = RngStream(recipe.elastic["field_seed"],
                             recipe.elastic["field_stream_id"])
    mask = mask_stages(deformed, img.height, img.width, mask_params, rt,
                       field_stream, recipe.ratio)

    fake = blend(source, target, mask)
    return SbiSample(real_image=target, fake_image=fake, mask=mask,
                     recipe=recipe, meta=meta)


# ---------------------------------------------------------------------------
# Batch driver
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SampleResult:
    """One slot of a batch: either a sample or a logged per-sample failure."""

    entry_index: int
    sample_index: int
    key: str
    sample: SbiSample | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.sample is not None


def generate_from_entry(
    entry,
    entry_index: int,
    config: PipelineConfig,
    base_seed: int,
    sample_index: int,
    mode: str = "train",
) -> SbiSample:
    """Load, crop, and generate one sample for one manifest entry.

    The crop margin is drawn from the per-sample "margin" child stream in
    train mode and fixed in inference mode; the sampled margin, resolved
    crop box, and source-image digest all land in the recipe.
    """
    from .ingest import crop_face, load_image, sample_margin

    img = load_image(entry.resolved_path())
    digest = image_digest(img)
    stream = stream_for_sample(base_seed, entry_index, sample_index)
    margin = sample_margin(stream.child("margin"), *config.margin_range,
                           mode=mode, inference_margin=config.inference_margin)
    cropped, crop_box = crop_face(img, entry.bbox, margin,
                                  margin_mode=config.margin_mode)
    landmarks = Landmarks(entry.landmark_array()).shifted(-crop_box[0], -crop_box[1])
    return generate_sbi(
        cropped,
        landmarks,
        config,
        stream,
        manifest_key=entry.key,
        image_path=str(entry.resolved_path()),
        margin=margin,
        crop_box=crop_box,
        base_digest=digest,
    )


def _entry_task(args) -> list:
    entries, indices, config, base_seed, samples_per_image, mode = args
    out = []
    for entry, entry_index in zip(entries, indices):
        for sample_index in range(samples_per_image):
            try:
                sample = generate_from_entry(
                    entry, entry_index, config, base_seed, sample_index, mode
                )
                out.append(SampleResult(entry_index, sample_index, entry.key,
                                        sample=sample))
            except SbiForgeError as exc:
                out.append(SampleResult(entry_index, sample_index, entry.key,
                                        error=f"{type(exc).__name__}: {exc}"))
    return out


def generate_batch(
    entries: Sequence,
    config: PipelineConfig,
    base_seed: int,
    samples_per_image: int = 1,
    workers: int = 1,
    mode: str = "train",
) -> Iterator[SampleResult]:
    """Generate samples for every entry, in manifest order.

    Per-sample failures are reported as error results and never abort the
    batch. Every sample is a pure function of (entry, indices, config,
    seed), so the emitted set is identical for any worker count.
    """
    if workers < 1:
        raise ParameterError(f"workers must be >= 1, got {workers}")
    if samples_per_image < 1:
        raise ParameterError(
            f"samples_per_image must be >= 1, got {samples_per_image}"
        )
    if mode not in ("train", "inference"):
        raise ParameterError(f"unknown mode {mode!r}")

    if workers == 1:
        for entry_index, entry in enumerate(entries):
            yield from _entry_task(
                ([entry], [entry_index], config, base_seed, samples_per_image, mode)
            )
        return

    chunk = max(1, len(entries) // (workers * 8))
    tasks = []
    for start in range(0, len(entries), chunk):
        idx = list(range(start, min(start + chunk, len(entries))))
        tasks.append((
            [entries[i] for i in idx], idx, config, base_seed,
            samples_per_image, mode,
        ))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for results in pool.map(_entry_task, tasks):
            yield from results


# ---------------------------------------------------------------------------
# Parameter-space sampling (for distribution audits)
# ---------------------------------------------------------------------------

def sample_parameter_draw(config: PipelineConfig, stream: RngStream,
                          mode: str = "train") -> dict:
    """One full parameter draw without touching any image.

    Mirrors the generation draw order exactly, so audited frequencies are
    the frequencies generation would produce.
    """
    from .ingest import sample_margin

    margin = sample_margin(stream.child("margin"), *config.margin_range,
                           mode=mode, inference_margin=config.inference_margin)
    draw = sample_augment_params(stream, config)
    rt = sample_resize_translate(stream, config)
    el_stream = stream.child("elastic_params")
    alpha = el_stream.uniform(*config.elastic_alpha_range)
    sigma = el_stream.uniform(*config.elastic_sigma_range)
    k_stream = stream.child("kernels")
    frac1 = k_stream.uniform(*config.kernel_frac_range)
    frac2 = k_stream.uniform(*config.kernel_frac_range)
    ratio = float(stream.child("ratio").choice(list(config.ratio_choices)))

    record = {
        "margin": margin,
        "source_is_augmented": draw.source_is_augmented,
        "applied": dict(draw.applied),
        "frequency_mode": draw.frequency.mode,
        "u_h": rt.u_h,
        "u_w": rt.u_w,
        "v_h": rt.v_h,
        "v_w": rt.v_w,
        "elastic_alpha": alpha,
        "elastic_sigma": sigma,
        "kernel_frac_1": frac1,
        "kernel_frac_2": frac2,
        "ratio": ratio,
    }
    color = draw.color
    record.update({
        "rgb_shift_r": color.rgb_shift[0],
        "rgb_shift_g": color.rgb_shift[1],
        "rgb_shift_b": color.rgb_shift[2],
        "hue_shift_deg": color.hue_shift_deg,
        "sat_scale": color.sat_scale,
        "val_scale": color.val_scale,
        "brightness_shift": color.brightness_shift,
        "contrast_scale": color.contrast_scale,
        "downscale_factor": draw.frequency.downscale_factor,
        "sharpen_alpha": draw.frequency.sharpen_alpha,
    })
    return record
