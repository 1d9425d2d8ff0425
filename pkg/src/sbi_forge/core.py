"""Core domain types, deterministic sampling, and the blending primitive.

Everything downstream (transforms, mask generation, the batch pipeline)
builds on the value types and the counter-based random stream defined here.
All types are immutable once constructed; operations are pure given a
stream value, so they are safe under arbitrary parallelism as long as each
worker owns its streams.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class SbiForgeError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(SbiForgeError, ValueError):
    """Raster dimensions of two paired inputs disagree."""


class ParameterError(SbiForgeError, ValueError):
    """A parameter is outside its documented domain."""


class DegenerateHullError(SbiForgeError, ValueError):
    """Landmarks are too few or collinear to span a 2-D convex hull."""


class ManifestError(SbiForgeError, ValueError):
    """A manifest file or entry failed validation."""


class ConfigError(SbiForgeError, ValueError):
    """A config document failed schema validation."""


class RecipeError(SbiForgeError, ValueError):
    """A recipe record is unreadable, incompatible, or corrupted."""


class MetricError(SbiForgeError, ValueError):
    """A metric is undefined for the given inputs."""


# ---------------------------------------------------------------------------
# Deterministic random streams
# ---------------------------------------------------------------------------
#
# The generator is counter-based splitmix64: draw number i of a stream is
#
#     raw(i)  = mix(base + (i + 1) * GOLDEN)   mod 2^64
#     u(i)    = (raw(i) >> 11) * 2^-53         in [0, 1)
#     base    = mix(mix(seed + GOLDEN) ^ stream_id)
#
# where mix() is the splitmix64 finalizer (Steele et al., "Fast splittable
# pseudorandom number generators"). Because draw i is a pure function of
# (seed, stream_id, i), sequences are identical on every platform and for
# any worker count, and bulk draws can be produced vectorized with the
# exact same values as repeated scalar draws.

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB

# (entry, sample) -> stream id packs the sample index into the low bits so
# distinct pairs can never collide (mix64 is a bijection on 64-bit words).
_SAMPLE_BITS = 20
MAX_SAMPLES_PER_IMAGE = 1 << _SAMPLE_BITS
MAX_ENTRIES = 1 << (64 - _SAMPLE_BITS)


def mix64(z: int) -> int:
    """splitmix64 finalizer; a bijection on 64-bit unsigned integers."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX_A) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX_B) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def fnv1a64(text: str) -> int:
    """FNV-1a hash of a tag string, used to derive child stream ids."""
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * 0x100000001B3) & _MASK64
    return h


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64, copy=True)
    z ^= z >> np.uint64(30)
    z *= np.uint64(_MIX_A)
    z ^= z >> np.uint64(27)
    z *= np.uint64(_MIX_B)
    z ^= z >> np.uint64(31)
    return z


class RngStream:
    """Deterministic draw stream identified by (seed, stream_id).

    The draw counter advances with every value produced; re-creating the
    stream with the same identity replays the exact sequence. Child streams
    for sub-steps derive by fixed tags and never collide with each other or
    with per-sample streams.
    """

    __slots__ = ("seed", "stream_id", "counter", "_base")

    def __init__(self, seed: int, stream_id: int = 0, counter: int = 0):
        self.seed = seed & _MASK64
        self.stream_id = stream_id & _MASK64
        self.counter = counter
        self._base = mix64(mix64(self.seed + _GOLDEN) ^ self.stream_id)

    def _raw(self, index: int) -> int:
        return mix64(self._base + (index + 1) * _GOLDEN)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        """One draw from the continuous uniform distribution on [lo, hi)."""
        if lo > hi:
            raise ParameterError(f"uniform bounds inverted: lo={lo} > hi={hi}")
        u = (self._raw(self.counter) >> 11) * 2.0**-53
        self.counter += 1
        return lo + u * (hi - lo)

    def uniform_array(self, n: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
        """n draws on [lo, hi), identical to n successive uniform() calls."""
        if lo > hi:
            raise ParameterError(f"uniform bounds inverted: lo={lo} > hi={hi}")
        idx = np.arange(self.counter + 1, self.counter + n + 1, dtype=np.uint64)
        raw = _mix64_array(np.uint64(self._base) + idx * np.uint64(_GOLDEN))
        self.counter += n
        u = (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53
        return lo + u * (hi - lo)

    def choice(self, items: Sequence):
        """Pick one list position uniformly; repeated values weight outcomes."""
        if len(items) == 0:
            raise ParameterError("choice requires a non-empty list")
        u = self.uniform()
        return items[min(int(u * len(items)), len(items) - 1)]

    def child(self, tag: str) -> "RngStream":
        """Independent sub-stream for a named sub-step, counter reset to 0."""
        return RngStream(self.seed, mix64(self.stream_id ^ fnv1a64(tag)))

    def __repr__(self) -> str:
        return (
            f"RngStream(seed={self.seed}, stream_id={self.stream_id}, "
            f"counter={self.counter})"
        )


def stream_for_sample(seed: int, entry_index: int, sample_index: int) -> RngStream:
    """Root stream of one (manifest entry, sample) pair.

    stream_id = mix64(entry_index * 2^20 + sample_index); injective for
    entry_index < 2^44 and sample_index < 2^20, so streams of distinct
    pairs never collide.
    """
    if not 0 <= entry_index < MAX_ENTRIES:
        raise ParameterError(f"entry index {entry_index} out of range")
    if not 0 <= sample_index < MAX_SAMPLES_PER_IMAGE:
        raise ParameterError(f"sample index {sample_index} out of range")
    return RngStream(seed, mix64((entry_index << _SAMPLE_BITS) | sample_index))


def draw_uniform(stream: RngStream, lo: float, hi: float) -> float:
    return stream.uniform(lo, hi)


def draw_choice(stream: RngStream, items: Sequence):
    return stream.choice(items)


# ---------------------------------------------------------------------------
# Raster value types
# ---------------------------------------------------------------------------

def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class ImageTensor:
    """H x W x 3 raster of unit-interval intensities.

    Pixel values are real-valued in [0, 1]; 8-bit material converts via
    v / 255 on the way in and round(v * 255) clamped on the way out, so
    quantization happens exactly once per pipeline boundary.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ShapeError(f"image must be HxWx3, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ShapeError(f"image dimensions must be >= 1, got {arr.shape[:2]}")
        if not np.isfinite(arr).all():
            raise ParameterError("image contains non-finite intensities")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ParameterError(
                f"intensities outside [0, 1]: min={arr.min()}, max={arr.max()}"
            )
        object.__setattr__(self, "data", _freeze(arr))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @classmethod
    def from_uint8(cls, arr: np.ndarray) -> "ImageTensor":
        arr = np.asarray(arr)
        if arr.dtype != np.uint8:
            raise ParameterError(f"expected uint8 input, got {arr.dtype}")
        return cls(arr.astype(np.float64) / 255.0)

    def to_uint8(self) -> np.ndarray:
        return quantize_unit(self.data)


def quantize_unit(arr: np.ndarray) -> np.ndarray:
    """Unit-interval reals to 8-bit, round to nearest, clamped."""
    return np.clip(np.rint(np.asarray(arr) * 255.0), 0, 255).astype(np.uint8)


@dataclass(frozen=True)
class Landmarks:
    """Ordered 2-D points (x, y) in the pixel frame of the paired image."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ShapeError(f"landmarks must be Nx2, got shape {pts.shape}")
        if pts.shape[0] < 3:
            raise ParameterError(f"need >= 3 landmarks, got {pts.shape[0]}")
        if not np.isfinite(pts).all():
            raise ParameterError("landmark coordinates must be finite")
        object.__setattr__(self, "points", _freeze(pts))

    @property
    def count(self) -> int:
        return self.points.shape[0]

    def shifted(self, dx: float, dy: float) -> "Landmarks":
        return Landmarks(self.points + np.array([dx, dy]))


@dataclass(frozen=True)
class BlendMask:
    """H x W blending weights in [0, 1] with the last applied ratio."""

    data: np.ndarray
    ratio: float = 1.0

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 2:
            raise ShapeError(f"mask must be HxW, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ShapeError(f"mask dimensions must be >= 1, got {arr.shape}")
        if not np.isfinite(arr).all():
            raise ParameterError("mask contains non-finite values")
        if not 0.0 < self.ratio <= 1.0:
            raise ParameterError(f"ratio must be in (0, 1], got {self.ratio}")
        if arr.min() < 0.0 or arr.max() > self.ratio:
            raise ParameterError(
                f"mask values must lie in [0, ratio={self.ratio}]: "
                f"min={arr.min()}, max={arr.max()}"
            )
        object.__setattr__(self, "data", _freeze(arr))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def is_binary(self) -> bool:
        return bool(np.all((self.data == 0.0) | (self.data == 1.0)))


# ---------------------------------------------------------------------------
# Blending primitive
# ---------------------------------------------------------------------------

def blend(source: ImageTensor, target: ImageTensor, mask: BlendMask) -> ImageTensor:
    """Pixelwise convex combination: source * m + target * (1 - m).

    Where the mask is exactly 0 the output is bit-identical to the target;
    where it is exactly 1, to the source.
    """
    if (source.height, source.width) != (target.height, target.width):
        raise ShapeError(
            f"source {source.data.shape[:2]} and target "
            f"{target.data.shape[:2]} dimensions differ"
        )
    if (mask.height, mask.width) != (source.height, source.width):
        raise ShapeError(
            f"mask {mask.data.shape} and image {source.data.shape[:2]} "
            "dimensions differ"
        )
    m = mask.data[:, :, None]
    return ImageTensor(source.data * m + target.data * (1.0 - m))


def round_half_away(x: float) -> int:
    """Round to nearest integer, halves away from zero."""
    return int(math.floor(x + 0.5)) if x >= 0 else int(math.ceil(x - 0.5))
