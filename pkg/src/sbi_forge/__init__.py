"""Deterministic self-blended-image (SBI) training data engine."""

__version__ = "0.1.0"

from .core import (
    BlendMask,
    ImageTensor,
    Landmarks,
    RngStream,
    SbiForgeError,
    blend,
    draw_choice,
    draw_uniform,
    stream_for_sample,
)
from .pipeline import (
    PipelineConfig,
    RecipeRecord,
    SbiSample,
    generate_batch,
    generate_sbi,
    replay,
)
from .scoring import aggregate_video_score, compute_auc

__all__ = [
    "BlendMask",
    "ImageTensor",
    "Landmarks",
    "PipelineConfig",
    "RecipeRecord",
    "RngStream",
    "SbiForgeError",
    "SbiSample",
    "aggregate_video_score",
    "blend",
    "compute_auc",
    "draw_choice",
    "draw_uniform",
    "generate_batch",
    "generate_sbi",
    "replay",
    "stream_for_sample",
]
