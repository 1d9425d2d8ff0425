"""Training-loop bindings over the sbi-forge engine plus a small
real-vs-SBI separability probe."""

__version__ = "0.1.0"

from .bindings import generate, load_config, sample_pixel_digest
from .model import ProbeNet
from .training import (
    ProbePair,
    TrainedProbe,
    as_pairs,
    augment_pair,
    bce_logit_gradient,
    bce_loss,
    eval_probe,
    split_by_group,
    train_probe,
)

__all__ = [
    "ProbeNet",
    "ProbePair",
    "TrainedProbe",
    "as_pairs",
    "augment_pair",
    "bce_logit_gradient",
    "bce_loss",
    "eval_probe",
    "generate",
    "load_config",
    "sample_pixel_digest",
    "split_by_group",
    "train_probe",
]
