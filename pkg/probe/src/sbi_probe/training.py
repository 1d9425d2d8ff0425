"""Separability probe: paired data assembly, BCE training, and evaluation.

Batches hold real images and their SBIs in equal numbers, every pair
derives from one base image, and any photometric augmentation is applied
identically to a real image and its SBI. Splits are by base image (and by
video when the manifest provides one) so no base image leaks across the
train/validation boundary.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np
import torch
from torch import nn

from sbi_forge.core import ImageTensor, RngStream, fnv1a64, mix64
from sbi_forge.pipeline import SampleResult, SbiSample
from sbi_forge.raster import bilinear_resize
from sbi_forge.scoring import compute_auc
from sbi_forge.stg import ColorParams, color_transform

from .model import ProbeNet

IMG_SIZE = 64
MIN_IMAGES = 200


@dataclass(frozen=True)
class ProbePair:
    """One base image's (real, fake) pair plus its leakage group."""

    real: ImageTensor
    fake: ImageTensor
    group: str


@dataclass
class TrainedProbe:
    """Classifier wrapper with a probability-in-[0,1] contract."""

    model: ProbeNet
    input_size: int = IMG_SIZE
    history: dict = field(default_factory=dict)

    @torch.no_grad()
    def predict_proba(self, images) -> np.ndarray:
        self.model.eval()
        batch = torch.from_numpy(_to_batch(images, self.input_size))
        return torch.sigmoid(self.model(batch)).numpy()


def _to_batch(images, size: int) -> np.ndarray:
    arrays = []
    for img in images:
        data = img.data if isinstance(img, ImageTensor) else np.asarray(img)
        if data.shape[:2] != (size, size):
            data = bilinear_resize(data, size, size)
        arrays.append(np.transpose(data, (2, 0, 1)))
    return np.stack(arrays).astype(np.float32)


def as_pairs(samples) -> list[ProbePair]:
    """Normalize engine output into pairs keyed for leak-free splitting."""
    pairs = []
    for item in samples:
        if isinstance(item, ProbePair):
            pairs.append(item)
            continue
        if isinstance(item, SampleResult):
            if not item.ok:
                continue
            sample = item.sample
            group = _group_of(sample, fallback=item.key)
        elif isinstance(item, SbiSample):
            sample = item
            group = _group_of(sample, fallback=str(id(item)))
        else:
            raise TypeError(f"cannot use {type(item).__name__} as a probe sample")
        pairs.append(ProbePair(sample.real_image, sample.fake_image, group))
    return pairs


def _group_of(sample: SbiSample, fallback: str) -> str:
    return sample.recipe.manifest_key or fallback


def split_by_group(samples, val_fraction: float = 0.2,
                   seed: int = 0) -> tuple[list[ProbePair], list[ProbePair]]:
    """Deterministic split with whole groups on one side only."""
    if not 0.0 < val_fraction < 1.0:
        raise ValueError(f"val_fraction must be in (0, 1), got {val_fraction}")
    pairs = as_pairs(samples)
    groups = sorted({p.group for p in pairs})
    stream = RngStream(seed, fnv1a64("probe_split"))
    order = np.argsort(stream.uniform_array(len(groups)))
    n_val = max(1, int(round(len(groups) * val_fraction)))
    val_groups = {groups[i] for i in order[:n_val]}
    train = [p for p in pairs if p.group not in val_groups]
    val = [p for p in pairs if p.group in val_groups]
    return train, val


# ---------------------------------------------------------------------------
# paired augmentation
# ---------------------------------------------------------------------------

def _sample_pair_augment(stream: RngStream) -> ColorParams:
    rgb = (0.0, 0.0, 0.0)
    if stream.uniform() < 0.5:
        lim = 12.0 / 255.0
        rgb = tuple(stream.uniform(-lim, lim) for _ in range(3))
    brightness, contrast = 0.0, 1.0
    if stream.uniform() < 0.5:
        brightness = stream.uniform(-0.08, 0.08)
        contrast = stream.uniform(0.9, 1.1)
    return ColorParams(rgb_shift=rgb, brightness_shift=brightness,
                       contrast_scale=contrast)


def augment_pair(pair: ProbePair, stream: RngStream) -> tuple[ImageTensor, ImageTensor]:
    """One parameter draw, applied to both members of the pair."""
    params = _sample_pair_augment(stream)
    return color_transform(pair.real, params), color_transform(pair.fake, params)


# ---------------------------------------------------------------------------
# training
# ---------------------------------------------------------------------------

def train_probe(
    samples,
    epochs: int = 10,
    model_size: str = "small",
    val_samples=None,
    batch_size: int = 16,
    lr: float = 1e-3,
    seed: int = 0,
    augment: bool = True,
    selection: str = "best_auc",  # or "latest_of_top5"
    input_size: int = IMG_SIZE,
) -> TrainedProbe:
    """Fit the probe on (real, SBI) pairs with binary cross-entropy.

    Each optimizer batch holds batch_size pairs, i.e. an exactly balanced
    2*batch_size images. With a validation set, the returned weights are
    the best-AUC epoch by default, or the latest epoch among the top five
    AUCs with selection="latest_of_top5".
    """
    pairs = as_pairs(samples)
    if 2 * len(pairs) < MIN_IMAGES:
        raise ValueError(
            f"need at least {MIN_IMAGES} balanced images "
            f"({MIN_IMAGES // 2} pairs), got {len(pairs)} pairs"
        )
    if epochs < 1:
        raise ValueError(f"epochs must be >= 1, got {epochs}")
    if selection not in ("best_auc", "latest_of_top5"):
        raise ValueError(f"unknown selection rule {selection!r}")
    val_pairs = as_pairs(val_samples) if val_samples is not None else None

    torch.manual_seed(seed)
    model = ProbeNet(model_size)
    if model.parameter_count() > 1_000_000:
        raise ValueError("probe exceeds the one-million parameter budget")
    optimizer = torch.optim.Adam(model.parameters(), lr=lr, weight_decay=1e-5)
    scheduler = torch.optim.lr_scheduler.CosineAnnealingLR(optimizer, T_max=epochs)
    criterion = nn.BCEWithLogitsLoss()

    history: dict = {"epoch_loss": [], "val_auc": [], "batch_losses_first_epoch": []}
    checkpoints: list[tuple[float, int, dict]] = []

    for epoch in range(epochs):
        model.train()
        order_stream = RngStream(seed, mix64(0xE90C ^ epoch))
        order = np.argsort(order_stream.uniform_array(len(pairs)))
        losses = []
        for start in range(0, len(order), batch_size):
            idx = order[start:start + batch_size]
            reals, fakes = [], []
            for j in idx:
                pair = pairs[j]
                if augment:
                    aug_stream = RngStream(
                        seed, mix64((epoch << 32) | int(j))
                    ).child("pair_augment")
                    real, fake = augment_pair(pair, aug_stream)
                else:
                    real, fake = pair.real, pair.fake
                reals.append(real)
                fakes.append(fake)
            batch = torch.from_numpy(_to_batch(reals + fakes, input_size))
            labels = torch.cat([
                torch.zeros(len(reals)), torch.ones(len(fakes))
            ])
            optimizer.zero_grad()
            loss = criterion(model(batch), labels)
            loss.backward()
            optimizer.step()
            losses.append(loss.item())
            if epoch == 0:
                history["batch_losses_first_epoch"].append(loss.item())
        history["epoch_loss"].append(float(np.mean(losses)))
        scheduler.step()

        if val_pairs is not None:
            auc = _pairs_auc(model, val_pairs, input_size)
            history["val_auc"].append(auc)
            checkpoints.append((auc, epoch,
                                copy.deepcopy(model.state_dict())))

    if checkpoints:
        if selection == "best_auc":
            best = max(checkpoints, key=lambda c: (c[0], c[1]))
        else:
            top5 = sorted(checkpoints, key=lambda c: c[0], reverse=True)[:5]
            best = max(top5, key=lambda c: c[1])
        model.load_state_dict(best[2])
        history["selected_epoch"] = best[1]

    model.eval()
    return TrainedProbe(model=model, input_size=input_size, history=history)


@torch.no_grad()
def _pairs_auc(model: ProbeNet, pairs: list[ProbePair], input_size: int) -> float:
    model.eval()
    images = [p.real for p in pairs] + [p.fake for p in pairs]
    labels = [0] * len(pairs) + [1] * len(pairs)
    scores = []
    for start in range(0, len(images), 64):
        batch = torch.from_numpy(_to_batch(images[start:start + 64], input_size))
        scores.extend(torch.sigmoid(model(batch)).numpy().tolist())
    model.train()
    return compute_auc(labels, scores)


def eval_probe(probe: TrainedProbe, samples) -> float:
    """Held-out AUC of P(fake); real images score label 0, SBIs label 1."""
    pairs = as_pairs(samples)
    if not pairs:
        raise ValueError("held-out set is empty")
    images = [p.real for p in pairs] + [p.fake for p in pairs]
    labels = [0] * len(pairs) + [1] * len(pairs)
    scores = probe.predict_proba(images)
    return compute_auc(labels, scores)


# ---------------------------------------------------------------------------
# loss helpers (kept separate so tests can check them analytically)
# ---------------------------------------------------------------------------

def bce_loss(probs, labels) -> float:
    """Mean binary cross-entropy of probabilities against binary labels."""
    p = np.asarray(probs, dtype=np.float64)
    t = np.asarray(labels, dtype=np.float64)
    return float(-np.mean(t * np.log(p) + (1 - t) * np.log(1 - p)))


def bce_logit_gradient(logits, labels) -> np.ndarray:
    """d(mean BCE)/d(logit) = (sigmoid(z) - t) / N."""
    z = np.asarray(logits, dtype=np.float64)
    t = np.asarray(labels, dtype=np.float64)
    return (1.0 / (1.0 + np.exp(-z)) - t) / z.size
