"""Video-level score aggregation and rank-based AUC.

Aggregation follows the frame-sampling inference strategy: within a frame
the highest per-face fakeness confidence wins, frame scores are averaged
over frames where at least one face was detected, and a video with no
detected face in any frame scores exactly 0.5.
"""
from __future__ import annotations

import json
from collections import defaultdict
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import MetricError, ParameterError


def aggregate_video_score(frames: Sequence[Sequence[float]]) -> float:
    """Collapse per-face confidences to a single video confidence.

    frames holds one list of per-face confidences per sampled frame; an
    empty list means no face was detected in that frame. Faceless frames
    are excluded from the mean; if every frame is faceless (or there are
    no frames), the result is exactly 0.5.
    """
    frame_scores = []
    for faces in frames:
        for c in faces:
            if not 0.0 <= c <= 1.0:
                raise ParameterError(f"confidence {c} outside [0, 1]")
        if len(faces) > 0:
            frame_scores.append(max(faces))
    if not frame_scores:
        return 0.5
    return float(np.mean(frame_scores))


def compute_auc(labels: Sequence[int], scores: Sequence[float]) -> float:
    """Area under the ROC curve by tied ranks; ties contribute 1/2.

    Equivalent to the probability that a random positive outranks a random
    negative. Requires at least one positive and one negative label.
    """
    labels = np.asarray(labels)
    scores = np.asarray(scores, dtype=np.float64)
    if labels.shape != scores.shape or labels.ndim != 1:
        raise ParameterError("labels and scores must be equal-length 1-D")
    if not np.isin(labels, (0, 1)).all():
        raise ParameterError("labels must be binary 0/1")
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise MetricError(
            f"AUC undefined: need both classes, got {n_pos} positive and "
            f"{n_neg} negative"
        )

    order = np.argsort(scores, kind="mergesort")
    sorted_scores = scores[order]
    ranks = np.empty(scores.size, dtype=np.float64)
    i = 0
    while i < scores.size:
        j = i
        while j + 1 < scores.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0  # mean of 1-based ranks
        i = j + 1

    pos_rank_sum = ranks[labels == 1].sum()
    return float((pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


# ---------------------------------------------------------------------------
# Per-face score files (one JSON record per line)
# ---------------------------------------------------------------------------

def read_face_scores(path: str | Path) -> dict[str, dict[int, list[float]]]:
    """{"video_id": ..., "frame_index": ..., "confidence": ...} per line."""
    videos: dict[str, dict[int, list[float]]] = defaultdict(lambda: defaultdict(list))
    lines = Path(path).read_text().splitlines()
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            video = str(record["video_id"])
            frame = int(record["frame_index"])
            confidence = float(record["confidence"])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ParameterError(f"score file line {line_no}: {exc}") from exc
        if not 0.0 <= confidence <= 1.0:
            raise ParameterError(
                f"score file line {line_no}: confidence {confidence} outside [0, 1]"
            )
        videos[video][frame].append(confidence)
    return videos


def score_videos(videos: dict[str, dict[int, list[float]]]) -> dict[str, float]:
    """Aggregate per-face records into one confidence per video."""
    return {
        video: aggregate_video_score([faces for _, faces in sorted(frames.items())])
        for video, frames in videos.items()
    }
