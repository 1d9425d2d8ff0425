"""Dataset ingestion and emission.

Manifests are JSON Lines, one face record per line:

    {"key": "...", "image": "relative/path.png", "bbox": [x0, y0, x1, y1],
     "landmarks": [[x, y], ...], "video_id": "...", "frame_index": 0}

"key", "video_id", and "frame_index" are optional; the key defaults to the
image filename stem and must be unique within a manifest. Paths resolve
relative to the manifest's directory.

Generated samples are written as lossless 8-bit PNGs (real, fake, mask)
plus a JSON recipe, and every emitted file is logged to an append-only
batch index: one tab-separated line of path, sha256, byte size.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .core import ImageTensor, ManifestError, ParameterError, RngStream
from .pipeline import SbiSample

MANIFEST_VERSION = 1
BATCH_INDEX_NAME = "batch_index.tsv"
RUN_RECORD_NAME = "run.json"


@dataclass(frozen=True)
class ManifestEntry:
    """One face: image path, face box, and precomputed landmarks."""

    image_path: str
    bbox: tuple[float, float, float, float]
    landmarks: tuple
    key: str
    video_id: str | None = None
    frame_index: int | None = None
    manifest_dir: Path = field(default=Path("."), compare=False)

    def resolved_path(self) -> Path:
        return (self.manifest_dir / self.image_path).resolve()

    def landmark_array(self) -> np.ndarray:
        return np.asarray(self.landmarks, dtype=np.float64)

    def to_record(self) -> dict:
        record = {
            "key": self.key,
            "image": self.image_path,
            "bbox": list(self.bbox),
            "landmarks": [list(p) for p in self.landmarks],
        }
        if self.video_id is not None:
            record["video_id"] = self.video_id
        if self.frame_index is not None:
            record["frame_index"] = self.frame_index
        return record


def _entry_from_record(record: dict, line_no: int, manifest_dir: Path,
                       expected_landmarks: int) -> ManifestEntry:
    def fail(msg: str):
        raise ManifestError(f"manifest line {line_no}: {msg}")

    if not isinstance(record, dict):
        fail("record must be a JSON object")
    allowed = {"key", "image", "bbox", "landmarks", "video_id", "frame_index"}
    unknown = sorted(set(record) - allowed)
    if unknown:
        fail(f"unknown fields: {', '.join(unknown)}")
    for req in ("image", "bbox", "landmarks"):
        if req not in record:
            fail(f"missing field {req!r}")

    bbox = record["bbox"]
    if len(bbox) != 4:
        fail(f"bbox must have 4 values, got {len(bbox)}")
    x0, y0, x1, y1 = (float(v) for v in bbox)
    if not (x0 < x1 and y0 < y1):
        fail(f"bbox inverted: [{x0}, {y0}, {x1}, {y1}]")

    landmarks = record["landmarks"]
    if len(landmarks) != expected_landmarks:
        fail(f"landmark count: expected {expected_landmarks}, got {len(landmarks)}")
    points = []
    for p in landmarks:
        if len(p) != 2 or not all(math.isfinite(float(v)) for v in p):
            fail(f"bad landmark {p!r}")
        points.append((float(p[0]), float(p[1])))

    key = record.get("key") or Path(record["image"]).stem
    frame_index = record.get("frame_index")
    if frame_index is not None:
        frame_index = int(frame_index)
    return ManifestEntry(
        image_path=record["image"],
        bbox=(x0, y0, x1, y1),
        landmarks=tuple(points),
        key=str(key),
        video_id=record.get("video_id"),
        frame_index=frame_index,
        manifest_dir=manifest_dir,
    )


def parse_manifest(path: str | Path, expected_landmarks: int = 81) -> list[ManifestEntry]:
    """Read and validate a JSON-Lines manifest, preserving file order."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc

    entries: list[ManifestEntry] = []
    seen: dict[str, int] = {}
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ManifestError(
                f"manifest line {line_no}: malformed JSON ({exc.msg})"
            ) from exc
        entry = _entry_from_record(record, line_no, path.parent,
                                   expected_landmarks)
        if entry.key in seen:
            raise ManifestError(
                f"manifest line {line_no}: duplicate key {entry.key!r} "
                f"(first used on line {seen[entry.key]}); add explicit keys"
            )
        seen[entry.key] = line_no
        entries.append(entry)
    return entries


def write_manifest(entries, path: str | Path) -> None:
    with open(path, "w") as fh:
        for entry in entries:
            fh.write(json.dumps(entry.to_record()) + "\n")


# ---------------------------------------------------------------------------
# Cropping
# ---------------------------------------------------------------------------

def sample_margin(
    stream: RngStream,
    lo: float = 0.04,
    hi: float = 0.20,
    mode: str = "train",
    inference_margin: float = 0.125,
) -> float:
    """Crop margin: uniform in [lo, hi] when training, fixed at inference."""
    if mode == "inference":
        return inference_margin
    if mode != "train":
        raise ParameterError(f"unknown mode {mode!r}")
    return stream.uniform(lo, hi)


def crop_face(
    img: ImageTensor,
    bbox,
    margin: float,
    margin_mode: str = "per_side",
) -> tuple[ImageTensor, tuple[int, int, int, int]]:
    """Crop the face box extended by a margin of its own size.

    "per_side" extends each side by margin * face-dimension; "total"
    splits that amount across the two sides. The extended box is rounded
    outward and clipped to the image, and the resolved integer box
    (x0, y0, x1, y1), exclusive on the upper edges, is returned so
    landmarks can be re-expressed in crop coordinates.
    """
    if margin < 0:
        raise ParameterError(f"margin must be >= 0, got {margin}")
    if margin_mode not in ("per_side", "total"):
        raise ParameterError(f"unknown margin_mode {margin_mode!r}")
    x0, y0, x1, y1 = (float(v) for v in bbox)
    if not (x0 < x1 and y0 < y1):
        raise ParameterError(f"bbox inverted: {bbox}")
    if x1 <= 0 or y1 <= 0 or x0 >= img.width or y0 >= img.height:
        raise ParameterError(f"bbox {bbox} lies fully outside the image")

    per_side = margin if margin_mode == "per_side" else margin / 2.0
    ex = per_side * (x1 - x0)
    ey = per_side * (y1 - y0)
    cx0 = max(0, math.floor(x0 - ex))
    cy0 = max(0, math.floor(y0 - ey))
    cx1 = min(img.width, math.ceil(x1 + ex))
    cy1 = min(img.height, math.ceil(y1 + ey))
    crop = ImageTensor(img.data[cy0:cy1, cx0:cx1])
    return crop, (cx0, cy0, cx1, cy1)


# ---------------------------------------------------------------------------
# Image and sample I/O
# ---------------------------------------------------------------------------

def load_image(path: str | Path) -> ImageTensor:
    with Image.open(path) as im:
        arr = np.asarray(im.convert("RGB"))
    return ImageTensor.from_uint8(arr)


def save_image_png(arr_uint8: np.ndarray, path: str | Path) -> None:
    if arr_uint8.ndim == 2:
        Image.fromarray(arr_uint8, mode="L").save(path, format="PNG")
    else:
        Image.fromarray(arr_uint8, mode="RGB").save(path, format="PNG")


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_sample(
    sample: SbiSample, out_dir: str | Path, entry_key: str, sample_index: int
) -> list[tuple[str, str, int]]:
    """Write real/fake/mask PNGs plus the recipe; return index rows.

    Each row is (relative path, sha256, byte size). The caller appends
    them to the batch index so a single writer owns that file.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"{entry_key}_{sample_index:04d}"

    artifacts = {
        f"{stem}_real.png": sample.real_image.to_uint8(),
        f"{stem}_fake.png": sample.fake_image.to_uint8(),
        f"{stem}_mask.png": np.clip(
            np.rint(sample.mask.data * 255.0), 0, 255
        ).astype(np.uint8),
    }
    rows = []
    for name, arr in artifacts.items():
        path = out_dir / name
        save_image_png(arr, path)
        rows.append((name, file_digest(path), path.stat().st_size))

    recipe_name = f"{stem}_recipe.json"
    recipe_path = out_dir / recipe_name
    recipe_path.write_text(sample.recipe.to_json() + "\n")
    rows.append((recipe_name, file_digest(recipe_path),
                 recipe_path.stat().st_size))
    return rows


def append_batch_index(out_dir: str | Path, rows) -> None:
    with open(Path(out_dir) / BATCH_INDEX_NAME, "a") as fh:
        for name, digest, size in rows:
            fh.write(f"{name}\t{digest}\t{size}\n")


def read_batch_index(out_dir: str | Path) -> list[tuple[str, str, int]]:
    index_path = Path(out_dir) / BATCH_INDEX_NAME
    try:
        lines = index_path.read_text().splitlines()
    except OSError as exc:
        raise ManifestError(f"cannot read batch index {index_path}: {exc}") from exc
    rows = []
    for line_no, line in enumerate(lines, start=1):
        parts = line.split("\t")
        if len(parts) != 3:
            raise ManifestError(f"batch index line {line_no}: malformed")
        rows.append((parts[0], parts[1], int(parts[2])))
    return rows
