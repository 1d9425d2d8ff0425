"""Procedural face-like test images with landmarks.

Produces deterministic, varied portrait rasters (elliptical head over a
textured background, with eyes/nose/mouth) plus 81 landmarks and a face
box, which is enough to exercise the whole generation pipeline, build
demo manifests of any size, and train the separability probe without any
external dataset.
"""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .core import ImageTensor, RngStream, mix64, quantize_unit
from .ingest import ManifestEntry, save_image_png, write_manifest

LANDMARK_COUNT = 81
_OUTLINE_POINTS = 60


def synth_stream(seed: int, index: int) -> RngStream:
    return RngStream(seed, mix64(index ^ 0x5F4E7A11))


def generate_face(
    stream: RngStream, height: int = 128, width: int = 128
) -> tuple[ImageTensor, np.ndarray, tuple[float, float, float, float]]:
    """One synthetic face: image, 81 landmarks, and the face bbox."""
    ys = np.arange(height, dtype=np.float64)[:, None]
    xs = np.arange(width, dtype=np.float64)[None, :]

    # background: two random colors mixed along a random direction, plus a
    # low-frequency sinusoidal texture so backgrounds are not flat
    c1 = stream.uniform_array(3, 0.1, 0.9)
    c2 = stream.uniform_array(3, 0.1, 0.9)
    angle = stream.uniform(0, 2 * math.pi)
    t = (xs * math.cos(angle) + ys * math.sin(angle))
    t = (t - t.min()) / max(t.max() - t.min(), 1e-9)
    wave = 0.04 * np.sin(xs * stream.uniform(0.05, 0.3)) \
        + 0.04 * np.sin(ys * stream.uniform(0.05, 0.3))
    img = c1[None, None, :] * (1 - t[..., None]) + c2[None, None, :] * t[..., None]
    img += wave[..., None]

    # head ellipse
    cx = width * stream.uniform(0.38, 0.62)
    cy = height * stream.uniform(0.38, 0.62)
    rx = width * stream.uniform(0.18, 0.30)
    ry = height * stream.uniform(0.24, 0.38)
    skin = np.array([
        stream.uniform(0.55, 0.95),
        stream.uniform(0.40, 0.75),
        stream.uniform(0.30, 0.65),
    ])
    ex = (xs - cx) / rx
    ey = (ys - cy) / ry
    head = ex * ex + ey * ey <= 1.0
    shade = 1.0 - 0.25 * np.clip(ey, -1, 1)
    face_color = skin[None, None, :] * shade[..., None]
    img = np.where(head[..., None], face_color, img)

    def put_ellipse(mx, my, mrx, mry, color):
        m = ((xs - mx) / mrx) ** 2 + ((ys - my) / mry) ** 2 <= 1.0
        return np.where(m[..., None], np.asarray(color)[None, None, :], img)

    eye_dx = rx * stream.uniform(0.30, 0.45)
    eye_y = cy - ry * stream.uniform(0.15, 0.30)
    eye_r = rx * stream.uniform(0.08, 0.14)
    eye_color = stream.uniform_array(3, 0.0, 0.25)
    img = put_ellipse(cx - eye_dx, eye_y, eye_r, eye_r * 0.6, eye_color)
    img = put_ellipse(cx + eye_dx, eye_y, eye_r, eye_r * 0.6, eye_color)

    nose_y = cy + ry * stream.uniform(0.0, 0.15)
    img = put_ellipse(cx, nose_y, rx * 0.07, ry * 0.12, skin * 0.8)

    mouth_y = cy + ry * stream.uniform(0.35, 0.55)
    mouth_rx = rx * stream.uniform(0.25, 0.40)
    mouth_color = np.array([stream.uniform(0.4, 0.8), 0.15, 0.2])
    img = put_ellipse(cx, mouth_y, mouth_rx, ry * 0.07, mouth_color)

    img = np.clip(img, 0.0, 1.0)

    # 60 outline points just inside the head ellipse, then eye, nose, and
    # mouth points to reach the 81-landmark convention
    angles = np.linspace(0, 2 * math.pi, _OUTLINE_POINTS, endpoint=False)
    outline = np.stack(
        [cx + 0.95 * rx * np.cos(angles), cy + 0.95 * ry * np.sin(angles)],
        axis=1,
    )
    features = [(cx - eye_dx, eye_y), (cx + eye_dx, eye_y), (cx, nose_y),
                (cx, mouth_y)]
    extras = []
    for fx, fy in features:
        extras.append((fx, fy))
        extras.append((fx - eye_r, fy))
        extras.append((fx + eye_r, fy))
        extras.append((fx, fy - eye_r * 0.5))
        extras.append((fx, fy + eye_r * 0.5))
    extras.append((cx, cy))
    landmarks = np.concatenate([outline, np.asarray(extras)], axis=0)
    assert landmarks.shape == (LANDMARK_COUNT, 2)

    bbox = (cx - rx, cy - ry, cx + rx, cy + ry)
    return ImageTensor(img), landmarks, bbox


def write_synthetic_dataset(
    out_dir: str | Path,
    count: int,
    seed: int = 7,
    height: int = 128,
    width: int = 128,
    share_image: bool = False,
) -> Path:
    """Write face PNGs plus a manifest; returns the manifest path.

    With share_image, every entry points at the same raster (useful for
    very large timing manifests where per-entry pixel variety is moot).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    shared_name = None
    for i in range(count):
        stream = synth_stream(seed, 0 if share_image else i)
        img, landmarks, bbox = generate_face(stream, height, width)
        if share_image and shared_name is not None:
            name = shared_name
        else:
            name = f"face_{i:06d}.png" if not share_image else "face_shared.png"
            save_image_png(quantize_unit(img.data), out_dir / name)
            shared_name = name
        entries.append(ManifestEntry(
            image_path=name,
            bbox=bbox,
            landmarks=tuple(map(tuple, landmarks.tolist())),
            key=f"face_{i:06d}",
            video_id=f"vid_{i // 8:05d}",
            frame_index=i % 8,
            manifest_dir=out_dir,
        ))
    manifest_path = out_dir / "manifest.jsonl"
    write_manifest(entries, manifest_path)
    return manifest_path
