from __future__ import annotations

import json

import numpy as np
import pytest

from helpers import face_fixture
from sbi_forge.core import ImageTensor, ManifestError, ParameterError, RngStream
from sbi_forge.ingest import (
    crop_face,
    file_digest,
    load_image,
    parse_manifest,
    read_batch_index,
    append_batch_index,
    sample_margin,
    save_image_png,
    write_manifest,
    write_sample,
)
from sbi_forge.pipeline import PipelineConfig, generate_sbi
from sbi_forge.core import stream_for_sample


def _manifest_line(key="a", image="img.png", bbox=(1, 2, 11, 12), n=81):
    return json.dumps({
        "key": key,
        "image": image,
        "bbox": list(bbox),
        "landmarks": [[float(i % 10), float(i // 10)] for i in range(n)],
    })


# ---------------------------------------------------------------------------
# manifest
# ---------------------------------------------------------------------------

def test_parse_three_lines_in_order(tmp_path):
    path = tmp_path / "m.jsonl"
    path.write_text("\n".join(
        _manifest_line(key=k) for k in ("one", "two", "three")
    ) + "\n")
    entries = parse_manifest(path)
    assert [e.key for e in entries] == ["one", "two", "three"]


def test_wrong_landmark_count_names_expected_and_actual(tmp_path):
    path = tmp_path / "m.jsonl"
    path.write_text(_manifest_line(n=80) + "\n")
    with pytest.raises(ManifestError, match="expected 81, got 80"):
        parse_manifest(path)


def test_malformed_line_reports_line_number(tmp_path):
    path = tmp_path / "m.jsonl"
    path.write_text(_manifest_line() + "\n{not json\n")
    with pytest.raises(ManifestError, match="line 2"):
        parse_manifest(path)


def test_inverted_bbox_rejected(tmp_path):
    path = tmp_path / "m.jsonl"
    path.write_text(_manifest_line(bbox=(10, 2, 5, 12)) + "\n")
    with pytest.raises(ManifestError, match="bbox inverted"):
        parse_manifest(path)


def test_duplicate_keys_rejected(tmp_path):
    path = tmp_path / "m.jsonl"
    path.write_text(_manifest_line(key="dup") + "\n" + _manifest_line(key="dup") + "\n")
    with pytest.raises(ManifestError, match="duplicate key"):
        parse_manifest(path)


def test_unknown_fields_rejected(tmp_path):
    record = json.loads(_manifest_line())
    record["surprise"] = 1
    path = tmp_path / "m.jsonl"
    path.write_text(json.dumps(record) + "\n")
    with pytest.raises(ManifestError, match="surprise"):
        parse_manifest(path)


def test_manifest_round_trip(tmp_path):
    path = tmp_path / "m.jsonl"
    path.write_text("\n".join(
        _manifest_line(key=k) for k in ("one", "two")
    ) + "\n")
    entries = parse_manifest(path)
    out = tmp_path / "copy.jsonl"
    write_manifest(entries, out)
    again = parse_manifest(out)
    assert [e.to_record() for e in again] == [e.to_record() for e in entries]


def test_key_defaults_to_image_stem(tmp_path):
    record = json.loads(_manifest_line())
    del record["key"]
    record["image"] = "frames/clip_0042.png"
    path = tmp_path / "m.jsonl"
    path.write_text(json.dumps(record) + "\n")
    assert parse_manifest(path)[0].key == "clip_0042"


# ---------------------------------------------------------------------------
# crop_face
# ---------------------------------------------------------------------------

def _gradient_image(h=100, w=100):
    ys, xs = np.indices((h, w))
    base = (ys * w + xs) / (h * w)
    return ImageTensor(np.stack([base] * 3, axis=-1))


def test_zero_margin_is_exact_bbox():
    img = _gradient_image()
    crop, box = crop_face(img, (10, 10, 20, 20), 0.0)
    assert box == (10, 10, 20, 20)
    assert np.array_equal(crop.data, img.data[10:20, 10:20])


def test_margin_rounds_outward():
    img = _gradient_image()
    crop, box = crop_face(img, (10, 10, 20, 20), 0.125)
    assert box == (8, 8, 22, 22)  # [8.75, 21.25] rounded outward
    assert crop.data.shape == (14, 14, 3)


def test_total_mode_halves_the_extension():
    img = _gradient_image()
    _, box = crop_face(img, (10, 10, 20, 20), 0.25, margin_mode="total")
    assert box == (8, 8, 22, 22)


def test_margin_clips_at_border():
    img = _gradient_image()
    crop, box = crop_face(img, (0, 0, 10, 10), 0.2)
    assert box == (0, 0, 12, 12)
    assert crop.data.shape == (12, 12, 3)


def test_bbox_fully_outside_rejected():
    img = _gradient_image()
    with pytest.raises(ParameterError, match="outside"):
        crop_face(img, (200, 200, 220, 220), 0.1)


def test_landmarks_remain_on_same_pixels():
    img, lms, bbox = face_fixture(0)
    crop, box = crop_face(img, bbox, 0.1)
    shifted = lms.shifted(-box[0], -box[1])
    for (x, y), (sx, sy) in zip(lms.points[:5], shifted.points[:5]):
        xi, yi = int(round(x)), int(round(y))
        if 0 <= yi - box[1] < crop.height and 0 <= xi - box[0] < crop.width:
            assert np.array_equal(
                crop.data[int(round(sy)), int(round(sx))], img.data[yi, xi]
            )


# ---------------------------------------------------------------------------
# margin sampling
# ---------------------------------------------------------------------------

def test_inference_margin_is_constant():
    for i in range(5):
        assert sample_margin(RngStream(1, i), mode="inference") == 0.125


def test_training_margins_in_range():
    draws = [sample_margin(RngStream(2, i)) for i in range(10_000)]
    assert min(draws) >= 0.04 and max(draws) <= 0.20


def test_training_margin_mean():
    draws = [sample_margin(RngStream(3, i)) for i in range(100_000)]
    assert abs(np.mean(draws) - 0.12) < 0.005


# ---------------------------------------------------------------------------
# sample emission
# ---------------------------------------------------------------------------

def test_write_sample_round_trip_and_index(tmp_path):
    img, lms, _ = face_fixture(1)
    sample = generate_sbi(img, lms, PipelineConfig(),
                          stream_for_sample(42, 0, 0))
    rows = write_sample(sample, tmp_path, "face", 0)
    append_batch_index(tmp_path, rows)

    assert len(rows) == 4
    fake = load_image(tmp_path / "face_0000_fake.png")
    assert np.array_equal(fake.to_uint8(), sample.fake_image.to_uint8())

    from PIL import Image

    mask = np.asarray(Image.open(tmp_path / "face_0000_mask.png"))
    assert int(mask.max()) == round(255 * sample.mask.ratio) or \
        sample.mask.data.max() < sample.mask.ratio

    index = read_batch_index(tmp_path)
    assert len(index) == 4
    for name, digest, size in index:
        assert file_digest(tmp_path / name) == digest
        assert (tmp_path / name).stat().st_size == size


def test_png_write_read_lossless(tmp_path, np_rng):
    arr = (np_rng.uniform(0, 1, (16, 16, 3)) * 255).astype(np.uint8)
    save_image_png(arr, tmp_path / "x.png")
    assert np.array_equal(load_image(tmp_path / "x.png").to_uint8(), arr)
