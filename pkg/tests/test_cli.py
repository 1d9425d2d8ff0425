from __future__ import annotations

import json

import numpy as np
import pytest
from PIL import Image

from sbi_forge.cli import main, run_audit_draws
from sbi_forge.ingest import BATCH_INDEX_NAME, file_digest, parse_manifest
from sbi_forge.pipeline import PipelineConfig
from sbi_forge.synth import write_synthetic_dataset


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli_ds")
    manifest = write_synthetic_dataset(root, 10, seed=3, height=72, width=72)
    return manifest


def _index_digest(out_dir) -> str:
    return file_digest(out_dir / BATCH_INDEX_NAME)


def test_generate_writes_quadruplets_and_summary(dataset, tmp_path):
    out = tmp_path / "out"
    summary_path = tmp_path / "summary.json"
    code = main([
        "generate", "--manifest", str(dataset), "--out", str(out),
        "--seed", "42", "--workers", "1", "--summary", str(summary_path),
    ])
    assert code == 0
    summary = json.loads(summary_path.read_text())
    assert summary["ok"] == 10 and summary["skipped"] == 0
    files = sorted(p.name for p in out.iterdir())
    assert sum(n.endswith("_fake.png") for n in files) == 10
    assert sum(n.endswith("_real.png") for n in files) == 10
    assert sum(n.endswith("_mask.png") for n in files) == 10
    assert sum(n.endswith("_recipe.json") for n in files) == 10
    index_lines = (out / BATCH_INDEX_NAME).read_text().splitlines()
    assert len(index_lines) == 40  # 4 artifacts per sample


def test_generate_twice_identical_batch_index(dataset, tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    for out in (out1, out2):
        assert main([
            "generate", "--manifest", str(dataset), "--out", str(out),
            "--seed", "7", "--workers", "2",
        ]) == 0
    assert _index_digest(out1) == _index_digest(out2)


def test_generate_skips_degenerate_entry(dataset, tmp_path):
    entries = parse_manifest(dataset)
    import dataclasses

    bad_record = dataclasses.replace(
        entries[0], key="bad",
        landmarks=tuple((10.0, 10.0) for _ in range(81)),
    ).to_record()
    manifest2 = tmp_path / "with_bad.jsonl"
    lines = [json.dumps(bad_record)] + [json.dumps(e.to_record())
                                        for e in entries]
    manifest2.write_text("\n".join(lines) + "\n")
    # images resolve relative to the manifest's own directory
    import shutil

    for png in dataset.parent.glob("*.png"):
        shutil.copy(png, manifest2.parent / png.name)

    out = tmp_path / "out"
    summary_path = tmp_path / "s.json"
    code = main([
        "generate", "--manifest", str(manifest2), "--out", str(out),
        "--summary", str(summary_path), "--workers", "1",
    ])
    assert code == 0
    summary = json.loads(summary_path.read_text())
    assert summary["ok"] == 10 and summary["skipped"] == 1
    assert "DegenerateHull" in summary["skips"][0]["reason"]

    strict_code = main([
        "generate", "--manifest", str(manifest2), "--out", str(tmp_path / "o2"),
        "--strict", "--workers", "1",
    ])
    assert strict_code == 1


def test_generate_unreadable_manifest_is_fatal(tmp_path):
    code = main([
        "generate", "--manifest", str(tmp_path / "missing.jsonl"),
        "--out", str(tmp_path / "out"),
    ])
    assert code == 1


def test_env_variable_overrides_default_seed(dataset, tmp_path, monkeypatch):
    out1 = tmp_path / "o1"
    assert main(["generate", "--manifest", str(dataset), "--out", str(out1),
                 "--seed", "555", "--workers", "1"]) == 0
    monkeypatch.setenv("SBI_FORGE_SEED", "555")
    out2 = tmp_path / "o2"
    assert main(["generate", "--manifest", str(dataset), "--out", str(out2),
                 "--workers", "1"]) == 0
    assert _index_digest(out1) == _index_digest(out2)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

@pytest.fixture()
def generated(dataset, tmp_path):
    out = tmp_path / "run"
    assert main(["generate", "--manifest", str(dataset), "--out", str(out),
                 "--seed", "42", "--workers", "1"]) == 0
    return out


def test_verify_passes_on_untouched_dir(generated, capsys):
    assert main(["verify", "--out", str(generated)]) == 0
    assert "PASS" in capsys.readouterr().out


def test_verify_catches_flipped_byte(generated, capsys):
    mask_file = next(generated.glob("*_mask.png"))
    data = bytearray(mask_file.read_bytes())
    data[-1] ^= 0xFF
    mask_file.write_bytes(bytes(data))
    assert main(["verify", "--out", str(generated)]) == 2
    assert mask_file.name in capsys.readouterr().out


def test_verify_catches_edited_recipe(generated, capsys):
    recipe_file = next(generated.glob("*_recipe.json"))
    record = json.loads(recipe_file.read_text())
    record["ratio"] = 0.9  # in range, so it replays but mismatches
    text = json.dumps(record, indent=2) + "\n"
    recipe_file.write_text(text)
    # keep the index consistent so only the replay check can fire
    index_path = generated / BATCH_INDEX_NAME
    rows = []
    for line in index_path.read_text().splitlines():
        name, digest, size = line.split("\t")
        if name == recipe_file.name:
            digest = file_digest(recipe_file)
            size = str(recipe_file.stat().st_size)
        rows.append(f"{name}\t{digest}\t{size}")
    index_path.write_text("\n".join(rows) + "\n")

    assert main(["verify", "--out", str(generated)]) == 2
    assert "replay mismatch" in capsys.readouterr().out


# ---------------------------------------------------------------------------
# replay subcommand
# ---------------------------------------------------------------------------

def test_replay_subcommand_writes_artifacts(generated, dataset, tmp_path):
    recipe_file = next(generated.glob("*_recipe.json"))
    key = json.loads(recipe_file.read_text())["manifest_key"]
    out = tmp_path / "replayed"
    assert main(["replay", "--recipe", str(recipe_file),
                 "--manifest", str(dataset), "--out", str(out)]) == 0
    regenerated = out / f"{key}_replay_0000_fake.png"
    assert regenerated.is_file()
    stem = recipe_file.name[: -len("_recipe.json")]
    original = generated / f"{stem}_fake.png"
    assert file_digest(regenerated) == file_digest(original)


# ---------------------------------------------------------------------------
# preview
# ---------------------------------------------------------------------------

def test_preview_grid_dimensions(dataset, tmp_path):
    out = tmp_path / "grid.png"
    assert main(["preview", "--manifest", str(dataset), "--out", str(out),
                 "--grid", "2x4", "--tile", "64", "--seed", "5"]) == 0
    with Image.open(out) as im:
        assert im.size == (4 * 64, 2 * 64)


def test_preview_deterministic_bytes(dataset, tmp_path):
    outs = [tmp_path / "g1.png", tmp_path / "g2.png"]
    for out in outs:
        assert main(["preview", "--manifest", str(dataset), "--out", str(out),
                     "--grid", "2x2", "--tile", "32", "--seed", "9"]) == 0
    assert file_digest(outs[0]) == file_digest(outs[1])


def test_preview_identity_config_rows_match(dataset, tmp_path):
    config_path = tmp_path / "ident.json"
    PipelineConfig.identity().to_file(config_path)
    out = tmp_path / "grid.png"
    assert main(["preview", "--manifest", str(dataset), "--out", str(out),
                 "--config", str(config_path), "--grid", "2x3",
                 "--tile", "48"]) == 0
    arr = np.asarray(Image.open(out))
    assert np.array_equal(arr[:48], arr[48:])


def test_preview_insufficient_entries(dataset, tmp_path):
    code = main(["preview", "--manifest", str(dataset),
                 "--out", str(tmp_path / "g.png"), "--grid", "4x8"])
    assert code == 1


# ---------------------------------------------------------------------------
# audit
# ---------------------------------------------------------------------------

def test_audit_reports_distributions(tmp_path):
    report = run_audit_draws(PipelineConfig(), seed=42, n_draws=6000)
    assert abs(report["ratio"][1.0]["observed"] - 0.5) < 0.03
    assert abs(report["source_augmented_freq"] - 0.5) < 0.03
    assert not report["flags"]
    coverage = report["continuous"]["u_h"]["range_coverage"]
    assert coverage > 0.95


def test_audit_collapsed_config_flags_zero_variance():
    report = run_audit_draws(PipelineConfig.identity(), seed=1, n_draws=1000)
    assert any("zero variance" in line for line in report["informational"])


def test_audit_cli_writes_json(tmp_path, capsys):
    out = tmp_path / "audit.json"
    assert main(["audit", "--draws", "2000", "--seed", "4",
                 "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["draws"] == 2000
    assert "ratio" in report


def test_audit_too_few_draws_rejected():
    assert main(["audit", "--draws", "10"]) == 1


# ---------------------------------------------------------------------------
# score
# ---------------------------------------------------------------------------

def test_score_subcommand(tmp_path, capsys):
    records = [
        {"video_id": "v1", "frame_index": 0, "confidence": 0.2},
        {"video_id": "v1", "frame_index": 1, "confidence": 0.8},
        {"video_id": "v2", "frame_index": 0, "confidence": 0.4},
        {"video_id": "v2", "frame_index": 0, "confidence": 0.9},
    ]
    scores_path = tmp_path / "faces.jsonl"
    scores_path.write_text("\n".join(json.dumps(r) for r in records) + "\n")
    out = tmp_path / "videos.jsonl"
    assert main(["score", "--scores", str(scores_path),
                 "--out", str(out)]) == 0
    lines = [json.loads(line) for line in out.read_text().splitlines()]
    assert lines[0] == {"video_id": "v1", "score": 0.5}
    assert lines[1] == {"video_id": "v2", "score": 0.9}
