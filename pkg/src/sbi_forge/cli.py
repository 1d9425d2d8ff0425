"""Command-line front end.

Subcommands: generate (batch synthesis), replay (regenerate one recipe),
verify (re-check an output directory), preview (pristine/SBI grid),
audit (parameter-distribution report), score (per-video aggregation).

Exit codes are stable for automation: 0 success, 1 fatal input error,
2 verification failure. Progress and the human-readable summary go to
stderr; machine-readable summaries are written where flags request them.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .core import SbiForgeError, quantize_unit, stream_for_sample
from .ingest import (
    BATCH_INDEX_NAME,
    RUN_RECORD_NAME,
    append_batch_index,
    file_digest,
    load_image,
    parse_manifest,
    read_batch_index,
    write_sample,
)
from .pipeline import (
    PipelineConfig,
    RecipeRecord,
    generate_batch,
    generate_from_entry,
    replay,
    sample_parameter_draw,
)
from .raster import bilinear_resize
from .scoring import read_face_scores, score_videos

DEFAULT_SEED = 42


def _env_seed() -> int:
    return int(os.environ.get("SBI_FORGE_SEED", DEFAULT_SEED))


def _load_config(path: str | None) -> PipelineConfig:
    return PipelineConfig.from_file(path) if path else PipelineConfig()


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------

def run_generate(args) -> int:
    config = _load_config(args.config)
    entries = parse_manifest(args.manifest, config.landmark_count)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / BATCH_INDEX_NAME).write_text("")  # fresh, idempotent run

    started = time.perf_counter()
    ok = 0
    skips: list[dict] = []
    for result in generate_batch(
        entries, config, args.seed,
        samples_per_image=args.samples_per_image,
        workers=args.workers, mode=args.mode,
    ):
        if result.ok:
            rows = write_sample(result.sample, out_dir, result.key,
                                result.sample_index)
            append_batch_index(out_dir, rows)
            ok += 1
        else:
            skips.append({
                "key": result.key,
                "sample_index": result.sample_index,
                "reason": result.error,
            })
            _log(f"skip {result.key}#{result.sample_index}: {result.error}")
        done = ok + len(skips)
        if done % 200 == 0:
            _log(f"... {done} samples processed")
    elapsed = time.perf_counter() - started

    run_record = {
        "tool_version": __version__,
        "seed": args.seed,
        "mode": args.mode,
        "samples_per_image": args.samples_per_image,
        "manifest": str(Path(args.manifest).resolve()),
        "config": config.to_dict(),
    }
    (out_dir / RUN_RECORD_NAME).write_text(json.dumps(run_record, indent=2) + "\n")

    summary = {
        "ok": ok,
        "skipped": len(skips),
        "skips": skips,
        "wall_time_s": elapsed,
        "samples_per_s": ok / elapsed if elapsed > 0 else 0.0,
    }
    _log(f"generated {ok} samples, skipped {len(skips)}, "
         f"{elapsed:.2f}s ({summary['samples_per_s']:.1f}/s)")
    if args.summary:
        Path(args.summary).write_text(json.dumps(summary, indent=2) + "\n")

    if ok < 1:
        _log("no sample succeeded")
        return 1
    if args.strict and skips:
        _log(f"--strict: {len(skips)} skipped samples promoted to failure")
        return 1
    return 0


# ---------------------------------------------------------------------------
# replay
# ---------------------------------------------------------------------------

def run_replay(args) -> int:
    from .core import Landmarks

    recipe = RecipeRecord.from_json(Path(args.recipe).read_text())
    config = PipelineConfig.from_dict(recipe.config)
    entries = {e.key: e for e in parse_manifest(args.manifest,
                                                config.landmark_count)}
    entry = entries.get(recipe.manifest_key)
    if entry is None:
        _log(f"manifest has no entry {recipe.manifest_key!r}")
        return 1
    sample = replay(recipe, load_image(entry.resolved_path()),
                    Landmarks(entry.landmark_array()))
    out_dir = Path(args.out)
    key = recipe.manifest_key or "replay"
    rows = write_sample(sample, out_dir, f"{key}_replay", 0)
    append_batch_index(out_dir, rows)
    if sample.meta.get("provenance_mismatch"):
        _log("warning: image digest differs from the recorded source")
    _log(f"replayed {key} into {out_dir}")
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def run_verify(args) -> int:
    out_dir = Path(args.out)
    failures: list[str] = []

    try:
        run_record = json.loads((out_dir / RUN_RECORD_NAME).read_text())
        rows = read_batch_index(out_dir)
    except (OSError, json.JSONDecodeError, SbiForgeError) as exc:
        _log(f"cannot read run outputs: {exc}")
        return 1

    for name, digest, size in rows:
        path = out_dir / name
        if not path.is_file():
            failures.append(f"missing file: {name}")
            continue
        if path.stat().st_size != size:
            failures.append(f"size mismatch: {name}")
            continue
        if file_digest(path) != digest:
            failures.append(f"digest mismatch: {name}")

    config = PipelineConfig.from_dict(run_record["config"])
    try:
        entries = {e.key: e for e in parse_manifest(run_record["manifest"],
                                                    config.landmark_count)}
    except SbiForgeError as exc:
        _log(f"cannot re-read manifest for replay: {exc}")
        return 1

    recipe_rows = [r for r in rows if r[0].endswith("_recipe.json")]
    for name, _, _ in recipe_rows:
        stem = name[: -len("_recipe.json")]
        try:
            _verify_one(out_dir, name, stem, entries, failures)
        except SbiForgeError as exc:
            failures.append(f"{name}: {type(exc).__name__}: {exc}")

    if failures:
        for failure in failures:
            print(f"FAIL {failure}")
        _log(f"verification failed with {len(failures)} problem(s)")
        return 2
    print(f"PASS {len(recipe_rows)} samples verified in {out_dir}")
    return 0


def _verify_one(out_dir: Path, recipe_name: str, stem: str, entries,
                failures: list[str]) -> None:
    from .core import Landmarks

    recipe = RecipeRecord.from_json((out_dir / recipe_name).read_text())
    entry = entries.get(recipe.manifest_key)
    if entry is None:
        failures.append(f"{recipe_name}: manifest key "
                        f"{recipe.manifest_key!r} not found")
        return

    img = load_image(entry.resolved_path())
    sample = replay(recipe, img, Landmarks(entry.landmark_array()))
    if sample.meta.get("provenance_mismatch"):
        failures.append(f"{recipe_name}: source image digest changed")

    expectations = {
        f"{stem}_real.png": sample.real_image.to_uint8(),
        f"{stem}_fake.png": sample.fake_image.to_uint8(),
        f"{stem}_mask.png": quantize_unit(sample.mask.data),
    }
    for name, expected in expectations.items():
        path = out_dir / name
        if not path.is_file():
            failures.append(f"missing file: {name}")
            continue
        with_pil = load_image(path) if name.endswith(("real.png", "fake.png")) else None
        if with_pil is not None:
            actual = with_pil.to_uint8()
        else:
            from PIL import Image

            actual = np.asarray(Image.open(path).convert("L"))
        if actual.shape != expected.shape or not np.array_equal(actual, expected):
            failures.append(f"replay mismatch: {name}")

    mask_max = int(expectations[f"{stem}_mask.png"].max())
    if mask_max > round(255 * recipe.ratio):
        failures.append(
            f"{recipe_name}: mask exceeds ratio bound "
            f"({mask_max} > {round(255 * recipe.ratio)})"
        )


# ---------------------------------------------------------------------------
# preview
# ---------------------------------------------------------------------------

def run_preview(args) -> int:
    config = _load_config(args.config)
    entries = parse_manifest(args.manifest, config.landmark_count)
    rows, cols = _parse_grid(args.grid)
    if rows % 2 != 0:
        raise SbiForgeError(f"grid rows must be even (pristine/SBI pairs), got {rows}")
    needed = (rows // 2) * cols
    if len(entries) < needed:
        raise SbiForgeError(
            f"grid {rows}x{cols} needs {needed} manifest entries, "
            f"got {len(entries)}"
        )

    tile = args.tile
    canvas = np.zeros((rows * tile, cols * tile, 3))
    for i in range(needed):
        entry = entries[i]
        sample = generate_from_entry(entry, i, config, args.seed, 0, args.mode)
        x0, y0, x1, y1 = sample.recipe.crop_box
        pristine = load_image(entry.resolved_path()).data[y0:y1, x0:x1]
        top = bilinear_resize(pristine, tile, tile)
        bottom = bilinear_resize(sample.fake_image.data, tile, tile)
        pr = (i // cols) * 2
        pc = i % cols
        canvas[pr * tile:(pr + 1) * tile, pc * tile:(pc + 1) * tile] = top
        canvas[(pr + 1) * tile:(pr + 2) * tile, pc * tile:(pc + 1) * tile] = bottom

    from .ingest import save_image_png

    save_image_png(quantize_unit(np.clip(canvas, 0, 1)), args.out)
    _log(f"wrote {rows}x{cols} preview to {args.out}")
    return 0


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        rows, cols = text.lower().split("x")
        return int(rows), int(cols)
    except ValueError as exc:
        raise SbiForgeError(f"grid must look like 2x4, got {text!r}") from exc


# ---------------------------------------------------------------------------
# audit
# ---------------------------------------------------------------------------

def run_audit_draws(config: PipelineConfig, seed: int, n_draws: int,
                    mode: str = "train") -> dict:
    """Sample the parameter space n_draws times and summarize."""
    if n_draws < 1000:
        raise SbiForgeError(f"audit needs >= 1000 draws, got {n_draws}")

    ratio_counts: dict[float, int] = {}
    branch_count = 0
    applied_counts: dict[str, int] = {}
    mode_counts: dict[str, int] = {}
    continuous: dict[str, list] = {}
    always_tracked = ("margin", "u_h", "u_w", "v_h", "v_w", "elastic_alpha",
                      "elastic_sigma", "kernel_frac_1", "kernel_frac_2")
    gated = {
        "rgb_shift_r": "rgb_shift", "rgb_shift_g": "rgb_shift",
        "rgb_shift_b": "rgb_shift", "hue_shift_deg": "hue_shift",
        "sat_scale": "sat_scale", "val_scale": "val_scale",
        "brightness_shift": "brightness_contrast",
        "contrast_scale": "brightness_contrast",
    }

    for i in range(n_draws):
        stream = stream_for_sample(seed, i, 0)
        draw = sample_parameter_draw(config, stream, mode=mode)
        ratio_counts[draw["ratio"]] = ratio_counts.get(draw["ratio"], 0) + 1
        branch_count += draw["source_is_augmented"]
        for name, flag in draw["applied"].items():
            applied_counts[name] = applied_counts.get(name, 0) + flag
        mode_counts[draw["frequency_mode"]] = \
            mode_counts.get(draw["frequency_mode"], 0) + 1
        for name in always_tracked:
            continuous.setdefault(name, []).append(draw[name])
        for name, gate in gated.items():
            if draw["applied"][gate]:
                continuous.setdefault(name, []).append(draw[name])
        if draw["frequency_mode"] == "downscale":
            continuous.setdefault("downscale_factor", []).append(
                draw["downscale_factor"])
        elif draw["frequency_mode"] == "sharpen":
            continuous.setdefault("sharpen_alpha", []).append(
                draw["sharpen_alpha"])

    choices = list(config.ratio_choices)
    ratio_report = {}
    flags = []
    for value in sorted(set(choices)):
        expected = choices.count(value) / len(choices)
        observed = ratio_counts.get(value, 0) / n_draws
        sigma = math.sqrt(expected * (1 - expected) / n_draws)
        flagged = abs(observed - expected) > 3 * sigma
        ratio_report[value] = {
            "expected": expected, "observed": observed, "flagged": flagged,
        }
        if flagged:
            flags.append(f"ratio {value}: observed {observed:.4f} vs "
                         f"expected {expected:.4f} beyond 3 sigma")

    branch_freq = branch_count / n_draws
    sigma = math.sqrt(0.25 / n_draws)
    if abs(branch_freq - 0.5) > 3 * sigma:
        flags.append(f"source-augmented branch frequency {branch_freq:.4f} "
                     "beyond 3 sigma of 0.5")

    configured_spans = {
        "margin": config.margin_range,
        "u_h": config.resize_scale_range, "u_w": config.resize_scale_range,
        "v_h": config.translate_frac_range, "v_w": config.translate_frac_range,
        "elastic_alpha": config.elastic_alpha_range,
        "elastic_sigma": config.elastic_sigma_range,
        "kernel_frac_1": config.kernel_frac_range,
        "kernel_frac_2": config.kernel_frac_range,
        "rgb_shift_r": (-config.rgb_shift_limit, config.rgb_shift_limit),
        "rgb_shift_g": (-config.rgb_shift_limit, config.rgb_shift_limit),
        "rgb_shift_b": (-config.rgb_shift_limit, config.rgb_shift_limit),
        "hue_shift_deg": (-config.hue_shift_limit_deg, config.hue_shift_limit_deg),
        "sat_scale": config.sat_scale_range,
        "val_scale": config.val_scale_range,
        "brightness_shift": (-config.brightness_shift_limit,
                             config.brightness_shift_limit),
        "contrast_scale": config.contrast_scale_range,
        "downscale_factor": config.downscale_factor_range,
        "sharpen_alpha": config.sharpen_alpha_range,
    }
    continuous_report = {}
    info = []
    for name, values in sorted(continuous.items()):
        arr = np.asarray(values)
        lo, hi = configured_spans[name]
        span = hi - lo
        coverage = float((arr.max() - arr.min()) / span) if span > 0 else 1.0
        entry = {
            "n": int(arr.size),
            "min": float(arr.min()),
            "max": float(arr.max()),
            "mean": float(arr.mean()),
            "std": float(arr.std()),
            "range_coverage": coverage,
        }
        if entry["std"] == 0.0:
            info.append(f"{name}: zero variance (collapsed range)")
        continuous_report[name] = entry

    return {
        "draws": n_draws,
        "seed": seed,
        "ratio": ratio_report,
        "source_augmented_freq": branch_freq,
        "applied_freq": {k: v / n_draws for k, v in sorted(applied_counts.items())},
        "frequency_mode_freq": {k: v / n_draws for k, v in sorted(mode_counts.items())},
        "continuous": continuous_report,
        "flags": flags,
        "informational": info,
    }


def run_audit(args) -> int:
    config = _load_config(args.config)
    report = run_audit_draws(config, args.seed, args.draws)
    print(f"audit over {report['draws']} draws (seed {report['seed']})")
    print(f"  source-augmented branch: {report['source_augmented_freq']:.4f}")
    for value, stats in report["ratio"].items():
        print(f"  ratio {value}: observed {stats['observed']:.4f} "
              f"(expected {stats['expected']:.4f})")
    for name, freq in report["applied_freq"].items():
        print(f"  applied {name}: {freq:.4f}")
    for name, stats in report["continuous"].items():
        print(f"  {name}: mean {stats['mean']:.4f} "
              f"range [{stats['min']:.4f}, {stats['max']:.4f}] "
              f"coverage {stats['range_coverage']:.3f}")
    for line in report["informational"]:
        print(f"  note: {line}")
    for line in report["flags"]:
        print(f"  FLAG: {line}")
    if args.out:
        Path(args.out).write_text(json.dumps(report, indent=2) + "\n")
    return 0


# ---------------------------------------------------------------------------
# score
# ---------------------------------------------------------------------------

def run_score(args) -> int:
    videos = read_face_scores(args.scores)
    scores = score_videos(videos)
    lines = [json.dumps({"video_id": vid, "score": scores[vid]})
             for vid in sorted(scores)]
    text = "\n".join(lines) + ("\n" if lines else "")
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sbi-forge",
        description="Deterministic self-blended-image training data engine",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_seed(p):
        p.add_argument("--seed", type=int, default=_env_seed(),
                       help="base seed (default 42; SBI_FORGE_SEED overrides)")

    p = sub.add_parser("generate", help="generate samples for a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    add_seed(p)
    p.add_argument("--samples-per-image", type=int, default=1)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("--mode", choices=("train", "inference"), default="train")
    p.add_argument("--strict", action="store_true",
                   help="treat per-sample skips as failures")
    p.add_argument("--summary", help="write a JSON run summary here")
    p.set_defaults(func=run_generate)

    p = sub.add_parser("replay", help="regenerate one sample from a recipe")
    p.add_argument("--recipe", required=True)
    p.add_argument("--manifest", required=True,
                   help="manifest that provided the original landmarks")
    p.add_argument("--out", required=True)
    p.set_defaults(func=run_replay)

    p = sub.add_parser("verify", help="re-check digests and replay a run")
    p.add_argument("--out", required=True)
    p.set_defaults(func=run_verify)

    p = sub.add_parser("preview", help="render pristine/SBI grid")
    p.add_argument("--manifest", required=True)
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    add_seed(p)
    p.add_argument("--grid", default="2x4", help="rows x cols, rows even")
    p.add_argument("--tile", type=int, default=128)
    p.add_argument("--mode", choices=("train", "inference"), default="train")
    p.set_defaults(func=run_preview)

    p = sub.add_parser("audit", help="sampling-distribution report")
    p.add_argument("--config")
    add_seed(p)
    p.add_argument("--draws", type=int, default=60000)
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=run_audit)

    p = sub.add_parser("score", help="aggregate per-face scores per video")
    p.add_argument("--scores", required=True)
    p.add_argument("--out")
    p.set_defaults(func=run_score)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SbiForgeError as exc:
        _log(f"error: {exc}")
        return 1
    except OSError as exc:
        _log(f"i/o error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
