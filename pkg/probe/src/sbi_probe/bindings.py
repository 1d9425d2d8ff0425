"""In-memory generation bindings over the sbi-forge engine.

These call the exact batch driver the CLI uses; nothing is reimplemented,
so bytes are identical to the CLI path for identical inputs (the test
suite enforces digest equality). Generation is pure numpy under the hood
and safe to call from worker threads.
"""
from __future__ import annotations

import hashlib
from pathlib import Path

from sbi_forge.core import SbiForgeError
from sbi_forge.ingest import parse_manifest
from sbi_forge.pipeline import PipelineConfig, SampleResult, generate_batch


def load_config(config: str | Path | dict | PipelineConfig | None) -> PipelineConfig:
    if config is None:
        return PipelineConfig()
    if isinstance(config, PipelineConfig):
        return config
    if isinstance(config, dict):
        return PipelineConfig.from_dict(config)
    return PipelineConfig.from_file(config)


def generate(
    manifest: str | Path,
    config: str | Path | dict | PipelineConfig | None = None,
    seed: int = 42,
    count: int | None = None,
    samples_per_image: int = 1,
    mode: str = "train",
    workers: int = 1,
    skip_errors: bool = False,
) -> list[SampleResult]:
    """Generate SBI samples in memory for the first `count` manifest entries.

    count=None consumes the whole manifest; count=0 returns an empty list.
    Per-sample failures raise unless skip_errors is set, in which case the
    failed results are returned alongside the successes, mirroring the CLI
    skip log.
    """
    cfg = load_config(config)
    entries = parse_manifest(manifest, cfg.landmark_count)
    if count is not None:
        if count < 0:
            raise SbiForgeError(f"count must be >= 0, got {count}")
        entries = entries[:count]
    results = list(generate_batch(entries, cfg, seed,
                                  samples_per_image=samples_per_image,
                                  workers=workers, mode=mode))
    if not skip_errors:
        for result in results:
            if not result.ok:
                raise SbiForgeError(
                    f"sample {result.key}#{result.sample_index} failed: "
                    f"{result.error}"
                )
    return results


def sample_pixel_digest(result: SampleResult) -> dict[str, str]:
    """sha256 of the 8-bit pixels of each artifact, for parity checks."""
    sample = result.sample

    def digest(arr) -> str:
        h = hashlib.sha256()
        h.update(repr(arr.shape).encode())
        h.update(arr.tobytes())
        return h.hexdigest()

    from sbi_forge.core import quantize_unit

    return {
        "real": digest(sample.real_image.to_uint8()),
        "fake": digest(sample.fake_image.to_uint8()),
        "mask": digest(quantize_unit(sample.mask.data)),
    }
