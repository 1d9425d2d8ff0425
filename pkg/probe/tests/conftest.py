from __future__ import annotations

import pytest

from sbi_forge.synth import write_synthetic_dataset


@pytest.fixture(scope="session")
def small_manifest(tmp_path_factory):
    root = tmp_path_factory.mktemp("probe_ds")
    return write_synthetic_dataset(root, 8, seed=13, height=80, width=80)


@pytest.fixture(scope="session")
def training_manifest(tmp_path_factory):
    root = tmp_path_factory.mktemp("probe_train_ds")
    return write_synthetic_dataset(root, 250, seed=17, height=96, width=96)
