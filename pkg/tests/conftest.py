# tests/conftest.py
import os
from typing import Iterable, Sequence, Tuple

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from volume.geometry import Geometry
from volume.volume import BinaryMask, ProbVolume


# numba compiles the distance kernel on first use, so no per-example deadline
settings.register_profile(
    "loss_bench",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.function_scoped_fixture],
)
settings.load_profile("loss_bench")


@pytest.fixture(autouse=True)
def clean_env(monkeypatch, tmp_path):
    """Isolate tests from LOSS_BENCH_* variables and any .env in the checkout"""
    for key in list(os.environ):
        if key.startswith("LOSS_BENCH_"):
            monkeypatch.delenv(key, raising=False)
    monkeypatch.chdir(tmp_path)


@pytest.fixture
def make_mask():
    """Factory: BinaryMask of `dims` with the listed voxels set"""
    def _make(dims: Sequence[int], voxels: Iterable[Tuple[int, int, int]] = (),
              spacing: Sequence[float] = (1.0, 1.0, 1.0)) -> BinaryMask:
        array = np.zeros(tuple(dims), dtype=np.uint8)
        for voxel in voxels:
            array[tuple(voxel)] = 1
        return BinaryMask(Geometry(tuple(dims), tuple(spacing)), array)
    return _make


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def random_pair(rng):
    """Random 6x6x6 (p, g) with p in (0.05, 0.95) and ~30% foreground"""
    geometry = Geometry((6, 6, 6))
    p = ProbVolume(geometry, rng.uniform(0.05, 0.95, size=geometry.dims))
    g = BinaryMask(geometry, rng.random(geometry.dims) < 0.3)
    return p, g
