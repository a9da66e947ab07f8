# augment/transforms.py
"""
Stochastic volume transforms.

Each function is pure given its generator; the random draws that pick the
transform parameters live in augment/pipeline.py.
"""

import math
from typing import Tuple

import numpy as np
from scipy.ndimage import convolve1d, map_coordinates

from augment.config import ElasticParams
from preproc.resample import linear_along_axis, resample_array_trilinear
from volume.errors import VolumeValueError
from volume.volume import BinaryMask, MultiChannelVolume, ScalarVolume


GAMMA_EPS = 1e-8


def random_noise(v: ScalarVolume, std: float, rng: np.random.Generator) -> ScalarVolume:
    """Add iid Gaussian(0, std^2) noise"""
    if std <= 0:
        return v
    noise = rng.normal(0.0, std, size=v.dims)
    return v.with_array((v.array.astype(np.float64) + noise).astype(np.float32))


def random_anisotropy(v: ScalarVolume, factor: float, axis: int, rng: np.random.Generator = None) -> ScalarVolume:
    """Simulate a thick-slice acquisition along one axis

    Downsamples `axis` by `factor` and upsamples back to the original dims,
    both trilinearly. Factors that round to the original size are the identity.
    """
    n = v.dims[axis]
    n_low = max(1, int(round(n / factor)))
    if n_low == n:
        return v
    values = v.array.astype(np.float64)
    restored = linear_along_axis(linear_along_axis(values, axis, n_low), axis, n)
    return v.with_array(restored.astype(np.float32))


def gaussian_kernel(std_voxels: float) -> np.ndarray:
    """Normalized 1D Gaussian sampled on [-ceil(3 std), ceil(3 std)]"""
    radius = int(math.ceil(3.0 * std_voxels))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-0.5 * (x / std_voxels) ** 2)
    return kernel / kernel.sum()


def random_blur(v: ScalarVolume, std_voxels: float, rng: np.random.Generator = None) -> ScalarVolume:
    """Separable Gaussian blur with edge replication at the borders"""
    if std_voxels <= 0:
        return v
    kernel = gaussian_kernel(std_voxels)
    out = v.array.astype(np.float64)
    for axis in range(3):
        out = convolve1d(out, kernel, axis=axis, mode="nearest")
    return v.with_array(out.astype(np.float32))


def random_gamma(v: ScalarVolume, log_gamma: float, rng: np.random.Generator = None) -> ScalarVolume:
    """Gamma contrast change on the [min, max] intensity range"""
    if log_gamma == 0:
        return v
    values = v.array.astype(np.float64)
    lo, hi = float(values.min()), float(values.max())
    scale = hi - lo + GAMMA_EPS
    normalized = (values - lo) / scale
    out = lo + np.power(normalized, math.exp(log_gamma)) * scale
    return v.with_array(np.clip(out, lo, hi).astype(np.float32))


def displacement_field(
    dims: Tuple[int, int, int],
    spacing: Tuple[float, float, float],
    params: ElasticParams,
    rng: np.random.Generator
) -> np.ndarray:
    """Dense (3, nx, ny, nz) displacement in voxels

    Control-point vectors are iid Gaussian, scaled so the largest has
    magnitude max_displacement_mm, then upsampled trilinearly.
    """
    coarse = rng.standard_normal((3,) + tuple(params.grid_dims))
    peak = float(np.sqrt((coarse ** 2).sum(axis=0)).max())
    if peak > 0:
        coarse *= params.max_displacement_mm / peak
    else:
        coarse[:] = 0.0
    return np.stack([
        resample_array_trilinear(coarse[axis], dims) / spacing[axis]
        for axis in range(3)
    ])


def warp(x: MultiChannelVolume, label: BinaryMask, displacement: np.ndarray) -> Tuple[MultiChannelVolume, BinaryMask]:
    """Backward-map every voxel by `displacement` (voxels)

    Output voxel i samples the input at i + displacement[:, i]. Maps are
    sampled trilinearly and labels by nearest neighbour; samples outside the
    grid take the border value.
    """
    dims = x.geometry.dims
    if displacement.shape != (3,) + tuple(dims):
        raise VolumeValueError(f"displacement shape {displacement.shape} does not match dims {dims}")
    grid = np.indices(dims, dtype=np.float64)
    coords = grid + displacement

    warped = x.map_channels(
        lambda c: c.with_array(map_coordinates(c.array.astype(np.float64), coords, order=1, mode="nearest")
                               .astype(np.float32))
    )
    nearest = tuple(
        np.clip(np.floor(coords[axis] + 0.5).astype(np.int64), 0, dims[axis] - 1)
        for axis in range(3)
    )
    return warped, label.with_array(label.array[nearest])


def random_elastic(
    x: MultiChannelVolume,
    label: BinaryMask,
    cfg: ElasticParams,
    rng: np.random.Generator
) -> Tuple[MultiChannelVolume, BinaryMask]:
    """Smooth random deformation shared by all channels and the label"""
    if cfg.max_displacement_mm == 0:
        return x, label
    field = displacement_field(x.geometry.dims, x.geometry.spacing, cfg, rng)
    return warp(x, label, field)
