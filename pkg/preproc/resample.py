# preproc/resample.py
"""
Grid resampling with the half-pixel (area) coordinate convention.

Target index t on an axis of n_new voxels samples the source at
s = (t + 0.5) * (n_old / n_new) - 0.5, clamped to [0, n_old - 1].
Trilinear interpolation is applied one axis at a time, which is exact for a
separable kernel.
"""

from typing import Sequence, Tuple

import numpy as np

from volume.errors import GeometryError
from volume.geometry import Geometry
from volume.volume import BinaryMask, ScalarVolume


def _check_dims(target_dims: Sequence[int]) -> Tuple[int, int, int]:
    try:
        dims = tuple(int(n) for n in target_dims)
    except (TypeError, ValueError) as e:
        raise GeometryError(f"target_dims must be three integers: {e}") from e
    if len(dims) != 3 or any(n < 1 for n in dims):
        raise GeometryError(f"target_dims must be three values >= 1, got {tuple(target_dims)}")
    return dims  # type: ignore[return-value]


def source_coordinates(n_old: int, n_new: int) -> np.ndarray:
    """Clamped continuous source coordinate of every target index"""
    t = np.arange(n_new, dtype=np.float64)
    s = (t + 0.5) * (n_old / n_new) - 0.5
    return np.clip(s, 0.0, n_old - 1)


def linear_along_axis(array: np.ndarray, axis: int, n_new: int) -> np.ndarray:
    n_old = array.shape[axis]
    if n_old == n_new:
        return array
    s = source_coordinates(n_old, n_new)
    i0 = np.floor(s).astype(np.int64)
    i1 = np.minimum(i0 + 1, n_old - 1)
    w = s - i0
    shape = [1, 1, 1]
    shape[axis] = n_new
    w = w.reshape(shape)
    return np.take(array, i0, axis=axis) * (1.0 - w) + np.take(array, i1, axis=axis) * w


def nearest_indices(n_old: int, n_new: int) -> np.ndarray:
    """Source index nearest to each target voxel, ties rounded away from zero"""
    s = source_coordinates(n_old, n_new)
    # s >= 0 after clamping, so floor(s + 0.5) is round-half-away-from-zero
    return np.clip(np.floor(s + 0.5).astype(np.int64), 0, n_old - 1)


def resample_array_trilinear(array: np.ndarray, target_dims: Sequence[int]) -> np.ndarray:
    """float64 trilinear resample of a raw (nx, ny, nz) array"""
    out = np.asarray(array, dtype=np.float64)
    for axis, n_new in enumerate(_check_dims(target_dims)):
        out = linear_along_axis(out, axis, n_new)
    return out


def resample_array_nearest(array: np.ndarray, target_dims: Sequence[int]) -> np.ndarray:
    out = np.asarray(array)
    for axis, n_new in enumerate(_check_dims(target_dims)):
        if out.shape[axis] != n_new:
            out = np.take(out, nearest_indices(out.shape[axis], n_new), axis=axis)
    return out


def resample_trilinear(v: ScalarVolume, target_dims: Sequence[int]) -> ScalarVolume:
    """Trilinear resample to target_dims, preserving origin and physical extent

    Args:
        v: Source volume
        target_dims: Output voxel counts (>= 1 per axis)

    Returns:
        ScalarVolume on the resized geometry
    """
    dims = _check_dims(target_dims)
    geometry = v.geometry.resized(dims)
    if dims == v.dims:
        return ScalarVolume(geometry, v.array)
    return ScalarVolume(geometry, resample_array_trilinear(v.array, dims).astype(np.float32))


def resample_nearest(m: BinaryMask, target_dims: Sequence[int]) -> BinaryMask:
    """Nearest-neighbour resample of a label mask to target_dims"""
    dims = _check_dims(target_dims)
    return BinaryMask(m.geometry.resized(dims), resample_array_nearest(m.array, dims))


def restore_geometry(m: BinaryMask, original: Geometry) -> BinaryMask:
    """Reverse-resample a mask onto its native grid (nearest neighbour)

    The output carries `original` exactly rather than the rescaled spacing, so
    it stays compatible with the native-resolution ground truth.
    """
    return BinaryMask(original, resample_array_nearest(m.array, original.dims))
