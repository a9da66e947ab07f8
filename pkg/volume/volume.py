# volume/volume.py
"""Immutable voxel grids with physical geometry.

Arrays are held with shape (nx, ny, nz) and indexed [x, y, z]; the flat
x-fastest order of the file formats is the Fortran ravel of that array.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from volume.errors import GeometryError, VolumeValueError
from volume.geometry import Geometry, require_compatible


def _frozen_array(data, geometry: Geometry, dtype, what: str) -> np.ndarray:
    array = np.asarray(data)
    if array.ndim == 1:
        if array.size != geometry.n_voxels:
            raise GeometryError(
                f"{what} data length {array.size} does not match dims {geometry.dims}"
            )
        array = array.reshape(geometry.dims, order="F")
    if array.shape != geometry.dims:
        raise GeometryError(f"{what} array shape {array.shape} does not match dims {geometry.dims}")
    array = np.array(array, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


class _VoxelGrid:
    """Shared accessors for the grid types"""
    geometry: Geometry
    array: np.ndarray

    @property
    def dims(self) -> Tuple[int, int, int]:
        return self.geometry.dims

    @property
    def data(self) -> np.ndarray:
        """Flat x-fastest view of the voxel values"""
        return self.array.ravel(order="F")

    def value_at(self, x: int, y: int, z: int):
        self.geometry.linear_index(x, y, z)
        return self.array[x, y, z].item()


@dataclass(frozen=True, eq=False)
class ScalarVolume(_VoxelGrid):
    """Real-valued intensities (ADC / ZADC maps), stored as float32"""
    geometry: Geometry
    array: np.ndarray

    def __post_init__(self):
        array = _frozen_array(self.array, self.geometry, np.float32, "ScalarVolume")
        if not np.all(np.isfinite(array)):
            raise VolumeValueError("ScalarVolume values must be finite")
        object.__setattr__(self, "array", array)

    def with_array(self, array: np.ndarray) -> "ScalarVolume":
        return ScalarVolume(self.geometry, array)


@dataclass(frozen=True, eq=False)
class BinaryMask(_VoxelGrid):
    """Binary labels {0, 1}, stored as uint8"""
    geometry: Geometry
    array: np.ndarray

    def __post_init__(self):
        raw = np.asarray(self.array)
        if raw.dtype == bool:
            raw = raw.astype(np.uint8)
        elif raw.size and not np.all((raw == 0) | (raw == 1)):
            raise VolumeValueError("BinaryMask values must be exactly 0 or 1")
        object.__setattr__(self, "array", _frozen_array(raw, self.geometry, np.uint8, "BinaryMask"))

    @property
    def foreground(self) -> np.ndarray:
        """Boolean view of the foreground"""
        return self.array.astype(bool)

    def with_array(self, array: np.ndarray) -> "BinaryMask":
        return BinaryMask(self.geometry, array)


@dataclass(frozen=True, eq=False)
class ProbVolume(_VoxelGrid):
    """Predicted foreground probabilities in [0, 1], stored as float64"""
    geometry: Geometry
    array: np.ndarray

    def __post_init__(self):
        array = _frozen_array(self.array, self.geometry, np.float64, "ProbVolume")
        if not np.all(np.isfinite(array)):
            raise VolumeValueError("ProbVolume values must be finite")
        if array.size and (array.min() < 0.0 or array.max() > 1.0):
            raise VolumeValueError(
                f"ProbVolume values must lie in [0, 1], got [{array.min()}, {array.max()}]"
            )
        object.__setattr__(self, "array", array)

    def with_array(self, array: np.ndarray) -> "ProbVolume":
        return ProbVolume(self.geometry, array)


@dataclass(frozen=True, eq=False)
class MultiChannelVolume:
    """Ordered, named channels sharing one geometry"""
    channels: Tuple[ScalarVolume, ...]
    names: Tuple[str, ...]

    def __post_init__(self):
        channels = tuple(self.channels)
        names = tuple(str(n) for n in self.names)
        if not channels:
            raise VolumeValueError("MultiChannelVolume needs at least one channel")
        if len(names) != len(channels):
            raise VolumeValueError(f"{len(names)} names given for {len(channels)} channels")
        if len(set(names)) != len(names):
            raise VolumeValueError(f"channel names must be unique, got {names}")
        for name, channel in zip(names[1:], channels[1:]):
            require_compatible(channels[0].geometry, channel.geometry, f"channel {name!r} and {names[0]!r}")
        object.__setattr__(self, "channels", channels)
        object.__setattr__(self, "names", names)

    @property
    def geometry(self) -> Geometry:
        return self.channels[0].geometry

    def __len__(self) -> int:
        return len(self.channels)

    def channel(self, name: str) -> ScalarVolume:
        try:
            return self.channels[self.names.index(name)]
        except ValueError:
            raise KeyError(f"no channel named {name!r}; have {self.names}") from None

    def stacked(self) -> np.ndarray:
        """(C, nx, ny, nz) float32 array"""
        return np.stack([c.array for c in self.channels])

    def map_channels(self, fn) -> "MultiChannelVolume":
        return MultiChannelVolume(tuple(fn(c) for c in self.channels), self.names)


def make_volume(
    dims: Sequence[int],
    spacing: Sequence[float],
    origin: Sequence[float],
    fill: float
) -> ScalarVolume:
    """Constant-valued volume with the given geometry

    Args:
        dims: Voxel counts per axis (>= 1)
        spacing: Millimeters per voxel (> 0)
        origin: Physical origin in millimeters
        fill: Finite fill value

    Returns:
        ScalarVolume filled with `fill`
    """
    geometry = Geometry(tuple(dims), tuple(spacing), tuple(origin))
    if not np.isfinite(fill):
        raise VolumeValueError(f"fill must be finite, got {fill}")
    return ScalarVolume(geometry, np.full(geometry.dims, fill, dtype=np.float32))


def foreground_count(m: BinaryMask) -> int:
    """Number of voxels labelled 1"""
    return int(np.count_nonzero(m.array))


def complement(m: BinaryMask) -> BinaryMask:
    return BinaryMask(m.geometry, 1 - m.array)


def binarize(p: Union[ProbVolume, np.ndarray], threshold: float = 0.5, geometry: Geometry = None) -> BinaryMask:
    """Foreground where p >= threshold"""
    if isinstance(p, ProbVolume):
        return BinaryMask(p.geometry, p.array >= threshold)
    if geometry is None:
        raise GeometryError("binarize of a raw array needs a geometry")
    return BinaryMask(geometry, np.asarray(p) >= threshold)
