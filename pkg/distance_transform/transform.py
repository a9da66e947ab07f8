# distance_transform/transform.py
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import binary_erosion, generate_binary_structure

from config.logging_config import get_logger
from distance_transform.kernel import squared_edt
from volume.errors import VolumeValueError
from volume.geometry import Geometry
from volume.volume import BinaryMask


logger = get_logger(__name__)

SIX_CONNECTED = generate_binary_structure(3, 1)


@dataclass(frozen=True, eq=False)
class DistanceField:
    """Per-voxel distances in millimeters.

    Unsigned fields are >= 0, or +inf everywhere when the source set is
    empty. Signed fields are negative inside the foreground.
    """
    geometry: Geometry
    array: np.ndarray
    signed: bool = False

    def __post_init__(self):
        array = np.array(self.array, dtype=np.float64, copy=True)
        if array.shape != self.geometry.dims:
            raise VolumeValueError(f"field shape {array.shape} does not match dims {self.geometry.dims}")
        if np.any(np.isnan(array)):
            raise VolumeValueError("DistanceField contains NaN")
        if not self.signed and np.any(array < 0):
            raise VolumeValueError("unsigned DistanceField must be non-negative")
        array.setflags(write=False)
        object.__setattr__(self, "array", array)

    @property
    def is_empty_source(self) -> bool:
        return bool(np.all(np.isinf(self.array)))

    @property
    def data(self) -> np.ndarray:
        return self.array.ravel(order="F")

    def finite_or(self, fill: float) -> np.ndarray:
        """Copy of the magnitudes with infinities replaced by `fill`"""
        out = np.abs(self.array)
        out[np.isinf(out)] = fill
        return out


def boundary_voxels(foreground: np.ndarray, outside_is_background: bool) -> np.ndarray:
    """Foreground voxels with a 6-neighbour in the background

    Args:
        foreground: Boolean (nx, ny, nz) array
        outside_is_background: Whether out-of-grid neighbours count as background

    Returns:
        Boolean array of boundary voxels
    """
    foreground = np.asarray(foreground, dtype=bool)
    eroded = binary_erosion(
        foreground,
        structure=SIX_CONNECTED,
        iterations=1,
        border_value=0 if outside_is_background else 1,
    )
    return foreground & ~eroded


def distance_to(sites: np.ndarray, geometry: Geometry) -> np.ndarray:
    """Euclidean distance (mm) from every voxel center to the nearest site"""
    return np.sqrt(squared_edt(np.asarray(sites, dtype=bool), geometry.spacing))


def edt(mask: BinaryMask) -> DistanceField:
    """Exact spacing-weighted distance to the nearest foreground voxel

    Args:
        mask: Source set

    Returns:
        DistanceField, zero on the foreground; all +inf for an empty mask
    """
    fg = mask.foreground
    if not fg.any():
        logger.warning("edt_empty_source", dims=mask.dims)
    return DistanceField(mask.geometry, distance_to(fg, mask.geometry))


def signed_edt(mask: BinaryMask) -> DistanceField:
    """Signed distance to the mask boundary

    The boundary is the set of foreground voxels with an in-grid 6-neighbour
    in background. Values are +distance outside the foreground (equal to
    edt(mask) there), -distance inside, and exactly zero on the boundary.
    A full mask has no boundary and maps to -inf; an empty one to +inf.
    """
    fg = mask.foreground
    boundary = boundary_voxels(fg, outside_is_background=False)
    if not fg.any():
        logger.warning("signed_edt_empty_mask", dims=mask.dims)
        magnitude = np.full(mask.dims, np.inf)
    elif not boundary.any():
        logger.warning("signed_edt_full_mask", dims=mask.dims)
        magnitude = np.full(mask.dims, np.inf)
    else:
        magnitude = distance_to(boundary, mask.geometry)
    return DistanceField(mask.geometry, np.where(fg, -magnitude, magnitude), signed=True)
