# metrics/surface.py
from dataclasses import dataclass

import numpy as np

from distance_transform.transform import boundary_voxels, distance_to
from volume.geometry import Geometry
from volume.volume import BinaryMask


@dataclass(frozen=True, eq=False)
class SurfaceSet:
    """Boundary voxels of a mask

    Attributes:
        geometry: Grid the surface lives on
        mask: Boolean (nx, ny, nz) array of surface voxels
    """
    geometry: Geometry
    mask: np.ndarray

    def __post_init__(self):
        mask = np.array(self.mask, dtype=bool, copy=True)
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)

    @property
    def coordinates(self) -> np.ndarray:
        """(K, 3) voxel coordinates in x-fastest order"""
        coords = np.argwhere(self.mask)
        order = np.lexsort((coords[:, 0], coords[:, 1], coords[:, 2]))
        return coords[order]

    def __len__(self) -> int:
        return int(np.count_nonzero(self.mask))

    @property
    def is_empty(self) -> bool:
        return not self.mask.any()

    def distance_field(self) -> np.ndarray:
        """Distance (mm) from every voxel to the nearest surface voxel"""
        return distance_to(self.mask, self.geometry)

    def distances_from(self, other: "SurfaceSet") -> np.ndarray:
        """Distance of each voxel of `other` to this surface"""
        return self.distance_field()[other.mask]


def extract_surface(m: BinaryMask) -> SurfaceSet:
    """Foreground voxels with a 6-neighbour outside the foreground

    Neighbours beyond the grid border count as background, so a full mask
    yields its outer shell.
    """
    return SurfaceSet(m.geometry, boundary_voxels(m.foreground, outside_is_background=True))
