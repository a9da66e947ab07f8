# optimdemo/phantoms.py
"""Deterministic analytic lesion masks for the descent demo."""

from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from volume.errors import GeometryError
from volume.geometry import Geometry
from volume.volume import BinaryMask


TINY_LESION_MAX_FRACTION = 0.01
TINY_BLOB_RADIUS_MM = 1.5
# relative blob centers, filled in order while the lesion stays under 1%
TINY_BLOB_CENTERS = ((0.3, 0.3, 0.5), (0.7, 0.6, 0.4), (0.5, 0.75, 0.6), (0.25, 0.7, 0.3))


class PhantomKind(str, Enum):
    SPHERE = "sphere"
    TWO_SPHERES = "two-spheres"
    THIN_SHELL = "thin-shell"
    TINY_LESION = "tiny-lesion"


def _squared_distance_mm(geometry: Geometry, center: Sequence[int]) -> np.ndarray:
    axes = [
        ((np.arange(n) - c) * s) ** 2
        for n, c, s in zip(geometry.dims, center, geometry.spacing)
    ]
    return axes[0][:, None, None] + axes[1][None, :, None] + axes[2][None, None, :]


def _require_inside(geometry: Geometry, center: Sequence[int], radius_mm: float, what: str) -> None:
    for axis, (n, c, s) in enumerate(zip(geometry.dims, center, geometry.spacing)):
        reach = int(np.floor(radius_mm / s + 1e-9))
        if c - reach < 0 or c + reach > n - 1:
            raise GeometryError(
                f"{what} of radius {radius_mm} mm does not fit dims[{'xyz'[axis]}]={n} "
                f"at spacing {s} mm"
            )


def ball(geometry: Geometry, center: Sequence[int], radius_mm: float) -> np.ndarray:
    """Voxels whose center lies within radius_mm of the center voxel"""
    if radius_mm < 0:
        raise GeometryError(f"radius must be >= 0, got {radius_mm}")
    _require_inside(geometry, center, radius_mm, "sphere")
    return _squared_distance_mm(geometry, center) <= radius_mm ** 2


def grid_center(dims: Sequence[int]) -> Tuple[int, int, int]:
    return tuple(n // 2 for n in dims)  # type: ignore[return-value]


def _relative_center(dims: Sequence[int], fractions: Sequence[float]) -> Tuple[int, int, int]:
    return tuple(min(n - 1, int(round(f * (n - 1)))) for n, f in zip(dims, fractions))  # type: ignore[return-value]


def _tiny_lesion(geometry: Geometry) -> np.ndarray:
    n = geometry.n_voxels
    mask = np.zeros(geometry.dims, dtype=bool)
    for fractions in TINY_BLOB_CENTERS:
        center = _relative_center(geometry.dims, fractions)
        try:
            candidate = mask | ball(geometry, center, TINY_BLOB_RADIUS_MM)
        except GeometryError:
            continue
        if candidate.sum() / n >= TINY_LESION_MAX_FRACTION:
            break
        mask = candidate
    if not mask.any():
        # single-voxel lesion when no blob fits under the fraction limit
        if 1 / n >= TINY_LESION_MAX_FRACTION:
            raise GeometryError(f"dims {geometry.dims} too small for a lesion under 1% of the volume")
        mask[grid_center(geometry.dims)] = True
    return mask


def make_phantom(
    kind,
    dims: Sequence[int] = (32, 32, 32),
    spacing: Sequence[float] = (1.0, 1.0, 1.0),
    radius_mm: Optional[float] = None
) -> BinaryMask:
    """Analytic target mask

    Args:
        kind: sphere, two-spheres, thin-shell or tiny-lesion
        dims: Grid dims
        spacing: Voxel spacing in mm
        radius_mm: Sphere / shell outer radius; a quarter of the smallest
            extent (an eighth for two-spheres) when omitted

    Returns:
        BinaryMask on Geometry(dims, spacing)
    """
    kind = PhantomKind(kind)
    geometry = Geometry(tuple(dims), tuple(spacing))
    smallest_extent = min(geometry.extent_mm)

    if kind is PhantomKind.SPHERE:
        radius = smallest_extent / 4 if radius_mm is None else radius_mm
        mask = ball(geometry, grid_center(geometry.dims), radius)
    elif kind is PhantomKind.TWO_SPHERES:
        radius = smallest_extent / 8 if radius_mm is None else radius_mm
        first = _relative_center(geometry.dims, (1 / 3, 0.5, 0.5))
        second = _relative_center(geometry.dims, (2 / 3, 0.5, 0.5))
        mask = ball(geometry, first, radius) | ball(geometry, second, radius)
    elif kind is PhantomKind.THIN_SHELL:
        outer = smallest_extent / 3 if radius_mm is None else radius_mm
        inner = max(0.0, outer - 1.5 * max(geometry.spacing))
        center = grid_center(geometry.dims)
        squared = _squared_distance_mm(geometry, center)
        mask = ball(geometry, center, outer) & (squared > inner ** 2)
    else:
        mask = _tiny_lesion(geometry)

    return BinaryMask(geometry, mask)
