# volume/geometry.py
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

from volume.errors import GeometryError


IDENTITY_MATRIX: Tuple[float, ...] = (1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0)
COMPATIBILITY_TOLERANCE_MM = 1e-6


def _triple(values: Sequence, name: str, cast) -> tuple:
    try:
        out = tuple(cast(v) for v in values)
    except (TypeError, ValueError) as e:
        raise GeometryError(f"{name} must be three numbers: {e}") from e
    if len(out) != 3:
        raise GeometryError(f"{name} must have exactly 3 components, got {len(out)}")
    return out


@dataclass(frozen=True)
class Geometry:
    """Axis-aligned voxel grid geometry.

    Attributes:
        dims: (nx, ny, nz) voxel counts, all >= 1
        spacing: (sx, sy, sz) millimeters per voxel, all > 0
        origin: (ox, oy, oz) millimeters
        transform_matrix: direction cosines as read from disk; carried and
            echoed on write but not used in geometry math
    """
    dims: Tuple[int, int, int]
    spacing: Tuple[float, float, float] = (1.0, 1.0, 1.0)
    origin: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    transform_matrix: Tuple[float, ...] = field(default=IDENTITY_MATRIX, compare=False)

    def __post_init__(self):
        dims = _triple(self.dims, "dims", int)
        spacing = _triple(self.spacing, "spacing", float)
        origin = _triple(self.origin, "origin", float)

        for axis, n in zip("xyz", dims):
            if n < 1:
                raise GeometryError(f"dims[{axis}] must be >= 1, got {n}")
        for axis, s in zip("xyz", spacing):
            if not math.isfinite(s) or s <= 0:
                raise GeometryError(f"spacing[{axis}] must be > 0, got {s}")
        for axis, o in zip("xyz", origin):
            if not math.isfinite(o):
                raise GeometryError(f"origin[{axis}] must be finite, got {o}")

        matrix = tuple(float(v) for v in self.transform_matrix)
        if len(matrix) != 9:
            raise GeometryError(f"transform_matrix must have 9 components, got {len(matrix)}")

        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "transform_matrix", matrix)

    @property
    def n_voxels(self) -> int:
        nx, ny, nz = self.dims
        return nx * ny * nz

    @property
    def extent_mm(self) -> Tuple[float, float, float]:
        """Physical extent n_i * s_i along each axis"""
        return tuple(n * s for n, s in zip(self.dims, self.spacing))  # type: ignore[return-value]

    @property
    def diameter_mm(self) -> float:
        """Diagonal of the physical extent; finite stand-in for an infinite distance"""
        return math.sqrt(sum(e * e for e in self.extent_mm))

    def linear_index(self, x: int, y: int, z: int) -> int:
        """x-fastest linear index: x + nx * (y + ny * z)"""
        nx, ny, nz = self.dims
        if not (0 <= x < nx and 0 <= y < ny and 0 <= z < nz):
            raise IndexError(f"voxel ({x}, {y}, {z}) outside dims {self.dims}")
        return x + nx * (y + ny * z)

    def mismatch(self, other: "Geometry") -> Optional[str]:
        """Name of the first field that makes two grids incompatible, or None"""
        if self.dims != other.dims:
            return "dims"
        if any(abs(a - b) > COMPATIBILITY_TOLERANCE_MM for a, b in zip(self.spacing, other.spacing)):
            return "spacing"
        if any(abs(a - b) > COMPATIBILITY_TOLERANCE_MM for a, b in zip(self.origin, other.origin)):
            return "origin"
        return None

    def resized(self, target_dims: Sequence[int]) -> "Geometry":
        """Geometry with new dims and spacing rescaled to keep the physical extent"""
        target = _triple(target_dims, "target_dims", int)
        for axis, n in zip("xyz", target):
            if n < 1:
                raise GeometryError(f"target_dims[{axis}] must be >= 1, got {n}")
        spacing = tuple(s * n_old / n_new for s, n_old, n_new in zip(self.spacing, self.dims, target))
        return Geometry(target, spacing, self.origin, self.transform_matrix)


def require_compatible(a: Geometry, b: Geometry, what: str = "volumes") -> None:
    """Raise GeometryError naming the differing field when grids differ"""
    field_name = a.mismatch(b)
    if field_name is not None:
        raise GeometryError(
            f"{what} have incompatible {field_name}: "
            f"{getattr(a, field_name)} vs {getattr(b, field_name)}"
        )


def voxel_volume_mm3(g: Geometry) -> float:
    """Volume of one voxel in cubic millimeters"""
    sx, sy, sz = g.spacing
    return sx * sy * sz
