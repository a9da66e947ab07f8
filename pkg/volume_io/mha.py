# volume_io/mha.py
"""
MetaImage (.mha) reader and writer.

Single-file images only: ASCII "Key = Value" header lines ending with
"ElementDataFile = LOCAL", followed by the raw voxel payload in x-fastest
order (zlib-deflated when CompressedData = True).
"""

import math
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

import numpy as np

from config.logging_config import get_logger
from volume.errors import MhaFormatError, VolumeValueError
from volume.geometry import Geometry
from volume.volume import BinaryMask, ProbVolume, ScalarVolume


logger = get_logger(__name__)

ELEMENT_TYPES: Dict[str, np.dtype] = {
    "MET_FLOAT": np.dtype("float32"),
    "MET_DOUBLE": np.dtype("float64"),
    "MET_SHORT": np.dtype("int16"),
    "MET_UCHAR": np.dtype("uint8"),
}

MANDATORY_KEYS = ("NDims", "DimSize", "ElementType", "ElementDataFile")
OFFSET_ALIASES = ("Offset", "Origin", "Position")
HEADER_ENCODING = "utf-8"


def format_real(value: float) -> str:
    """Shortest round-trip text of a real; integral values print without ".0" """
    value = float(value)
    if math.isfinite(value) and value.is_integer():
        return str(int(value))
    return repr(value)


def _format_values(values) -> str:
    return " ".join(format_real(v) for v in values)


def _parse_bool(raw: str, key: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "1"):
        return True
    if lowered in ("false", "0"):
        return False
    raise MhaFormatError(f"{key} must be True or False, got {raw!r}")


def _parse_numbers(raw: str, key: str, count: int, cast=float) -> Tuple:
    parts = raw.split()
    if len(parts) != count:
        raise MhaFormatError(f"{key} must have {count} values, got {raw!r}")
    try:
        values = tuple(float(p) for p in parts)
    except ValueError as e:
        raise MhaFormatError(f"{key} has a non-numeric value: {raw!r}") from e
    if cast is int:
        if not all(v.is_integer() for v in values):
            raise MhaFormatError(f"{key} must hold integers, got {raw!r}")
        return tuple(int(v) for v in values)
    return values


@dataclass
class MhaImage:
    """Raw content of a MetaImage file"""
    geometry: Geometry
    element_type: str
    array: np.ndarray
    compressed: bool = False


def _split_header(blob: bytes, path: Path) -> Tuple[Dict[str, str], bytes]:
    header: Dict[str, str] = {}
    position = 0
    while True:
        end = blob.find(b"\n", position)
        if end < 0:
            raise MhaFormatError(f"{path}: header has no ElementDataFile line")
        line = blob[position:end].decode(HEADER_ENCODING, errors="replace").strip()
        position = end + 1
        if not line:
            continue
        if "=" not in line:
            raise MhaFormatError(f"{path}: malformed header line {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        header[key] = value
        if key == "ElementDataFile":
            return header, blob[position:]


def _header_geometry(header: Dict[str, str]) -> Geometry:
    dims = _parse_numbers(header["DimSize"], "DimSize", 3, int)
    spacing = _parse_numbers(header.get("ElementSpacing", "1 1 1"), "ElementSpacing", 3)
    offset_key = next((k for k in OFFSET_ALIASES if k in header), None)
    origin = _parse_numbers(header[offset_key], offset_key, 3) if offset_key else (0.0, 0.0, 0.0)
    matrix = _parse_numbers(header.get("TransformMatrix", "1 0 0 0 1 0 0 0 1"), "TransformMatrix", 9)
    return Geometry(dims, spacing, origin, matrix)


def read_mha_image(path: Union[str, Path]) -> MhaImage:
    """Parse a MetaImage file without interpreting the voxel values

    Raises:
        OSError: File cannot be read
        MhaFormatError: Malformed header, unsupported type or size mismatch
    """
    path = Path(path)
    header, payload = _split_header(path.read_bytes(), path)

    missing = [key for key in MANDATORY_KEYS if key not in header]
    if missing:
        raise MhaFormatError(f"{path}: missing mandatory header keys {missing}")
    if header.get("ObjectType", "Image") != "Image":
        raise MhaFormatError(f"{path}: unsupported ObjectType {header['ObjectType']!r}")
    if header["NDims"].strip() != "3":
        raise MhaFormatError(f"{path}: only NDims = 3 is supported, got {header['NDims']!r}")
    if header["ElementDataFile"] != "LOCAL":
        raise MhaFormatError(f"{path}: only ElementDataFile = LOCAL is supported")
    if header.get("ElementNumberOfChannels", "1").strip() != "1":
        raise MhaFormatError(f"{path}: multi-component voxels are not supported")

    element_type = header["ElementType"]
    if element_type not in ELEMENT_TYPES:
        raise MhaFormatError(f"{path}: unsupported ElementType {element_type!r}")

    geometry = _header_geometry(header)
    compressed = _parse_bool(header.get("CompressedData", "False"), "CompressedData")
    big_endian = _parse_bool(header.get("BinaryDataByteOrderMSB", header.get("ElementByteOrderMSB", "False")),
                             "BinaryDataByteOrderMSB")

    if compressed:
        try:
            payload = zlib.decompress(payload)
        except zlib.error as e:
            raise MhaFormatError(f"{path}: corrupt compressed payload: {e}") from e

    dtype = ELEMENT_TYPES[element_type].newbyteorder(">" if big_endian else "<")
    expected = geometry.n_voxels * dtype.itemsize
    if len(payload) != expected:
        raise MhaFormatError(
            f"{path}: payload has {len(payload)} bytes, DimSize {geometry.dims} x "
            f"{element_type} needs {expected}"
        )
    flat = np.frombuffer(payload, dtype=dtype).astype(ELEMENT_TYPES[element_type])
    return MhaImage(geometry, element_type, flat.reshape(geometry.dims, order="F"), compressed)


def read_mha(path: Union[str, Path], as_mask: Optional[bool] = None) -> Union[ScalarVolume, BinaryMask]:
    """Read a MetaImage volume

    Args:
        path: .mha file
        as_mask: True forces a BinaryMask (error unless values are {0, 1}),
            False forces a ScalarVolume; None loads MET_UCHAR {0, 1} data as a mask

    Returns:
        ScalarVolume or BinaryMask
    """
    image = read_mha_image(path)
    binary = bool(np.all((image.array == 0) | (image.array == 1)))

    if as_mask is None:
        as_mask = image.element_type == "MET_UCHAR" and binary
    if as_mask:
        if not binary:
            raise VolumeValueError(f"{path}: mask requested but values are not all 0 or 1")
        return BinaryMask(image.geometry, image.array.astype(np.uint8))
    if not np.all(np.isfinite(image.array)):
        raise VolumeValueError(f"{path}: intensities must be finite")
    return ScalarVolume(image.geometry, image.array.astype(np.float32))


def _default_element_type(v) -> str:
    if isinstance(v, BinaryMask):
        return "MET_UCHAR"
    if isinstance(v, ProbVolume):
        return "MET_DOUBLE"
    return "MET_FLOAT"


def render_header(geometry: Geometry, element_type: str, compressed: bool) -> str:
    """Header text in canonical key order"""
    lines = [
        ("ObjectType", "Image"),
        ("NDims", "3"),
        ("BinaryData", "True"),
        ("BinaryDataByteOrderMSB", "False"),
        ("CompressedData", "True" if compressed else "False"),
        ("TransformMatrix", _format_values(geometry.transform_matrix)),
        ("Offset", _format_values(geometry.origin)),
        ("CenterOfRotation", "0 0 0"),
        ("ElementSpacing", _format_values(geometry.spacing)),
        ("DimSize", " ".join(str(n) for n in geometry.dims)),
        ("ElementType", element_type),
        ("ElementDataFile", "LOCAL"),
    ]
    return "".join(f"{key} = {value}\n" for key, value in lines)


def write_array_mha(
    array: np.ndarray,
    geometry: Geometry,
    path: Union[str, Path],
    element_type: str = "MET_FLOAT",
    compressed: bool = False
) -> None:
    """Write a raw (nx, ny, nz) array as a MetaImage file"""
    if element_type not in ELEMENT_TYPES:
        raise MhaFormatError(f"unsupported ElementType {element_type!r}")
    array = np.asarray(array)
    if array.shape != geometry.dims:
        raise VolumeValueError(f"array shape {array.shape} does not match dims {geometry.dims}")

    payload = array.astype(ELEMENT_TYPES[element_type].newbyteorder("<")).tobytes(order="F")
    if compressed:
        payload = zlib.compress(payload)

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(render_header(geometry, element_type, compressed).encode(HEADER_ENCODING))
        f.write(payload)
    logger.debug("mha_written", path=str(path), element_type=element_type, compressed=compressed)


def write_mha(
    v: Union[ScalarVolume, BinaryMask, ProbVolume],
    path: Union[str, Path],
    compressed: bool = False,
    element_type: Optional[str] = None
) -> None:
    """Write a volume; masks default to MET_UCHAR, intensities to MET_FLOAT"""
    write_array_mha(v.array, v.geometry, path, element_type or _default_element_type(v), compressed)
