# preproc/pipeline.py
from dataclasses import asdict, dataclass
from typing import Any, Dict, Sequence, Tuple

from config.logging_config import get_logger
from preproc.normalize import znormalize
from preproc.resample import resample_nearest, resample_trilinear
from volume.geometry import Geometry, require_compatible
from volume.volume import BinaryMask, MultiChannelVolume, ScalarVolume


logger = get_logger(__name__)

DEFAULT_TARGET_DIMS: Tuple[int, int, int] = (192, 192, 32)
DEFAULT_CHANNEL_NAMES: Tuple[str, str] = ("adc", "zadc")


@dataclass(frozen=True)
class PreprocessMeta:
    """Native geometry of a preprocessed case, kept for reverse resampling"""
    case_id: str
    original_dims: Tuple[int, int, int]
    original_spacing: Tuple[float, float, float]
    original_origin: Tuple[float, float, float]
    original_transform_matrix: Tuple[float, ...]
    target_dims: Tuple[int, int, int]
    channel_names: Tuple[str, ...]

    @property
    def original_geometry(self) -> Geometry:
        return Geometry(self.original_dims, self.original_spacing,
                        self.original_origin, self.original_transform_matrix)

    def to_dict(self) -> Dict[str, Any]:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PreprocessMeta":
        return cls(
            case_id=str(data.get("case_id", "")),
            original_dims=tuple(data["original_dims"]),
            original_spacing=tuple(data["original_spacing"]),
            original_origin=tuple(data["original_origin"]),
            original_transform_matrix=tuple(data.get("original_transform_matrix", (1, 0, 0, 0, 1, 0, 0, 0, 1))),
            target_dims=tuple(data["target_dims"]),
            channel_names=tuple(data.get("channel_names", DEFAULT_CHANNEL_NAMES)),
        )


def concat_channels(
    a: ScalarVolume,
    b: ScalarVolume,
    names: Sequence[str] = DEFAULT_CHANNEL_NAMES
) -> MultiChannelVolume:
    """Stack two compatible volumes into a 2-channel input, in argument order"""
    require_compatible(a.geometry, b.geometry, "channels")
    return MultiChannelVolume((a, b), tuple(names))


def preprocess_case(
    adc: ScalarVolume,
    zadc: ScalarVolume,
    label: BinaryMask,
    target_dims: Sequence[int] = DEFAULT_TARGET_DIMS
) -> Tuple[MultiChannelVolume, BinaryMask]:
    """Resample, normalize and concatenate one case

    Both maps are trilinearly resampled and then z-normalized individually;
    the label is nearest-neighbour resampled to the same dims.

    Args:
        adc: ADC map
        zadc: ZADC map
        label: Ground-truth lesion mask
        target_dims: Fixed output grid

    Returns:
        (2-channel input, resampled label)
    """
    require_compatible(adc.geometry, zadc.geometry, "adc and zadc")
    require_compatible(adc.geometry, label.geometry, "adc and label")

    channels = [znormalize(resample_trilinear(v, target_dims)) for v in (adc, zadc)]
    resampled_label = resample_nearest(label, target_dims)

    logger.info(
        "case_preprocessed",
        source_dims=adc.dims,
        target_dims=tuple(target_dims),
        label_voxels=int(resampled_label.array.sum()),
    )
    return concat_channels(channels[0], channels[1]), resampled_label


def describe_case(case_id: str, adc: ScalarVolume, target_dims: Sequence[int],
                  names: Sequence[str] = DEFAULT_CHANNEL_NAMES) -> PreprocessMeta:
    g = adc.geometry
    return PreprocessMeta(
        case_id=case_id,
        original_dims=g.dims,
        original_spacing=g.spacing,
        original_origin=g.origin,
        original_transform_matrix=g.transform_matrix,
        target_dims=tuple(int(n) for n in target_dims),
        channel_names=tuple(names),
    )
