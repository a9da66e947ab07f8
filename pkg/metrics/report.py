# metrics/report.py
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from config.logging_config import get_logger
from metrics.scores import dice_coefficient, hausdorff_distance, mean_surface_distance, normalized_surface_dice
from volume.errors import VolumeValueError
from volume.volume import BinaryMask


logger = get_logger(__name__)

INFINITY_TOKEN = "Infinity"

CONVENTIONS = {
    "dice_both_empty": 1.0,
    "msd_one_empty": INFINITY_TOKEN,
    "msd_both_empty": 0.0,
    "nsd_both_empty": 1.0,
    "nsd_one_empty": 0.0,
    "surface_connectivity": 6,
    "out_of_bounds": "background",
}


def encode_real(value: Optional[float]):
    """JSON-safe real: infinities become the string "Infinity" """
    if value is None:
        return None
    if math.isinf(value):
        return INFINITY_TOKEN if value > 0 else "-" + INFINITY_TOKEN
    return float(value)


def decode_real(value) -> Optional[float]:
    if value is None:
        return None
    if isinstance(value, str):
        return float(value.replace(INFINITY_TOKEN, "inf"))
    return float(value)


@dataclass(frozen=True)
class MetricReport:
    """Scores of one evaluated case"""
    case_id: str
    dice: float
    msd_mm: float
    nsd: float
    tau_mm: float = 1.0
    hd95_mm: Optional[float] = None
    label: str = ""

    def __post_init__(self):
        if not 0.0 <= self.dice <= 1.0:
            raise VolumeValueError(f"dice must lie in [0, 1], got {self.dice}")
        if not 0.0 <= self.nsd <= 1.0:
            raise VolumeValueError(f"nsd must lie in [0, 1], got {self.nsd}")
        if math.isnan(self.msd_mm) or self.msd_mm < 0:
            raise VolumeValueError(f"msd_mm must be >= 0 or +inf, got {self.msd_mm}")
        if not self.tau_mm > 0:
            raise VolumeValueError(f"tau_mm must be > 0, got {self.tau_mm}")

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["msd_mm"] = encode_real(self.msd_mm)
        data["hd95_mm"] = encode_real(self.hd95_mm)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MetricReport":
        return cls(
            case_id=str(data["case_id"]),
            dice=float(data["dice"]),
            msd_mm=decode_real(data["msd_mm"]),
            nsd=float(data["nsd"]),
            tau_mm=float(data.get("tau_mm", 1.0)),
            hd95_mm=decode_real(data.get("hd95_mm")),
            label=str(data.get("label", "")),
        )


def evaluate_case(
    pred: BinaryMask,
    truth: BinaryMask,
    tau_mm: float = 1.0,
    case_id: str = "case",
    label: str = ""
) -> MetricReport:
    """Dice, MSD and NSD (plus HD95) of one prediction against its truth

    Args:
        pred: Predicted mask, already on the truth's grid
        truth: Ground-truth mask
        tau_mm: NSD tolerance
        case_id: Identifier carried into the report
        label: Optional row label (e.g. the loss that produced pred)

    Returns:
        MetricReport
    """
    report = MetricReport(
        case_id=case_id,
        dice=dice_coefficient(pred, truth),
        msd_mm=mean_surface_distance(pred, truth),
        nsd=normalized_surface_dice(pred, truth, tau_mm),
        tau_mm=tau_mm,
        hd95_mm=hausdorff_distance(pred, truth, percentile=95.0),
        label=label,
    )
    logger.debug("case_evaluated", case_id=case_id, dice=report.dice, msd_mm=report.msd_mm, nsd=report.nsd)
    return report


def reports_frame(reports: Sequence[MetricReport]) -> pd.DataFrame:
    columns = ["case_id", "label", "dice", "msd_mm", "nsd", "tau_mm", "hd95_mm"]
    rows = [{c: getattr(r, c) for c in columns} for r in reports]
    return pd.DataFrame(rows, columns=columns)


def _aggregate_group(group: pd.DataFrame) -> Dict[str, Any]:
    msd = group["msd_mm"].astype(float)
    finite = msd[~msd.isin([math.inf])]
    hd95 = group["hd95_mm"].dropna().astype(float)
    return {
        "n_cases": int(len(group)),
        "dice": float(group["dice"].mean()),
        "msd_mm": math.inf if len(finite) < len(msd) else float(msd.mean()),
        "msd_finite_mean_mm": float(finite.mean()) if len(finite) else None,
        "msd_finite_count": int(len(finite)),
        "nsd": float(group["nsd"].mean()),
        "hd95_mm": (math.inf if hd95.isin([math.inf]).any() else float(hd95.mean())) if len(hd95) else None,
    }


def aggregate_reports(reports: Sequence[MetricReport]) -> List[Dict[str, Any]]:
    """Mean scores per label, in first-seen label order

    The mean MSD is +inf when any case is +inf; the finite-only mean and its
    case count are reported alongside.
    """
    if not reports:
        return []
    frame = reports_frame(reports)
    rows = []
    for label, group in frame.groupby("label", sort=False):
        rows.append({"label": label, **_aggregate_group(group)})
    return rows
