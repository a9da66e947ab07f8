# volume_io/reports.py
import json
import math
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

import numpy as np
import pandas as pd

from config.logging_config import get_logger
from metrics.report import CONVENTIONS, MetricReport, aggregate_reports, encode_real
from volume.errors import ConfigError


logger = get_logger(__name__)

CSV_COLUMNS = ["label", "dice", "msd_mm", "nsd"]
CSV_INF = "Inf"
DEFAULT_LABEL = "all"


def _json_safe(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, (float, np.floating)):
        return encode_real(float(value))
    if isinstance(value, np.integer):
        return int(value)
    return value


def format_score(value: float) -> str:
    """Four decimals, "Inf" for infinity"""
    if math.isinf(value):
        return CSV_INF if value > 0 else "-" + CSV_INF
    return f"{value:.4f}"


def _labelled(reports: Sequence[MetricReport], label: str) -> List[MetricReport]:
    return [r if r.label else replace(r, label=label) for r in reports]


def report_document(reports: Sequence[MetricReport], label: str = DEFAULT_LABEL) -> Dict[str, Any]:
    """JSON-ready document: per-case objects, overall aggregate, per-label rows"""
    reports = _labelled(reports, label)
    overall = aggregate_reports([replace(r, label=label) for r in reports])
    return _json_safe({
        "cases": [r.to_dict() for r in reports],
        "aggregate": overall[0] if overall else None,
        "by_label": aggregate_reports(reports),
        "conventions": CONVENTIONS,
    })


def aggregate_csv_frame(reports: Sequence[MetricReport], label: str = DEFAULT_LABEL) -> pd.DataFrame:
    """One formatted row per label with the columns label,dice,msd_mm,nsd"""
    rows = aggregate_reports(_labelled(reports, label))
    frame = pd.DataFrame(rows, columns=["label", "dice", "msd_mm", "nsd"])
    for column in ("dice", "msd_mm", "nsd"):
        frame[column] = frame[column].map(format_score)
    return frame[CSV_COLUMNS]


def emit_report(
    reports: Sequence[MetricReport],
    format: str,
    path: Union[str, Path],
    label: str = DEFAULT_LABEL
) -> None:
    """Write metric reports as JSON or as the aggregate CSV

    Args:
        reports: Per-case reports
        format: "json" or "csv"
        path: Output file
        label: Row label for reports that carry none
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if format == "json":
        path.write_text(json.dumps(report_document(reports, label), indent=2))
    elif format == "csv":
        aggregate_csv_frame(reports, label).to_csv(path, index=False, lineterminator="\n")
    else:
        raise ConfigError(f"unknown report format {format!r}; expected json or csv")
    logger.info("report_written", path=str(path), format=format, n_cases=len(reports))


def load_report_cases(path: Union[str, Path]) -> List[MetricReport]:
    """Per-case reports back from a JSON report"""
    document = json.loads(Path(path).read_text())
    return [MetricReport.from_dict(case) for case in document["cases"]]


def write_trajectory(frame: pd.DataFrame, path: Union[str, Path]) -> None:
    """Descent trajectory as CSV, infinities written as "Inf" """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.replace([math.inf, -math.inf], [CSV_INF, "-" + CSV_INF]).to_csv(path, index=False, lineterminator="\n")
