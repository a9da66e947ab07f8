# gradcheck/suite.py
from dataclasses import asdict, dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from config.logging_config import get_logger
from gradcheck.finite_diff import (
    DEFAULT_ABS_TOL,
    DEFAULT_REL_TOL,
    DEFAULT_STEP,
    compare_gradients,
    finite_diff_gradient,
)
from losses.dispatch import evaluate_loss, spec_distance_weights
from losses.spec import LossKind, LossSpec
from volume.geometry import Geometry
from volume.volume import BinaryMask, ProbVolume


logger = get_logger(__name__)

DEFAULT_SIZES: Tuple[Tuple[int, int, int], ...] = ((8, 8, 4),)
P_RANGE = (0.05, 0.95)
DEFAULT_PAIRS = 20


def default_specs() -> List[LossSpec]:
    """One default-parameter spec per loss kind"""
    return [LossSpec.default(kind) for kind in LossKind]


def random_case(
    rng: np.random.Generator,
    dims: Sequence[int],
    foreground_fraction: float = 0.3,
    spacing: Sequence[float] = (1.0, 1.0, 1.0)
) -> Tuple[ProbVolume, BinaryMask]:
    """Random (p, g) pair with p uniform in (0.05, 0.95)"""
    geometry = Geometry(tuple(dims), tuple(spacing))
    p = rng.uniform(P_RANGE[0], P_RANGE[1], size=geometry.dims)
    g = rng.random(geometry.dims) < foreground_fraction
    return ProbVolume(geometry, p), BinaryMask(geometry, g)


@dataclass
class GradcheckRow:
    kind: str
    dims: Tuple[int, int, int]
    n_pairs: int
    max_abs_error: float
    max_rel_error: float
    passed: bool


@dataclass
class GradcheckReport:
    """Agreement per (spec, size), worst case over the random pairs"""
    seed: int
    h: float
    rel_tol: float
    abs_tol: float
    rows: List[GradcheckRow] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(row.passed for row in self.rows)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame([asdict(row) for row in self.rows])
        if not frame.empty:
            frame["dims"] = frame["dims"].map(lambda d: "x".join(str(n) for n in d))
        return frame

    def to_text(self) -> str:
        frame = self.to_frame()
        if frame.empty:
            return "no gradient checks were run"
        return frame.to_string(index=False, float_format=lambda v: f"{v:.3e}")


def check_case(
    spec: LossSpec,
    p: ProbVolume,
    g: BinaryMask,
    h: float = DEFAULT_STEP,
    rel_tol: float = DEFAULT_REL_TOL,
    abs_tol: float = DEFAULT_ABS_TOL
):
    """Compare the analytic gradient of one case against central differences"""
    weights = spec_distance_weights(spec, p.array.astype(np.float64), g)
    analytic = evaluate_loss(spec, p, g, weights=weights).gradient
    numeric = finite_diff_gradient(spec, p, g, h, weights=weights)
    return compare_gradients(analytic, numeric, p.array, h, rel_tol, abs_tol)


def gradcheck_suite(
    seed: int = 0,
    sizes: Iterable[Sequence[int]] = DEFAULT_SIZES,
    specs: Optional[Sequence[LossSpec]] = None,
    n_pairs: int = DEFAULT_PAIRS,
    h: float = DEFAULT_STEP,
    rel_tol: float = DEFAULT_REL_TOL,
    abs_tol: float = DEFAULT_ABS_TOL,
    empty_truth: bool = False,
    show_progress: bool = False
) -> GradcheckReport:
    """Check every spec's analytic gradient on random inputs of every size

    Args:
        seed: Seed of the input generator
        sizes: Grid dims to test
        specs: Loss specs; all six defaults when omitted
        n_pairs: Random (p, g) pairs per (spec, size)
        h: Finite-difference step
        rel_tol: Relative error bound
        abs_tol: Absolute error bound
        empty_truth: Use an all-background g
        show_progress: Show a tqdm progress bar

    Returns:
        GradcheckReport with one row per (spec, size)
    """
    specs = list(specs) if specs is not None else default_specs()
    sizes = [tuple(int(n) for n in s) for s in sizes]
    rng = np.random.default_rng(seed)
    report = GradcheckReport(seed=seed, h=h, rel_tol=rel_tol, abs_tol=abs_tol)

    jobs = [(spec, dims) for spec in specs for dims in sizes]
    for spec, dims in tqdm(jobs, desc="gradcheck", disable=not show_progress):
        worst_abs, worst_rel, passed = 0.0, 0.0, True
        for _ in range(n_pairs):
            p, g = random_case(rng, dims, foreground_fraction=0.0 if empty_truth else 0.3)
            result = check_case(spec, p, g, h, rel_tol, abs_tol)
            worst_abs = max(worst_abs, result.max_abs_error)
            worst_rel = max(worst_rel, result.max_rel_error)
            passed = passed and result.passed
        report.rows.append(GradcheckRow(spec.kind.value, dims, n_pairs, worst_abs, worst_rel, passed))
        logger.info("gradcheck_row", kind=spec.kind.value, dims=dims,
                    max_abs_error=worst_abs, max_rel_error=worst_rel, passed=passed)

    if not report.all_passed:
        logger.warning("gradcheck_failed", failing=[r.kind for r in report.rows if not r.passed])
    return report
