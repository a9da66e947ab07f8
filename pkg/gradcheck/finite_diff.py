# gradcheck/finite_diff.py
from dataclasses import dataclass
from typing import Optional

import numpy as np

from config.logging_config import get_logger
from losses.dispatch import loss_terms, spec_distance_weights
from losses.focal import PT_CLAMP
from losses.region import prediction_arrays
from losses.spec import LossSpec
from volume.errors import GradientCheckError
from volume.volume import BinaryMask, ProbVolume


logger = get_logger(__name__)

DEFAULT_STEP = 1e-4
DEFAULT_REL_TOL = 1e-3
DEFAULT_ABS_TOL = 1e-6


def finite_diff_gradient(
    spec: LossSpec,
    p: ProbVolume,
    g: BinaryMask,
    h: float = DEFAULT_STEP,
    weights: Optional[np.ndarray] = None
) -> np.ndarray:
    """Central-difference dL/dp, one voxel at a time

    Distance weights of distance-based losses are frozen at the unperturbed
    p, matching the semi-gradient the losses return.

    Args:
        spec: Loss to differentiate
        p: Probabilities, all within [h, 1 - h]
        g: Ground truth
        h: Perturbation size
        weights: Frozen distance weights; computed from p when omitted

    Returns:
        float64 (nx, ny, nz) gradient estimate
    """
    if not h > 0:
        raise GradientCheckError(f"h must be > 0, got {h}")
    p_array, g_array = prediction_arrays(p, g)
    if p_array.min() < h or p_array.max() > 1.0 - h:
        raise GradientCheckError(
            f"p must lie in [{h}, {1.0 - h}] for h={h}, got [{p_array.min()}, {p_array.max()}]"
        )
    if weights is None:
        weights = spec_distance_weights(spec, p_array, g)

    flat = p_array.reshape(-1)
    gradient = np.empty_like(flat)
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + h
        upper = loss_terms(spec, p_array, g_array, weights)[0]
        flat[i] = original - h
        lower = loss_terms(spec, p_array, g_array, weights)[0]
        flat[i] = original
        gradient[i] = (upper - lower) / (2.0 * h)
    return gradient.reshape(p_array.shape)


@dataclass
class GradientComparison:
    """Analytic vs numeric gradient agreement"""
    max_abs_error: float
    max_rel_error: float
    n_compared: int
    n_excluded: int
    passed: bool


def compare_gradients(
    analytic: np.ndarray,
    numeric: np.ndarray,
    p: np.ndarray,
    h: float = DEFAULT_STEP,
    rel_tol: float = DEFAULT_REL_TOL,
    abs_tol: float = DEFAULT_ABS_TOL
) -> GradientComparison:
    """Max absolute error everywhere, max relative error where |analytic| > abs_tol

    Voxels whose perturbation crosses the focal clamp are excluded.
    """
    near_clamp = np.minimum(p, 1.0 - p) < PT_CLAMP + h
    keep = ~near_clamp
    abs_error = np.abs(analytic - numeric)[keep]
    significant = keep & (np.abs(analytic) > abs_tol)
    rel_error = np.abs(analytic - numeric)[significant] / np.abs(analytic[significant])

    max_abs = float(abs_error.max()) if abs_error.size else 0.0
    max_rel = float(rel_error.max()) if rel_error.size else 0.0
    return GradientComparison(
        max_abs_error=max_abs,
        max_rel_error=max_rel,
        n_compared=int(keep.sum()),
        n_excluded=int(near_clamp.sum()),
        passed=max_abs < abs_tol and max_rel < rel_tol,
    )
