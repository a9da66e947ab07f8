# losses/boundary.py
"""
Boundary-aware losses.

hausdorff_dt_loss is the distance-transform surrogate
mean((p - g)^2 (d_g^a + d_p^a)), with d_g = |signed_edt(g)| and
d_p = |signed_edt(p >= 0.5)|. Infinite distances (empty or full masks) are
replaced by the grid diameter. The distance fields are treated as constants
when differentiating.
"""

from typing import Optional, Tuple

import numpy as np

from distance_transform.transform import signed_edt
from losses.region import prediction_arrays
from losses.spec import LossKind, LossResult
from metrics.scores import hausdorff_distance
from volume.errors import VolumeValueError
from volume.geometry import Geometry
from volume.volume import BinaryMask, ProbVolume, binarize


BINARIZE_THRESHOLD = 0.5


def boundary_distance(mask: BinaryMask) -> np.ndarray:
    """|signed_edt(mask)| with infinities replaced by the grid diameter"""
    return signed_edt(mask).finite_or(mask.geometry.diameter_mm)


def distance_weights(p: np.ndarray, g: BinaryMask, alpha_h: float) -> np.ndarray:
    """Per-voxel weight d_g^alpha_h + d_p^alpha_h at the current prediction

    Args:
        p: Raw (nx, ny, nz) probabilities on g's grid
        g: Ground truth
        alpha_h: Distance exponent

    Returns:
        float64 weight array
    """
    d_g = boundary_distance(g)
    d_p = boundary_distance(binarize(p, BINARIZE_THRESHOLD, g.geometry))
    return d_g ** alpha_h + d_p ** alpha_h


def hausdorff_dt_terms(p: np.ndarray, g: np.ndarray, weights: np.ndarray) -> Tuple[float, np.ndarray]:
    """Value and semi-gradient for fixed distance weights"""
    n = p.size
    diff = p - g
    value = float(np.sum(diff * diff * weights)) / n
    return value, 2.0 * diff * weights / n


def _checked_weights(weights: np.ndarray, geometry: Geometry) -> np.ndarray:
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != geometry.dims:
        raise VolumeValueError(f"distance weights shape {weights.shape} does not match dims {geometry.dims}")
    return weights


def hausdorff_dt_loss(
    p: ProbVolume,
    g: BinaryMask,
    alpha_h: float = 2.0,
    weights: Optional[np.ndarray] = None
) -> LossResult:
    """Distance-transform Hausdorff loss

    Args:
        p: Predicted probabilities
        g: Ground truth
        alpha_h: Distance exponent
        weights: Precomputed d_g^a + d_p^a; recomputed from p when omitted

    Returns:
        LossResult with the semi-gradient 2 (p - g) w / N
    """
    p_array, g_array = prediction_arrays(p, g)
    if weights is None:
        weights = distance_weights(p_array, g, alpha_h)
    value, gradient = hausdorff_dt_terms(p_array, g_array, _checked_weights(weights, g.geometry))
    return LossResult(value, gradient, {"hausdorff_dt": value}, LossKind.HAUSDORFF_DT)


def hausdorff_reciprocal(p_mask: BinaryMask, g: BinaryMask) -> float:
    """1 / (1 + HD) for the symmetric surface Hausdorff distance in mm

    Reported as a diagnostic only. Two empty masks give 1.0, exactly one
    empty mask gives 0.0.
    """
    return 1.0 / (1.0 + hausdorff_distance(p_mask, g))
