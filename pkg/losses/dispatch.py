# losses/dispatch.py
from typing import Dict, Optional, Tuple

import numpy as np

from losses.boundary import distance_weights, hausdorff_dt_terms
from losses.compound import compound_terms
from losses.focal import dice_focal_terms
from losses.region import dice_terms, prediction_arrays, tversky_terms
from losses.spec import LossKind, LossResult, LossSpec
from volume.errors import ConfigError
from volume.volume import BinaryMask, ProbVolume


def spec_distance_weights(spec: LossSpec, p: np.ndarray, g: BinaryMask) -> Optional[np.ndarray]:
    """Distance weights the LossSpec needs at prediction p, or None"""
    if not spec.kind.uses_distance_fields:
        return None
    return distance_weights(p, g, spec.hausdorff.alpha_h)


def loss_terms(
    spec: LossSpec,
    p: np.ndarray,
    g: np.ndarray,
    weights: Optional[np.ndarray] = None
) -> Tuple[float, np.ndarray, Dict[str, float]]:
    """Array-level dispatch: (value, dL/dp, diagnostics)

    Distance-based kinds need `weights` (see spec_distance_weights).
    """
    kind = spec.kind
    if kind is LossKind.DICE:
        value, gradient = dice_terms(p, g, spec.epsilon)
        return value, gradient, {"dice": value}
    if kind is LossKind.DICE_FOCAL:
        return dice_focal_terms(p, g, spec)
    if kind is LossKind.TVERSKY:
        value, gradient = tversky_terms(p, g, spec.tversky.alpha_t, spec.tversky.beta_t, spec.epsilon)
        return value, gradient, {"tversky": value}

    if weights is None:
        raise ConfigError(f"{kind.value} needs distance weights")
    if kind is LossKind.HAUSDORFF_DT:
        value, gradient = hausdorff_dt_terms(p, g, weights)
        return value, gradient, {"hausdorff_dt": value}
    if kind.is_compound:
        return compound_terms(p, g, spec, weights)
    raise ConfigError(f"unknown loss kind {kind!r}")


def evaluate_loss(
    spec: LossSpec,
    p: ProbVolume,
    g: BinaryMask,
    weights: Optional[np.ndarray] = None
) -> LossResult:
    """Evaluate the loss selected by spec.kind with spec's hyperparameters

    Args:
        spec: Loss selection and hyperparameters
        p: Predicted probabilities
        g: Ground truth on the same grid
        weights: Frozen distance weights for distance-based kinds;
            computed from p when omitted

    Returns:
        LossResult
    """
    p_array, g_array = prediction_arrays(p, g)
    if weights is None:
        weights = spec_distance_weights(spec, p_array, g)
    value, gradient, diagnostics = loss_terms(spec, p_array, g_array, weights)
    return LossResult(value, gradient, diagnostics, spec.kind)
