# losses/compound.py
import math
from typing import Dict, Optional, Tuple

import numpy as np

from losses.boundary import distance_weights, hausdorff_dt_terms
from losses.focal import dice_focal_terms
from losses.region import prediction_arrays, tversky_terms
from losses.spec import LossKind, LossResult, LossSpec
from volume.errors import ConfigError
from volume.volume import BinaryMask, ProbVolume


def base_terms(p: np.ndarray, g: np.ndarray, spec: LossSpec) -> Tuple[float, np.ndarray, Dict[str, float]]:
    """Region term of a compound loss: DiceFocal or Tversky"""
    if spec.kind is LossKind.DICE_FOCAL_HAUSDORFF_DT:
        return dice_focal_terms(p, g, spec)
    if spec.kind is LossKind.TVERSKY_HAUSDORFF_DT:
        value, gradient = tversky_terms(p, g, spec.tversky.alpha_t, spec.tversky.beta_t, spec.epsilon)
        return value, gradient, {"tversky": value}
    raise ConfigError(f"{spec.kind.value} is not a compound loss")


def compound_terms(
    p: np.ndarray,
    g: np.ndarray,
    spec: LossSpec,
    weights: np.ndarray
) -> Tuple[float, np.ndarray, Dict[str, float]]:
    """alpha_c base + beta_c log(1 + HDT) with fixed distance weights"""
    alpha_c, beta_c = spec.compound.alpha_c, spec.compound.beta_c
    base_value, base_gradient, diagnostics = base_terms(p, g, spec)
    hdt_value, hdt_gradient = hausdorff_dt_terms(p, g, weights)

    value = alpha_c * base_value + beta_c * math.log1p(hdt_value)
    gradient = alpha_c * base_gradient + (beta_c / (1.0 + hdt_value)) * hdt_gradient
    return value, gradient, {**diagnostics, "base": base_value, "hausdorff_dt": hdt_value}


def compound_loss(
    p: ProbVolume,
    g: BinaryMask,
    spec: LossSpec,
    weights: Optional[np.ndarray] = None
) -> LossResult:
    """DiceFocal- or Tversky-HausdorffDT compound loss

    Args:
        p: Predicted probabilities
        g: Ground truth
        spec: Compound LossSpec selecting the base term
        weights: Precomputed distance weights; recomputed from p when omitted

    Returns:
        LossResult whose diagnostics hold "base" and "hausdorff_dt"
    """
    p_array, g_array = prediction_arrays(p, g)
    if weights is None:
        weights = distance_weights(p_array, g, spec.hausdorff.alpha_h)
    value, gradient, diagnostics = compound_terms(p_array, g_array, spec, weights)
    return LossResult(value, gradient, diagnostics, spec.kind)


def reconstruct_compound(diagnostics: Dict[str, float], spec: LossSpec) -> float:
    """Recompute a compound value from its diagnostics"""
    return spec.compound.alpha_c * diagnostics["base"] + spec.compound.beta_c * math.log1p(diagnostics["hausdorff_dt"])
