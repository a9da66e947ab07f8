# losses/focal.py
from typing import Sequence, Tuple

import numpy as np

from losses.region import dice_terms, prediction_arrays
from losses.spec import LossKind, LossResult, LossSpec
from volume.volume import BinaryMask, ProbVolume


PT_CLAMP = 1e-7


def focal_terms(
    p: np.ndarray,
    g: np.ndarray,
    gamma: float,
    lambda_t: Sequence[float]
) -> Tuple[float, np.ndarray]:
    """Voxel-mean focal loss -lambda_t (1 - p_t)^gamma log(p_t)

    p_t is p on the foreground and 1 - p elsewhere, clamped to
    [1e-7, 1 - 1e-7]; clamped voxels get zero gradient.
    """
    n = p.size
    foreground = g > 0.5
    weights = np.where(foreground, lambda_t[1], lambda_t[0])
    raw_pt = np.where(foreground, p, 1.0 - p)
    pt = np.clip(raw_pt, PT_CLAMP, 1.0 - PT_CLAMP)
    log_pt = np.log(pt)
    one_minus = 1.0 - pt

    value = float(np.sum(-weights * one_minus ** gamma * log_pt)) / n

    # d/dp_t of -(1 - p_t)^gamma log p_t
    if gamma == 0:
        d_pt = -1.0 / pt
    else:
        d_pt = gamma * one_minus ** (gamma - 1.0) * log_pt - one_minus ** gamma / pt
    unclamped = (raw_pt > PT_CLAMP) & (raw_pt < 1.0 - PT_CLAMP)
    sign = np.where(foreground, 1.0, -1.0)
    gradient = np.where(unclamped, weights * d_pt * sign, 0.0) / n
    return value, gradient


def focal_loss(
    p: ProbVolume,
    g: BinaryMask,
    gamma: float = 2.0,
    lambda_t: Sequence[float] = (1.0, 1.0)
) -> LossResult:
    """Focal loss, averaged over all voxels

    Args:
        p: Predicted probabilities
        g: Ground truth
        gamma: Focusing exponent (0 gives binary cross-entropy)
        lambda_t: (background, foreground) class weights

    Returns:
        LossResult with dL/dp
    """
    value, gradient = focal_terms(*prediction_arrays(p, g), gamma, lambda_t)
    return LossResult(value, gradient, {"focal": value})


def dice_focal_terms(p: np.ndarray, g: np.ndarray, spec: LossSpec):
    alpha_df = spec.focal.alpha_df
    dice_value, dice_gradient = dice_terms(p, g, spec.epsilon)
    focal_value, focal_gradient = focal_terms(p, g, spec.focal.gamma, spec.focal.lambda_t)
    value = (1.0 - alpha_df) * dice_value + alpha_df * focal_value
    gradient = (1.0 - alpha_df) * dice_gradient + alpha_df * focal_gradient
    return value, gradient, {"dice": dice_value, "focal": focal_value}


def dice_focal_loss(p: ProbVolume, g: BinaryMask, spec: LossSpec) -> LossResult:
    """(1 - alpha_df) Dice + alpha_df Focal, with both components in diagnostics"""
    value, gradient, diagnostics = dice_focal_terms(*prediction_arrays(p, g), spec)
    return LossResult(value, gradient, diagnostics, LossKind.DICE_FOCAL)
