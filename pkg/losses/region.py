# losses/region.py
"""
Region-based losses: soft Dice and soft Tversky.

The *_terms functions work on raw float64 arrays and return
(value, dL/dp); the public operations validate volumes and wrap the result.
"""

from typing import Tuple

import numpy as np

from losses.spec import LossKind, LossResult
from volume.geometry import require_compatible
from volume.volume import BinaryMask, ProbVolume


def prediction_arrays(p: ProbVolume, g: BinaryMask) -> Tuple[np.ndarray, np.ndarray]:
    """float64 (p, g) arrays after checking both live on the same grid"""
    require_compatible(p.geometry, g.geometry, "prediction and truth")
    return p.array.astype(np.float64), g.array.astype(np.float64)


def dice_terms(p: np.ndarray, g: np.ndarray, eps: float) -> Tuple[float, np.ndarray]:
    """L = 1 - (2 sum(p g) + eps) / (sum(p) + sum(g) + eps)"""
    intersection = float(np.sum(p * g))
    denominator = float(np.sum(p) + np.sum(g)) + eps
    numerator = 2.0 * intersection + eps
    value = 1.0 - numerator / denominator
    gradient = -(2.0 * g * denominator - numerator) / denominator ** 2
    return value, gradient


def tversky_terms(p: np.ndarray, g: np.ndarray, alpha_t: float, beta_t: float, eps: float) -> Tuple[float, np.ndarray]:
    """L = 1 - (2TP + eps) / (2TP + 2 alpha FP + 2 beta FN + eps)

    Smoothing sits on the doubled ratio, so alpha = beta = 0.5 is the soft
    Dice loss term for term.
    """
    tp = float(np.sum(p * g))
    fp = float(np.sum(p * (1.0 - g)))
    fn = float(np.sum((1.0 - p) * g))
    numerator = 2.0 * tp + eps
    denominator = 2.0 * tp + 2.0 * alpha_t * fp + 2.0 * beta_t * fn + eps
    value = 1.0 - numerator / denominator

    d_numerator = 2.0 * g
    d_denominator = 2.0 * g + 2.0 * alpha_t * (1.0 - g) - 2.0 * beta_t * g
    gradient = -(d_numerator * denominator - numerator * d_denominator) / denominator ** 2
    return value, gradient


def dice_loss(p: ProbVolume, g: BinaryMask, eps: float = 1e-5) -> LossResult:
    """Soft Dice loss

    Args:
        p: Predicted probabilities
        g: Ground truth
        eps: Smoothing added to numerator and denominator

    Returns:
        LossResult with dL/dp
    """
    value, gradient = dice_terms(*prediction_arrays(p, g), eps)
    return LossResult(value, gradient, {"dice": value}, LossKind.DICE)


def tversky_loss(
    p: ProbVolume,
    g: BinaryMask,
    alpha_t: float = 0.3,
    beta_t: float = 0.7,
    eps: float = 1e-5
) -> LossResult:
    """Soft Tversky loss; alpha_t weights false positives, beta_t false negatives"""
    value, gradient = tversky_terms(*prediction_arrays(p, g), alpha_t, beta_t, eps)
    return LossResult(value, gradient, {"tversky": value}, LossKind.TVERSKY)
