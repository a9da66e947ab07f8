# optimdemo/descent.py
"""
Gradient descent on a logit volume toward a fixed target mask.

p = logistic(logits); the loss gradient dL/dp is chained through the
logistic derivative and scaled by the voxel count, so every loss is
optimized with a per-voxel (sum-reduced) gradient. The update is then
globally rescaled to clip_max_norm.
"""

from dataclasses import asdict, dataclass, field
from typing import List, Literal, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import expit

from config.logging_config import TRACE_LOGGER_NAME, get_logger
from config.model_loading import load_model
from losses.dispatch import loss_terms, spec_distance_weights
from losses.spec import LossKind, LossSpec
from metrics.scores import dice_coefficient, mean_surface_distance, normalized_surface_dice
from volume.errors import DescentDivergedError
from volume.volume import BinaryMask, ProbVolume, binarize


logger = get_logger(__name__)
trace_logger = get_logger(TRACE_LOGGER_NAME)

INIT_LOGIT_STD = 0.1
DEFAULT_STEP_SIZE = 0.5
# squared-distance weights put most of a unit-norm update on voxels far from
# the boundary, so the pure distance loss needs a longer step to close it
KIND_STEP_SIZES = {LossKind.HAUSDORFF_DT: 2.0}


def default_step_size(kind: LossKind) -> float:
    return KIND_STEP_SIZES.get(LossKind(kind), DEFAULT_STEP_SIZE)


class DescentConfig(BaseModel):
    """Descent hyperparameters

    rescale="clip" rescales only gradients whose norm exceeds clip_max_norm;
    "normalize" rescales every nonzero gradient to clip_max_norm.
    step_size=None means the loss kind's default (see default_step_size).
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    loss: LossSpec = LossSpec()
    steps: int = Field(300, ge=1)
    step_size: Optional[float] = Field(None, gt=0.0)
    clip_max_norm: float = Field(1.0, gt=0.0)
    rescale: Literal["normalize", "clip"] = "normalize"
    seed: int = Field(1, ge=0)
    log_every: int = Field(10, ge=1)
    tau_mm: float = Field(1.0, gt=0.0)

    @property
    def effective_step_size(self) -> float:
        if self.step_size is not None:
            return self.step_size
        return default_step_size(self.loss.kind)


def load_descent_config(source) -> DescentConfig:
    return load_model(DescentConfig, source)


@dataclass
class TrajectoryPoint:
    step: int
    loss: float
    dice: float
    msd_mm: float
    nsd: float
    grad_norm: float
    raw_grad_norm: float
    false_negatives: int
    false_positives: int


@dataclass
class DescentResult:
    """Recorded trajectory plus the final prediction"""
    config: DescentConfig
    trajectory: List[TrajectoryPoint] = field(default_factory=list)
    final_probabilities: Optional[ProbVolume] = None

    @property
    def final_mask(self) -> BinaryMask:
        return binarize(self.final_probabilities)

    @property
    def final(self) -> TrajectoryPoint:
        return self.trajectory[-1]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(point) for point in self.trajectory])


def rescale_gradient(gradient: np.ndarray, cfg: DescentConfig) -> Tuple[np.ndarray, float, float]:
    """(update direction, applied norm, raw norm)"""
    raw_norm = float(np.linalg.norm(gradient))
    if raw_norm == 0.0:
        return gradient, 0.0, 0.0
    if cfg.rescale == "normalize" or raw_norm > cfg.clip_max_norm:
        scaled = gradient * (cfg.clip_max_norm / raw_norm)
        return scaled, float(np.linalg.norm(scaled)), raw_norm
    return gradient, raw_norm, raw_norm


def logit_gradient(cfg: DescentConfig, logits: np.ndarray, target: BinaryMask, g: np.ndarray):
    """(p, loss value, N * dL/dlogits) at the current logits"""
    p = expit(logits)
    weights = spec_distance_weights(cfg.loss, p, target)
    value, grad_p, _ = loss_terms(cfg.loss, p, g, weights)
    return p, value, grad_p * p * (1.0 - p) * p.size


def _record(step: int, value: float, p: np.ndarray, target: BinaryMask, applied: float, raw: float,
            tau_mm: float) -> TrajectoryPoint:
    prediction = binarize(p, geometry=target.geometry)
    predicted, truth = prediction.foreground, target.foreground
    return TrajectoryPoint(
        step=step,
        loss=value,
        dice=dice_coefficient(prediction, target),
        msd_mm=mean_surface_distance(prediction, target),
        nsd=normalized_surface_dice(prediction, target, tau_mm),
        grad_norm=applied,
        raw_grad_norm=raw,
        false_negatives=int(np.count_nonzero(truth & ~predicted)),
        false_positives=int(np.count_nonzero(predicted & ~truth)),
    )


def run_descent(target: BinaryMask, cfg: DescentConfig) -> DescentResult:
    """Optimize a logit volume so that logistic(logits) matches target

    Metrics of the binarized prediction are recorded at step 0, every
    log_every steps and after the final update (step == cfg.steps).

    Args:
        target: Target mask
        cfg: Descent configuration

    Returns:
        DescentResult

    Raises:
        DescentDivergedError: When the loss or gradient stops being finite
    """
    rng = np.random.default_rng(cfg.seed)
    logits = rng.normal(0.0, INIT_LOGIT_STD, size=target.dims)
    g = target.array.astype(np.float64)
    result = DescentResult(config=cfg)
    step_size = cfg.effective_step_size

    logger.info("descent_started", kind=cfg.loss.kind.value, steps=cfg.steps, step_size=step_size,
                rescale=cfg.rescale, dims=target.dims)

    for step in range(cfg.steps + 1):
        p, value, gradient = logit_gradient(cfg, logits, target, g)
        if not np.isfinite(value):
            raise DescentDivergedError(step, f"non-finite loss {value}")
        if not np.all(np.isfinite(gradient)):
            raise DescentDivergedError(step, "non-finite gradient")
        update, applied_norm, raw_norm = rescale_gradient(gradient, cfg)

        if step % cfg.log_every == 0 or step == cfg.steps:
            point = _record(step, value, p, target, applied_norm, raw_norm, cfg.tau_mm)
            result.trajectory.append(point)
            trace_logger.info(
                f"{cfg.loss.kind.value} step={step} loss={value:.6g} dice={point.dice:.4f} "
                f"msd={point.msd_mm:.4f} nsd={point.nsd:.4f} grad_norm={applied_norm:.4g}"
            )

        if step < cfg.steps:
            logits = logits - step_size * update

    result.final_probabilities = ProbVolume(target.geometry, expit(logits))
    logger.info("descent_finished", kind=cfg.loss.kind.value, final_loss=result.final.loss,
                final_dice=result.final.dice)
    return result
