# augment/pipeline.py
from typing import Any, Dict, List, Tuple

import numpy as np

from augment.base_transform import BaseTransform
from augment.config import AppliedLog, AugmentConfig
from augment.transforms import random_anisotropy, random_blur, random_elastic, random_gamma, random_noise
from config.logging_config import get_logger
from volume.geometry import require_compatible
from volume.volume import BinaryMask, MultiChannelVolume


logger = get_logger(__name__)


class NoiseTransform(BaseTransform):
    def __init__(self):
        super().__init__("noise", "Gaussian scanner noise")

    def enabled(self, cfg: AugmentConfig) -> bool:
        return cfg.enable_noise

    def draw(self, cfg, rng, x) -> Dict[str, Any]:
        # one sub-seed so every channel gets the same noise field
        return {"std": cfg.noise_std, "noise_seed": int(rng.integers(0, 2 ** 63 - 1))}

    def apply(self, x, label, params, cfg, rng):
        return x.map_channels(
            lambda c: random_noise(c, params["std"], np.random.default_rng(params["noise_seed"]))
        ), label


class AnisotropyTransform(BaseTransform):
    def __init__(self):
        super().__init__("anisotropy", "Thick-slice downsampling along one axis")

    def enabled(self, cfg: AugmentConfig) -> bool:
        return cfg.enable_anisotropy

    def draw(self, cfg, rng, x) -> Dict[str, Any]:
        low, high = cfg.aniso_range
        return {"factor": float(rng.uniform(low, high)), "axis": int(rng.integers(0, 3))}

    def apply(self, x, label, params, cfg, rng):
        # intensity only: the label keeps its grid
        return x.map_channels(lambda c: random_anisotropy(c, params["factor"], params["axis"])), label


class BlurTransform(BaseTransform):
    def __init__(self):
        super().__init__("blur", "Gaussian blur, std in voxels")

    def enabled(self, cfg: AugmentConfig) -> bool:
        return cfg.enable_blur

    def draw(self, cfg, rng, x) -> Dict[str, Any]:
        low, high = cfg.blur_std_range
        return {"std_voxels": float(rng.uniform(low, high))}

    def apply(self, x, label, params, cfg, rng):
        return x.map_channels(lambda c: random_blur(c, params["std_voxels"])), label


class GammaTransform(BaseTransform):
    def __init__(self):
        super().__init__("gamma", "Contrast change by a random gamma exponent")

    def enabled(self, cfg: AugmentConfig) -> bool:
        return cfg.enable_gamma

    def draw(self, cfg, rng, x) -> Dict[str, Any]:
        low, high = cfg.log_gamma_range
        return {"log_gamma": float(rng.uniform(low, high))}

    def apply(self, x, label, params, cfg, rng):
        return x.map_channels(lambda c: random_gamma(c, params["log_gamma"])), label


class ElasticTransform(BaseTransform):
    def __init__(self):
        super().__init__("elastic", "Smooth soft-tissue deformation")

    def enabled(self, cfg: AugmentConfig) -> bool:
        return cfg.enable_elastic

    def draw(self, cfg, rng, x) -> Dict[str, Any]:
        return {
            "grid_dims": list(cfg.elastic.grid_dims),
            "max_displacement_mm": cfg.elastic.max_displacement_mm,
            "field_seed": int(rng.integers(0, 2 ** 63 - 1)),
        }

    def apply(self, x, label, params, cfg, rng):
        return random_elastic(x, label, cfg.elastic, np.random.default_rng(params["field_seed"]))


def default_transforms() -> List[BaseTransform]:
    """The five transforms in application order"""
    return [NoiseTransform(), AnisotropyTransform(), BlurTransform(), GammaTransform(), ElasticTransform()]


def augment_case(
    x: MultiChannelVolume,
    label: BinaryMask,
    cfg: AugmentConfig
) -> Tuple[MultiChannelVolume, BinaryMask, AppliedLog]:
    """Apply the training-time augmentations to one case

    Transforms run in the order noise, anisotropy, blur, gamma, elastic; each
    fires with cfg.apply_probability. Draws are shared across channels.

    Args:
        x: Multi-channel input
        label: Ground-truth mask on the same grid
        cfg: Augmentation hyperparameters and seed

    Returns:
        (augmented input, augmented label, log of every draw)
    """
    require_compatible(x.geometry, label.geometry, "input and label")
    rng = np.random.default_rng(cfg.seed)
    log = AppliedLog(seed=cfg.seed)

    for transform in default_transforms():
        x, label = transform.process(x, label, cfg, rng, log)

    logger.info("case_augmented", seed=cfg.seed, applied=log.applied_names)
    return x, label, log
