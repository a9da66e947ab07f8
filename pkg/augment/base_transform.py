# augment/base_transform.py
from abc import ABC, abstractmethod
from typing import Any, Dict, Tuple

import numpy as np

from augment.config import AppliedLog, AugmentConfig
from config.logging_config import get_logger
from volume.volume import BinaryMask, MultiChannelVolume


logger = get_logger(__name__)


class BaseTransform(ABC):
    """Base class for the training-time transforms of augment_case"""

    def __init__(self, name: str, description: str):
        """Initialize base transform

        Args:
            name: Name recorded in the AppliedLog
            description: What the transform simulates
        """
        self.name = name
        self.description = description

    @abstractmethod
    def enabled(self, cfg: AugmentConfig) -> bool:
        """Return whether the config switches this transform on"""
        pass

    @abstractmethod
    def draw(self, cfg: AugmentConfig, rng: np.random.Generator, x: MultiChannelVolume) -> Dict[str, Any]:
        """Draw this transform's parameters"""
        pass

    @abstractmethod
    def apply(
        self,
        x: MultiChannelVolume,
        label: BinaryMask,
        params: Dict[str, Any],
        cfg: AugmentConfig,
        rng: np.random.Generator
    ) -> Tuple[MultiChannelVolume, BinaryMask]:
        """Apply the transform with drawn parameters"""
        pass

    def process(
        self,
        x: MultiChannelVolume,
        label: BinaryMask,
        cfg: AugmentConfig,
        rng: np.random.Generator,
        log: AppliedLog
    ) -> Tuple[MultiChannelVolume, BinaryMask]:
        """Decide, draw, apply and record one transform

        Disabled transforms consume no random numbers.
        """
        if not self.enabled(cfg):
            log.record(self.name, False, reason="disabled")
            return x, label

        if rng.random() >= cfg.apply_probability:
            log.record(self.name, False, reason="not drawn")
            return x, label

        params = self.draw(cfg, rng, x)
        x, label = self.apply(x, label, params, cfg, rng)
        log.record(self.name, True, **params)
        logger.debug("transform_applied", transform=self.name, **params)
        return x, label

    def __str__(self) -> str:
        return f"{self.name}: {self.description}"
