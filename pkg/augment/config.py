# augment/config.py
import json
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from config.model_loading import load_model, validate_range


class ElasticParams(BaseModel):
    """Coarse random displacement grid for the elastic transform"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    grid_dims: Tuple[int, int, int] = (7, 7, 7)
    max_displacement_mm: float = Field(4.0, ge=0.0)

    @field_validator("grid_dims")
    @classmethod
    def _positive_grid(cls, value):
        if any(n < 1 for n in value):
            raise ValueError(f"grid_dims must be >= 1 per axis, got {value}")
        return value


class AugmentConfig(BaseModel):
    """Hyperparameters of the five training-time transforms

    Blur standard deviations are in voxels; anisotropy factors are
    downsampling ratios along one randomly chosen axis.
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    seed: int = Field(0, ge=0, le=2 ** 64 - 1)
    enable_noise: bool = True
    enable_anisotropy: bool = True
    enable_blur: bool = True
    enable_gamma: bool = True
    enable_elastic: bool = True
    noise_std: float = Field(0.01, ge=0.0)
    aniso_range: Tuple[float, float] = (1.2, 2.0)
    blur_std_range: Tuple[float, float] = (0.0, 0.5)
    log_gamma_range: Tuple[float, float] = (-0.1, 0.1)
    elastic: ElasticParams = ElasticParams()
    apply_probability: float = Field(0.5, ge=0.0, le=1.0)

    @field_validator("aniso_range")
    @classmethod
    def _aniso(cls, value):
        return validate_range(value, "aniso_range", low_bound=1.0)

    @field_validator("blur_std_range")
    @classmethod
    def _blur(cls, value):
        return validate_range(value, "blur_std_range", low_bound=0.0)

    @field_validator("log_gamma_range")
    @classmethod
    def _gamma(cls, value):
        return validate_range(value, "log_gamma_range")

    @classmethod
    def disabled(cls, seed: int = 0) -> "AugmentConfig":
        return cls(seed=seed, enable_noise=False, enable_anisotropy=False, enable_blur=False,
                   enable_gamma=False, enable_elastic=False)


def load_augment_config(source) -> AugmentConfig:
    """AugmentConfig from a dict, JSON string or JSON file path"""
    return load_model(AugmentConfig, source)


@dataclass
class TransformRecord:
    """One transform's random draw"""
    name: str
    applied: bool
    params: Dict[str, Any] = field(default_factory=dict)


@dataclass
class AppliedLog:
    """Provenance of one augment_case call, in application order"""
    seed: int
    records: List[TransformRecord] = field(default_factory=list)

    def record(self, name: str, applied: bool, **params) -> None:
        self.records.append(TransformRecord(name, applied, params))

    @property
    def applied_names(self) -> List[str]:
        return [r.name for r in self.records if r.applied]

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)
