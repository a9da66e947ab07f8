# losses/spec.py
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from config.model_loading import load_model


class LossKind(str, Enum):
    """The six losses of the comparison, in table order"""
    DICE = "Dice"
    DICE_FOCAL = "DiceFocal"
    TVERSKY = "Tversky"
    HAUSDORFF_DT = "HausdorffDT"
    DICE_FOCAL_HAUSDORFF_DT = "DiceFocalHausdorffDT"
    TVERSKY_HAUSDORFF_DT = "TverskyHausdorffDT"

    @property
    def cli_name(self) -> str:
        return _CLI_NAMES[self]

    @property
    def table_label(self) -> str:
        """Row label of the loss-comparison table"""
        return _TABLE_LABELS[self]

    @property
    def is_compound(self) -> bool:
        return self in (LossKind.DICE_FOCAL_HAUSDORFF_DT, LossKind.TVERSKY_HAUSDORFF_DT)

    @property
    def uses_distance_fields(self) -> bool:
        return self is LossKind.HAUSDORFF_DT or self.is_compound

    @classmethod
    def parse(cls, name: str) -> "LossKind":
        """Accept the enum value, the CLI name or the table label"""
        if isinstance(name, cls):
            return name
        key = str(name).strip()
        for kind in cls:
            if key in (kind.value, kind.cli_name, kind.table_label) or key.lower() == kind.value.lower():
                return kind
        choices = ", ".join(k.cli_name for k in cls)
        raise ValueError(f"unknown loss kind {name!r}; expected one of {choices}")


_CLI_NAMES = {
    LossKind.DICE: "dice",
    LossKind.DICE_FOCAL: "dicefocal",
    LossKind.TVERSKY: "tversky",
    LossKind.HAUSDORFF_DT: "hausdorffdt",
    LossKind.DICE_FOCAL_HAUSDORFF_DT: "dicefocal-hausdorffdt",
    LossKind.TVERSKY_HAUSDORFF_DT: "tversky-hausdorffdt",
}

_TABLE_LABELS = {
    LossKind.DICE: "Dice Loss (Baseline)",
    LossKind.DICE_FOCAL: "Dice Focal Loss",
    LossKind.TVERSKY: "Tversky Loss",
    LossKind.HAUSDORFF_DT: "HausdorffDT Loss",
    LossKind.DICE_FOCAL_HAUSDORFF_DT: "DiceFocal-HausdorffDT Loss",
    LossKind.TVERSKY_HAUSDORFF_DT: "Tversky-HausdorffDT Loss",
}


class FocalParams(BaseModel):
    """Focal term; lambda_t holds the (background, foreground) class weights"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    gamma: float = Field(2.0, ge=0.0)
    lambda_t: Tuple[float, float] = (1.0, 1.0)
    alpha_df: float = Field(0.5, ge=0.0, le=1.0)

    @field_validator("lambda_t")
    @classmethod
    def _weights(cls, value):
        if any(w < 0 or not math.isfinite(w) for w in value):
            raise ValueError(f"lambda_t weights must be finite and >= 0, got {value}")
        return value


class TverskyParams(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    alpha_t: float = Field(0.3, ge=0.0)
    beta_t: float = Field(0.7, ge=0.0)


class HausdorffParams(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    alpha_h: float = Field(2.0, ge=0.0)


class CompoundParams(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    alpha_c: float = Field(0.9, ge=0.0)
    beta_c: float = Field(0.1, ge=0.0)


class LossSpec(BaseModel):
    """Loss selection plus every hyperparameter of the family"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: LossKind = LossKind.DICE
    epsilon: float = Field(1e-5, gt=0.0)
    focal: FocalParams = FocalParams()
    tversky: TverskyParams = TverskyParams()
    hausdorff: HausdorffParams = HausdorffParams()
    compound: CompoundParams = CompoundParams()

    @field_validator("kind", mode="before")
    @classmethod
    def _parse_kind(cls, value):
        return LossKind.parse(value)

    @classmethod
    def default(cls, kind) -> "LossSpec":
        return cls(kind=LossKind.parse(kind))


def load_loss_spec(source) -> LossSpec:
    """LossSpec from a dict, JSON string or JSON file path"""
    return load_model(LossSpec, source)


@dataclass
class LossResult:
    """Loss value with its gradient with respect to p

    Attributes:
        value: Scalar loss
        gradient: dL/dp, shaped like the prediction's (nx, ny, nz) grid
        diagnostics: Component values (compound and mixed losses)
        kind: Loss that produced the result, when known
    """
    value: float
    gradient: np.ndarray
    diagnostics: Dict[str, float] = field(default_factory=dict)
    kind: Optional[LossKind] = None

    @property
    def gradient_flat(self) -> np.ndarray:
        """Gradient in x-fastest linear order"""
        return self.gradient.ravel(order="F")

    def to_dict(self) -> Dict[str, object]:
        return {
            "kind": self.kind.value if self.kind else None,
            "value": self.value,
            "diagnostics": dict(self.diagnostics),
            "gradient_max_abs": float(np.abs(self.gradient).max()) if self.gradient.size else 0.0,
        }
