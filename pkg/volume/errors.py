# volume/errors.py
"""Exception hierarchy shared by every package of the loss bench."""


class LossBenchError(Exception):
    """Base class for all loss bench errors"""


class GeometryError(LossBenchError, ValueError):
    """Invalid or incompatible voxel-grid geometry"""


class VolumeValueError(LossBenchError, ValueError):
    """Voxel values outside what the volume type allows"""


class ConfigError(LossBenchError, ValueError):
    """Invalid loss, augmentation or descent configuration"""


class MhaFormatError(LossBenchError, ValueError):
    """Malformed MetaImage header or payload"""


class PairingError(LossBenchError):
    """Prediction and ground-truth files cannot be paired"""


class GradientCheckError(LossBenchError, ValueError):
    """Finite-difference preconditions violated"""


class DescentDivergedError(LossBenchError, FloatingPointError):
    """Non-finite loss or gradient during the descent demo"""

    def __init__(self, step: int, message: str):
        super().__init__(f"step {step}: {message}")
        self.step = step
