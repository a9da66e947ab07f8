# preproc/normalize.py
import numpy as np

from volume.volume import ScalarVolume


STD_FLOOR = 1e-8


def znormalize(v: ScalarVolume) -> ScalarVolume:
    """Zero-mean, unit-variance intensities over all voxels of one channel

    Statistics include background voxels and use the population standard
    deviation (divisor N). A constant volume maps to all zeros.
    """
    values = v.array.astype(np.float64)
    mean = values.mean()
    std = values.std()
    return v.with_array(((values - mean) / max(std, STD_FLOOR)).astype(np.float32))
