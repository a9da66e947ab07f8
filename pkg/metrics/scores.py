# metrics/scores.py
"""
Overlap and surface-distance scores on binary masks.

Empty-mask conventions: dice of two empty masks is 1; surface distances
involving exactly one empty surface are +inf; NSD is 1 when both surfaces
are empty and 0 when exactly one is.
"""

import math
from typing import Tuple

import numpy as np

from metrics.surface import SurfaceSet, extract_surface
from volume.errors import ConfigError
from volume.geometry import require_compatible
from volume.volume import BinaryMask, foreground_count


NSD_SLACK_MM = 1e-9


def _surfaces(p: BinaryMask, q: BinaryMask) -> Tuple[SurfaceSet, SurfaceSet]:
    require_compatible(p.geometry, q.geometry, "masks")
    return extract_surface(p), extract_surface(q)


def dice_coefficient(p: BinaryMask, q: BinaryMask) -> float:
    """2|p & q| / (|p| + |q|); 1.0 when both are empty"""
    require_compatible(p.geometry, q.geometry, "masks")
    total = foreground_count(p) + foreground_count(q)
    if total == 0:
        return 1.0
    overlap = int(np.count_nonzero(p.foreground & q.foreground))
    return 2.0 * overlap / total


def mean_surface_distance(p: BinaryMask, q: BinaryMask) -> float:
    """Symmetric mean surface distance in mm

    Each directed mean is normalized by its own source surface size.

    Args:
        p: First mask
        q: Second mask on the same grid

    Returns:
        Distance in mm; +inf when exactly one surface is empty, 0 when both are
    """
    surface_p, surface_q = _surfaces(p, q)
    if surface_p.is_empty and surface_q.is_empty:
        return 0.0
    if surface_p.is_empty or surface_q.is_empty:
        return math.inf
    q_to_p = surface_p.distances_from(surface_q)
    p_to_q = surface_q.distances_from(surface_p)
    return 0.5 * (float(q_to_p.mean()) + float(p_to_q.mean()))


def normalized_surface_dice(p: BinaryMask, q: BinaryMask, tau_mm: float = 1.0) -> float:
    """Fraction of both surfaces lying within tau_mm of the other surface"""
    if not tau_mm > 0:
        raise ConfigError(f"tau_mm must be > 0, got {tau_mm}")
    surface_p, surface_q = _surfaces(p, q)
    if surface_p.is_empty and surface_q.is_empty:
        return 1.0
    if surface_p.is_empty or surface_q.is_empty:
        return 0.0
    limit = tau_mm + NSD_SLACK_MM
    q_to_p = surface_p.distances_from(surface_q)
    p_to_q = surface_q.distances_from(surface_p)
    within = int(np.count_nonzero(q_to_p <= limit)) + int(np.count_nonzero(p_to_q <= limit))
    return within / (q_to_p.size + p_to_q.size)


def hausdorff_distance(p: BinaryMask, q: BinaryMask, percentile: float = 100.0) -> float:
    """Symmetric voxel-surface Hausdorff distance in mm

    percentile < 100 takes that percentile of the pooled directed
    distances (95 gives HD95); 100 is the maximum of both directed maxima.
    Both surfaces empty gives 0, exactly one gives +inf.
    """
    if not 0 < percentile <= 100:
        raise ConfigError(f"percentile must be in (0, 100], got {percentile}")
    surface_p, surface_q = _surfaces(p, q)
    if surface_p.is_empty and surface_q.is_empty:
        return 0.0
    if surface_p.is_empty or surface_q.is_empty:
        return math.inf
    pooled = np.concatenate([surface_p.distances_from(surface_q), surface_q.distances_from(surface_p)])
    if percentile == 100:
        return float(pooled.max())
    return float(np.percentile(pooled, percentile))
