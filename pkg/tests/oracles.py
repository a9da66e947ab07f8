# tests/oracles.py
"""
Brute-force reference implementations used as test oracles.

Everything here is quadratic and written without the library's distance
transform, surface extraction or resampling code.
"""

import itertools
from typing import Sequence

import numpy as np


NEIGHBOURS = ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1))


def pairwise_min_distance(points: np.ndarray, sites: np.ndarray, spacing: Sequence[float],
                          chunk: int = 256) -> np.ndarray:
    """Distance (mm) of each point to its nearest site; +inf with no sites"""
    if len(sites) == 0:
        return np.full(len(points), np.inf)
    scale = np.asarray(spacing, dtype=np.float64)
    out = np.empty(len(points))
    for start in range(0, len(points), chunk):
        diff = (points[start:start + chunk, None, :] - sites[None, :, :]) * scale
        out[start:start + chunk] = np.sqrt((diff ** 2).sum(axis=2)).min(axis=1)
    return out


def brute_edt(sites: np.ndarray, spacing: Sequence[float]) -> np.ndarray:
    """Distance from every voxel to the nearest True voxel of `sites`"""
    sites = np.asarray(sites, dtype=bool)
    every = np.argwhere(np.ones(sites.shape, dtype=bool))
    distances = pairwise_min_distance(every, np.argwhere(sites), spacing)
    return distances.reshape(sites.shape)


def brute_surface(mask: np.ndarray, outside_is_background: bool = True) -> np.ndarray:
    """Foreground voxels with a 6-neighbour in the background"""
    mask = np.asarray(mask, dtype=bool)
    out = np.zeros_like(mask)
    for x, y, z in itertools.product(*(range(n) for n in mask.shape)):
        if not mask[x, y, z]:
            continue
        for dx, dy, dz in NEIGHBOURS:
            nx, ny, nz = x + dx, y + dy, z + dz
            inside = 0 <= nx < mask.shape[0] and 0 <= ny < mask.shape[1] and 0 <= nz < mask.shape[2]
            if not inside:
                if outside_is_background:
                    out[x, y, z] = True
                    break
                continue
            if not mask[nx, ny, nz]:
                out[x, y, z] = True
                break
    return out


def brute_boundary_distance(mask: np.ndarray, spacing: Sequence[float], diameter: float) -> np.ndarray:
    """|signed distance| to the in-grid boundary, infinities replaced by `diameter`"""
    boundary = brute_surface(mask, outside_is_background=False)
    if not boundary.any():
        return np.full(mask.shape, diameter)
    return brute_edt(boundary, spacing)


def directed_surface_distances(source: np.ndarray, target: np.ndarray, spacing: Sequence[float]) -> np.ndarray:
    """Distance of each surface voxel of `source` to the surface of `target`"""
    return pairwise_min_distance(
        np.argwhere(brute_surface(source)), np.argwhere(brute_surface(target)), spacing
    )


def brute_msd(p: np.ndarray, q: np.ndarray, spacing: Sequence[float]) -> float:
    p_to_q = directed_surface_distances(p, q, spacing)
    q_to_p = directed_surface_distances(q, p, spacing)
    return 0.5 * (p_to_q.mean() + q_to_p.mean())


def brute_nsd(p: np.ndarray, q: np.ndarray, spacing: Sequence[float], tau: float) -> float:
    p_to_q = directed_surface_distances(p, q, spacing)
    q_to_p = directed_surface_distances(q, p, spacing)
    within = np.count_nonzero(p_to_q <= tau + 1e-9) + np.count_nonzero(q_to_p <= tau + 1e-9)
    return within / (len(p_to_q) + len(q_to_p))


def brute_dice(p: np.ndarray, q: np.ndarray) -> float:
    p, q = np.asarray(p, dtype=bool), np.asarray(q, dtype=bool)
    return 2.0 * np.count_nonzero(p & q) / (np.count_nonzero(p) + np.count_nonzero(q))


def ball_count(radius: int) -> int:
    """Integer points with x^2 + y^2 + z^2 <= radius^2"""
    r = int(radius)
    return sum(
        1
        for x, y, z in itertools.product(range(-r, r + 1), repeat=3)
        if x * x + y * y + z * z <= r * r
    )
