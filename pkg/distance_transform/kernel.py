# distance_transform/kernel.py
"""
Separable exact squared Euclidean distance transform.

Lower envelope of parabolas along one axis at a time (Felzenszwalb &
Huttenlocher), with a per-axis voxel spacing. Sites holding +inf carry no
parabola, so an axis line without any finite site stays +inf.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _lower_envelope(f, delta, out, v, z):
    n = f.shape[0]
    k = -1
    for q in range(n):
        if f[q] == np.inf:
            continue
        xq = q * delta
        if k < 0:
            k = 0
            v[0] = q
            z[0] = -np.inf
            z[1] = np.inf
            continue
        xv = v[k] * delta
        s = ((f[q] + xq * xq) - (f[v[k]] + xv * xv)) / (2.0 * (xq - xv))
        while s <= z[k]:
            k -= 1
            xv = v[k] * delta
            s = ((f[q] + xq * xq) - (f[v[k]] + xv * xv)) / (2.0 * (xq - xv))
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = np.inf

    if k < 0:
        for q in range(n):
            out[q] = np.inf
        return

    j = 0
    for q in range(n):
        xq = q * delta
        while z[j + 1] < xq:
            j += 1
        d = xq - v[j] * delta
        out[q] = d * d + f[v[j]]


@njit(cache=True)
def transform_axis0(sq, delta):
    """In-place 1D squared transform along axis 0 of a 3D float64 array"""
    n, m1, m2 = sq.shape
    f = np.empty(n, dtype=np.float64)
    out = np.empty(n, dtype=np.float64)
    v = np.empty(n, dtype=np.int64)
    z = np.empty(n + 1, dtype=np.float64)
    for j in range(m1):
        for k in range(m2):
            for i in range(n):
                f[i] = sq[i, j, k]
            _lower_envelope(f, delta, out, v, z)
            for i in range(n):
                sq[i, j, k] = out[i]


def squared_edt(sites: np.ndarray, spacing) -> np.ndarray:
    """Squared distance (mm^2) from every voxel to the nearest True site

    Args:
        sites: Boolean (nx, ny, nz) array of source voxels
        spacing: (sx, sy, sz) millimeters per voxel

    Returns:
        float64 array, +inf everywhere when there are no sites
    """
    sq = np.where(sites, 0.0, np.inf).astype(np.float64)
    for axis in range(3):
        # moveaxis gives a strided view; the kernel writes through it
        transform_axis0(np.moveaxis(sq, axis, 0), float(spacing[axis]))
    return sq
