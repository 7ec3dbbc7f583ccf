"""Batched convex clipping, compiled with numba."""
import numpy as np
from numba import config, njit, prange

# the bundled TBB is too old; avoid the probe warning
config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

_EPS = 1e-12


@njit(cache=True)
def _clip_area(bx, by, nb, hx, hy, hc, nh, sx, sy, bufx, bufy, tmpx, tmpy):
    m = nb
    for i in range(m):
        bufx[i] = bx[i]
        bufy[i] = by[i]
    for k in range(nh):
        nx = hx[k]
        ny = hy[k]
        c = hc[k] + nx * sx + ny * sy
        out = 0
        for i in range(m):
            j = i + 1
            if j == m:
                j = 0
            px = bufx[i]
            py = bufy[i]
            qx = bufx[j]
            qy = bufy[j]
            dp = nx * px + ny * py - c
            dq = nx * qx + ny * qy - c
            if dp <= _EPS:
                tmpx[out] = px
                tmpy[out] = py
                out += 1
            if (dp < -_EPS and dq > _EPS) or (dp > _EPS and dq < -_EPS):
                r = dp / (dp - dq)
                tmpx[out] = px + r * (qx - px)
                tmpy[out] = py + r * (qy - py)
                out += 1
        m = out
        if m < 3:
            return 0.0
        for i in range(m):
            bufx[i] = tmpx[i]
            bufy[i] = tmpy[i]
    a = 0.0
    for i in range(m):
        j = i + 1
        if j == m:
            j = 0
        a += bufx[i] * bufy[j] - bufx[j] * bufy[i]
    a *= 0.5
    if a < _EPS:
        return 0.0
    return a


@njit(parallel=True, cache=True)
def overlap_areas(b, h, shifts):
    """area(B & (C + shift)) for each row of ``shifts``.

    ``b`` holds the CCW vertices of B; ``h`` holds C as rows ``(nx, ny, c)``
    of the half-planes ``n.x <= c``.
    """
    n = shifts.shape[0]
    nb = b.shape[0]
    nh = h.shape[0]
    cap = nb + nh + 2
    out = np.empty(n)
    bx = b[:, 0].copy()
    by = b[:, 1].copy()
    hx = h[:, 0].copy()
    hy = h[:, 1].copy()
    hc = h[:, 2].copy()
    for i in prange(n):
        bufx = np.empty(cap)
        bufy = np.empty(cap)
        tmpx = np.empty(cap)
        tmpy = np.empty(cap)
        out[i] = _clip_area(bx, by, nb, hx, hy, hc, nh, shifts[i, 0], shifts[i, 1],
                            bufx, bufy, tmpx, tmpy)
    return out
