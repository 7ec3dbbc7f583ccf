"""The triple-overlap functional F(A, B, C) = integral over a in A of area(B & (C + a)).

Closed forms cover the square / corner-triangle / hexagon family; ``f_numeric``
evaluates F for any convex polygons (or finite disjoint unions of them) and is
the oracle the closed forms are checked against.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .geom2d import (EMPTY, AffineMap, ConvexPolygon, apply_affine, area,
                     halfplane_intersection, intersect_convex)
from .rng import make_rng

_CHUNK = 1 << 18


class Method(str, Enum):
    MONTE_CARLO = "monte-carlo"
    QUADRATURE = "midpoint-quadrature"


@dataclass(frozen=True)
class OverlapMethod:
    kind: Method = Method.MONTE_CARLO
    budget: int = 200_000

    def __post_init__(self):
        object.__setattr__(self, "kind", Method(self.kind))
        if self.budget < 10:
            raise ValueError("budget must be at least 10")


@dataclass(frozen=True)
class Estimate:
    mean: float
    std_error: float
    n: int
    seed: int = 0
    method: str = ""

    def __post_init__(self):
        if self.std_error < 0 or self.n < 1:
            raise ValueError("std_error must be >= 0 and n >= 1")

    def to_json(self) -> dict:
        return {"value": self.mean, "std_error": self.std_error, "n": self.n,
                "method": self.method, "seed": self.seed}


def _pieces(x) -> list:
    if isinstance(x, (list, tuple)):
        return [p for p in x if not p.is_empty]
    return [] if x.is_empty else [x]


def _halfplane_rows(c: ConvexPolygon) -> np.ndarray:
    return np.array([(n[0], n[1], off) for n, off in c.halfplanes()], dtype=float)


def overlap_area_batch(bs, cs, shifts: np.ndarray) -> np.ndarray:
    """area(B & (C + w)) for every row w of ``shifts``; B, C may be unions."""
    shifts = np.ascontiguousarray(shifts, dtype=float)
    total = np.zeros(len(shifts))
    for b in _pieces(bs):
        bv = np.ascontiguousarray(b.vertices)
        for c in _pieces(cs):
            total += _kernels.overlap_areas(bv, _halfplane_rows(c), shifts)
    return total


def _uniform_in(poly: ConvexPolygon, rng: np.random.Generator, n: int) -> np.ndarray:
    """Rejection sampling from the bounding box."""
    x0, y0, x1, y1 = poly.bbox()
    frac = area(poly) / ((x1 - x0) * (y1 - y0))
    out, have = [], 0
    while have < n:
        m = int((n - have) / frac * 1.05) + 16
        pts = rng.random((m, 2)) * (x1 - x0, y1 - y0) + (x0, y0)
        pts = pts[poly.contains_points(pts)]
        out.append(pts)
        have += len(pts)
    return np.concatenate(out)[:n]


def _mc_piece(a: ConvexPolygon, bs, cs, n: int, rng) -> tuple[float, float]:
    """Mean and variance (of the mean) for one convex piece of A."""
    s1 = s2 = 0.0
    done = 0
    while done < n:
        k = min(_CHUNK, n - done)
        vals = overlap_area_batch(bs, cs, _uniform_in(a, rng, k))
        s1 += vals.sum()
        s2 += (vals * vals).sum()
        done += k
    mean = float(s1) / n
    var = max(s2 / n - mean * mean, 0.0) * n / max(n - 1, 1)
    w = area(a)
    return w * mean, w * w * var / n


def _fan_cells(poly: ConvexPolygon, k: int):
    """Barycentres and weights of a k-fold regular subdivision of the centroid fan."""
    c = np.array(poly.centroid())
    v = poly.vertices
    i, j = np.meshgrid(np.arange(k), np.arange(k), indexing="ij")
    up = (i + j) <= k - 1
    down = (i + j) <= k - 2
    lam = np.concatenate([
        np.stack([i[up] + 1 / 3, j[up] + 1 / 3], axis=1),
        np.stack([i[down] + 2 / 3, j[down] + 2 / 3], axis=1),
    ]) / k
    pts, wts = [], []
    for r in range(len(v)):
        p1, p2 = v[r], v[(r + 1) % len(v)]
        e1, e2 = p1 - c, p2 - c
        tri = 0.5 * abs(e1[0] * e2[1] - e1[1] * e2[0])
        pts.append(c + lam[:, :1] * e1 + lam[:, 1:] * e2)
        wts.append(np.full(len(lam), tri / (k * k)))
    return np.concatenate(pts), np.concatenate(wts)


def f_numeric(A, B, C, method: OverlapMethod | None = None, seed: int = 0) -> Estimate:
    """Numeric F(A, B, C).

    Monte Carlo draws ``budget`` points uniformly from each convex piece of A;
    quadrature evaluates the integrand at barycentres of about ``budget``
    equal-area cells of A and reports ``std_error = 0``.
    """
    method = method or OverlapMethod()
    a_parts, b_parts, c_parts = _pieces(A), _pieces(B), _pieces(C)
    if not (a_parts and b_parts and c_parts):
        return Estimate(0.0, 0.0, 1, seed, method.kind.value)

    if method.kind is Method.QUADRATURE:
        total, cells = 0.0, 0
        for a in a_parts:
            k = max(1, math.ceil(math.sqrt(method.budget / len(a))))
            pts, wts = _fan_cells(a, k)
            for lo in range(0, len(pts), _CHUNK):
                sl = slice(lo, lo + _CHUNK)
                total += float(wts[sl] @ overlap_area_batch(b_parts, c_parts, pts[sl]))
            cells += len(pts)
        return Estimate(total, 0.0, cells, 0, method.kind.value)

    mean = var = 0.0
    for idx, a in enumerate(a_parts):
        m, v = _mc_piece(a, b_parts, c_parts, method.budget, make_rng(seed, idx))
        mean += m
        var += v
    return Estimate(mean, math.sqrt(var), method.budget * len(a_parts), seed, method.kind.value)


def act_on_triple(g: AffineMap, A, B, C):
    """Natural action of an affine map on an argument triple of F.

    The first argument is a set of displacement vectors, so it only sees the
    linear part; B and C are moved by the full map.
    """
    lin = g.linear_part()

    def move(x, h):
        if isinstance(x, (list, tuple)):
            return [apply_affine(h, p) for p in x]
        return apply_affine(h, x)

    return move(A, lin), move(B, g), move(C, g)


# --- closed forms -----------------------------------------------------------

def _check(s: float, t: float) -> None:
    if not (-1e-12 <= s <= 0.5 + 1e-12 and -1e-12 <= t <= 0.5 + 1e-12):
        raise ValueError(f"(s, t) = ({s}, {t}) outside [0, 1/2]^2")


def f_qqq() -> float:
    return 9 / 16


def f_tqq(s: float, t: float) -> float:
    _check(s, t)
    return s * t / 24 * (3 + 2 * s + 2 * t + s * t)


def f_htt(s: float, t: float) -> float:
    _check(s, t)
    return s * s * t * t / 4


def f_hht(s: float, t: float) -> float:
    _check(s, t)
    return s * t / 24 * (3 + 2 * s + 2 * t - 11 * s * t)


def f_hhh(s: float, t: float) -> float:
    _check(s, t)
    return 9 / 16 - 3 * s * t / 4 - s * s * t / 2 - s * t * t / 2 + 5 * s * s * t * t / 4


def f_hhh_by_parts(s: float, t: float) -> float:
    """F(H,H,H) assembled from the square and corner-triangle pieces."""
    return f_qqq() - 4 * f_hht(s, t) - 2 * f_htt(s, t) - 2 * f_tqq(s, t)


def split_polygon(p: ConvexPolygon, normal, offset: float) -> tuple:
    """Cut p along the line n.x = offset into two disjoint convex pieces."""
    x0, y0, x1, y1 = p.bbox()
    r = 4 * (abs(x0) + abs(x1) + abs(y0) + abs(y1) + abs(offset) + 1)
    box = [((1, 0), r), ((-1, 0), r), ((0, 1), r), ((0, -1), r)]
    n = tuple(normal)
    neg = (-n[0], -n[1])
    lo = intersect_convex(p, halfplane_intersection(box + [(n, offset)]))
    hi = intersect_convex(p, halfplane_intersection(box + [(neg, -offset)]))
    return tuple(x for x in (lo, hi) if x is not EMPTY)
