"""Probability that a random triangle on a flat torus is homotopically trivial."""
from __future__ import annotations

import heapq
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .geom2d import area
from .overlap import Estimate, OverlapMethod, f_hhh, f_numeric
from .rng import make_rng, shard_sizes
from .torus import (HexParams, TauParam, classify_triangles, dirichlet_domain, hex_params,
                    in_modular_domain, sample_torus_points)

MODULAR_VOLUME = math.pi / 3
MODULI_AVERAGE = (13 - 3 * math.sqrt(3) / math.pi) / 20

# P(a, b) = sum of coef * |a|^j / b^k
_P_TERMS = (
    (9 / 16, 0, 0),
    (3 / 8, 2, 2),
    (-1 / 2, 3, 2),
    (-1 / 2, 3, 4),
    (17 / 16, 4, 4),
    (-1 / 2, 5, 4),
)


def p_closed_form_ab(a, b):
    """Vectorized closed form in the raw coordinates (a, b)."""
    a = np.abs(np.asarray(a, dtype=float))
    b = np.asarray(b, dtype=float)
    b2 = b * b
    b4 = b2 * b2
    a2 = a * a
    a3 = a2 * a
    return (9 / 16 + 3 * a2 / (8 * b2) - a3 / (2 * b2) - a3 / (2 * b4)
            + 17 * a2 * a2 / (16 * b4) - a3 * a2 / (2 * b4))


def p_closed_form(tau: TauParam) -> float:
    return float(p_closed_form_ab(tau.a, tau.b))


def p_from_hex(h: HexParams) -> float:
    s, t = h
    return f_hhh(s, t) / (1 - s * t) ** 2


def p_from_dirichlet(tau: TauParam, method: OverlapMethod | None = None, seed: int = 0) -> Estimate:
    """F(D, D, D) / area(D)^2 on the un-normalized Dirichlet domain."""
    d = dirichlet_domain(tau).hexagon
    e = f_numeric(d, d, d, method, seed)
    w = area(d) ** 2
    return Estimate(e.mean / w, e.std_error / w, e.n, e.seed, e.method)


# --- simulation -------------------------------------------------------------

_MC_CHUNK = 1 << 17


def _count_trivial(tau: TauParam, n: int, seed: int, stream: int) -> int:
    rng = make_rng(seed, stream)
    hits = 0
    done = 0
    while done < n:
        k = min(_MC_CHUNK, n - done)
        pts = sample_torus_points(rng, 3 * k)
        cls = classify_triangles(pts[:k], pts[k:2 * k], pts[2 * k:], tau)
        hits += int(np.count_nonzero((cls[:, 0] == 0) & (cls[:, 1] == 0)))
        done += k
    return hits


def p_monte_carlo(tau: TauParam, n: int, seed: int, workers: int = 1) -> Estimate:
    """Fraction of uniformly drawn triples whose triangle is trivial.

    The draw is split into ``workers`` shards, shard i using substream i, so
    the estimate depends only on (seed, n, workers).
    """
    if n < 100:
        raise ValueError("need at least 100 samples")
    sizes = shard_sizes(n, workers)
    if workers == 1:
        hits = _count_trivial(tau, n, seed, 0)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(lambda i: _count_trivial(tau, sizes[i], seed, i), range(workers)))
    p = hits / n
    return Estimate(p, math.sqrt(p * (1 - p) / n), n, seed, "monte-carlo")


# --- moduli-space average -----------------------------------------------------

class QuadratureError(RuntimeError):
    def __init__(self, msg, partial: float, cells: int):
        super().__init__(msg)
        self.partial = partial
        self.cells = cells


_GL_LO = np.polynomial.legendre.leggauss(5)
_GL_HI = np.polynomial.legendre.leggauss(10)


def _rule(f, x0, x1, y0, y1, rule):
    nodes, wts = rule
    xs = 0.5 * (x1 - x0) * nodes + 0.5 * (x1 + x0)
    ys = 0.5 * (y1 - y0) * nodes + 0.5 * (y1 + y0)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    return 0.25 * (x1 - x0) * (y1 - y0) * float(wts @ f(X, Y) @ wts)


def adaptive_cubature(f, rects, tol: float, max_cells: int = 20000):
    """Globally adaptive tensor Gauss-Legendre cubature over a list of rectangles.

    ``f(X, Y)`` must accept arrays. Each cell is estimated with the 10-point
    product rule; the gap to the 5-point rule is its error bound. The worst
    cell is quartered until the summed bound drops below ``tol``.
    Returns ``(value, error, cells)``.
    """
    heap = []

    def push(r):
        hi = _rule(f, *r, _GL_HI)
        err = abs(hi - _rule(f, *r, _GL_LO))
        heapq.heappush(heap, (-err, r, hi))
        return hi, err

    total = err_sum = 0.0
    for r in rects:
        v, e = push(r)
        total += v
        err_sum += e
    cells = len(heap)
    while err_sum > tol:
        if cells + 3 > max_cells:
            raise QuadratureError(f"tolerance {tol:g} not reached in {max_cells} cells "
                                  f"(error bound {err_sum:.3g})", total, cells)
        neg_err, (x0, x1, y0, y1), v = heapq.heappop(heap)
        total -= v
        err_sum += neg_err
        xm, ym = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
        for r in ((x0, xm, y0, ym), (xm, x1, y0, ym), (x0, xm, ym, y1), (xm, x1, ym, y1)):
            v, e = push(r)
            total += v
            err_sum += e
        cells += 3
    return total, err_sum, cells


@dataclass(frozen=True)
class ModuliAverageConfig:
    b_max: float = 100.0
    tol: float = 1e-6
    include_tail: bool = True
    max_cells: int = 20000

    def __post_init__(self):
        if self.b_max < 10:
            raise ValueError("b_max must be at least 10")
        if not 0 < self.tol <= 1e-2:
            raise ValueError("tol must lie in (0, 1e-2]")


@dataclass(frozen=True)
class AverageResult:
    value: float
    integral: float
    tail: float
    error: float
    cells: int
    config: ModuliAverageConfig

    def __float__(self):
        return self.value

    def to_json(self) -> dict:
        return {"value": self.value, "b_max": self.config.b_max, "tol": self.config.tol,
                "tail_included": self.config.include_tail, "cells": self.cells}


def _truncated_integral(g, cfg: ModuliAverageConfig):
    """Integral of g(a, b) / b^2 over the domain cut at b = b_max.

    Substituting u = 1/b turns the measure into da du and the region into
    u in [1/b_max, 1/sqrt(1 - a^2)], which is mapped onto y in [0, 1].
    """
    u0 = 1 / cfg.b_max

    def integrand(a, y):
        u1 = 1 / np.sqrt(1 - a * a)
        u = u0 + y * (u1 - u0)
        return g(a, 1 / u) * (u1 - u0)

    # split at a = 0 where |a| has a kink
    return adaptive_cubature(integrand, [(-0.5, 0.0, 0.0, 1.0), (0.0, 0.5, 0.0, 1.0)],
                             cfg.tol, cfg.max_cells)


def p_tail(b_max: float) -> float:
    """Exact integral of P(a,b) / b^2 over |a| <= 1/2, b >= b_max."""
    total = 0.0
    for coef, j, k in _P_TERMS:
        a_int = 2 * 0.5 ** (j + 1) / (j + 1)
        b_int = b_max ** -(k + 1) / (k + 1)
        total += coef * a_int * b_int
    return total


def moduli_average(cfg: ModuliAverageConfig | None = None) -> AverageResult:
    """Hyperbolic-area average of P over the modular domain."""
    cfg = cfg or ModuliAverageConfig()
    integral, err, cells = _truncated_integral(p_closed_form_ab, cfg)
    tail = p_tail(cfg.b_max) if cfg.include_tail else 0.0
    return AverageResult((integral + tail) / MODULAR_VOLUME, integral, tail, err, cells, cfg)


def modular_volume(cfg: ModuliAverageConfig | None = None) -> float:
    """Hyperbolic area of the domain by the same quadrature; should be pi/3."""
    cfg = cfg or ModuliAverageConfig()
    integral, _, _ = _truncated_integral(lambda a, b: np.ones_like(a), cfg)
    return integral + (1 / cfg.b_max if cfg.include_tail else 0.0)


# --- extremes -----------------------------------------------------------------

def scan_points(grid_n: int, b_top: float = 3.0) -> np.ndarray:
    """Grid over the domain: a uniform in (-1/2, 1/2], b from the arc to ``b_top``, plus the arc."""
    a = -0.5 + np.arange(1, grid_n + 1) / grid_n
    rows = []
    for ai in a:
        lo = math.sqrt(1 - ai * ai)
        for bi in np.linspace(lo, b_top, grid_n):
            if in_modular_domain(ai, bi):
                rows.append((ai, bi))
    arc = np.linspace(0.0, 0.5, grid_n)
    rows.extend((ai, math.sqrt(1 - ai * ai)) for ai in arc)
    return np.array(rows)


def extremes_scan(grid_n: int = 256):
    """Grid argmin and argmax of the closed form; returns ``((tau, p), (tau, p))``."""
    if grid_n < 16:
        raise ValueError("grid_n must be at least 16")
    pts = scan_points(grid_n)
    p = p_closed_form_ab(pts[:, 0], pts[:, 1])
    lo, hi = int(np.argmin(p)), int(np.argmax(p))
    return ((TauParam(*pts[lo]), float(p[lo])), (TauParam(*pts[hi]), float(p[hi])))


def random_taus(rng: np.random.Generator, k: int, b_top: float = 3.0) -> list[TauParam]:
    """Random shapes in the domain (uniform in the box, rejected outside)."""
    out = []
    while len(out) < k:
        a = rng.uniform(-0.5, 0.5)
        b = rng.uniform(math.sqrt(3) / 2, b_top)
        if in_modular_domain(a, b):
            out.append(TauParam(a, b))
    return out
