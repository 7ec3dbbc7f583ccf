"""Flat tori R^2 / <(1,0), (a,b)>: shapes, Dirichlet domains, homotopy of triangles."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .geom2d import AffineMap, ConvexPolygon, Vec2, area, halfplane_intersection, translate
from .shapes import hexagon_h

TOL = 1e-12
MAX_REDUCTION_STEPS = 64


class ReductionError(RuntimeError):
    pass


def in_modular_domain(a: float, b: float, tol: float = TOL) -> bool:
    """Membership in the fundamental domain, boundary arc kept only for a >= 0."""
    if not (b > 0 and -0.5 < a <= 0.5):
        return False
    r2 = a * a + b * b
    if r2 > 1 + tol:
        return True
    return abs(r2 - 1) <= tol and a >= 0


@dataclass(frozen=True)
class TauParam:
    """A torus shape a + ib.

    Accepts the closure of the modular domain so that mirror images such as
    a = -1/2 stay representable; use :func:`in_modular_domain` for the strict
    half-open test.
    """

    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if not (math.isfinite(a) and math.isfinite(b)) or b <= 0:
            raise ValueError(f"need finite a and b > 0, got ({a}, {b})")
        if abs(a) > 0.5 + TOL or a * a + b * b < 1 - 1e-9:
            raise ValueError(f"tau = {a} + {b}i lies outside the modular domain; reduce it first")

    @property
    def tau(self) -> complex:
        return complex(self.a, self.b)

    def mirror(self) -> "TauParam":
        return TauParam(-self.a, self.b)

    @classmethod
    def hexagonal(cls) -> "TauParam":
        return cls(0.5, math.sqrt(3) / 2)

    @classmethod
    def square(cls) -> "TauParam":
        return cls(0.0, 1.0)


class HexParams(NamedTuple):
    s: float
    t: float


class TorusPoint(NamedTuple):
    """Coordinates in the basis {(1,0), (a,b)}, each in [0, 1)."""

    u: float
    v: float


class HomotopyClass(NamedTuple):
    m: int
    n: int

    @property
    def trivial(self) -> bool:
        return self.m == 0 and self.n == 0


@dataclass(frozen=True)
class DirichletDomain:
    tau: TauParam
    hexagon: ConvexPolygon
    alpha: float
    beta: float

    def to_json(self) -> dict:
        return {
            "tau": [self.tau.a, self.tau.b],
            "alpha": self.alpha,
            "beta": self.beta,
            "vertices": self.hexagon.to_json()["vertices"],
            "area": area(self.hexagon),
        }


# --- modular reduction ------------------------------------------------------

def _apply_letter(z: complex, letter: tuple) -> complex:
    name, k = letter
    if name == "T":
        return z + k
    return -1 / z


def apply_word(word, z: complex) -> complex:
    """Apply a reduction word (letters applied left to right)."""
    for letter in word:
        z = _apply_letter(z, letter)
    return z


def word_matrix(word) -> np.ndarray:
    """The SL2(Z) matrix of the Mobius map performed by ``word``."""
    m = np.eye(2, dtype=np.int64)
    for name, k in word:
        g = np.array([[1, k], [0, 1]]) if name == "T" else np.array([[0, -1], [1, 0]])
        m = g @ m
    return m


def reduce_to_fundamental(a: float, b: float):
    """Move a + ib into the modular domain.

    Returns ``(TauParam, word)``; ``word`` is a tuple of letters ``("T", k)``
    (z -> z + k) and ``("S", 1)`` (z -> -1/z) applied left to right.
    """
    if not b > 0:
        raise ValueError(f"imaginary part must be positive, got {b}")
    z = complex(a, b)
    word = []
    for _ in range(MAX_REDUCTION_STEPS):
        k = -math.ceil(z.real - 0.5)
        if k:
            word.append(("T", k))
            z += k
        if abs(z) ** 2 < 1 - TOL:
            word.append(("S", 1))
            z = -1 / z
            continue
        break
    else:
        raise ReductionError(f"no reduction of {a}+{b}i within {MAX_REDUCTION_STEPS} steps")
    if z.real <= -0.5 + TOL:
        word.append(("T", 1))
        z += 1
    if abs(abs(z) ** 2 - 1) <= TOL and z.real < 0:
        word.append(("S", 1))
        z = -1 / z
    return TauParam(z.real, z.imag), tuple(word)


# --- Dirichlet domain -------------------------------------------------------

def dirichlet_vertex_params(a: float, b: float) -> tuple[float, float]:
    """(alpha, beta) for a >= 0."""
    return (b * b + a * a - a) / (2 * b), (b * b - a * a + a) / (2 * b)


def dirichlet_domain(tau: TauParam) -> DirichletDomain:
    a, b = abs(tau.a), tau.b
    alpha, beta = dirichlet_vertex_params(a, b)
    A = (0.5, alpha)
    B = (a - 0.5, beta)
    C = (-0.5, alpha)
    pts = np.array([A, B, C, (-0.5, -alpha), (0.5 - a, -beta), (0.5, -alpha)])
    if tau.a < 0:
        pts = pts[::-1] * np.array([-1.0, 1.0])
    return DirichletDomain(tau, ConvexPolygon(pts), alpha, beta)


def dirichlet_halfplanes(tau: TauParam) -> list:
    """Bisector half-planes {x : g.x <= |g|^2/2} for the six relevant lattice vectors."""
    a, b = tau.a, tau.b
    gens = [(1.0, 0.0), (a, b), (a - 1.0, b)] if a >= 0 else [(1.0, 0.0), (a, b), (a + 1.0, b)]
    planes = []
    for gx, gy in gens:
        c = (gx * gx + gy * gy) / 2
        planes.append(((gx, gy), c))
        planes.append(((-gx, -gy), c))
    return planes


def dirichlet_domain_halfplanes(tau: TauParam) -> ConvexPolygon:
    return halfplane_intersection(dirichlet_halfplanes(tau))


def hex_params(tau: TauParam) -> HexParams:
    s = abs(tau.a)
    # a^2 + b^2 >= 1 on the domain, so t <= s; clamp rounding on the unit arc
    return HexParams(s, min(s, s / (tau.a ** 2 + tau.b ** 2)))


def normalizing_map(tau: TauParam) -> AffineMap:
    """Linear map taking the Dirichlet domain onto ``hexagon_h(*hex_params(tau))``.

    For a < 0 the reflection x -> -x is applied first.
    """
    a, b = abs(tau.a), tau.b
    r2 = a * a + b * b
    g = AffineMap(1.0, 0.0, a / r2, b / r2)
    if tau.a < 0:
        g = g @ AffineMap(-1.0, 0.0, 0.0, 1.0)
    return g


def normalized_hexagon(tau: TauParam) -> ConvexPolygon:
    return hexagon_h(*hex_params(tau))


# --- shortest representatives -----------------------------------------------

def plane_point(p: TorusPoint, tau: TauParam) -> Vec2:
    return Vec2(p.u + p.v * tau.a, p.v * tau.b)


def lattice_coords(v, tau: TauParam) -> tuple[float, float]:
    """Real (m, n) with v = m (1,0) + n (a,b)."""
    n = v[1] / tau.b
    return v[0] - n * tau.a, n


_RING = [(m, n) for m in (-1, 0, 1) for n in (-1, 0, 1)]


def shortest_representative(v, tau: TauParam) -> Vec2:
    """Minimal-norm lattice translate of v; ties go to the lexicographically smallest."""
    a, b = tau.a, tau.b
    m0, n0 = lattice_coords(v, tau)
    m0, n0 = round(m0), round(n0)
    best = None
    for dm, dn in _RING:
        m, n = m0 + dm, n0 + dn
        w = (v[0] - m - n * a, v[1] - n * b)
        d = w[0] * w[0] + w[1] * w[1]
        if best is None or d < best[0] - TOL:
            best = (d, w)
        elif abs(d - best[0]) <= TOL and w < best[1]:
            best = (min(d, best[0]), w)
    return Vec2(*best[1])


def shortest_representatives(vs: np.ndarray, tau: TauParam) -> np.ndarray:
    """Vectorized :func:`shortest_representative` over an ``(N, 2)`` array."""
    vs = np.asarray(vs, dtype=float)
    a, b = tau.a, tau.b
    n0 = np.round(vs[:, 1] / b)
    m0 = np.round(vs[:, 0] - n0 * a)
    bx = by = bd = None
    for dm, dn in _RING:
        n = n0 + dn
        wx = vs[:, 0] - (m0 + dm) - n * a
        wy = vs[:, 1] - n * b
        d = wx * wx + wy * wy
        if bd is None:
            bx, by, bd = wx, wy, d
            continue
        better = d < bd - TOL
        tie = ~better & (np.abs(d - bd) <= TOL) & ((wx < bx) | ((wx == bx) & (wy < by)))
        take = better | tie
        bx = np.where(take, wx, bx)
        by = np.where(take, wy, by)
        bd = np.where(better, d, np.where(tie, np.minimum(d, bd), bd))
    return np.stack([bx, by], axis=1)


# --- triangles --------------------------------------------------------------

def classify_triangle(x1: TorusPoint, x2: TorusPoint, x3: TorusPoint, tau: TauParam) -> HomotopyClass:
    """Lattice class of the closed loop x1 -> x2 -> x3 -> x1 along shortest edges."""
    p1, p2, p3 = (plane_point(x, tau) for x in (x1, x2, x3))
    w12 = shortest_representative(p2 - p1, tau)
    w23 = shortest_representative(p3 - p2, tau)
    w31 = shortest_representative(p1 - p3, tau)
    total = (w12[0] + w23[0] + w31[0], w12[1] + w23[1] + w31[1])
    m, n = lattice_coords(total, tau)
    return HomotopyClass(int(round(m)), int(round(n)))


def is_trivial_by_containment(x1: TorusPoint, x2: TorusPoint, x3: TorusPoint, tau: TauParam,
                              domain: DirichletDomain | None = None) -> bool:
    """Trivial iff the lift of x3 next to x1 lies in the Dirichlet domain centred at the lift of x2."""
    if domain is None:
        domain = dirichlet_domain(tau)
    p1, p2, p3 = (plane_point(x, tau) for x in (x1, x2, x3))
    w12 = shortest_representative(p2 - p1, tau)
    w13 = shortest_representative(p3 - p1, tau)
    return translate(domain.hexagon, w12).contains(w13, tol=1e-12)


def classify_triangles(uv1: np.ndarray, uv2: np.ndarray, uv3: np.ndarray, tau: TauParam) -> np.ndarray:
    """Vectorized :func:`classify_triangle`; returns an ``(N, 2)`` int array of (m, n)."""
    basis = np.array([[1.0, 0.0], [tau.a, tau.b]])
    p1, p2, p3 = uv1 @ basis, uv2 @ basis, uv3 @ basis
    total = (shortest_representatives(p2 - p1, tau)
             + shortest_representatives(p3 - p2, tau)
             + shortest_representatives(p1 - p3, tau))
    n = np.round(total[:, 1] / tau.b)
    m = np.round(total[:, 0] - n * tau.a)
    return np.stack([m, n], axis=1).astype(np.int64)


def trivial_by_containment(uv1: np.ndarray, uv2: np.ndarray, uv3: np.ndarray, tau: TauParam) -> np.ndarray:
    """Vectorized containment criterion, via the bisector inequalities of the domain."""
    basis = np.array([[1.0, 0.0], [tau.a, tau.b]])
    p1, p2, p3 = uv1 @ basis, uv2 @ basis, uv3 @ basis
    d = shortest_representatives(p3 - p1, tau) - shortest_representatives(p2 - p1, tau)
    ok = np.ones(len(d), dtype=bool)
    for (gx, gy), c in dirichlet_halfplanes(tau):
        ok &= gx * d[:, 0] + gy * d[:, 1] <= c + 1e-12
    return ok


# --- sampling ---------------------------------------------------------------

def sample_torus_point(rng: np.random.Generator, tau: TauParam | None = None) -> TorusPoint:
    """Uniform point of the torus; the (u, v) chart is uniform for every tau."""
    u, v = rng.random(2)
    return TorusPoint(float(u), float(v))


def sample_torus_points(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.random((n, 2))
