"""Planar primitives: convex polygons, clipping, affine maps, Minkowski difference.

Polygons are stored counterclockwise as ``(n, 2)`` float64 arrays. Anything
of area below ``EPS`` collapses to the ``EMPTY`` sentinel.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

EPS = 1e-12


class GeometryError(ValueError):
    pass


class UnboundedError(GeometryError):
    pass


class InfeasibleError(GeometryError):
    pass


class Vec2(NamedTuple):
    x: float
    y: float

    def __add__(self, other):
        return Vec2(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Vec2(self.x - other[0], self.y - other[1])

    def __neg__(self):
        return Vec2(-self.x, -self.y)

    def dot(self, other) -> float:
        return self.x * other[0] + self.y * other[1]

    def norm2(self) -> float:
        return self.x * self.x + self.y * self.y


def vec2(x: float, y: float) -> Vec2:
    x, y = float(x), float(y)
    if not (math.isfinite(x) and math.isfinite(y)):
        raise GeometryError(f"non-finite point ({x}, {y})")
    return Vec2(x, y)


def _signed_area(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _cleanup(pts: np.ndarray) -> np.ndarray:
    """Drop consecutive duplicates and collinear middle points."""
    out = [p for p in pts]
    changed = True
    while changed and len(out) >= 3:
        changed = False
        n = len(out)
        for i in range(n):
            p, q = out[i - 1], out[i]
            if np.hypot(*(q - p)) < EPS:
                del out[i]
                changed = True
                break
        if changed:
            continue
        n = len(out)
        for i in range(n):
            p, q, r = out[i - 1], out[i], out[(i + 1) % n]
            d1, d2 = q - p, r - q
            cross = d1[0] * d2[1] - d1[1] * d2[0]
            # relative test so that tiny polygons keep their corners
            scale = max(np.hypot(*d1) * np.hypot(*d2), 1e-300)
            if abs(cross) <= EPS * scale and np.dot(d1, d2) > 0:
                del out[i]
                changed = True
                break
    return np.array(out, dtype=float).reshape(-1, 2)


class ConvexPolygon:
    """Convex polygon with counterclockwise vertices.

    Use :meth:`from_points` when the input may be degenerate; it returns
    ``EMPTY`` instead of raising.
    """

    __slots__ = ("_v",)
    is_empty = False

    def __init__(self, vertices):
        pts = np.array(vertices, dtype=float).reshape(-1, 2)
        if not np.all(np.isfinite(pts)):
            raise GeometryError("non-finite vertex")
        if len(pts) >= 3 and _signed_area(pts) < 0:
            pts = pts[::-1]
        pts = _cleanup(pts)
        if len(pts) < 3:
            raise GeometryError("polygon needs at least 3 distinct vertices")
        d1 = np.roll(pts, -1, axis=0) - pts
        d2 = np.roll(d1, -1, axis=0)
        cross = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
        if np.any(cross < -1e-9 * max(1.0, float(np.abs(pts).max()) ** 2)):
            raise GeometryError("vertices are not convex")
        pts.setflags(write=False)
        self._v = pts

    @classmethod
    def from_points(cls, vertices) -> "ConvexPolygon | EmptyPolygon":
        pts = np.array(vertices, dtype=float).reshape(-1, 2)
        if len(pts) < 3 or abs(_signed_area(pts)) < EPS:
            return EMPTY
        try:
            return cls(pts)
        except GeometryError:
            if len(_cleanup(pts)) < 3:
                return EMPTY
            raise

    @property
    def vertices(self) -> np.ndarray:
        return self._v

    def __len__(self):
        return len(self._v)

    def __repr__(self):
        body = ", ".join(f"({x:.6g}, {y:.6g})" for x, y in self._v)
        return f"ConvexPolygon([{body}])"

    def to_json(self) -> dict:
        return {"vertices": [[float(x), float(y)] for x, y in self._v]}

    @classmethod
    def from_json(cls, obj: dict):
        return cls.from_points(obj["vertices"])

    def bbox(self):
        lo, hi = self._v.min(axis=0), self._v.max(axis=0)
        return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])

    def centroid(self) -> Vec2:
        v = self._v
        w = np.roll(v, -1, axis=0)
        cr = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
        a = cr.sum() / 2
        cx = ((v[:, 0] + w[:, 0]) * cr).sum() / (6 * a)
        cy = ((v[:, 1] + w[:, 1]) * cr).sum() / (6 * a)
        return Vec2(float(cx), float(cy))

    def contains(self, p, tol: float = 1e-12) -> bool:
        v = self._v
        d = np.roll(v, -1, axis=0) - v
        rel = np.asarray(p, dtype=float) - v
        cross = d[:, 0] * rel[:, 1] - d[:, 1] * rel[:, 0]
        lens = np.hypot(d[:, 0], d[:, 1])
        return bool(np.all(cross >= -tol * lens))

    def contains_points(self, pts: np.ndarray, tol: float = 0.0) -> np.ndarray:
        """Vectorized membership for an ``(N, 2)`` array."""
        pts = np.asarray(pts, dtype=float)
        inside = np.ones(len(pts), dtype=bool)
        v = self._v
        for i in range(len(v)):
            p, q = v[i], v[(i + 1) % len(v)]
            dx, dy = q - p
            cross = dx * (pts[:, 1] - p[1]) - dy * (pts[:, 0] - p[0])
            inside &= cross >= -tol * math.hypot(dx, dy)
        return inside

    def halfplanes(self):
        """Edges as ``(normal, offset)`` with the polygon equal to ``{x : n.x <= c}``."""
        v = self._v
        out = []
        for i in range(len(v)):
            p, q = v[i], v[(i + 1) % len(v)]
            n = np.array([q[1] - p[1], p[0] - q[0]])
            out.append((Vec2(*n), float(n @ p)))
        return out


class EmptyPolygon:
    """The empty set. Use the ``EMPTY`` singleton."""

    __slots__ = ()
    is_empty = True
    vertices = np.zeros((0, 2))

    def __len__(self):
        return 0

    def __repr__(self):
        return "EMPTY"

    def to_json(self):
        return {"vertices": []}

    def contains(self, p, tol=1e-12):
        return False

    def contains_points(self, pts, tol=0.0):
        return np.zeros(len(pts), dtype=bool)


EMPTY = EmptyPolygon()


def area(p) -> float:
    if p.is_empty:
        return 0.0
    return _signed_area(p.vertices)


def translate(p, w):
    if p.is_empty:
        return EMPTY
    w = vec2(*w)
    out = ConvexPolygon.__new__(ConvexPolygon)
    v = p.vertices + np.array(w)
    v.setflags(write=False)
    out._v = v
    return out


@dataclass(frozen=True)
class AffineMap:
    """``x -> M x + t`` with ``M = [[m11, m12], [m21, m22]]``."""

    m11: float
    m12: float
    m21: float
    m22: float
    tx: float = 0.0
    ty: float = 0.0
    unimodular: bool = False

    def __post_init__(self):
        vals = (self.m11, self.m12, self.m21, self.m22, self.tx, self.ty)
        if not all(math.isfinite(v) for v in vals):
            raise GeometryError("non-finite affine coefficients")
        d = self.det
        if abs(d) < EPS:
            raise GeometryError(f"degenerate linear part (det={d:g})")
        if self.unimodular and abs(d - 1) > 1e-12:
            raise GeometryError(f"map flagged unimodular but det={d!r}")

    @classmethod
    def from_matrix(cls, m, t=(0.0, 0.0), unimodular=False) -> "AffineMap":
        m = np.asarray(m, dtype=float)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1], float(t[0]), float(t[1]), unimodular)

    @classmethod
    def identity(cls) -> "AffineMap":
        return cls(1.0, 0.0, 0.0, 1.0, unimodular=True)

    @classmethod
    def scaling(cls, k: float) -> "AffineMap":
        return cls(k, 0.0, 0.0, k)

    @property
    def det(self) -> float:
        return self.m11 * self.m22 - self.m12 * self.m21

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    @property
    def translation(self) -> Vec2:
        return Vec2(self.tx, self.ty)

    def linear_part(self) -> "AffineMap":
        return AffineMap(self.m11, self.m12, self.m21, self.m22, unimodular=self.unimodular)

    def __call__(self, p) -> Vec2:
        x, y = p
        return Vec2(self.m11 * x + self.m12 * y + self.tx, self.m21 * x + self.m22 * y + self.ty)

    def apply_points(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return pts @ self.matrix.T + np.array([self.tx, self.ty])

    def __matmul__(self, other: "AffineMap") -> "AffineMap":
        m = self.matrix @ other.matrix
        t = self.matrix @ np.array([other.tx, other.ty]) + np.array([self.tx, self.ty])
        return AffineMap.from_matrix(m, t)

    def inverse(self) -> "AffineMap":
        mi = np.linalg.inv(self.matrix)
        return AffineMap.from_matrix(mi, -mi @ np.array([self.tx, self.ty]))


def apply_affine(g: AffineMap, p):
    if p.is_empty:
        return EMPTY
    pts = g.apply_points(p.vertices)
    if g.det < 0:
        pts = pts[::-1]
    return ConvexPolygon.from_points(pts)


def _clip_halfplane(pts: list, n, c: float) -> list:
    """Sutherland-Hodgman step against ``{x : n.x <= c}``."""
    out = []
    k = len(pts)
    for i in range(k):
        p, q = pts[i], pts[(i + 1) % k]
        dp = n[0] * p[0] + n[1] * p[1] - c
        dq = n[0] * q[0] + n[1] * q[1] - c
        if dp <= EPS:
            out.append(p)
        if (dp < -EPS and dq > EPS) or (dp > EPS and dq < -EPS):
            r = dp / (dp - dq)
            out.append((p[0] + r * (q[0] - p[0]), p[1] + r * (q[1] - p[1])))
    return out


def intersect_convex(p, q):
    if p.is_empty or q.is_empty:
        return EMPTY
    pts = [tuple(v) for v in p.vertices]
    for n, c in q.halfplanes():
        pts = _clip_halfplane(pts, n, c)
        if len(pts) < 3:
            return EMPTY
    return ConvexPolygon.from_points(pts)


def halfplane_intersection(planes: Iterable[tuple]) -> ConvexPolygon:
    """Bounded intersection of ``{x : n.x <= c}`` for each ``(n, c)``.

    Vertices are enumerated from pairwise line intersections, so this shares
    no code with the clipping path.
    """
    planes = [(np.asarray(n, dtype=float), float(c)) for n, c in planes]
    if len(planes) < 3:
        raise UnboundedError("fewer than 3 half-planes cannot bound a region")
    angles = sorted(math.atan2(n[1], n[0]) for n, _ in planes)
    gaps = np.diff(angles + [angles[0] + 2 * math.pi])
    if gaps.max() >= math.pi - 1e-12:
        raise UnboundedError("normals do not positively span the plane")
    cands = []
    for i in range(len(planes)):
        for j in range(i + 1, len(planes)):
            (n1, c1), (n2, c2) = planes[i], planes[j]
            det = n1[0] * n2[1] - n1[1] * n2[0]
            if abs(det) < 1e-14:
                continue
            x = (c1 * n2[1] - c2 * n1[1]) / det
            y = (n1[0] * c2 - n2[0] * c1) / det
            if all(n @ (x, y) <= c + 1e-10 * max(1.0, abs(c)) for n, c in planes):
                cands.append((x, y))
    if len(cands) < 3:
        raise InfeasibleError("half-planes have empty (or degenerate) intersection")
    cands = np.unique(np.round(np.array(cands), 14), axis=0)
    ctr = cands.mean(axis=0)
    order = np.argsort(np.arctan2(cands[:, 1] - ctr[1], cands[:, 0] - ctr[0]))
    poly = ConvexPolygon.from_points(cands[order])
    if poly.is_empty:
        raise InfeasibleError("half-planes intersect in a set of measure zero")
    return poly


def _start_index(v: np.ndarray) -> int:
    return int(np.lexsort((v[:, 0], v[:, 1]))[0])


def minkowski_sum_convex(p, q):
    if p.is_empty or q.is_empty:
        return EMPTY
    a = np.roll(p.vertices, -_start_index(p.vertices), axis=0)
    b = np.roll(q.vertices, -_start_index(q.vertices), axis=0)
    ea = np.roll(a, -1, axis=0) - a
    eb = np.roll(b, -1, axis=0) - b
    i = j = 0
    cur = a[0] + b[0]
    out = [cur]
    while i < len(ea) or j < len(eb):
        if i == len(ea):
            step, j = eb[j], j + 1
        elif j == len(eb):
            step, i = ea[i], i + 1
        else:
            cr = ea[i][0] * eb[j][1] - ea[i][1] * eb[j][0]
            if cr > 0:
                step, i = ea[i], i + 1
            elif cr < 0:
                step, j = eb[j], j + 1
            else:
                step = ea[i] + eb[j]
                i, j = i + 1, j + 1
        cur = cur + step
        out.append(cur)
    return ConvexPolygon.from_points(np.array(out[:-1]))


def reflect_through_origin(p):
    if p.is_empty:
        return EMPTY
    return ConvexPolygon.from_points(-p.vertices)


def minkowski_diff_convex(p, q):
    """``{u - v : u in p, v in q}``; for ``p == q`` the set of ``w`` with ``p & q_w`` nonempty."""
    return minkowski_sum_convex(p, reflect_through_origin(q))


def same_vertices(p, q, tol: float = 1e-10) -> bool:
    """Vertex lists agree up to cyclic rotation."""
    if p.is_empty or q.is_empty:
        return p.is_empty and q.is_empty
    a, b = p.vertices, q.vertices
    if len(a) != len(b):
        return False
    for k in range(len(b)):
        if np.max(np.abs(a - np.roll(b, k, axis=0))) <= tol:
            return True
    return False

