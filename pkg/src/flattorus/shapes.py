"""The unit square and the corner-cut hexagon family."""
from __future__ import annotations

from .geom2d import EMPTY, ConvexPolygon, minkowski_diff_convex


def _check_st(s: float, t: float) -> None:
    if not (0.0 <= s <= 0.5 and 0.0 <= t <= 0.5):
        raise ValueError(f"(s, t) = ({s}, {t}) outside [0, 1/2]^2")


def unit_square(half: float = 0.5) -> ConvexPolygon:
    return ConvexPolygon([(-half, -half), (half, -half), (half, half), (-half, half)])


def corner_triangle(s: float, t: float):
    """Upper-left corner of the unit square with horizontal leg s, vertical leg t.

    Returns ``EMPTY`` when either leg vanishes.
    """
    _check_st(s, t)
    return ConvexPolygon.from_points([(-0.5, 0.5), (-0.5, 0.5 - t), (-0.5 + s, 0.5)])


def opposite_triangle(s: float, t: float):
    tri = corner_triangle(s, t)
    if tri.is_empty:
        return EMPTY
    return ConvexPolygon.from_points(-tri.vertices)


def hexagon_h(s: float, t: float) -> ConvexPolygon:
    """The unit square with the corner triangle and its reflection removed."""
    _check_st(s, t)
    return ConvexPolygon.from_points([
        (-0.5, -0.5),
        (0.5 - s, -0.5),
        (0.5, -0.5 + t),
        (0.5, 0.5),
        (-0.5 + s, 0.5),
        (-0.5, 0.5 - t),
    ])


def hexagon_v(s: float, t: float):
    """Translations w for which the corner triangle meets its own translate."""
    tri = corner_triangle(s, t)
    if tri.is_empty:
        return EMPTY
    return minkowski_diff_convex(tri, tri)
