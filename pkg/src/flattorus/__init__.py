"""Probability that a random triangle on a flat torus is homotopically trivial."""
from .geom2d import (EMPTY, AffineMap, ConvexPolygon, Vec2, apply_affine, area,
                     halfplane_intersection, intersect_convex, minkowski_diff_convex, translate)
from .overlap import (Estimate, OverlapMethod, f_hht, f_hhh, f_htt, f_numeric, f_qqq, f_tqq)
from .probability import (ModuliAverageConfig, extremes_scan, moduli_average, p_closed_form,
                          p_from_dirichlet, p_from_hex, p_monte_carlo)
from .shapes import corner_triangle, hexagon_h, hexagon_v, unit_square
from .torus import (DirichletDomain, HexParams, HomotopyClass, TauParam, TorusPoint,
                    classify_triangle, dirichlet_domain, hex_params, normalizing_map,
                    reduce_to_fundamental, sample_torus_point, shortest_representative)

__version__ = "0.1.0"
