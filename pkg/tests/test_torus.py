import math

import numpy as np
import pytest

from flattorus.checks import brute_force_classes, brute_force_shortest
from flattorus.geom2d import apply_affine, area, same_vertices
from flattorus.probability import random_taus
from flattorus.rng import make_rng
from flattorus.torus import (HomotopyClass, TauParam, TorusPoint, apply_word, classify_triangle,
                             classify_triangles, dirichlet_domain, dirichlet_domain_halfplanes,
                             hex_params, in_modular_domain, is_trivial_by_containment,
                             normalized_hexagon, normalizing_map, reduce_to_fundamental,
                             sample_torus_point, sample_torus_points, shortest_representative,
                             shortest_representatives, trivial_by_containment, word_matrix)

HEX = TauParam.hexagonal()
SQ = TauParam.square()


@pytest.fixture(scope="module")
def taus():
    return random_taus(make_rng(2024, 0), 100)


def test_domain_membership():
    assert in_modular_domain(0, 1)
    assert in_modular_domain(0.5, 2)
    assert not in_modular_domain(-0.5, 2)
    assert in_modular_domain(0.3, math.sqrt(1 - 0.09))
    assert not in_modular_domain(-0.3, math.sqrt(1 - 0.09))
    assert not in_modular_domain(0.1, 0.5)


def test_tau_validation():
    with pytest.raises(ValueError):
        TauParam(0.0, -1.0)
    with pytest.raises(ValueError):
        TauParam(0.2, 0.5)


def test_reduce_examples():
    assert reduce_to_fundamental(0, 1) == (SQ, ())
    tau, _ = reduce_to_fundamental(-0.5, 2)
    assert (tau.a, tau.b) == (0.5, 2.0)
    with pytest.raises(ValueError):
        reduce_to_fundamental(1, 0)


@pytest.mark.parametrize("a,b", [(2.3, 0.4), (-7.1, 0.05), (0.49, 0.2), (-0.6, 0.8), (13.0, 3.0)])
def test_reduce_word_maps_input_to_output(a, b):
    tau, word = reduce_to_fundamental(a, b)
    assert in_modular_domain(tau.a, tau.b, tol=1e-9)
    z = apply_word(word, complex(a, b))
    assert abs(z - tau.tau) < 1e-9
    m = word_matrix(word)
    assert round(np.linalg.det(m)) == 1
    w = complex(a, b)
    assert abs((m[0, 0] * w + m[0, 1]) / (m[1, 0] * w + m[1, 1]) - tau.tau) < 1e-9


def test_reduce_arc_prefers_nonnegative():
    tau, _ = reduce_to_fundamental(-0.3, math.sqrt(1 - 0.09))
    assert tau.a == pytest.approx(0.3, abs=1e-12)


def test_dirichlet_examples():
    d = dirichlet_domain(SQ)
    assert len(d.hexagon) == 4
    assert same_vertices(d.hexagon, normalized_hexagon(SQ))
    h = dirichlet_domain(HEX)
    assert h.alpha == pytest.approx(1 / (2 * math.sqrt(3)), abs=1e-15)
    assert h.beta == pytest.approx(1 / math.sqrt(3), abs=1e-15)
    assert h.alpha == pytest.approx(0.288675, abs=1e-6)
    assert h.beta == pytest.approx(0.577350, abs=1e-6)


def test_dirichlet_matches_halfplanes_and_covolume(taus):
    for tau in taus:
        d = dirichlet_domain(tau)
        assert same_vertices(d.hexagon, dirichlet_domain_halfplanes(tau), 1e-10)
        assert area(d.hexagon) == pytest.approx(tau.b, abs=1e-10)
        assert same_vertices(d.hexagon, type(d.hexagon)(-d.hexagon.vertices), 1e-10)


def test_dirichlet_mirror(taus):
    for tau in taus:
        if abs(tau.a) >= 0.5:
            continue
        d, m = dirichlet_domain(tau).hexagon, dirichlet_domain(tau.mirror()).hexagon
        flipped = type(d)(d.vertices * [-1, 1])
        assert same_vertices(flipped, m, 1e-10)


def test_normalizing_map_examples():
    g = normalizing_map(SQ)
    assert np.array_equal(g.matrix, np.eye(2))
    g = normalizing_map(HEX)
    assert np.allclose(g.matrix, [[1, 0], [0.5, math.sqrt(3) / 2]], atol=1e-15)
    assert np.allclose(g(dirichlet_domain(HEX).hexagon.vertices[0]), (0.5, 0.5), atol=1e-15)


def test_normalizing_map_onto_h(taus):
    for tau in taus:
        g = normalizing_map(tau)
        assert abs(g.det) == pytest.approx(tau.b / (tau.a ** 2 + tau.b ** 2), rel=1e-14)
        image = apply_affine(g, dirichlet_domain(tau).hexagon)
        assert same_vertices(image, normalized_hexagon(tau), 1e-10)


def test_hex_params_examples():
    assert hex_params(SQ) == (0.0, 0.0)
    s, t = hex_params(HEX)
    assert (s, t) == pytest.approx((0.5, 0.5), abs=1e-15)
    s, t = hex_params(TauParam(0.3, 1.2))
    assert s == 0.3 and t == pytest.approx(0.196078, abs=1e-6)
    assert t == pytest.approx(0.3 / 1.53, abs=1e-15)


def test_shortest_representative_examples():
    assert shortest_representative((0.1, 0.1), SQ) == pytest.approx((0.1, 0.1))
    assert shortest_representative((0.9, 0.0), SQ) == pytest.approx((-0.1, 0.0))


def test_shortest_representative_tie_is_lexicographic():
    # (0.5, 0) and (-0.5, 0) are equally short; the smaller x wins
    assert tuple(shortest_representative((0.5, 0.0), SQ)) == (-0.5, 0.0)
    assert tuple(shortest_representatives(np.array([[0.5, 0.0]]), SQ)[0]) == (-0.5, 0.0)


def test_shortest_representative_brute_force(taus):
    rng = make_rng(8, 0)
    for tau in taus[:10]:
        vs = rng.uniform(-4, 4, (10_000, 2))
        fast = shortest_representatives(vs, tau)
        assert np.allclose(fast, brute_force_shortest(vs, tau), atol=1e-12)
        lat = (vs - fast) @ np.linalg.inv([[1, 0], [tau.a, tau.b]])
        assert np.allclose(lat, np.round(lat), atol=1e-9)
        d = dirichlet_domain(tau).hexagon
        assert d.contains_points(fast, tol=1e-12).all()
    for v in vs[:200]:
        assert np.allclose(shortest_representative(v, tau), brute_force_shortest(v[None], tau)[0])


def test_classify_examples():
    p = TorusPoint
    assert classify_triangle(p(0, 0), p(0.1, 0.1), p(0.2, 0.05), SQ) == HomotopyClass(0, 0)
    cls = classify_triangle(p(0, 0), p(0.45, 0), p(0.9, 0), SQ)
    assert cls == HomotopyClass(1, 0) and not cls.trivial
    assert classify_triangle(p(0.3, 0.3), p(0.3, 0.3), p(0.8, 0.6), HEX).trivial


def test_classify_symmetries(taus):
    rng = make_rng(12, 0)
    for tau in taus[:10]:
        x1, x2, x3 = (rng.random((5000, 2)) for _ in range(3))
        c = classify_triangles(x1, x2, x3, tau)
        assert np.array_equal(c, classify_triangles(x2, x3, x1, tau))
        assert np.array_equal(c, classify_triangles(x3, x1, x2, tau))
        assert np.array_equal(-c, classify_triangles(x3, x2, x1, tau))


def test_classifier_agrees_with_containment_and_brute_force(taus):
    rng = make_rng(13, 0)
    for tau in taus[:5]:
        x1, x2, x3 = (rng.random((20_000, 2)) for _ in range(3))
        c = classify_triangles(x1, x2, x3, tau)
        trivial = (c == 0).all(axis=1)
        assert np.array_equal(trivial, trivial_by_containment(x1, x2, x3, tau))
        assert np.array_equal(c, brute_force_classes(x1, x2, x3, tau))


def test_scalar_and_vector_classifiers_agree():
    rng = make_rng(14, 0)
    tau = TauParam(-0.27, 1.1)
    x = rng.random((300, 3, 2))
    c = classify_triangles(x[:, 0], x[:, 1], x[:, 2], tau)
    dom = dirichlet_domain(tau)
    for i in range(300):
        pts = [TorusPoint(*x[i, k]) for k in range(3)]
        assert tuple(classify_triangle(*pts, tau)) == tuple(c[i])
        assert is_trivial_by_containment(*pts, tau, dom) == (tuple(c[i]) == (0, 0))


def test_sampler_seed_zero_sequence():
    rng = make_rng(0)
    got = [tuple(sample_torus_point(rng, SQ)) for _ in range(3)]
    assert got == [
        (0.9429375528828794, 0.3163371523854981),
        (0.7223425886498254, 0.12560308543269327),
        (0.42297636251497006, 0.6480380975872828),
    ]


def test_sampler_mean():
    u = sample_torus_points(make_rng(1), 1_000_000)
    assert abs(u[:, 0].mean() - 0.5) <= 0.002
    assert abs(u[:, 1].mean() - 0.5) <= 0.002
    assert ((u >= 0) & (u < 1)).all()


def test_streams_uncorrelated():
    a = sample_torus_points(make_rng(1), 100_000)[:, 0]
    b = sample_torus_points(make_rng(2), 100_000)[:, 0]
    c = sample_torus_points(make_rng(1, 1), 100_000)[:, 0]
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.01
    assert abs(np.corrcoef(a, c)[0, 1]) < 0.01
