import math

import numpy as np
import pytest

from lejadisk.geometry import perp, random_disk_points
from lejadisk.interpolants import (
    DegenerateNodesError,
    NodeConfiguration,
    affine_invariance_check,
    build_h_st,
    build_P_j,
    build_P_st,
    build_Q_st,
    eval_P_j,
    eval_pair_polys,
    hakopian,
    interpolant_to_json,
    kergin,
    newton_monomial,
    newton_term,
    pair_data,
    pairs,
    verify_mean_value_conditions,
)
from lejadisk.leja import canonical_leja
from lejadisk.mean_value import QuadratureRule, ScalarField, gauss_legendre_01, segment_integral
from lejadisk.polys import BivariatePoly, derivative_uni, eval_uni

TRAPEZOID = np.array([[0.0, 0.0], [1.0, 0.0], [0.2, 1.0], [0.9, 1.0]])
EQUILATERAL = np.array([[math.cos(a), math.sin(a)] for a in (0, 2 * math.pi / 3, 4 * math.pi / 3)])


def random_nodes(rng, d):
    while True:
        pts = random_disk_points(rng, d)
        if NodeConfiguration(pts).min_triple_cross > 1e-3:
            return pts


# -- node configurations -----------------------------------------------------------

def test_general_position():
    assert NodeConfiguration(EQUILATERAL).general_position_flag
    collinear = np.array([[0, 0], [1, 1], [2, 2.0], [0, 1]])
    cfg = NodeConfiguration(collinear)
    assert not cfg.general_position_flag
    with pytest.raises(DegenerateNodesError):
        kergin(BivariatePoly.constant(1.0), cfg)
    with pytest.raises(DegenerateNodesError):
        build_P_st(cfg, 0, 1)


def test_pair_data_rejects_equal_indices():
    with pytest.raises(ValueError):
        pair_data(EQUILATERAL, 1, 1)


# -- h_st -------------------------------------------------------------------------

@pytest.mark.parametrize("d", [3, 5, 8])
def test_h_st_roots_and_derivative(d):
    a = canonical_leja(d).nodes
    for s, t in pairs(d):
        h = build_h_st(a, s, t)
        v = perp(a[s] - a[t])
        r = a @ v
        assert h.degree == d - 1
        assert np.max(np.abs(eval_uni(h, r))) <= 1e-12 * 2.0 ** d
        want = np.prod([v @ (a[s] - a[m]) for m in range(d) if m not in (s, t)])
        assert eval_uni(derivative_uni(h), r[s]) == pytest.approx(want, rel=1e-10, abs=1e-14)


def test_h_st_hand_example():
    a = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]])
    # v = perp(a0 - a1) = perp(1, -1) = (1, 1); roots <v, a_m> for m = 1, 2: 1, -1
    h = build_h_st(a, 0, 1)
    np.testing.assert_allclose(h.coeffs, [-1.0, 0.0, 1.0], atol=1e-15)


def test_h_st_parallel_chords():
    h = build_h_st(TRAPEZOID, 0, 1)
    v = perp(TRAPEZOID[0] - TRAPEZOID[1])
    assert abs(v @ (TRAPEZOID[2] - TRAPEZOID[3])) < 1e-15
    assert abs(eval_uni(derivative_uni(h), v @ TRAPEZOID[2])) < 1e-14


# -- P_j, P_st, Q_st ----------------------------------------------------------------

@pytest.mark.parametrize("d", [1, 2, 5, 13])
def test_P_j_cardinal(d):
    a = canonical_leja(d).nodes
    vals = np.array([build_P_j(a, j)(a) for j in range(d)])
    np.testing.assert_allclose(vals, np.eye(d), atol=1e-12)


def test_P_j_two_nodes():
    p0 = build_P_j(np.array([[1.0, 0.0], [-1.0, 0.0]]), 0).real_part()
    np.testing.assert_allclose(p0.coeffs, [[0.5, 0.0], [0.5, 0.0]], atol=1e-15)


def test_P_j_coincident_nodes():
    with pytest.raises(DegenerateNodesError):
        build_P_j(np.array([[0.5, 0.5], [0.5, 0.5]]), 0)


@pytest.mark.parametrize("d", [3, 6, 9])
def test_P_st_vanishes_at_nodes(d):
    a = canonical_leja(d).nodes
    for s, t in pairs(d):
        assert np.max(np.abs(build_P_st(a, s, t)(a))) < 1e-11


def test_P_st_equilateral_centroid():
    a = EQUILATERAL
    s, t = 0, 2
    v = perp(a[s] - a[t])
    r = a @ v
    x = a.mean(axis=0)
    num = np.prod([v @ x - r[m] for m in range(3) if m != s])
    den = (v @ v) * np.prod([r[s] - r[m] for m in range(3) if m not in (s, t)])
    assert float(build_P_st(a, s, t)(x)) == pytest.approx(num / den, rel=1e-12)


def test_Q_st_two_nodes():
    q = build_Q_st(np.array([[1.0, 0.0], [-1.0, 0.0]]), 0, 1)
    assert q.degree() == 0 and q.coeffs[0, 0] == pytest.approx(1.0)


@pytest.mark.parametrize("d", [2, 3, 7, 12])
def test_kronecker_identity(d):
    a = canonical_leja(d).nodes
    plist = pairs(d)
    w, wt = gauss_legendre_01(max(d, 8))
    M = np.empty((len(plist), len(plist)))
    for i, (u, v) in enumerate(plist):
        seg = a[u] + w[:, None] * (a[v] - a[u])
        M[:, i] = eval_pair_polys(a, seg, "Q")[0] @ wt
    np.testing.assert_allclose(M, np.eye(len(plist)), atol=1e-9)


@pytest.mark.parametrize("d", [4, 9, 16])
def test_product_and_coefficient_paths_agree(d, rng):
    sec = canonical_leja(d)
    x = random_disk_points(rng, 60)
    alphas = [(0, 0), (1, 0), (0, 1), (1, 1)]
    P = eval_pair_polys(sec, x, "P", alphas)
    Q = eval_pair_polys(sec, x, "Q", alphas)
    L = eval_P_j(sec, x, alphas)
    for i, (s, t) in enumerate(pairs(d)):
        p, q = build_P_st(sec, s, t), build_Q_st(sec, s, t)
        for k, al in enumerate(alphas):
            np.testing.assert_allclose(P[k, i], p.derivative(al)(x), rtol=1e-8,
                                       atol=1e-8 * max(1, np.abs(P[k, i]).max()))
            np.testing.assert_allclose(Q[k, i], q.derivative(al)(x), rtol=1e-8,
                                       atol=1e-8 * max(1, np.abs(Q[k, i]).max()))
    for j in range(d):
        pj = build_P_j(sec, j).real_part()
        for k, al in enumerate(alphas):
            np.testing.assert_allclose(L[k, j], pj.derivative(al)(x), rtol=1e-8,
                                       atol=1e-8 * max(1, np.abs(L[k, j]).max()))


def test_pair_kind_validated():
    with pytest.raises(ValueError):
        eval_pair_polys(EQUILATERAL, EQUILATERAL, "R")


# -- interpolants ---------------------------------------------------------------------

@pytest.mark.parametrize("d", [3, 6, 12])
def test_kergin_projector_leja_and_random(d, rng, coarse_grid):
    for nodes in (canonical_leja(d).nodes, random_nodes(rng, d)):
        p = BivariatePoly.random(rng, d - 1)
        K = kergin(p, nodes)
        x = coarse_grid.points
        scale = np.max(np.abs(p(x)))
        assert np.max(np.abs(K(x) - p(x))) <= 1e-8 * scale
        assert np.max(np.abs(K.evaluate(x, method="coeffs") - p(x))) <= 1e-8 * scale


@pytest.mark.parametrize("d", [3, 6, 12])
def test_hakopian_projector(d, rng, coarse_grid):
    for nodes in (canonical_leja(d).nodes, random_nodes(rng, d)):
        p = BivariatePoly.random(rng, d - 2)
        H = hakopian(p, nodes)
        x = coarse_grid.points
        assert np.max(np.abs(H(x) - p(x))) <= 1e-8 * np.max(np.abs(p(x)))


@pytest.mark.parametrize("d", [2, 5, 13])
def test_kergin_interpolates_nodes(d):
    from lejadisk.functions import get_function
    f = get_function("smooth-expcos")
    a = canonical_leja(d).nodes
    K = kergin(f, a)
    fa = f(a)
    assert np.all(np.abs(K(a) - fa) <= 1e-9 * (1 + np.abs(fa)))
    assert K.poly.degree(tol=1e-300) <= d - 1
    assert K.gradient_source == "analytic"


def test_kergin_single_node():
    f = ScalarField.from_poly(BivariatePoly.random(np.random.default_rng(0), 3))
    a = np.array([[0.3, -0.2]])
    K = kergin(f, a)
    x = random_disk_points(np.random.default_rng(1), 5)
    np.testing.assert_allclose(K(x), f(a)[0])


@pytest.mark.parametrize("d", [3, 8, 12])
def test_hakopian_segment_characterisation(d):
    from lejadisk.functions import get_function
    f = get_function("runge2d")
    a = canonical_leja(d).nodes
    H = hakopian(f, a)
    norm_f = 1.0
    for u, v in pairs(d):
        r = segment_integral(f, a[u], a[v]) - segment_integral(H, a[u], a[v])
        assert abs(r) <= 1e-9 * (1 + norm_f)
    assert H.poly.degree(tol=1e-300) <= d - 2


def test_hakopian_two_nodes_is_mean():
    from lejadisk.functions import get_function
    f = get_function("smooth-expcos")
    a = canonical_leja(2).nodes
    H = hakopian(f, a)
    x = random_disk_points(np.random.default_rng(3), 7)
    np.testing.assert_allclose(H(x), segment_integral(f, a[0], a[1]))
    with pytest.raises(ValueError):
        hakopian(f, a[:1])


@pytest.mark.parametrize("kind", ["kergin", "hakopian"])
def test_permutation_invariance(kind, rng, coarse_grid):
    from lejadisk.functions import get_function
    f = get_function("smooth-expcos")
    build = kergin if kind == "kergin" else hakopian
    cfg = NodeConfiguration(canonical_leja(7).nodes)
    base = build(f, cfg)(coarse_grid.points)
    shuffled = build(f, cfg.permuted(rng.permutation(7)))(coarse_grid.points)
    assert np.max(np.abs(base - shuffled)) <= 1e-9


def test_interpolant_json():
    p = BivariatePoly.random(np.random.default_rng(0), 2)
    data = interpolant_to_json(kergin(p, canonical_leja(3)))
    assert data["kind"] == "kergin" and data["d"] == 3
    assert data["node_section_ref"] == "leja:d=3"
    np.testing.assert_allclose(BivariatePoly.from_triangular(data["coeffs"]).coeffs, p.coeffs, atol=1e-12)


# -- mean-value conditions ---------------------------------------------------------------

def test_mean_value_kergin_d3(rng):
    f = ScalarField.from_poly(BivariatePoly.random(rng, 5))
    a = canonical_leja(3).nodes
    rep = verify_mean_value_conditions(kergin(f, a), f, a, 0, QuadratureRule(4))
    assert len(rep.residuals) == 1 + 2 + 3
    assert rep.max_residual <= 1e-9


def test_mean_value_hakopian_d4(rng):
    f = ScalarField.from_poly(BivariatePoly.random(rng, 5))
    a = canonical_leja(4).nodes
    rep = verify_mean_value_conditions(hakopian(f, a), f, a, 1, QuadratureRule(4))
    assert rep.max_residual <= 1e-9


def test_mean_value_trivial(rng):
    p = BivariatePoly.random(rng, 3)
    rep = verify_mean_value_conditions(p, p, canonical_leja(4).nodes, 0, QuadratureRule(3))
    assert rep.max_residual == 0.0


def test_mean_value_detects_wrong_polynomial(rng):
    f = ScalarField.from_poly(BivariatePoly.random(rng, 4))
    a = canonical_leja(4).nodes
    rep = verify_mean_value_conditions(BivariatePoly.zero(3), f, a, 0, QuadratureRule(3))
    assert rep.max_residual > 1e-3


def test_mean_value_bad_k():
    with pytest.raises(ValueError):
        verify_mean_value_conditions(BivariatePoly.zero(), BivariatePoly.zero(), EQUILATERAL, 3)


# -- Newton terms -------------------------------------------------------------------------

def test_newton_term_d0():
    f = ScalarField.from_poly(BivariatePoly.random(np.random.default_rng(0), 2))
    sec = canonical_leja(3)
    t = newton_term(f, sec, 0)
    assert t.coeffs[0, 0] == pytest.approx(float(f(sec.nodes[:1])[0]))


def test_newton_term_linear_d1():
    p = BivariatePoly.linear(0.4, -1.2, 2.5)
    f = ScalarField.from_poly(p)
    sec = canonical_leja(2)
    term = newton_term(f, sec, 1)
    x = random_disk_points(np.random.default_rng(1), 20)
    np.testing.assert_allclose(term(x), p(x) - float(p(sec.nodes[0])), atol=1e-13)


def test_newton_monomial():
    m = newton_monomial((1, 2, 2), canonical_leja(3).nodes)
    assert m.degree() == 3
    x = np.array([[0.3, 0.4]])
    e = canonical_leja(3).nodes
    assert float(m(x)[0]) == pytest.approx((0.3 - e[0, 0]) * (0.4 - e[1, 1]) * (0.4 - e[2, 1]))


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_newton_difference_identity(d, rng, coarse_grid):
    f = ScalarField.from_poly(BivariatePoly.random(rng, 4))
    sec = canonical_leja(d + 1)
    diff = kergin(f, sec.nodes)(coarse_grid.points) - kergin(f, sec.nodes[:d])(coarse_grid.points)
    term = newton_term(f, sec, d, QuadratureRule(4))(coarse_grid.points)
    assert np.max(np.abs(diff - term)) <= 1e-8


def test_newton_term_needs_nodes():
    with pytest.raises(ValueError):
        newton_term(BivariatePoly.zero(), canonical_leja(2), 2)


# -- affine invariance -------------------------------------------------------------------

@pytest.mark.parametrize("A", [
    np.eye(2),
    np.array([[math.cos(math.pi / 4), -math.sin(math.pi / 4)], [math.sin(math.pi / 4), math.cos(math.pi / 4)]]),
    0.5 * np.eye(2),
])
def test_affine_invariance(A):
    from lejadisk.functions import get_function
    assert affine_invariance_check(get_function("smooth-expcos"), canonical_leja(6), A, (0.1, -0.3))


def test_affine_singular_map():
    with pytest.raises(ValueError):
        affine_invariance_check(BivariatePoly.zero(), canonical_leja(3), np.zeros((2, 2)))
