import csv
import io
import math

import numpy as np
import pytest

from lejadisk.bounds import (
    DISK_DIAMETER,
    PairGeometry,
    hakopian_pair_norms,
    hst_bounds_all,
    hst_magnitude_bounds,
    kergin_pair_norms,
    lagrange_lebesgue,
    lagrange_norms,
    lebesgue_inequality_sides,
    outer_product_residual,
    pair_geometry_residual,
    taylor_polynomial,
)
from lejadisk.functions import get_function
from lejadisk.geometry import NORM_SLACK
from lejadisk.interpolants import pairs
from lejadisk.leja import canonical_leja
from lejadisk.mean_value import ScalarField
from lejadisk.polys import BivariatePoly


def test_slack_constant():
    assert NORM_SLACK == 0.01


def test_lagrange_lebesgue_small(grid):
    assert lagrange_lebesgue(canonical_leja(1), grid) == pytest.approx(1.0)
    np.testing.assert_allclose(lagrange_norms(canonical_leja(2), grid), [1.0, 1.0])


def test_lagrange_growth_reported(coarse_grid):
    vals = [lagrange_lebesgue(canonical_leja(d), coarse_grid) for d in (4, 8, 16, 32)]
    # nondecreasing on the dyadic range (empirical)
    assert all(b >= a - 1e-9 for a, b in zip(vals, vals[1:]))


def test_pair_geometry_identity():
    for d in (2, 3, 13, 64):
        assert pair_geometry_residual(canonical_leja(d)) <= 1e-12
    g = PairGeometry.of(canonical_leja(4), 0, 1)
    assert g.beta == pytest.approx(-2 * math.sin(-math.pi / 2))
    assert g.alpha == pytest.approx(1j)


@pytest.mark.parametrize("d", [3, 5, 13, 32])
def test_outer_product_identity(d):
    assert outer_product_residual(canonical_leja(d)) <= 1e-12


def test_kergin_pairs_d2(grid):
    rep = kergin_pair_norms(canonical_leja(2), grid)
    assert len(rep.rows) == 1
    assert rep.rows[0]["norm"] <= 4
    assert rep.passed


def test_kergin_pairs_d16(grid):
    rep = kergin_pair_norms(canonical_leja(16), grid)
    assert len(rep.rows) == 120
    assert rep.passed and rep.max_ratio <= 1
    assert rep.summary["total"] <= rep.summary["total_bound"]


def test_hakopian_pairs(grid):
    rep2 = hakopian_pair_norms(canonical_leja(2), grid)
    assert rep2.rows[0]["norm"] == pytest.approx(1.0)
    assert rep2.rows[0]["bound"] == 32
    rep8 = hakopian_pair_norms(canonical_leja(8), grid)
    assert rep8.passed and len(rep8.rows) == 28


def test_pair_norms_need_two_nodes(grid):
    with pytest.raises(ValueError):
        kergin_pair_norms(canonical_leja(1), grid)


def test_hst_d4_lower_bound(coarse_grid):
    rep = hst_bounds_all(canonical_leja(4), coarse_grid)
    assert rep.asserted and rep.passed
    for row in rep.rows:
        # 2^0 |beta|^0 / 2^2
        assert row["log_lower"] == pytest.approx(math.log(0.25))
        assert row["log_hprime_node"] >= row["log_lower"]


def test_hst_d2_reported_only(coarse_grid):
    rep = hst_magnitude_bounds(canonical_leja(2), 0, 1, coarse_grid)
    assert not rep.asserted
    assert all(math.isfinite(v) for v in rep.rows[0].values() if isinstance(v, float))


def test_hst_d13_random_pairs(grid):
    sec = canonical_leja(13)
    rng = np.random.default_rng(7)
    plist = pairs(13)
    for i in rng.choice(len(plist), 10, replace=False):
        s, t = plist[i]
        rep = hst_magnitude_bounds(sec, s, t, grid)
        assert rep.passed, rep.rows[0]


def test_hst_rejects_bad_pair():
    with pytest.raises(ValueError):
        hst_magnitude_bounds(canonical_leja(5), 3, 1)


@pytest.mark.parametrize("d", [4, 5, 13, 32])
def test_denominator_chain(d, coarse_grid):
    rep = hst_bounds_all(canonical_leja(d), coarse_grid)
    assert rep.summary["max_chain_residual"] <= 1e-9


def test_report_exports(coarse_grid):
    rep = kergin_pair_norms(canonical_leja(5), coarse_grid)
    rows = list(csv.DictReader(io.StringIO(rep.to_csv())))
    assert len(rows) == 10
    assert rows[0]["d"] == "5" and rows[0]["r"] == "1"
    assert float(rows[0]["norm"]) == rep.rows[0]["norm"]
    summary = rep.to_json()
    assert summary["passed"] and summary["slack"] == NORM_SLACK


def test_lebesgue_sides_polynomial(coarse_grid):
    rng = np.random.default_rng(0)
    sec = canonical_leja(6)
    p = BivariatePoly.random(rng, 5)
    sides = lebesgue_inequality_sides(ScalarField.from_poly(p), p, sec, coarse_grid, "kergin")
    assert sides.lhs <= 1e-10 and sides.rhs == pytest.approx(0.0, abs=1e-12)
    q = BivariatePoly.random(rng, 4)
    sides = lebesgue_inequality_sides(ScalarField.from_poly(q), q, sec, coarse_grid, "hakopian")
    assert sides.lhs <= 1e-10 and sides.rhs == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("kind, deg", [("kergin", 7), ("hakopian", 6), ("kergin", 3)])
def test_lebesgue_sides_expcos(kind, deg, coarse_grid):
    f = get_function("smooth-expcos")
    Q = taylor_polynomial(f, deg)
    sides = lebesgue_inequality_sides(f, Q, canonical_leja(8), coarse_grid, kind)
    assert 0 < sides.lhs < sides.rhs
    assert sides.holds


def test_lebesgue_sides_degree_checked(coarse_grid):
    f = get_function("smooth-expcos")
    with pytest.raises(ValueError):
        lebesgue_inequality_sides(f, taylor_polynomial(f, 7), canonical_leja(8), coarse_grid, "hakopian")
    with pytest.raises(ValueError):
        lebesgue_inequality_sides(f, taylor_polynomial(f, 2), canonical_leja(8), coarse_grid, "other")


def test_taylor_polynomial_expcos():
    Q = taylor_polynomial(get_function("smooth-expcos"), 2)
    # e^x cos y = 1 + x + x^2/2 - y^2/2 + ...
    np.testing.assert_allclose(Q.coeffs, [[1, 0, -0.5], [1, 0, 0], [0.5, 0, 0]], atol=1e-15)


def test_disk_diameter():
    assert DISK_DIAMETER == 2.0
