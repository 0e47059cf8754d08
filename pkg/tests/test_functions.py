import math

import numpy as np
import pytest

from lejadisk.functions import REGISTRY, RADIAL_CENTRE, TestFunctionRegistry, get_function, symbolic_field
from lejadisk.geometry import random_disk_points
from lejadisk.mean_value import check_gradient, fd_gradient

NAMED = ["smooth-expcos", "runge2d", "c4-radial", "c5-radial"]


@pytest.mark.parametrize("name", NAMED)
def test_entries_have_gradients(name):
    f = get_function(name)
    assert f.has_gradient and f.name == name
    check_gradient(f)


@pytest.mark.parametrize("name", ["smooth-expcos", "runge2d"])
def test_smooth_entries_reach_order_five(name):
    f = get_function(name)
    assert f.max_order >= 5 and REGISTRY.smoothness(name) == "Cinf"
    x = random_disk_points(np.random.default_rng(0), 8)
    h = 1e-4
    # order-5 derivative against a difference quotient of order 4
    d4 = f.derivative((2, 2))
    e1 = np.array([h, 0.0])
    approx = (d4(x + e1) - d4(x - e1)) / (2 * h)
    np.testing.assert_allclose(f.derivative((3, 2))(x), approx, rtol=1e-5, atol=1e-5)


def test_expcos_values():
    f = get_function("smooth-expcos")
    x = np.array([[0.5, 0.25]])
    assert f(x)[0] == pytest.approx(math.exp(0.5) * math.cos(0.25))
    assert f.derivative((0, 2))(x)[0] == pytest.approx(-math.exp(0.5) * math.cos(0.25))


def test_runge_and_radial_values():
    x = np.array([[0.3, 0.4]])
    assert get_function("runge2d")(x)[0] == pytest.approx(1 / (1 + 5 * 0.25))
    dist = math.hypot(0.3 - RADIAL_CENTRE[0], 0.4 - RADIAL_CENTRE[1])
    assert get_function("c4-radial")(x)[0] == pytest.approx(dist ** 5)
    assert get_function("c5-radial")(x)[0] == pytest.approx(dist ** 7)
    assert REGISTRY.smoothness("c4-radial") == "C4"


def test_polynomial_families():
    p = get_function("poly-3", seed=4)
    assert p.value.degree() == 3
    np.testing.assert_array_equal(p.value.coeffs, get_function("poly-3", seed=4).value.coeffs)
    assert get_function("poly-d-1", d=7).value.degree() == 6
    assert get_function("poly-d-2", d=7).value.degree() == 5
    with pytest.raises(ValueError):
        get_function("poly-d-2")
    assert REGISTRY.smoothness("poly-d-1") == "polynomial"


def test_unknown_id():
    with pytest.raises(KeyError):
        get_function("nope")
    assert "nope" not in REGISTRY
    assert "runge2d" in REGISTRY


def test_symbolic_field_custom():
    f = symbolic_field("x**2*y", "xxy", "Cinf", 3)
    x = np.array([[2.0, 3.0]])
    np.testing.assert_allclose(f.grad(x), [[12.0, 4.0]])
    assert f.derivative((2, 1))(x)[0] == 2.0
    assert f.derivative((3, 0))(x)[0] == 0.0


def test_registry_is_isolated():
    reg = TestFunctionRegistry()
    assert reg.names() == ["poly-<k>", "poly-d-1", "poly-d-2"]
