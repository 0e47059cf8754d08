"""Named test functions for the experiments and the oracle checks.

Each entry is a :class:`~lejadisk.mean_value.ScalarField` with an analytic
gradient and, up to ``max_order``, analytic higher derivatives.  Apart from
the hand-written ``smooth-expcos``, derivatives are generated symbolically
with sympy and compiled to numpy callables.

Polynomial families are addressed by id: ``poly-<k>`` is a random
polynomial of degree ``k``; ``poly-d-1`` and ``poly-d-2`` take their degree
from the interpolation degree ``d`` so that they are reproduced exactly by
the Kergin and Hakopian projectors respectively.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
import sympy as sp

from .mean_value import ScalarField
from .polys import BivariatePoly

RADIAL_CENTRE = (0.3, 0.2)

_X, _Y = sp.symbols("x y", real=True)


def _expcos() -> ScalarField:
    def value(x):
        return np.exp(x[..., 0]) * np.cos(x[..., 1])

    def grad(x):
        e = np.exp(x[..., 0])
        return np.stack([e * np.cos(x[..., 1]), -e * np.sin(x[..., 1])], axis=-1)

    def higher(alpha):
        a, b = alpha
        # D^(a,b) e^x cos y = e^x cos(y + b pi/2)
        return lambda x: np.exp(x[..., 0]) * np.cos(x[..., 1] + b * math.pi / 2)

    # the closed form holds at every order
    return ScalarField(value, grad, higher, smoothness="Cinf", max_order=64, name="smooth-expcos")


@lru_cache(maxsize=None)
def _sympy_derivative(expr_src: str, a: int, b: int) -> Callable:
    expr = sp.sympify(expr_src, locals={"x": _X, "y": _Y})
    deriv = sp.diff(expr, _X, a, _Y, b) if (a or b) else expr
    fn = sp.lambdify((_X, _Y), sp.simplify(deriv) if a + b <= 2 else deriv, "numpy")

    def call(x):
        x = np.asarray(x, dtype=float)
        out = fn(x[..., 0], x[..., 1])
        return np.broadcast_to(np.asarray(out, dtype=float), x.shape[:-1]).copy()

    return call


def symbolic_field(expr_src: str, name: str, smoothness: str, max_order: int) -> ScalarField:
    """Field from a sympy expression in ``x`` and ``y`` with compiled derivatives."""
    value = _sympy_derivative(expr_src, 0, 0)
    dx = _sympy_derivative(expr_src, 1, 0)
    dy = _sympy_derivative(expr_src, 0, 1)

    def grad(x):
        return np.stack([dx(x), dy(x)], axis=-1)

    def higher(alpha):
        return _sympy_derivative(expr_src, int(alpha[0]), int(alpha[1]))

    return ScalarField(value, grad, higher, smoothness=smoothness, max_order=max_order, name=name)


def _radial(power: int, name: str, smoothness: str, order: int) -> ScalarField:
    cx, cy = RADIAL_CENTRE
    src = f"((x - {cx})**2 + (y - {cy})**2)**({power}/2)"
    return symbolic_field(src, name, smoothness, order)


def polynomial_field(degree: int, seed: int = 0, name: str | None = None) -> ScalarField:
    """Random polynomial with standard normal coefficients, seeded."""
    p = BivariatePoly.random(np.random.default_rng(seed), degree)
    return ScalarField.from_poly(p, name=name or f"poly-{degree}")


@dataclass(frozen=True)
class RegistryEntry:
    name: str
    smoothness: str
    description: str
    build: Callable[[], ScalarField]


class TestFunctionRegistry:
    """Look-up table of named test functions."""

    __test__ = False  # not a pytest class

    def __init__(self):
        self._entries: dict[str, RegistryEntry] = {}
        self._cache: dict[str, ScalarField] = {}

    def register(self, entry: RegistryEntry) -> None:
        self._entries[entry.name] = entry

    def names(self) -> list[str]:
        return sorted(self._entries) + ["poly-<k>", "poly-d-1", "poly-d-2"]

    def get(self, name: str, d: int | None = None, seed: int = 0) -> ScalarField:
        """The field called ``name``; polynomial ids may need ``d`` and ``seed``."""
        if name in self._entries:
            if name not in self._cache:
                self._cache[name] = self._entries[name].build()
            return self._cache[name]
        m = re.fullmatch(r"poly-(\d+)", name)
        if m:
            return polynomial_field(int(m.group(1)), seed, name)
        m = re.fullmatch(r"poly-d-([12])", name)
        if m:
            if d is None:
                raise ValueError(f"{name} needs the interpolation degree d")
            return polynomial_field(max(d - int(m.group(1)), 0), seed, name)
        raise KeyError(f"unknown test function {name!r}; known: {', '.join(self.names())}")

    def smoothness(self, name: str) -> str:
        if name in self._entries:
            return self._entries[name].smoothness
        if re.fullmatch(r"poly-(\d+|d-[12])", name):
            return "polynomial"
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        try:
            self.smoothness(name)
        except KeyError:
            return False
        return True


def default_registry() -> TestFunctionRegistry:
    reg = TestFunctionRegistry()
    reg.register(RegistryEntry("smooth-expcos", "Cinf", "exp(x1) cos(x2)", _expcos))
    reg.register(RegistryEntry(
        "runge2d", "Cinf", "1/(1 + 5|x|^2)",
        lambda: symbolic_field("1/(1 + 5*(x**2 + y**2))", "runge2d", "Cinf", 5)))
    reg.register(RegistryEntry(
        "c4-radial", "C4", "|x - c|^5, c = (0.3, 0.2)",
        lambda: _radial(5, "c4-radial", "C4", 4)))
    reg.register(RegistryEntry(
        "c5-radial", "C6", "|x - c|^7, c = (0.3, 0.2)",
        lambda: _radial(7, "c5-radial", "C6", 6)))
    return reg


REGISTRY = default_registry()


def get_function(name: str, d: int | None = None, seed: int = 0) -> ScalarField:
    return REGISTRY.get(name, d=d, seed=seed)
