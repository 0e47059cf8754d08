"""Simplex functionals realised by quadrature.

For a tuple ``(a_0, ..., a_d)`` of plane points the simplex functional of
``f`` is the integral of ``f(a_0 + sum_j t_j (a_j - a_0))`` over the
standard simplex ``{t in [0,1]^d : sum t_j <= 1}`` (total mass ``1/d!``),
and ``f(a_0)`` when ``d = 0``.  Segment integrals are the ``d = 1`` case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .geometry import as_points, perp, random_disk_points

Field = Callable[[np.ndarray], np.ndarray]

FD_STEP = 1e-6


class MissingDerivativeError(ValueError):
    """A derivative of a :class:`ScalarField` was requested but is not available."""


@dataclass(frozen=True)
class ScalarField:
    """A real function on the plane with optional derivatives.

    ``value`` maps an ``(n, 2)`` array to ``(n,)`` values.  ``gradient``
    maps to ``(n, 2)``.  ``higher_derivatives(alpha)`` returns a callable for
    ``D^alpha f`` with ``alpha = (a1, a2)``.  ``max_order`` is the highest
    order ``higher_derivatives`` supports.
    """

    value: Field
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    higher_derivatives: Optional[Callable[[tuple[int, int]], Field]] = None
    smoothness: str = "C0"
    max_order: int = 1
    name: str = "f"
    allow_fd: bool = True
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        if self.check and self.gradient is not None:
            check_gradient(self)

    def __call__(self, x) -> np.ndarray:
        pts = as_points(x)
        return np.asarray(self.value(pts.reshape(-1, 2)), dtype=float).reshape(pts.shape[:-1])

    @classmethod
    def from_poly(cls, p, name: str = "poly") -> "ScalarField":
        """Wrap a :class:`~lejadisk.polys.BivariatePoly` with exact derivatives."""
        p1, p2 = p.partial(1), p.partial(2)

        def grad(x):
            return np.stack([p1(x), p2(x)], axis=-1)

        return cls(value=p, gradient=grad, higher_derivatives=p.derivative,
                   smoothness="polynomial", max_order=10**6, name=name, check=False)

    @property
    def has_gradient(self) -> bool:
        return self.gradient is not None

    def grad(self, x) -> np.ndarray:
        """Gradient at ``x``; central differences when no analytic gradient is set."""
        pts = as_points(x)
        flat = pts.reshape(-1, 2)
        if self.gradient is not None:
            g = np.asarray(self.gradient(flat), dtype=float)
        elif self.allow_fd:
            g = fd_gradient(self.value, flat)
        else:
            raise MissingDerivativeError(f"{self.name}: no gradient and finite differences disabled")
        return g.reshape(pts.shape)

    @property
    def gradient_source(self) -> str:
        return "analytic" if self.gradient is not None else "finite-difference"

    def derivative(self, alpha: tuple[int, int]) -> Field:
        """Callable for ``D^alpha f``."""
        a1, a2 = alpha
        order = a1 + a2
        if order == 0:
            return self.__call__
        if self.higher_derivatives is not None and order <= self.max_order:
            return self.higher_derivatives((a1, a2))
        if order == 1 and (self.gradient is not None or self.allow_fd):
            axis = 0 if a1 == 1 else 1
            return lambda x: self.grad(x)[..., axis]
        raise MissingDerivativeError(f"{self.name}: D^{alpha} not available")

    def compose_affine(self, A, b, name: str | None = None) -> "ScalarField":
        """The field ``x -> f(A x + b)``."""
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)

        def value(x):
            return self.value(as_points(x) @ A.T + b)

        grad = None
        if self.gradient is not None:
            def grad(x):
                return self.gradient(as_points(x) @ A.T + b) @ A

        return ScalarField(value, grad, smoothness=self.smoothness, max_order=1,
                           name=name or f"{self.name}∘affine", allow_fd=self.allow_fd,
                           check=False)


def fd_gradient(value: Field, x: np.ndarray, h: float = FD_STEP) -> np.ndarray:
    e1, e2 = np.array([h, 0.0]), np.array([0.0, h])
    g1 = (value(x + e1) - value(x - e1)) / (2 * h)
    g2 = (value(x + e2) - value(x - e2)) / (2 * h)
    return np.stack([g1, g2], axis=-1)


def check_gradient(f: ScalarField, n: int = 20, tol: float = 1e-5, seed: int = 0) -> None:
    """Compare the analytic gradient with central differences at random disk points."""
    pts = random_disk_points(np.random.default_rng(seed), n)
    g = np.asarray(f.gradient(pts), dtype=float)
    fd = fd_gradient(f.value, pts)
    err = np.abs(g - fd) / (1.0 + np.abs(g))
    if np.max(err) > tol:
        raise ValueError(f"{f.name}: gradient disagrees with finite differences (max rel err {np.max(err):.2e})")


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def gauss_legendre_01(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss--Legendre nodes and weights on ``[0, 1]``."""
    x, w = roots_legendre(n)
    return (x + 1) / 2, w / 2


@lru_cache(maxsize=None)
def gauss_jacobi_01(n: int, power: int) -> tuple[np.ndarray, np.ndarray]:
    """Rule on ``[0, 1]`` for the weight ``(1 - u)**power``."""
    if power == 0:
        return gauss_legendre_01(n)
    x, w = roots_jacobi(n, power, 0)
    return (x + 1) / 2, w / 2 ** (power + 1)


@dataclass(frozen=True)
class QuadratureRule:
    """Tensor Gauss rule with ``node_count`` nodes per simplex dimension.

    Exact for polynomial integrands of total degree ``<= 2*node_count - 1``.
    """

    node_count: int = 32

    def __post_init__(self):
        if self.node_count < 1:
            raise ValueError("node_count must be >= 1")

    @classmethod
    def for_degree(cls, degree: int | None) -> "QuadratureRule":
        if degree is None:
            return cls(32)
        return cls(max(16, math.ceil((degree + 1) / 2)))

    def simplex_nodes(self, dim: int) -> tuple[np.ndarray, np.ndarray]:
        """Nodes ``t`` of shape ``(m, dim)`` in the standard simplex and weights ``(m,)``."""
        return _simplex_rule(self.node_count, dim)


DEFAULT_SEGMENT_RULE = QuadratureRule(32)
DEFAULT_SIMPLEX_RULE = QuadratureRule(16)


@lru_cache(maxsize=64)
def _simplex_rule(n: int, dim: int) -> tuple[np.ndarray, np.ndarray]:
    # collapsed coordinates t_i = u_i * prod_{l<i} (1 - u_l); the Jacobian
    # prod_i (1 - u_i)**(dim - 1 - i) is absorbed into Gauss--Jacobi weights
    us, ws = [], []
    for i in range(dim):
        u, w = gauss_jacobi_01(n, dim - 1 - i)
        us.append(u)
        ws.append(w)
    U = np.stack(np.meshgrid(*us, indexing="ij"), axis=-1).reshape(-1, dim)
    W = np.prod(np.stack(np.meshgrid(*ws, indexing="ij"), axis=-1).reshape(-1, dim), axis=1)
    T = np.empty_like(U)
    rest = np.ones(len(U))
    for i in range(dim):
        T[:, i] = U[:, i] * rest
        rest = rest * (1 - U[:, i])
    T.setflags(write=False)
    W.setflags(write=False)
    return T, W


def _segment_points(a, b, rule: QuadratureRule) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    a = as_points(a).reshape(2)
    b = as_points(b).reshape(2)
    w, wt = gauss_legendre_01(rule.node_count)
    return a + w[:, None] * (b - a), wt, b - a


def segment_integral(f: Field, a, b, rule: QuadratureRule = DEFAULT_SEGMENT_RULE) -> float:
    """``int_0^1 f(a + w (b - a)) dw``."""
    pts, wt, _ = _segment_points(a, b, rule)
    return float(np.dot(wt, np.asarray(f(pts), dtype=float)))


def simplex_integral(f: Field, tuple_points, rule: QuadratureRule = DEFAULT_SIMPLEX_RULE) -> float:
    """Simplex functional of ``f`` over the tuple ``(a_0, ..., a_d)``."""
    A = as_points(tuple_points).reshape(-1, 2)
    dim = len(A) - 1
    if dim < 0:
        raise ValueError("need at least one point")
    if dim == 0:
        return float(np.asarray(f(A[:1]), dtype=float)[0])
    T, W = rule.simplex_nodes(dim)
    pts = A[0] + T @ (A[1:] - A[0])
    return float(np.dot(W, np.asarray(f(pts), dtype=float)))


def perp_directional_segment_integral(f: ScalarField, a, b,
                                      rule: QuadratureRule = DEFAULT_SEGMENT_RULE) -> float:
    """``int_0^1 <grad f(a + w (b - a)), perp(b - a)> dw``."""
    pts, wt, direction = _segment_points(a, b, rule)
    if not f.has_gradient and not f.allow_fd:
        raise MissingDerivativeError(f"{f.name}: gradient required")
    g = f.grad(pts)
    return float(np.dot(wt, g @ perp(direction)))
