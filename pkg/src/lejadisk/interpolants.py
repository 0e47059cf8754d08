"""Kergin and Hakopian interpolation in the plane from explicit cardinal formulas.

For nodes ``a_0, ..., a_{d-1}`` in general position and a pair ``s != t``
write ``v = perp(a_s - a_t)`` and ``r_m = <v, a_m>``.  The auxiliary
polynomial is ``h_st(w) = prod_{m != s} (w - r_m)``; note ``r_s = r_t``.

* Kergin:   ``K[A; f] = sum_j f(a_j) P_j + sum_{s<t} P_st * int_[a_s,a_t] D_v f``
  with ``P_j = Re`` of the complex Lagrange cardinal polynomial and
  ``P_st(x) = h_st(<v, x>) / (|v|**2 h_st'(r_s))``.  The directional
  derivative is taken along the same ``v`` that defines ``P_st``; with the
  opposite direction the operator fails to reproduce linear functions.
* Hakopian: ``H[A; f] = sum_{s<t} Q_st * int_[a_s,a_t] f`` with
  ``Q_st(x) = h_st'(<v, x>) / h_st'(r_s)``.

Every cardinal polynomial is available both as a monomial coefficient table
and through a product-form evaluator that never expands coefficients.  The
coefficient tables are exact algebra but lose digits once ``d`` reaches the
twenties; the product form stays accurate and is the default evaluator.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .geometry import as_points, cross, perp, random_disk_points
from .leja import LejaSection
from .mean_value import (
    DEFAULT_SEGMENT_RULE,
    QuadratureRule,
    ScalarField,
    perp_directional_segment_integral,
    segment_integral,
    simplex_integral,
)
from .polys import (
    BivariatePoly,
    ComplexPoly,
    SignLogValue,
    UnivariatePoly,
    compose_linear,
    derivative_uni,
    monic_from_roots,
    product_taylor,
)

GENERAL_POSITION_TOL = 1e-12

_PAIR_CHUNK = 32


class DegenerateNodesError(ValueError):
    """Nodes are not in general position (three collinear or two coincident)."""


# ---------------------------------------------------------------------------
# nodes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NodeConfiguration:
    """An ordered tuple of plane nodes."""

    points: np.ndarray
    label: str = "nodes"

    def __post_init__(self):
        pts = np.array(as_points(self.points), dtype=float).reshape(-1, 2)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_section(cls, section: LejaSection) -> "NodeConfiguration":
        return cls(section.nodes, label=f"leja:d={section.d}")

    @property
    def d(self) -> int:
        return len(self.points)

    @property
    def z(self) -> np.ndarray:
        return self.points[:, 0] + 1j * self.points[:, 1]

    @cached_property
    def scale(self) -> float:
        return max(1.0, float(np.max(np.abs(self.points))))

    @cached_property
    def min_triple_cross(self) -> float:
        """Smallest ``|cross(a_j - a_i, a_k - a_i)|`` over triples (``inf`` if ``d < 3``)."""
        if self.d < 3:
            return math.inf
        idx = np.array(list(itertools.combinations(range(self.d), 3)))
        a, b, c = (self.points[idx[:, k]] for k in range(3))
        return float(np.min(np.abs(cross(b - a, c - a))))

    @cached_property
    def min_separation(self) -> float:
        if self.d < 2:
            return math.inf
        diff = self.points[:, None, :] - self.points[None, :, :]
        dist = np.sqrt((diff ** 2).sum(-1))
        return float(dist[np.triu_indices(self.d, 1)].min())

    @property
    def general_position_flag(self) -> bool:
        tol = GENERAL_POSITION_TOL * self.scale ** 2
        return self.min_separation > tol and self.min_triple_cross > tol

    def require_general_position(self) -> None:
        if not self.general_position_flag:
            raise DegenerateNodesError(
                f"{self.label}: nodes not in general position "
                f"(min separation {self.min_separation:.3e}, min triple cross {self.min_triple_cross:.3e})")

    def permuted(self, order: Sequence[int]) -> "NodeConfiguration":
        return NodeConfiguration(self.points[list(order)], label=f"{self.label}[permuted]")

    def mapped(self, A, b) -> "NodeConfiguration":
        A = np.asarray(A, dtype=float)
        return NodeConfiguration(self.points @ A.T + np.asarray(b, dtype=float), label=f"{self.label}[affine]")


def _as_config(nodes) -> NodeConfiguration:
    if isinstance(nodes, NodeConfiguration):
        return nodes
    if isinstance(nodes, LejaSection):
        return NodeConfiguration.from_section(nodes)
    return NodeConfiguration(nodes)


# ---------------------------------------------------------------------------
# pair data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PairData:
    """Everything about the pair ``(s, t)`` needed by ``h_st``, ``P_st`` and ``Q_st``."""

    s: int
    t: int
    v: np.ndarray              # perp(a_s - a_t)
    roots: np.ndarray          # r_m = <v, a_m>, m != s (so r_t appears once)
    other_roots: np.ndarray    # r_m for m != s, t
    centre: float              # r_s (= r_t)
    denominator: SignLogValue  # h_st'(r_s) = prod_{m != s,t} (r_s - r_m)

    @property
    def v_norm2(self) -> float:
        return float(self.v @ self.v)


def pair_data(nodes, s: int, t: int) -> PairData:
    cfg = _as_config(nodes)
    if s == t:
        raise ValueError("s and t must differ")
    a = cfg.points
    v = perp(a[s] - a[t])
    r = a @ v
    roots = np.delete(r, s)
    others = np.delete(r, [s, t])
    denom = SignLogValue.product(r[s] - others)
    if denom.sign == 0:
        raise DegenerateNodesError(f"h'_{s}{t} vanishes at the node: collinear triple through a_{s}, a_{t}")
    return PairData(s, t, v, roots, others, float(r[s]), denom)


def pairs(d: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(d), 2))


# ---------------------------------------------------------------------------
# cardinal polynomials, coefficient form
# ---------------------------------------------------------------------------

def build_h_st(nodes, s: int, t: int) -> UnivariatePoly:
    """``h_st(w) = prod_{m != s} (w - <perp(a_s - a_t), a_m>)``."""
    cfg = _as_config(nodes)
    cfg.require_general_position()
    return monic_from_roots(pair_data(cfg, s, t).roots)


def build_P_j(nodes, j: int) -> ComplexPoly:
    """Lagrange cardinal polynomial of node ``j`` in the complex variable; use its real part."""
    cfg = _as_config(nodes)
    if cfg.min_separation <= GENERAL_POSITION_TOL * cfg.scale:
        raise DegenerateNodesError("coincident nodes")
    z = cfg.z
    others = np.delete(z, j)
    return ComplexPoly.from_roots(others, scale=1.0 / np.prod(z[j] - others))


def build_P_st(nodes, s: int, t: int) -> BivariatePoly:
    """``P_st(x) = h_st(<v, x>) / (|v|**2 h_st'(r_s))`` as a coefficient table."""
    cfg = _as_config(nodes)
    cfg.require_general_position()
    pd = pair_data(cfg, s, t)
    p = compose_linear(monic_from_roots(pd.roots), pd.v[0], pd.v[1])
    return p / (pd.v_norm2 * pd.denominator.value)


def build_Q_st(nodes, s: int, t: int) -> BivariatePoly:
    """``Q_st(x) = h_st'(<v, x>) / h_st'(r_s)`` as a coefficient table."""
    cfg = _as_config(nodes)
    if cfg.d < 2:
        raise ValueError("Q_st needs d >= 2")
    cfg.require_general_position()
    pd = pair_data(cfg, s, t)
    p = compose_linear(derivative_uni(monic_from_roots(pd.roots)), pd.v[0], pd.v[1])
    return p / pd.denominator.value


# ---------------------------------------------------------------------------
# cardinal polynomials, product form
# ---------------------------------------------------------------------------

EVAL_DTYPE = np.longdouble


def _ridge_factor(alpha: tuple[int, int], v: np.ndarray) -> np.ndarray:
    # D^alpha of x -> g(<v, x>) is v1**a1 v2**a2 g^{(|alpha|)}
    return v[..., 0] ** alpha[0] * v[..., 1] ** alpha[1]


def _alpha_list(alphas) -> list[tuple[int, int]]:
    if len(alphas) == 2 and all(isinstance(a, (int, np.integer)) for a in alphas):
        return [tuple(alphas)]
    return [tuple(a) for a in alphas]


def eval_P_j(nodes, x, alphas=((0, 0),), which=None, weights=None, dtype=None) -> np.ndarray:
    """Product-form ``D^alpha P_j`` at points ``x``.

    Returns shape ``(len(alphas), len(which), n)``, or ``(len(alphas), n)``
    when ``weights`` (one per ``j``) are given.  Arithmetic is carried out in
    ``dtype`` (extended precision by default).
    """
    cfg = _as_config(nodes)
    dtype = EVAL_DTYPE if dtype is None else dtype
    alphas = _alpha_list(alphas)
    which = list(range(cfg.d)) if which is None else list(which)
    pts = as_points(x).reshape(-1, 2).astype(dtype)
    zx = pts[:, 0] + 1j * pts[:, 1]
    a = cfg.points.astype(dtype)
    z = a[:, 0] + 1j * a[:, 1]
    K = max(sum(al) for al in alphas)
    if cfg.d == 1:
        T = np.zeros((K + 1, 1, len(zx)), dtype=zx.dtype)
        T[0] = 1.0
    else:
        roots = np.stack([np.delete(z, j) for j in which])
        T = product_taylor(np.broadcast_to(zx, (len(which), len(zx))), roots, z[which], K)
    # D^(a,b) Re l = Re(i**b l^{(a+b)})
    out = np.stack([np.real((1j ** b) * math.factorial(a1 + b) * T[a1 + b]) for a1, b in alphas])
    if weights is not None:
        out = np.einsum("j,ajn->an", np.asarray(weights, dtype=dtype), out)
    return out.astype(float)


def eval_pair_polys(nodes, x, kind: str, alphas=((0, 0),), plist=None, weights=None,
                    dtype=None, absmax: bool = False) -> np.ndarray:
    """Product-form ``D^alpha P_st`` (``kind='P'``) or ``D^alpha Q_st`` (``kind='Q'``).

    Returns shape ``(len(alphas), len(plist), n)``; with ``weights`` (one per
    pair) the weighted sum over pairs, shape ``(len(alphas), n)``.  With
    ``absmax`` the per-pair max of ``|D^alpha|`` over the points is returned,
    shape ``(len(alphas), len(plist))``.  Arithmetic is carried out in ``dtype`` (extended precision by default).
    """
    if kind not in ("P", "Q"):
        raise ValueError(f"kind must be 'P' or 'Q', got {kind!r}")
    cfg = _as_config(nodes)
    dtype = EVAL_DTYPE if dtype is None else dtype
    alphas = _alpha_list(alphas)
    plist = pairs(cfg.d) if plist is None else list(plist)
    pts = as_points(x).reshape(-1, 2).astype(dtype)
    a = cfg.points.astype(dtype)
    K = max(sum(al) for al in alphas)
    order = K + 1 if kind == "Q" else K
    fact = math.factorial
    total = np.zeros((len(alphas), len(pts)), dtype=dtype)
    rows = []
    for start in range(0, len(plist), _PAIR_CHUNK):
        chunk = plist[start: start + _PAIR_CHUNK]
        for s, t in chunk:
            pair_data(cfg, s, t)  # raises on a vanishing denominator
        S = np.array([p[0] for p in chunk])
        Tt = np.array([p[1] for p in chunk])
        diff = a[S] - a[Tt]
        V = np.stack([-diff[:, 1], diff[:, 0]], axis=-1)
        proj = V @ a.T                                  # r_m for every pair
        C = proj[np.arange(len(chunk)), S]
        keep = np.ones(proj.shape, dtype=bool)
        keep[np.arange(len(chunk)), S] = False
        keep[np.arange(len(chunk)), Tt] = False
        R = proj[keep].reshape(len(chunk), cfg.d - 2)
        W = V @ pts.T
        T = product_taylor(W, R, C, order)
        shift = W - C[:, None]
        vals = []
        for alpha in alphas:
            k = alpha[0] + alpha[1]
            if kind == "P":
                # P = (w - r_s) g / |v|^2 ;  P^{(k)} = ((w - r_s) g^{(k)} + k g^{(k-1)}) / |v|^2
                val = shift * fact(k) * T[k]
                if k >= 1:
                    val = val + k * fact(k - 1) * T[k - 1]
                val = val / (V ** 2).sum(1)[:, None]
            else:
                # Q = g + (w - r_s) g' ;  Q^{(k)} = (k+1) g^{(k)} + (w - r_s) g^{(k+1)}
                val = (k + 1) * fact(k) * T[k] + shift * fact(k + 1) * T[k + 1]
            vals.append(val * _ridge_factor(alpha, V)[:, None])
        vals = np.stack(vals)
        if absmax:
            rows.append(np.abs(vals).max(axis=-1))
        elif weights is None:
            rows.append(vals)
        else:
            wts = np.asarray(weights[start: start + len(chunk)], dtype=dtype)
            total += np.einsum("p,apn->an", wts, vals)
    if weights is not None:
        return total.astype(float)
    if not rows:
        return np.zeros((len(alphas), 0) if absmax else (len(alphas), 0, len(pts)))
    return np.concatenate(rows, axis=1).astype(float)


def pair_poly_callable(nodes, s: int, t: int, kind: str):
    """Product-form evaluator of a single ``P_st`` or ``Q_st``."""
    cfg = _as_config(nodes)

    def f(x):
        pts = as_points(x)
        return eval_pair_polys(cfg, pts.reshape(-1, 2), kind, plist=[(s, t)])[0, 0].reshape(pts.shape[:-1])

    return f


def lagrange_callable(nodes, j: int):
    """Product-form evaluator of ``P_j``."""
    cfg = _as_config(nodes)

    def f(x):
        pts = as_points(x)
        return eval_P_j(cfg, pts.reshape(-1, 2), which=[j])[0, 0].reshape(pts.shape[:-1])

    return f


# ---------------------------------------------------------------------------
# interpolants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Interpolant:
    nodes: NodeConfiguration
    pair_list: tuple
    pair_values: np.ndarray

    @property
    def d(self) -> int:
        return self.nodes.d

    def __call__(self, x) -> np.ndarray:
        return self.evaluate(x)

    def evaluate(self, x, alpha: tuple[int, int] = (0, 0), method: str = "product") -> np.ndarray:
        """``D^alpha`` of the interpolant at ``x``.

        ``method='product'`` uses the stable product form; ``'coeffs'`` the
        coefficient table.
        """
        pts = as_points(x)
        out = self.evaluate_many(pts.reshape(-1, 2), [alpha], method)[tuple(alpha)]
        out = out.reshape(pts.shape[:-1])
        return float(out) if out.ndim == 0 else out

    def evaluate_many(self, x, alphas, method: str = "product") -> dict:
        """``{alpha: D^alpha interpolant at x}``, sharing one product pass."""
        flat = as_points(x).reshape(-1, 2)
        alphas = _alpha_list(alphas)
        if method == "coeffs":
            return {a: np.asarray(self.poly.derivative(a)(flat), dtype=float) for a in alphas}
        if method != "product":
            raise ValueError(f"unknown method {method!r}")
        vals = self._product_eval(flat, alphas)
        return {a: v for a, v in zip(alphas, vals)}


@dataclass(frozen=True)
class KerginInterpolant(_Interpolant):
    """Kergin interpolant assembled from ``f(a_j)`` and chord integrals of ``D_v f``."""

    node_values: np.ndarray = None
    gradient_source: str = "analytic"
    kind: str = "kergin"

    @cached_property
    def P_j(self) -> list[ComplexPoly]:
        return [build_P_j(self.nodes, j) for j in range(self.d)]

    @cached_property
    def P_st(self) -> list[BivariatePoly]:
        return [build_P_st(self.nodes, s, t) for s, t in self.pair_list]

    @cached_property
    def poly(self) -> BivariatePoly:
        """Coefficient table of degree <= d - 1."""
        acc = BivariatePoly.zero(max(self.d - 1, 0))
        for fj, pj in zip(self.node_values, self.P_j):
            acc = acc + pj.real_part() * fj
        for c, p in zip(self.pair_values, self.P_st):
            acc = acc + p * c
        return acc

    def _product_eval(self, pts, alphas):
        out = eval_P_j(self.nodes, pts, alphas, weights=self.node_values)
        if self.pair_list:
            out = out + eval_pair_polys(self.nodes, pts, "P", alphas, self.pair_list, weights=self.pair_values)
        return out


@dataclass(frozen=True)
class HakopianInterpolant(_Interpolant):
    """Hakopian interpolant assembled from chord integrals of ``f``."""

    kind: str = "hakopian"

    @cached_property
    def Q_st(self) -> list[BivariatePoly]:
        return [build_Q_st(self.nodes, s, t) for s, t in self.pair_list]

    @cached_property
    def poly(self) -> BivariatePoly:
        """Coefficient table of degree <= d - 2."""
        acc = BivariatePoly.zero(max(self.d - 2, 0))
        for c, q in zip(self.pair_values, self.Q_st):
            acc = acc + q * c
        return acc

    def _product_eval(self, pts, alphas):
        return eval_pair_polys(self.nodes, pts, "Q", alphas, self.pair_list, weights=self.pair_values)


def _field(f) -> ScalarField:
    if isinstance(f, ScalarField):
        return f
    if isinstance(f, BivariatePoly):
        return ScalarField.from_poly(f)
    return ScalarField(f, check=False)


def kergin(f, nodes, rule: QuadratureRule = DEFAULT_SEGMENT_RULE) -> KerginInterpolant:
    """Kergin interpolant of ``f`` at ``nodes`` (``f`` needs a gradient or FD fallback)."""
    cfg = _as_config(nodes)
    cfg.require_general_position()
    f = _field(f)
    a = cfg.points
    plist = tuple(pairs(cfg.d))
    values = np.asarray(f(a), dtype=float)
    # reversed endpoints: same chord, derivative along perp(a_s - a_t)
    integrals = np.array([perp_directional_segment_integral(f, a[t], a[s], rule) for s, t in plist])
    return KerginInterpolant(cfg, plist, integrals, node_values=values,
                             gradient_source=f.gradient_source)


def hakopian(f, nodes, rule: QuadratureRule = DEFAULT_SEGMENT_RULE) -> HakopianInterpolant:
    """Hakopian interpolant of ``f`` at ``nodes`` (``d >= 2``)."""
    cfg = _as_config(nodes)
    if cfg.d < 2:
        raise ValueError("Hakopian interpolation needs d >= 2")
    cfg.require_general_position()
    f = _field(f)
    a = cfg.points
    plist = tuple(pairs(cfg.d))
    integrals = np.array([segment_integral(f, a[s], a[t], rule) for s, t in plist])
    return HakopianInterpolant(cfg, plist, integrals)


def interpolant_to_json(interp, node_section_ref: str | None = None) -> dict:
    return {
        "kind": interp.kind,
        "d": interp.d,
        "node_section_ref": node_section_ref or interp.nodes.label,
        "coeffs": interp.poly.triangular_rows(),
    }


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

def multi_indices(order: int) -> list[tuple[int, int]]:
    return [(order - b, b) for b in range(order + 1)]


@dataclass(frozen=True)
class MeanValueReport:
    """Residuals ``int_[a_0..a_{j+k}] D^alpha (f - P)`` for ``|alpha| = j <= n - k``."""

    k: int
    residuals: dict

    @property
    def max_residual(self) -> float:
        return max((abs(v) for v in self.residuals.values()), default=0.0)


def verify_mean_value_conditions(P, f, tuple_points, k: int,
                                 rule: QuadratureRule = QuadratureRule(16)) -> MeanValueReport:
    """Evaluate the mean-value interpolation conditions for ``P`` against ``f``.

    ``tuple_points`` has ``n + 1`` points; ``P`` should have degree
    ``<= n - k``.  ``P`` may be a :class:`BivariatePoly` or an interpolant
    (its coefficient table is used so derivatives are exact).
    """
    A = as_points(tuple_points).reshape(-1, 2)
    n = len(A) - 1
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in [0, {n}]")
    poly = P.poly if hasattr(P, "poly") else P
    f = _field(f)
    residuals = {}
    for j in range(n - k + 1):
        simplex = A[: j + k + 1]
        for alpha in multi_indices(j):
            Df = f.derivative(alpha)
            DP = poly.derivative(alpha)
            residuals[(j, alpha)] = simplex_integral(Df, simplex, rule) - simplex_integral(DP, simplex, rule)
    return MeanValueReport(k, residuals)


def newton_monomial(tau: Sequence[int], nodes) -> BivariatePoly:
    """``(x - e)^tau = prod_i (x - e_i)_{tau(i)}`` with ``tau(i)`` in ``{1, 2}``."""
    pts = as_points(nodes).reshape(-1, 2)
    acc = BivariatePoly.constant(1.0)
    for i, axis in enumerate(tau):
        if axis == 1:
            acc = acc * BivariatePoly.linear(-pts[i, 0], 1.0, 0.0)
        else:
            acc = acc * BivariatePoly.linear(-pts[i, 1], 0.0, 1.0)
    return acc


def newton_term(f, section, d: int, rule: QuadratureRule = QuadratureRule(16)) -> BivariatePoly:
    """Degree-``d`` term of the Kergin Newton series over ``e_0, ..., e_d``.

    ``sum_tau int_[e_0..e_d] D^{alpha(tau)} f * (x - e)^tau`` over all
    ``tau: {0..d-1} -> {1, 2}``, where ``alpha(tau)`` counts the ones and twos.
    """
    pts = section.nodes if isinstance(section, LejaSection) else as_points(section).reshape(-1, 2)
    if len(pts) < d + 1:
        raise ValueError(f"need at least {d + 1} nodes, got {len(pts)}")
    f = _field(f)
    simplex = pts[: d + 1]
    cache = {}
    acc = BivariatePoly.zero(d)
    for tau in itertools.product((1, 2), repeat=d):
        alpha = (tau.count(1), tau.count(2))
        if alpha not in cache:
            cache[alpha] = simplex_integral(f.derivative(alpha), simplex, rule)
        acc = acc + newton_monomial(tau, pts[:d]) * cache[alpha]
    return acc


def affine_invariance_check(f, nodes, A, b=(0.0, 0.0), n_points: int = 100, rtol: float = 1e-8,
                            seed: int = 0) -> bool:
    """Check ``K[Psi(A); f](Psi(x)) == K[A; f o Psi](x)`` for ``Psi(x) = A x + b``."""
    cfg = _as_config(nodes)
    f = _field(f)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if abs(np.linalg.det(A)) < 1e-14:
        raise ValueError("affine map must be invertible")
    x = random_disk_points(np.random.default_rng(seed), n_points)
    lhs = kergin(f, cfg.mapped(A, b))(x @ A.T + b)
    rhs = kergin(f.compose_affine(A, b), cfg)(x)
    return bool(np.max(np.abs(lhs - rhs)) <= rtol * max(1.0, np.max(np.abs(rhs))))
