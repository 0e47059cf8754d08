"""Coefficient-level polynomial algebra in one and two real variables.

Three polynomial types are provided:

* :class:`UnivariatePoly` -- real monomial coefficients in ``w``.
* :class:`BivariatePoly` -- a dense triangular table ``c[j, k]`` for
  ``(x1)**j * (x2)**k`` with ``j + k <= degree``.
* :class:`ComplexPoly` -- complex coefficients in ``z = x1 + i x2``; its real
  part is a bivariate polynomial.

Monomial coefficients lose relative accuracy for high degree products, so a
separate product-form path (:func:`product_taylor`, :class:`SignLogValue`)
is kept for evaluation where the roots are known.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import comb

from .geometry import NORM_SLACK, DiskGrid, as_points


# ---------------------------------------------------------------------------
# sign/log scalars
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SignLogValue:
    """A real number stored as ``sign * exp(log_abs)``.

    Zero is ``sign == 0`` with ``log_abs == -inf``.  Products add log
    magnitudes, so long products of small or large factors never under- or
    overflow.
    """

    sign: int
    log_abs: float

    @classmethod
    def from_value(cls, value: float) -> "SignLogValue":
        if value == 0:
            return cls(0, -math.inf)
        return cls(1 if value > 0 else -1, math.log(abs(value)))

    @classmethod
    def product(cls, factors: Iterable[float]) -> "SignLogValue":
        arr = np.asarray(list(factors), dtype=float)
        if arr.size == 0:
            return cls(1, 0.0)
        if np.any(arr == 0):
            return cls(0, -math.inf)
        sign = -1 if np.count_nonzero(arr < 0) % 2 else 1
        return cls(sign, float(np.sum(np.log(np.abs(arr)))))

    def __mul__(self, other: "SignLogValue") -> "SignLogValue":
        if self.sign == 0 or other.sign == 0:
            return SignLogValue(0, -math.inf)
        return SignLogValue(self.sign * other.sign, self.log_abs + other.log_abs)

    def __truediv__(self, other: "SignLogValue") -> "SignLogValue":
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero SignLogValue")
        if self.sign == 0:
            return self
        return SignLogValue(self.sign * other.sign, self.log_abs - other.log_abs)

    def __abs__(self) -> "SignLogValue":
        return SignLogValue(abs(self.sign), self.log_abs)

    def __float__(self) -> float:
        return self.value

    @property
    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_abs)


def log_abs_product(factors, axis=-1) -> np.ndarray:
    """Sum of ``log|factor|`` along ``axis`` (``-inf`` if any factor vanishes)."""
    with np.errstate(divide="ignore"):
        return np.sum(np.log(np.abs(factors)), axis=axis)


def product_taylor(w, roots, centre, order: int) -> np.ndarray:
    """Taylor coefficients of a normalised root product.

    For ``g(w) = prod_m (w - roots[m]) / (centre - roots[m])`` this returns
    an array ``T`` of shape ``(order + 1,) + w.shape`` with
    ``T[k] = g^{(k)}(w) / k!``.  The recursion multiplies one normalised
    linear factor at a time and never forms monomial coefficients, so it is
    accurate for degrees where coefficient expansion is not.

    Batched use: ``w`` of shape ``batch + (n,)``, ``roots`` of shape
    ``batch + (m,)`` and ``centre`` of shape ``batch``.
    """
    w = np.asarray(w)
    roots = np.asarray(roots)
    centre = np.asarray(centre)
    dtype = np.result_type(w, roots, centre, float)
    shape = np.broadcast_shapes(w.shape, roots.shape[:-1] + (1,))
    T = np.zeros((order + 1,) + shape, dtype=dtype)
    T[0] = 1.0
    lin = np.empty(shape, dtype=dtype)
    tmp = np.empty(shape, dtype=dtype)
    for m in range(roots.shape[-1]):
        r = roots[..., m, None]
        scale = 1.0 / (centre[..., None] - r)
        np.subtract(w, r, out=lin)
        lin *= scale
        for k in range(order, 0, -1):
            T[k] *= lin
            np.multiply(T[k - 1], scale, out=tmp)
            T[k] += tmp
        T[0] *= lin
    return T


# ---------------------------------------------------------------------------
# univariate
# ---------------------------------------------------------------------------

def _trim(c: np.ndarray, tol: float = 1e-300) -> np.ndarray:
    nz = np.nonzero(np.abs(c) > tol)[0]
    if nz.size == 0:
        return c[:1].copy()
    return c[: nz[-1] + 1].copy()


@dataclass(frozen=True)
class UnivariatePoly:
    """Real polynomial ``sum_n coeffs[n] * w**n``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        if c.size == 0:
            c = np.zeros(1)
        object.__setattr__(self, "coeffs", c)
        c.setflags(write=False)

    @property
    def degree(self) -> int:
        return len(_trim(self.coeffs)) - 1

    def __call__(self, w):
        return eval_uni(self, w)

    def derivative(self) -> "UnivariatePoly":
        return derivative_uni(self)

    def __repr__(self) -> str:
        return f"UnivariatePoly({self.coeffs.tolist()!r})"


def eval_uni(p: UnivariatePoly, w):
    """Horner evaluation, vectorised over ``w``."""
    w = np.asarray(w, dtype=float)
    out = np.zeros_like(w) + p.coeffs[-1]
    for c in p.coeffs[-2::-1]:
        out = out * w + c
    return float(out) if out.ndim == 0 else out


def monic_from_roots(roots: Sequence[float]) -> UnivariatePoly:
    """Expand ``prod (w - r)`` by repeated convolution."""
    c = np.ones(1)
    for r in roots:
        nxt = np.zeros(len(c) + 1)
        nxt[1:] += c
        nxt[:-1] -= r * c
        c = nxt
    return UnivariatePoly(c)


def derivative_uni(p: UnivariatePoly) -> UnivariatePoly:
    c = p.coeffs
    if len(c) == 1:
        return UnivariatePoly([0.0])
    return UnivariatePoly(c[1:] * np.arange(1, len(c)))


# ---------------------------------------------------------------------------
# bivariate
# ---------------------------------------------------------------------------

class BivariatePoly:
    """Polynomial in ``(x1, x2)`` with a dense triangular coefficient table.

    ``coeffs[j, k]`` multiplies ``x1**j * x2**k``; entries with
    ``j + k > bound`` are always zero.  Instances are treated as immutable.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=float, ndmin=2)
        n = max(c.shape) - 1
        table = np.zeros((n + 1, n + 1))
        table[: c.shape[0], : c.shape[1]] = c
        j, k = np.indices(table.shape)
        if np.any(table[j + k > n] != 0):
            raise ValueError("coefficients above the triangular bound")
        table.setflags(write=False)
        self.coeffs = table

    # construction ----------------------------------------------------------

    @classmethod
    def zero(cls, bound: int = 0) -> "BivariatePoly":
        return cls(np.zeros((bound + 1, bound + 1)))

    @classmethod
    def constant(cls, value: float) -> "BivariatePoly":
        return cls([[value]])

    @classmethod
    def monomial(cls, j: int, k: int, value: float = 1.0) -> "BivariatePoly":
        c = np.zeros((j + k + 1, j + k + 1))
        c[j, k] = value
        return cls(c)

    @classmethod
    def linear(cls, c0: float, c1: float, c2: float) -> "BivariatePoly":
        """``c0 + c1*x1 + c2*x2``."""
        return cls([[c0, c2], [c1, 0.0]])

    @classmethod
    def random(cls, rng: np.random.Generator, degree: int) -> "BivariatePoly":
        """Standard normal coefficients on every monomial of degree <= ``degree``."""
        c = rng.standard_normal((degree + 1, degree + 1))
        j, k = np.indices(c.shape)
        c[j + k > degree] = 0.0
        return cls(c)

    @classmethod
    def from_triangular(cls, rows: Sequence[Sequence[float]]) -> "BivariatePoly":
        """Inverse of :meth:`triangular_rows`."""
        n = len(rows) - 1
        c = np.zeros((n + 1, n + 1))
        for j, row in enumerate(rows):
            c[j, : len(row)] = row
        return cls(c)

    # structure ---------------------------------------------------------------

    @property
    def bound(self) -> int:
        """Stored degree bound (>= true degree)."""
        return self.coeffs.shape[0] - 1

    def degree(self, tol: float = 0.0) -> int:
        """True degree, ignoring coefficients with magnitude <= ``tol``."""
        j, k = np.nonzero(np.abs(self.coeffs) > tol)
        return int((j + k).max()) if j.size else 0

    def triangular_rows(self) -> list[list[float]]:
        n = self.bound
        return [self.coeffs[j, : n - j + 1].tolist() for j in range(n + 1)]

    def to_json(self) -> dict:
        return {"degree": self.degree(), "coeffs": self.triangular_rows()}

    def _padded(self, n: int) -> np.ndarray:
        out = np.zeros((n + 1, n + 1))
        m = self.bound
        out[: m + 1, : m + 1] = self.coeffs
        return out

    # arithmetic --------------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, BivariatePoly):
            other = BivariatePoly.constant(float(other))
        n = max(self.bound, other.bound)
        return BivariatePoly(self._padded(n) + other._padded(n))

    __radd__ = __add__

    def __neg__(self):
        return BivariatePoly(-self.coeffs)

    def __sub__(self, other):
        return self + (-other if isinstance(other, BivariatePoly) else -float(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, BivariatePoly):
            n, m = self.bound, other.bound
            out = np.zeros((n + m + 1, n + m + 1))
            for j, k in zip(*np.nonzero(self.coeffs)):
                out[j: j + m + 1, k: k + m + 1] += self.coeffs[j, k] * other.coeffs
            return BivariatePoly(out)
        return BivariatePoly(self.coeffs * float(other))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return BivariatePoly(self.coeffs / float(scalar))

    # calculus ----------------------------------------------------------------

    def partial(self, axis: int) -> "BivariatePoly":
        return partial_derivative(self, axis)

    def derivative(self, alpha: tuple[int, int]) -> "BivariatePoly":
        """``D^alpha`` for a multi-index ``alpha = (a1, a2)``."""
        p = self
        for _ in range(alpha[0]):
            p = partial_derivative(p, 1)
        for _ in range(alpha[1]):
            p = partial_derivative(p, 2)
        return p

    # evaluation --------------------------------------------------------------

    def __call__(self, x) -> np.ndarray:
        pts = as_points(x)
        flat = pts.reshape(-1, 2)
        n = self.bound
        p1 = np.vander(flat[:, 0], n + 1, increasing=True)
        p2 = np.vander(flat[:, 1], n + 1, increasing=True)
        vals = np.einsum("nj,jk,nk->n", p1, self.coeffs, p2)
        out = vals.reshape(pts.shape[:-1])
        return float(out) if out.ndim == 0 else out

    def __repr__(self) -> str:
        return f"BivariatePoly(bound={self.bound}, degree={self.degree()})"


def partial_derivative(p: BivariatePoly, axis: int) -> BivariatePoly:
    """Formal partial derivative with respect to ``x1`` (axis 1) or ``x2`` (axis 2)."""
    c = p.coeffs
    n = p.bound
    if n == 0:
        return BivariatePoly.zero()
    if axis == 1:
        out = c[1:, :] * np.arange(1, n + 1)[:, None]
        return BivariatePoly(out[:, :n])
    if axis == 2:
        out = c[:, 1:] * np.arange(1, n + 1)[None, :]
        return BivariatePoly(out[:n, :])
    raise ValueError(f"axis must be 1 or 2, got {axis!r}")


def linear_power_table(a: float, b: float, n: int) -> list[np.ndarray]:
    """Coefficient tables of ``(a*x1 + b*x2)**m`` for ``m = 0..n``.

    Entry ``m`` has shape ``(n+1, n+1)`` with ``comb(m, j) a**j b**(m-j)``
    at ``[j, m-j]``.
    """
    tables = []
    for m in range(n + 1):
        t = np.zeros((n + 1, n + 1))
        j = np.arange(m + 1)
        t[j, m - j] = comb(m, j, exact=False) * a ** j * b ** (m - j)
        tables.append(t)
    return tables


def compose_linear(p: UnivariatePoly, a: float, b: float) -> BivariatePoly:
    """The bivariate polynomial ``x -> p(a*x1 + b*x2)``."""
    n = len(p.coeffs) - 1
    out = np.zeros((n + 1, n + 1))
    for m, t in enumerate(linear_power_table(a, b, n)):
        if p.coeffs[m] != 0:
            out += p.coeffs[m] * t
    return BivariatePoly(out)


# ---------------------------------------------------------------------------
# complex
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ComplexPoly:
    """Polynomial ``sum_n coeffs[n] * z**n`` in ``z = x1 + i x2``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        object.__setattr__(self, "coeffs", c)
        c.setflags(write=False)

    @classmethod
    def from_roots(cls, roots: Sequence[complex], scale: complex = 1.0) -> "ComplexPoly":
        c = np.ones(1, dtype=complex)
        for r in roots:
            nxt = np.zeros(len(c) + 1, dtype=complex)
            nxt[1:] += c
            nxt[:-1] -= r * c
            c = nxt
        return cls(c * scale)

    @property
    def degree(self) -> int:
        return len(_trim(self.coeffs)) - 1

    def eval_complex(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z) + self.coeffs[-1]
        for c in self.coeffs[-2::-1]:
            out = out * z + c
        return out

    def __call__(self, x):
        """Real part at points ``x`` of R^2."""
        pts = as_points(x)
        return np.real(self.eval_complex(pts[..., 0] + 1j * pts[..., 1]))

    def derivative(self) -> "ComplexPoly":
        c = self.coeffs
        if len(c) == 1:
            return ComplexPoly([0.0])
        return ComplexPoly(c[1:] * np.arange(1, len(c)))

    def real_part(self) -> BivariatePoly:
        """Expand ``Re p(x1 + i x2)`` into a bivariate coefficient table."""
        n = len(self.coeffs) - 1
        out = np.zeros((n + 1, n + 1))
        for m, c in enumerate(self.coeffs):
            if c == 0:
                continue
            j = np.arange(m + 1)
            # (x1 + i x2)^m = sum_j C(m, j) x1^j (i x2)^(m-j)
            term = c * comb(m, j, exact=False) * (1j ** (m - j))
            out[j, m - j] += term.real
        return BivariatePoly(out)


# ---------------------------------------------------------------------------
# norms on the disk
# ---------------------------------------------------------------------------

def sup_norm_disk(p, grid: DiskGrid) -> float:
    """Max of ``|p|`` over the grid.  ``p`` is any callable on point arrays."""
    return float(np.max(np.abs(p(grid.points))))


def markov_check(p: BivariatePoly, grid: DiskGrid, order: int = 1) -> bool:
    """Check ``||D^beta p|| <= deg(p)**(2|beta|) ||p||`` on the grid for ``|beta| = order``.

    A 1% slack absorbs the grid's underestimate of ``||p||``.
    """
    deg = p.degree(tol=1e-14 * max(1.0, float(np.abs(p.coeffs).max())))
    if deg < 1:
        raise ValueError("Markov check needs a polynomial of degree >= 1")
    pnorm = sup_norm_disk(p, grid)
    bound = deg ** (2 * order) * pnorm * (1.0 + NORM_SLACK)
    for a in range(order + 1):
        dnorm = sup_norm_disk(p.derivative((a, order - a)), grid)
        if dnorm > bound:
            return False
    return True
