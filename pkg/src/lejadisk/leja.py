"""Leja sections for the closed unit disk.

A Leja sequence for the disk picks each new node to maximise the product of
distances to the previous ones.  Starting from ``e_0 = 1`` the first
``2**n`` nodes always form the ``2**n``-th roots of unity, and a section of
length ``d = 2**n0 + ... + 2**nr`` splits into rotated blocks of roots of
unity.  This module builds the bit-reversal sequence (the rotation of every
block is ``exp(i pi / 2**n_j)``), exposes the block decomposition, and
evaluates the block and node products used in the norm estimates.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .polys import log_abs_product


def decompose(d: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Binary expansion ``d = 2**n0 + ... + 2**nr`` with ``n0 > ... > nr``.

    Returns ``(exponents, block_bounds)`` where ``block_bounds[j]`` is
    ``2**n0 + ... + 2**nj``.
    """
    if int(d) != d or d < 1:
        raise ValueError(f"d must be a positive integer, got {d!r}")
    d = int(d)
    exponents = tuple(n for n in range(d.bit_length() - 1, -1, -1) if d >> n & 1)
    bounds = tuple(np.cumsum([1 << n for n in exponents]).tolist())
    return exponents, bounds


def _bit_reversal_angle(k: int) -> Fraction:
    """Argument of the ``k``-th canonical node, in units of pi."""
    return sum((Fraction(1, 1 << j) for j in range(k.bit_length()) if k >> j & 1), Fraction(0))


def _angle_to_str(a: Fraction) -> str:
    return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"


def _exp_i_pi(a: Fraction) -> complex:
    """``exp(i pi a)`` with exact values at multiples of pi/2."""
    a = a % 2
    exact = {Fraction(0): 1 + 0j, Fraction(1, 2): 1j, Fraction(1): -1 + 0j, Fraction(3, 2): -1j}
    if a in exact:
        return exact[a]
    t = math.pi * float(a)
    return complex(math.cos(t), math.sin(t))


@dataclass(frozen=True)
class LejaSection:
    """The first ``d`` nodes of a Leja sequence for the unit disk.

    ``thetas`` are the node arguments in units of pi (exact fractions for
    the canonical sequence, floats otherwise).  ``exponents`` and
    ``block_bounds`` are the binary decomposition of ``d``;
    ``rotation_args[j]`` is the argument (units of pi) of the rotation
    carrying block ``j`` to block ``j + 1``.
    """

    d: int
    thetas: tuple
    exponents: tuple[int, ...]
    block_bounds: tuple[int, ...]
    rotation_args: tuple
    nodes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.nodes.setflags(write=False)

    @property
    def r(self) -> int:
        """Number of binary blocks minus one."""
        return len(self.exponents) - 1

    @property
    def z(self) -> np.ndarray:
        """Nodes as complex numbers."""
        return self.nodes[:, 0] + 1j * self.nodes[:, 1]

    @property
    def theta_radians(self) -> np.ndarray:
        return math.pi * np.array([float(t) for t in self.thetas])

    @property
    def phi_radians(self) -> np.ndarray:
        return math.pi * np.array([float(p) for p in self.rotation_args])

    @property
    def rotations(self) -> np.ndarray:
        return np.exp(1j * self.phi_radians)

    def block(self, j: int) -> range:
        """Index range of block ``j + 1`` (``j = -1`` is the leading block)."""
        if not -1 <= j <= self.r - 1:
            raise IndexError(f"block index {j} outside [-1, {self.r - 1}]")
        lo = 0 if j == -1 else self.block_bounds[j]
        return range(lo, self.block_bounds[j + 1])

    def block_of(self, s: int) -> int:
        """The block index ``j`` with ``s`` in ``block(j)``."""
        for j in range(-1, self.r):
            if s in self.block(j):
                return j
        raise IndexError(f"node index {s} outside section of length {self.d}")

    def prefix(self, d: int) -> "LejaSection":
        """The section made of the first ``d`` nodes."""
        return section_from_thetas(self.thetas[:d], nodes=self.nodes[:d])

    def to_json(self) -> dict:
        def ser(a):
            return _angle_to_str(a) if isinstance(a, Fraction) else float(a)

        return {
            "d": self.d,
            "angle_unit": "pi",
            "thetas": [ser(t) for t in self.thetas],
            "exponents": list(self.exponents),
            "block_bounds": list(self.block_bounds),
            "rotation_args": [ser(p) for p in self.rotation_args],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _rotation_args(thetas: Sequence, bounds: Sequence[int]):
    # argument of e_{d_j} minus argument of e_{d_{j-1}}, reduced to [0, 2)
    args = []
    prev = thetas[0]
    for b in bounds[:-1]:
        args.append((thetas[b] - prev) % 2)
        prev = thetas[b]
    return tuple(args)


def section_from_thetas(thetas: Sequence, nodes: np.ndarray | None = None) -> LejaSection:
    """Wrap node arguments (units of pi) as a section, without validation.

    ``nodes`` may be given to override the points themselves, e.g. to build
    a deliberately perturbed section for negative tests.
    """
    thetas = tuple(thetas)
    d = len(thetas)
    exponents, bounds = decompose(d)
    if nodes is None:
        z = np.array([_exp_i_pi(t) if isinstance(t, Fraction) else np.exp(1j * math.pi * t)
                      for t in thetas])
        nodes = np.stack([z.real, z.imag], axis=-1)
    else:
        nodes = np.array(nodes, dtype=float)
    return LejaSection(d, thetas, exponents, bounds, _rotation_args(thetas, bounds), nodes)


def canonical_leja(d: int) -> LejaSection:
    """The bit-reversal Leja section of length ``d``.

    Node ``k = sum_j a_j 2**j`` is ``exp(i pi sum_j a_j 2**-j)``.
    """
    if int(d) != d or d < 1:
        raise ValueError(f"d must be a positive integer, got {d!r}")
    return section_from_thetas([_bit_reversal_angle(k) for k in range(int(d))])


def section_from_json(data: dict | str) -> LejaSection:
    if isinstance(data, str):
        data = json.loads(data)
    thetas = []
    for t in data["thetas"]:
        thetas.append(Fraction(t) if isinstance(t, str) else float(t))
    sec = section_from_thetas(thetas)
    if sec.d != data["d"]:
        raise ValueError(f"d={data['d']} does not match {sec.d} thetas")
    return sec


# ---------------------------------------------------------------------------
# oracle and products
# ---------------------------------------------------------------------------

def brute_force_next(section: LejaSection, boundary_samples: int, rtol: float = 1e-12) -> np.ndarray:
    """Maximise ``prod |z - e_j|`` over equispaced points of the unit circle.

    Ties (within ``rtol`` in the product) go to the smallest argument in
    ``[0, 2 pi)``.  Returns the maximiser as a length-2 array.
    """
    if boundary_samples < 4 * (section.d + 1):
        raise ValueError("boundary_samples must be >= 4*(d+1)")
    theta = 2 * np.pi * np.arange(boundary_samples) / boundary_samples
    z = np.exp(1j * theta)
    logs = log_abs_product(z[:, None] - section.z[None, :])
    best = np.max(logs)
    k = int(np.argmax(logs >= best + math.log1p(-rtol)))
    return np.array([math.cos(theta[k]), math.sin(theta[k])])


def sampled_maximality(section: LejaSection, boundary_samples: int = 4096) -> np.ndarray:
    """Ratio ``prod_{j<k}|e_k - e_j| / max_grid prod_{j<k}|z - e_j|`` for ``k = 1..d-1``."""
    theta = 2 * np.pi * np.arange(boundary_samples) / boundary_samples
    zg = np.exp(1j * theta)
    ez = section.z
    ratios = []
    for k in range(1, section.d):
        grid_log = log_abs_product(zg[:, None] - ez[None, :k]).max()
        node_log = log_abs_product(ez[k] - ez[:k])
        ratios.append(math.exp(node_log - grid_log))
    return np.array(ratios)


def block_product(section: LejaSection, j: int, z) -> np.ndarray:
    """Direct product ``prod_{m in block j} |z - e_m|`` at complex ``z``."""
    idx = section.block(j)
    z = np.asarray(z, dtype=complex)
    return np.exp(log_abs_product(z[..., None] - section.z[idx.start: idx.stop]))


def block_closed_form(section: LejaSection, j: int, z) -> np.ndarray:
    """``|(z / (rho_0 ... rho_j))**(2**n_{j+1}) - 1|`` (no rotation for ``j = -1``)."""
    section.block(j)
    z = np.asarray(z, dtype=complex)
    rot = np.exp(-1j * section.phi_radians[: j + 1].sum())
    return np.abs((z * rot) ** (1 << section.exponents[j + 1]) - 1.0)


def in_block_product(section: LejaSection, k: int) -> float:
    """``prod_{m in block(k), m != k} |e_k - e_m|``; equals the block length."""
    idx = section.block(section.block_of(k))
    others = [m for m in idx if m != k]
    return float(np.exp(log_abs_product(section.z[k] - section.z[others])))


@dataclass(frozen=True)
class NodeProductReport:
    """Per-node products ``prod_{m != s} |e_s - e_m|`` and their minimum."""

    products: np.ndarray
    log_products: np.ndarray
    r: int

    @property
    def minimum(self) -> float:
        return float(self.products.min())

    @property
    def lower_bound(self) -> float:
        return float(2 ** self.r)

    def holds(self, rtol: float = 1e-12) -> bool:
        return self.minimum >= self.lower_bound * (1 - rtol)


def node_products(section: LejaSection) -> NodeProductReport:
    if section.d < 2:
        raise ValueError("node products need d >= 2")
    z = section.z
    diff = z[:, None] - z[None, :]
    np.fill_diagonal(diff, 1.0)
    logs = log_abs_product(diff)
    return NodeProductReport(np.exp(logs), logs, section.r)


def trig_inequality_sides(section: LejaSection, phi) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of the block-rotation sine inequality at angles ``phi`` (radians).

    Left: ``prod_j |sin(2**(n_{j+1}-1) (phi - phi_0 - ... - phi_j))|``.
    Right: ``|cos(2**(n_0-1) phi)| / 2**(n_0 - n_r)``.  Requires ``r >= 1``.
    """
    if section.r < 1:
        raise ValueError("the inequality needs at least two blocks (r >= 1)")
    phi = np.asarray(phi, dtype=float)
    n = section.exponents
    cum = np.cumsum(section.phi_radians)
    lhs = np.ones_like(phi)
    for j in range(section.r):
        lhs = lhs * np.abs(np.sin(2.0 ** (n[j + 1] - 1) * (phi - cum[j])))
    rhs = np.abs(np.cos(2.0 ** (n[0] - 1) * phi)) / 2.0 ** (n[0] - n[-1])
    return lhs, rhs


def roots_of_unity_match(section: LejaSection, atol: float = 1e-12) -> dict[int, float]:
    """For each ``2**n <= d``, the max distance between the first ``2**n``
    nodes (sorted by argument) and the ``2**n``-th roots of unity."""
    out = {}
    n = 0
    while (1 << n) <= section.d:
        m = 1 << n
        got = section.z[:m]
        ang = np.mod(np.angle(got), 2 * np.pi)
        # snap near-2pi angles to 0 before sorting
        ang[ang > 2 * np.pi - 1e-9] = 0.0
        got = got[np.argsort(ang, kind="stable")]
        want = np.exp(2j * np.pi * np.arange(m) / m)
        out[m] = float(np.max(np.abs(got - want)))
        n += 1
    return out
