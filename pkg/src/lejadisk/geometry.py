"""Plane geometry helpers shared by the rest of the package.

Points of R^2 are handled in two interchangeable forms: numpy arrays whose
last axis has length 2, and complex numbers ``x1 + 1j*x2``.  Most of the
package works on arrays of shape ``(n, 2)`` so that fields and polynomials
can be evaluated on whole grids at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class PlanePoint(NamedTuple):
    """A point of R^2, identified with the complex number ``x1 + i x2``."""

    x1: float
    x2: float

    @classmethod
    def from_complex(cls, z: complex) -> "PlanePoint":
        return cls(float(z.real), float(z.imag))

    def as_complex(self) -> complex:
        return complex(self.x1, self.x2)

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2], dtype=float)


def as_points(x) -> np.ndarray:
    """Coerce points to a float array with trailing axis 2.

    Complex input is split into real and imaginary parts.
    """
    arr = np.asarray(x)
    if np.iscomplexobj(arr):
        return np.stack([arr.real, arr.imag], axis=-1).astype(float)
    arr = np.asarray(arr, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError(f"expected trailing axis of length 2, got shape {arr.shape}")
    return arr


def to_complex(x) -> np.ndarray:
    arr = as_points(x)
    return arr[..., 0] + 1j * arr[..., 1]


def perp(p) -> np.ndarray:
    """Rotate by pi/2 about the origin: ``(x1, x2) -> (-x2, x1)``."""
    arr = as_points(p)
    return np.stack([-arr[..., 1], arr[..., 0]], axis=-1)


def inner(x, y) -> np.ndarray | float:
    """Euclidean scalar product along the last axis."""
    out = np.sum(as_points(x) * as_points(y), axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def norm(x) -> np.ndarray | float:
    out = np.sqrt(inner(x, x))
    return float(out) if np.ndim(out) == 0 else out


def cross(x, y) -> np.ndarray | float:
    """Scalar cross product ``x1*y2 - x2*y1``, i.e. ``<perp(x), y>`` with a sign flip."""
    a, b = as_points(x), as_points(y)
    out = a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
    return float(out) if np.ndim(out) == 0 else out


def complex_product(x, y) -> np.ndarray:
    """Product of two points seen as complex numbers, returned as a point array."""
    a, b = as_points(x), as_points(y)
    return np.stack(
        [a[..., 0] * b[..., 0] - a[..., 1] * b[..., 1],
         a[..., 0] * b[..., 1] + a[..., 1] * b[..., 0]],
        axis=-1,
    )


@dataclass(frozen=True)
class DiskGrid:
    """Polar-product sample of the closed unit disk.

    The grid holds the centre plus ``radial`` rings of radius ``i/radial``
    (``i = 1..radial``), each carrying ``angular`` equispaced points starting
    at angle 0.  The outermost ring is the unit circle, where sup norms of
    polynomials on the disk are attained.  Norms computed on this grid are
    estimates from below, not certified bounds.
    """

    radial_count: int
    angular_count: int
    points: np.ndarray

    def __post_init__(self):
        self.points.setflags(write=False)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def boundary(self) -> np.ndarray:
        """The points of the outermost ring (the unit circle)."""
        return self.points[-self.angular_count:]

    @property
    def x1(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def x2(self) -> np.ndarray:
        return self.points[:, 1]

    @property
    def z(self) -> np.ndarray:
        return self.points[:, 0] + 1j * self.points[:, 1]


DEFAULT_RADIAL = 64
DEFAULT_ANGULAR = 512

# multiplicative slack on every grid-estimated norm inequality
NORM_SLACK = 0.01


def make_disk_grid(radial: int = DEFAULT_RADIAL, angular: int = DEFAULT_ANGULAR) -> DiskGrid:
    """Build the polar-product grid with ``1 + radial*angular`` points."""
    if int(radial) != radial or radial < 1:
        raise ValueError(f"radial must be an integer >= 1, got {radial!r}")
    if int(angular) != angular or angular < 8:
        raise ValueError(f"angular must be an integer >= 8, got {angular!r}")
    radial, angular = int(radial), int(angular)
    radii = np.arange(1, radial + 1) / radial
    theta = 2.0 * np.pi * np.arange(angular) / angular
    c, s = np.cos(theta), np.sin(theta)
    # exact values on the axes keep (1, 0), (0, 1), ... on the grid bit-for-bit
    c[np.isclose(c, 0.0, atol=1e-15)] = 0.0
    s[np.isclose(s, 0.0, atol=1e-15)] = 0.0
    rings = np.stack([np.outer(radii, c), np.outer(radii, s)], axis=-1).reshape(-1, 2)
    points = np.vstack([np.zeros((1, 2)), rings])
    return DiskGrid(radial, angular, points)


def random_disk_points(rng: np.random.Generator, n: int, radius: float = 1.0) -> np.ndarray:
    """Uniform (area) samples from the disk of given radius."""
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, n))
    t = rng.uniform(0.0, 2.0 * np.pi, n)
    return np.stack([r * np.cos(t), r * np.sin(t)], axis=-1)
