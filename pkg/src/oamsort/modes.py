"""Laguerre-Gaussian mode labels and waist-plane field sampling.

All lengths are in units of the beam waist unless a geometry says otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# power allowed in the outermost ring of grid cells before a mode counts as truncated
BOUNDARY_POWER_TOL = 1e-6


class ModeTruncatedError(ValueError):
    """The requested mode does not fit inside the sampling grid."""


class GeometryMismatchError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class ModeIndex:
    """LG mode label: OAM index ``l`` (units of hbar) and radial index ``p``."""

    l: int
    p: int = 0

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 0:
            raise ValueError(f"radial index p must be a non-negative integer, got {self.p}")
        if int(self.l) != self.l:
            raise ValueError(f"OAM index l must be an integer, got {self.l}")

    @property
    def order(self) -> int:
        return mode_order(self)


def mode_order(m: ModeIndex) -> int:
    return 2 * m.p + abs(m.l)


@dataclass(frozen=True)
class BeamGeometry:
    """Square sampling grid centred on the beam axis.

    ``extent`` is the full width of the grid; samples sit at cell centres so
    the axis falls between the four central samples and quarter turns map the
    grid onto itself exactly.
    """

    waist: float = 1.0
    grid_size: int = 256
    extent: float = 8.0
    min_extent_ratio: float = field(default=6.0, compare=False)

    def __post_init__(self):
        if self.waist <= 0 or self.extent <= 0:
            raise ValueError("waist and extent must be positive")
        if self.grid_size <= 0 or self.grid_size % 2:
            raise ValueError(f"grid_size must be a positive even integer, got {self.grid_size}")
        if self.extent < self.min_extent_ratio * self.waist:
            raise ValueError(
                f"extent {self.extent} is below {self.min_extent_ratio} x waist {self.waist}"
            )

    @property
    def dx(self) -> float:
        return self.extent / self.grid_size

    @property
    def cell_area(self) -> float:
        return self.dx * self.dx

    def axis(self) -> np.ndarray:
        n = self.grid_size
        return (np.arange(n) - (n - 1) / 2.0) * self.dx

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Return (X, Y) with rows indexing y and columns indexing x."""
        x = self.axis()
        return np.meshgrid(x, x, indexing="xy")


@dataclass(frozen=True, eq=False)
class Field:
    """Complex scalar amplitude sampled on a ``BeamGeometry`` grid."""

    samples: np.ndarray
    geometry: BeamGeometry

    def __post_init__(self):
        n = self.geometry.grid_size
        if self.samples.shape != (n, n):
            raise ValueError(f"samples shape {self.samples.shape} does not match grid {n}x{n}")
        self.samples.setflags(write=False)

    @classmethod
    def zeros(cls, geometry: BeamGeometry) -> "Field":
        n = geometry.grid_size
        return cls(np.zeros((n, n), dtype=complex), geometry)

    def power(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2) * self.geometry.cell_area)

    def __add__(self, other: "Field") -> "Field":
        _check_same_geometry(self, other)
        return Field(self.samples + other.samples, self.geometry)

    def __sub__(self, other: "Field") -> "Field":
        _check_same_geometry(self, other)
        return Field(self.samples - other.samples, self.geometry)

    def __mul__(self, c) -> "Field":
        return Field(self.samples * complex(c), self.geometry)

    __rmul__ = __mul__


def _check_same_geometry(a: Field, b: Field):
    if a.geometry != b.geometry:
        raise GeometryMismatchError(f"geometry mismatch: {a.geometry} vs {b.geometry}")


def genlaguerre(p: int, alpha: float, x):
    """Generalized Laguerre polynomial L_p^alpha(x) by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if p == 0:
        return prev
    cur = 1.0 + alpha - x
    for j in range(1, p):
        prev, cur = cur, ((2 * j + 1 + alpha - x) * cur - (j + alpha) * prev) / (j + 1)
    return cur


def lg_profile(m: ModeIndex, g: BeamGeometry) -> np.ndarray:
    """Unnormalized waist-plane LG amplitude on the grid of ``g``."""
    X, Y = g.mesh()
    w = g.waist
    r2 = (X * X + Y * Y) / (w * w)
    a = abs(m.l)
    radial = (np.sqrt(2.0 * r2)) ** a * genlaguerre(m.p, a, 2.0 * r2) * np.exp(-r2)
    return radial * np.exp(1j * m.l * np.arctan2(Y, X))


def boundary_power(samples: np.ndarray, cell_area: float) -> float:
    edge = np.ones(samples.shape, dtype=bool)
    edge[1:-1, 1:-1] = False
    return float(np.sum(np.abs(samples[edge]) ** 2) * cell_area)


def sample_lg(m: ModeIndex, g: BeamGeometry | None = None) -> Field:
    """Sample LG(l, p) at the waist plane, normalized to unit discrete power.

    Raises ModeTruncatedError when the outermost ring of cells carries more
    than ``BOUNDARY_POWER_TOL`` of the (normalized) power.
    """
    g = g or BeamGeometry()
    u = lg_profile(m, g)
    norm = np.sqrt(np.sum(np.abs(u) ** 2) * g.cell_area)
    u = u / norm
    edge = boundary_power(u, g.cell_area)
    if edge > BOUNDARY_POWER_TOL:
        raise ModeTruncatedError(
            f"mode truncated: LG(l={m.l}, p={m.p}) leaves {edge:.3e} of its power on the "
            f"grid boundary (extent={g.extent}, waist={g.waist})"
        )
    return Field(u, g)


def overlap(a: Field, b: Field) -> complex:
    """Discrete inner product <a|b> = sum conj(a) b dA."""
    _check_same_geometry(a, b)
    return complex(np.vdot(a.samples, b.samples) * a.geometry.cell_area)
