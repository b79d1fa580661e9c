"""Torus geometry: the d-dimensional unit torus with the infinity norm,
and the grid decomposition used for cell-based edge sampling.

All functions are pure and operate on immutable values; they are safe for
unrestricted concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np


class InvalidInputError(ValueError):
    """Raised when an operation receives arguments outside its domain."""


@dataclass(frozen=True)
class TorusPoint:
    """A point on the d-dimensional unit torus, every coordinate in [0, 1)."""

    coords: tuple[float, ...]

    def __post_init__(self):
        for c in self.coords:
            if not (0.0 <= c < 1.0):
                raise InvalidInputError(f"torus coordinate {c} outside [0, 1)")

    @property
    def d(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class GridIndex:
    """Index of one cube of a grid decomposition of the torus."""

    cell_coords: tuple[int, ...]
    cells_per_axis: int

    def __post_init__(self):
        if self.cells_per_axis < 1:
            raise InvalidInputError("cells_per_axis must be positive")
        for c in self.cell_coords:
            if not (0 <= c < self.cells_per_axis):
                raise InvalidInputError(
                    f"cell coordinate {c} outside [0, {self.cells_per_axis})"
                )


def torus_distance(x: TorusPoint, y: TorusPoint) -> float:
    """Infinity-norm distance on the torus; result lies in [0, 0.5]."""
    if x.d != y.d:
        raise InvalidInputError(f"dimension mismatch: {x.d} vs {y.d}")
    best = 0.0
    for a, b in zip(x.coords, y.coords):
        diff = abs(a - b)
        best = max(best, min(diff, 1.0 - diff))
    return best


def torus_distance_arrays(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Vectorized infinity-norm torus distance.

    `x` and `y` are arrays of shape (..., d); broadcasting applies.
    """
    diff = np.abs(x - y)
    np.minimum(diff, 1.0 - diff, out=diff)
    return diff.max(axis=-1)


def cells_per_axis_for(w: float, n: float, d: int) -> int:
    """Number of grid cells per axis for a w-grid: floor((n/w)^(1/d)).

    When (n/w)^(1/d) is not an integer we take the floor, so cells are
    slightly larger than w/n in volume; cell volume must be recomputed
    from the actual count (1 / cells_per_axis**d).
    """
    if w >= n:
        raise InvalidInputError(f"w-grid requires w < n (got w={w}, n={n})")
    m = int(np.floor((n / w) ** (1.0 / d)))
    # guard against floating-point undershoot at exact integer ratios
    if (m + 1) ** d <= n / w * (1 + 1e-12):
        if (m + 1) ** d <= n / w:
            m += 1
    return max(m, 1)


def grid_cell(x: TorusPoint, w: float, n: float) -> GridIndex:
    """Cell of the w-grid containing x; half-open convention [lo, hi) per axis."""
    m = cells_per_axis_for(w, n, x.d)
    coords = tuple(min(int(c * m), m - 1) for c in x.coords)
    return GridIndex(coords, m)


def cell_ids(points: np.ndarray, cells_per_axis: int) -> np.ndarray:
    """Flattened (row-major) cell ids for an (N, d) array of torus points."""
    m = cells_per_axis
    idx = np.minimum((points * m).astype(np.int64), m - 1)
    flat = idx[:, 0]
    for k in range(1, points.shape[1]):
        flat = flat * m + idx[:, k]
    return flat


def neighbor_cells(g: GridIndex, radius_cells: int) -> list[GridIndex]:
    """All cells within Chebyshev distance radius_cells on the cell torus."""
    m = g.cells_per_axis
    d = len(g.cell_coords)
    offsets_per_axis = []
    for _ in range(d):
        offs = range(-radius_cells, radius_cells + 1)
        offsets_per_axis.append(offs)
    seen = set()
    out = []
    for delta in product(*offsets_per_axis):
        cc = tuple((c + dd) % m for c, dd in zip(g.cell_coords, delta))
        if cc not in seen:
            seen.add(cc)
            out.append(GridIndex(cc, m))
    return out
