"""Uniform 1-D grids and cell-average grid functions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ExteriorJump, IncompatibleFunctions
from .fronts import StepFunction

MASS_RTOL = 1e-12


@dataclass(frozen=True)
class Grid:
    """Cells ``[x_left + i*dx, x_left + (i+1)*dx)`` for ``i = 0..n_cells-1``."""

    x_left: float
    dx: float
    n_cells: int

    def __post_init__(self):
        if not self.dx > 0:
            raise ValueError("dx must be positive")
        if self.n_cells < 2:
            raise ValueError("a grid needs at least two cells")

    @classmethod
    def uniform(cls, a: float, b: float, n: int) -> "Grid":
        return cls(float(a), (b - a) / n, int(n))

    @property
    def x_right(self) -> float:
        return self.x_left + self.n_cells * self.dx

    @property
    def edges(self) -> np.ndarray:
        return self.x_left + self.dx * np.arange(self.n_cells + 1)

    @property
    def centers(self) -> np.ndarray:
        return self.x_left + self.dx * (np.arange(self.n_cells) + 0.5)

    def widened(self, extra_left: int, extra_right: int) -> "Grid":
        """Same cells plus whole cells on either side."""
        return Grid(self.x_left - extra_left * self.dx, self.dx, self.n_cells + extra_left + extra_right)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Cell averages on ``grid`` plus constant states outside the window."""

    grid: Grid
    values: np.ndarray
    far_left: float
    far_right: float

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != (self.grid.n_cells,):
            raise ValueError(f"expected {self.grid.n_cells} values, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid function values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "far_left", float(self.far_left))
        object.__setattr__(self, "far_right", float(self.far_right))

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.grid, values, self.far_left, self.far_right)

    def mass(self) -> float:
        return float(self.grid.dx * np.sum(self.values))

    def extended(self, width: int) -> np.ndarray:
        """Values padded with ``width`` ghost cells holding the far states."""
        return np.concatenate(
            [np.full(width, self.far_left), self.values, np.full(width, self.far_right)]
        )

    def to_step(self) -> StepFunction:
        """Exact step-function view (breakpoints at the cell edges)."""
        return StepFunction(
            self.grid.edges, np.concatenate([[self.far_left], self.values, [self.far_right]])
        )

    def state_bounds(self) -> tuple[float, float]:
        lo = min(float(self.values.min()), self.far_left, self.far_right)
        hi = max(float(self.values.max()), self.far_left, self.far_right)
        return lo, hi


def project(u: StepFunction, grid: Grid) -> GridFunction:
    """Exact cell averages of ``u`` on ``grid``."""
    bp = u.breakpoints
    if bp.size and (bp[0] < grid.x_left or bp[-1] > grid.x_right):
        raise ExteriorJump(
            f"breakpoints span [{bp[0]}, {bp[-1]}] but the grid covers "
            f"[{grid.x_left}, {grid.x_right}]"
        )
    edges = grid.edges
    vals = np.array(u(edges[:-1]), dtype=float)
    # cells containing a breakpoint strictly inside are split exactly
    cell = np.floor((bp - grid.x_left) / grid.dx).astype(int)
    for i in np.unique(cell[(cell >= 0) & (cell < grid.n_cells)]):
        a, b = edges[i], edges[i + 1]
        inner = bp[(bp > a) & (bp < b)]
        if inner.size == 0:
            continue
        pts = np.concatenate([[a], inner, [b]])
        vals[i] = float(np.sum(u(pts[:-1]) * np.diff(pts)) / (b - a))
    return GridFunction(grid, vals, u.far_left, u.far_right)


def is_decreasing(v: GridFunction, tol: float = 0.0) -> bool:
    """``far_left >= v_0 >= ... >= v_{n-1} >= far_right`` (up to ``tol``)."""
    chain = np.concatenate([[v.far_left], v.values, [v.far_right]])
    return bool(np.all(np.diff(chain) <= tol))


def check_compatible(u: GridFunction, v: GridFunction) -> None:
    if u.grid != v.grid:
        raise IncompatibleFunctions("grid functions live on different grids")
    if u.far_left != v.far_left or u.far_right != v.far_right:
        raise IncompatibleFunctions("grid functions have different far states")


def total_mass_difference(u: GridFunction, v: GridFunction) -> float:
    check_compatible(u, v)
    return float(u.grid.dx * np.sum(u.values - v.values))


def mass_tolerance(tv: float, span: float) -> float:
    return MASS_RTOL * max(tv, 1.0) * max(span, 1.0)
