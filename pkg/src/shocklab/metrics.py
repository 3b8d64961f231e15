"""Exact L1, W1 and discrete W1 distances between piecewise-constant functions.

In one dimension the Wasserstein-1 distance of two functions with equal mass
is the L1 norm of the primitive of their difference.  For step functions that
primitive is piecewise linear, so every integral below is evaluated in closed
form on the merged breakpoints.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FarStateMismatch, MassMismatch
from .fronts import StepFunction
from .grid import GridFunction, check_compatible

# relative mass tolerance, scaled by total variation and span
W1_MASS_RTOL = 1e-10


def as_step(u) -> StepFunction:
    if isinstance(u, StepFunction):
        return u
    if isinstance(u, GridFunction):
        return u.to_step()
    raise TypeError(f"expected StepFunction or GridFunction, got {type(u).__name__}")


def tv(u) -> float:
    return as_step(u).tv()


@dataclass(frozen=True)
class PiecewiseLinear:
    """Continuous piecewise-linear function, zero outside ``[nodes[0], nodes[-1]]``
    when its end values vanish."""

    nodes: np.ndarray
    values: np.ndarray

    def __call__(self, x):
        if self.nodes.size == 0:
            return np.zeros_like(np.asarray(x, dtype=float))
        return np.interp(x, self.nodes, self.values, left=self.values[0], right=self.values[-1])

    def abs_integral(self) -> float:
        """``int |P|`` over the nodes, splitting pieces at sign changes."""
        if self.nodes.size < 2:
            return 0.0
        a, b = self.values[:-1], self.values[1:]
        h = np.diff(self.nodes)
        aa, ab = np.abs(a), np.abs(b)
        same = a * b >= 0
        with np.errstate(divide="ignore", invalid="ignore"):
            crossing = (a * a + b * b) / (2.0 * (aa + ab))
        pieces = np.where(same, 0.5 * (aa + ab), crossing) * h
        return float(np.sum(pieces))


def _difference(u, v):
    """Merged nodes and the plateau values of ``u - v`` between them."""
    su, sv = as_step(u), as_step(v)
    if su.far_left != sv.far_left or su.far_right != sv.far_right:
        raise FarStateMismatch(
            f"far states differ: ({su.far_left}, {su.far_right}) vs ({sv.far_left}, {sv.far_right})"
        )
    nodes = np.union1d(su.breakpoints, sv.breakpoints)
    if nodes.size < 2:
        return nodes, np.zeros(max(nodes.size - 1, 0)), su, sv
    diff = su(nodes[:-1]) - sv(nodes[:-1])
    return nodes, diff, su, sv


def primitive(u, v) -> PiecewiseLinear:
    """``x -> int_{-inf}^x (u - v)`` as a piecewise-linear function."""
    nodes, diff, _, _ = _difference(u, v)
    vals = np.concatenate([[0.0], np.cumsum(diff * np.diff(nodes))]) if nodes.size else np.zeros(0)
    return PiecewiseLinear(nodes, vals)


@dataclass(frozen=True)
class W1Result:
    value: float
    mass_defect: float
    primitive: PiecewiseLinear


def w1_detailed(u, v, mass_rtol: float = W1_MASS_RTOL) -> W1Result:
    """W1 plus the mass defect that was removed before integrating.

    A defect within tolerance is spread linearly over the support so the
    corrected primitive vanishes at both ends; a larger one raises
    :class:`MassMismatch`.
    """
    P = primitive(u, v)
    if P.nodes.size < 2:
        return W1Result(0.0, 0.0, P)
    defect = float(P.values[-1])
    span = float(P.nodes[-1] - P.nodes[0])
    scale = max(tv(u) + tv(v), 1.0) * max(span, 1.0)
    if abs(defect) > mass_rtol * scale:
        raise MassMismatch(f"int (u - v) = {defect:.3e} is not zero")
    if defect != 0.0:
        P = PiecewiseLinear(P.nodes, P.values - defect * (P.nodes - P.nodes[0]) / span)
    return W1Result(P.abs_integral(), defect, P)


def w1(u, v) -> float:
    return w1_detailed(u, v).value


def w1_discrete(u: GridFunction, v: GridFunction, mass_rtol: float = W1_MASS_RTOL) -> float:
    """``dx**2 * sum_i |sum_{j<i} (u_j - v_j)|``."""
    check_compatible(u, v)
    d = u.values - v.values
    partial = np.cumsum(d)
    dx = u.grid.dx
    span = u.grid.n_cells * dx
    scale = max(tv(u) + tv(v), 1.0) * max(span, 1.0)
    if abs(partial[-1] * dx) > mass_rtol * scale:
        raise MassMismatch(f"dx * sum(u - v) = {partial[-1] * dx:.3e} is not zero")
    return float(dx * dx * np.sum(np.abs(partial)))


def l1_distance(u, v) -> float:
    nodes, diff, _, _ = _difference(u, v)
    if nodes.size < 2:
        return 0.0
    return float(np.sum(np.abs(diff) * np.diff(nodes)))


def dlip_norm(phi, dx: float | None = None) -> float:
    """``max_i |phi_{i+1} - phi_i| / dx`` over the stored values."""
    if isinstance(phi, GridFunction):
        vals, dx = phi.values, phi.grid.dx
    else:
        vals = np.asarray(phi, dtype=float)
        if dx is None:
            raise ValueError("dx is required for a bare array")
    if vals.size < 2:
        return 0.0
    return float(np.max(np.abs(np.diff(vals))) / dx)
