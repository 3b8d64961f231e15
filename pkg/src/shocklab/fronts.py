"""Exact entropy solutions for decreasing piecewise-constant data.

For a convex flux and strictly decreasing plateau values the entropy solution
consists of shocks only.  Between interactions every shock travels with its
Rankine-Hugoniot speed; when two (or more) shocks meet they merge into a single
shock joining the outermost states.  :func:`evolve` tracks these events exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotAShock, NotDecreasing

# relative tolerance for deciding that two collision times coincide
COLLISION_TOL = 1e-13


class StepFunction:
    """Piecewise-constant function on the real line.

    ``values[0]`` holds for ``x < breakpoints[0]``, ``values[k]`` on
    ``[breakpoints[k-1], breakpoints[k])`` and ``values[-1]`` beyond the last
    breakpoint.  Adjacent equal values are merged at construction.
    """

    __slots__ = ("breakpoints", "values")

    def __init__(self, breakpoints, values):
        bp = np.asarray(breakpoints, dtype=float).ravel()
        vals = np.asarray(values, dtype=float).ravel()
        if vals.size != bp.size + 1:
            raise ValueError("need exactly one more value than breakpoints")
        if not (np.all(np.isfinite(bp)) and np.all(np.isfinite(vals))):
            raise ValueError("breakpoints and values must be finite")
        if bp.size > 1 and np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        keep = vals[1:] != vals[:-1]
        self.breakpoints = bp[keep]
        self.values = np.concatenate([vals[:1], vals[1:][keep]])
        self.breakpoints.setflags(write=False)
        self.values.setflags(write=False)

    @classmethod
    def heaviside(cls, u_left, u_right, x0=0.0):
        return cls([x0], [u_left, u_right])

    @classmethod
    def constant(cls, value):
        return cls([], [value])

    def __repr__(self):
        return f"StepFunction(breakpoints={self.breakpoints.tolist()}, values={self.values.tolist()})"

    def __eq__(self, other):
        if not isinstance(other, StepFunction):
            return NotImplemented
        return np.array_equal(self.breakpoints, other.breakpoints) and np.array_equal(
            self.values, other.values
        )

    @property
    def n_jumps(self) -> int:
        return int(self.breakpoints.size)

    @property
    def far_left(self) -> float:
        return float(self.values[0])

    @property
    def far_right(self) -> float:
        return float(self.values[-1])

    def __call__(self, x):
        idx = np.searchsorted(self.breakpoints, x, side="right")
        return self.values[idx]

    def is_decreasing(self) -> bool:
        return bool(np.all(np.diff(self.values) < 0))

    def tv(self) -> float:
        return float(np.sum(np.abs(np.diff(self.values))))

    def shift(self, dx: float) -> "StepFunction":
        return StepFunction(self.breakpoints + dx, self.values)

    def cumulative(self, x, origin: float | None = None):
        """Exact ``int_origin^x u``; origin defaults to the first breakpoint."""
        x = np.asarray(x, dtype=float)
        bp, vals = self.breakpoints, self.values
        if bp.size == 0:
            ref = 0.0 if origin is None else origin
            return vals[0] * (x - ref)
        nodes = np.concatenate([[0.0], np.cumsum(vals[1:-1] * np.diff(bp))])
        idx = np.searchsorted(bp, x, side="right")
        left = np.where(idx == 0, bp[0], bp[np.maximum(idx - 1, 0)])
        base = np.where(idx == 0, 0.0, nodes[np.maximum(idx - 1, 0)])
        out = base + vals[idx] * (x - left)
        if origin is not None:
            out = out - self.cumulative(origin)
        return out

    def integral(self, a: float, b: float) -> float:
        return float(self.cumulative(b) - self.cumulative(a))


def tv(u: StepFunction) -> float:
    return u.tv()


def shock_speed(u_left: float, u_right: float, flux) -> float:
    """Rankine-Hugoniot speed of the shock ``u_left -> u_right``."""
    if not u_left > u_right:
        raise NotAShock(f"u_left={u_left} must exceed u_right={u_right}")
    return float((flux.f(u_left) - flux.f(u_right)) / (u_left - u_right))


@dataclass
class FrontState:
    time: float
    positions: np.ndarray
    values: np.ndarray
    speeds: np.ndarray
    # position/time at which each shock last changed speed; keeps long
    # evolutions free of accumulated increments
    anchors: np.ndarray = field(default=None, repr=False)
    anchor_times: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.anchors is None:
            self.anchors = np.array(self.positions, dtype=float)
            self.anchor_times = np.full(self.anchors.shape, float(self.time))

    @classmethod
    def from_step(cls, u: StepFunction, flux, time: float = 0.0) -> "FrontState":
        if not u.is_decreasing():
            raise NotDecreasing("front tracking needs strictly decreasing plateau values")
        speeds = np.array(
            [shock_speed(a, b, flux) for a, b in zip(u.values[:-1], u.values[1:])]
        )
        return cls(float(time), u.breakpoints.copy(), u.values.copy(), speeds)

    def at(self, t: float) -> np.ndarray:
        return self.anchors + self.speeds * (t - self.anchor_times)

    def to_step(self) -> StepFunction:
        return StepFunction(self.positions, self.values)

    def is_admissible(self, flux) -> bool:
        """Lax condition ``f'(u_l) > D > f'(u_r)`` and Rankine-Hugoniot speeds."""
        ul, ur = self.values[:-1], self.values[1:]
        rh = (flux.f(ul) - flux.f(ur)) / (ul - ur)
        ok_rh = np.allclose(rh, self.speeds, rtol=1e-12, atol=1e-14)
        ok_lax = np.all(flux.f_prime(ul) >= self.speeds) and np.all(
            self.speeds >= flux.f_prime(ur)
        )
        ordered = self.positions.size < 2 or bool(np.all(np.diff(self.positions) > 0))
        return bool(ok_rh and ok_lax and ordered and np.all(np.diff(self.values) < 0))


def _pair_collision_times(state: FrontState) -> np.ndarray:
    gaps = np.diff(state.positions)
    closing = state.speeds[:-1] - state.speeds[1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        times = np.where(closing > 0, gaps / closing, np.inf)
    return times


def first_interaction_time(state: FrontState) -> float | None:
    """Time from ``state.time`` until the next collision of adjacent shocks."""
    if state.positions.size < 2:
        return None
    times = _pair_collision_times(state)
    t = float(np.min(times))
    return None if not np.isfinite(t) else t


def _merge(state: FrontState, dt: float, flux) -> FrontState:
    times = _pair_collision_times(state)
    tol = COLLISION_TOL * max(1.0, dt)
    colliding = times <= dt + tol
    t_new = state.time + dt
    pos = state.at(t_new)
    # group shocks joined by colliding pairs into chains
    keep_pos, keep_vals = [], [state.values[0]]
    keep_anchor, keep_atime, keep_speed = [], [], []
    k, K = 0, pos.size
    while k < K:
        j = k
        while j < K - 1 and colliding[j]:
            j += 1
        ul, ur = state.values[k], state.values[j + 1]
        if j == k:
            keep_pos.append(pos[k])
            keep_anchor.append(state.anchors[k])
            keep_atime.append(state.anchor_times[k])
            keep_speed.append(state.speeds[k])
        else:
            x = float(np.mean(pos[k : j + 1]))
            keep_pos.append(x)
            keep_anchor.append(x)
            keep_atime.append(t_new)
            keep_speed.append(shock_speed(ul, ur, flux))
        keep_vals.append(ur)
        k = j + 1
    return FrontState(
        t_new,
        np.array(keep_pos),
        np.array(keep_vals),
        np.array(keep_speed),
        np.array(keep_anchor),
        np.array(keep_atime),
    )


def track(u0: StepFunction, flux, t: float) -> list[FrontState]:
    """All front states from time 0 through every interaction up to ``t``.

    The last entry is the state at time ``t`` itself.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    state = FrontState.from_step(u0, flux)
    history = [state]
    while True:
        dt = first_interaction_time(state)
        remaining = t - state.time
        if dt is None or dt >= remaining - COLLISION_TOL * max(1.0, remaining):
            if dt is not None and abs(dt - remaining) <= COLLISION_TOL * max(1.0, remaining):
                state = _merge(state, dt, flux)
            else:
                pos = state.at(t)
                state = FrontState(
                    float(t), pos, state.values, state.speeds, state.anchors, state.anchor_times
                )
            history.append(state)
            return history
        state = _merge(state, dt, flux)
        history.append(state)


def evolve(u0: StepFunction, flux, t: float) -> StepFunction:
    """Exact entropy solution ``u(., t)`` for decreasing step data ``u0``."""
    if not u0.is_decreasing():
        raise NotDecreasing("evolve requires strictly decreasing data")
    if t == 0:
        return u0
    return track(u0, flux, t)[-1].to_step()


def interaction_times(u0: StepFunction, flux, t_max: float = np.inf) -> list[float]:
    """Absolute times of all shock interactions (at most ``K - 1`` of them)."""
    state = FrontState.from_step(u0, flux)
    out = []
    while True:
        dt = first_interaction_time(state)
        if dt is None or state.time + dt > t_max:
            return out
        state = _merge(state, dt, flux)
        out.append(state.time)
