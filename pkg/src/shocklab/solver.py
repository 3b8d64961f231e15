"""Explicit time stepping for conservative 3-point schemes and the ENO extension.

A step of the monotone scheme is

    u_i <- u_i - lam * (F(u_i, u_{i+1}) - F(u_{i-1}, u_i)),   lam = dt / dx,

with ghost cells holding the far states.  Higher order replaces the cell
averages fed to ``F`` by ENO point values and advances with SSP-RK3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from . import kernels
from .errors import CflViolation, NoWaveSpeed
from .fluxes import NumericalFlux, cfl_timestep
from .grid import GridFunction

INTEGRATORS = ("euler", "ssprk3")

Source = Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class SchemeConfig:
    """Scheme choice for a run.

    ``order`` 1 is the monotone scheme; 2 and 3 use ENO point values with the
    numerical flux ``nf`` and always integrate with SSP-RK3.  ``integrator``
    applies to order 1 only.  ``source(x, t)`` returns cell-center source values.
    """

    nf: NumericalFlux
    order: int = 1
    cfl_number: float = 0.3
    source: Source | None = None
    integrator: str = "euler"

    def __post_init__(self):
        if self.order not in (1, 2, 3):
            raise ValueError("order must be 1, 2 or 3")
        if not 0 < self.cfl_number <= 1:
            raise ValueError("cfl_number must lie in (0, 1]")
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"integrator must be one of {INTEGRATORS}")

    @property
    def time_integrator(self) -> str:
        return "ssprk3" if self.order > 1 else self.integrator


def _is_burgers(nf: NumericalFlux) -> bool:
    return nf.flux.name == "burgers" and nf.flux.quadratic == (0.5, 0.0, 0.0)


def _flux_lambda(nf: NumericalFlux, lam: float) -> NumericalFlux:
    # the Lax-Friedrichs viscosity is tied to the run's mesh ratio unless fixed
    if nf.scheme == "lxf" and nf.lam is None:
        return nf.with_lambda(lam)
    return nf


def _check_cfl(u: GridFunction, nf: NumericalFlux, lam: float) -> None:
    lo, hi = u.state_bounds()
    speed = nf.flux.max_speed(lo, hi)
    if lam * speed > 1.0 + 1e-12:
        raise CflViolation(f"lam * max|f'| = {lam * speed:.6g} exceeds 1")
    if nf.scheme == "lxf" and nf.lam is not None and lam > nf.lam * (1 + 1e-12):
        raise CflViolation(f"step ratio {lam:.6g} exceeds the Lax-Friedrichs ratio {nf.lam:.6g}")


def eno_reconstruct(u: GridFunction, order: int):
    """ENO point values ``(u_minus, u_plus)`` at the ``n + 1`` grid interfaces.

    Interface ``j`` separates cells ``j - 1`` and ``j``; ``u_minus[j]`` comes from
    the left cell's polynomial, ``u_plus[j]`` from the right one.
    """
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    coef = kernels.eno_coefficients(order)
    return kernels.eno_interfaces(u.values, order, u.far_left, u.far_right, coef)


def monotone_update(values, far_left: float, far_right: float, nf: NumericalFlux, lam: float) -> np.ndarray:
    """First-order update of a bare value array with constant ghost states."""
    if _is_burgers(nf):
        code = kernels.SCHEME_CODES[nf.scheme]
        lam_lxf = nf._need_lambda() if nf.scheme == "lxf" else 1.0
        return kernels.monotone_step(values, far_left, far_right, lam, code, lam_lxf)
    ue = np.concatenate([[far_left], values, [far_right]])
    F = nf(ue[:-1], ue[1:])
    return values - lam * (F[1:] - F[:-1])


def _euler(u: GridFunction, nf: NumericalFlux, order: int, dt: float) -> np.ndarray:
    lam = dt / u.grid.dx
    if order == 1:
        return monotone_update(u.values, u.far_left, u.far_right, nf, lam)
    if _is_burgers(nf):
        if nf.scheme == "godunov":
            coef = kernels.eno_coefficients(order)
            rhs = kernels.eno_rhs(u.values, order, u.far_left, u.far_right, coef, u.grid.dx)
            return u.values + dt * rhs
    a, b = eno_reconstruct(u, order)
    F = nf(a, b)
    return u.values - lam * (F[1:] - F[:-1])


def _stage(u, cfg, nf, dt, t):
    out = _euler(u, nf, cfg.order, dt)
    if cfg.source is not None:
        out = out + dt * np.asarray(cfg.source(u.grid.centers, t), dtype=float)
    return u.with_values(out)


def step_monotone(u: GridFunction, cfg: SchemeConfig, dt: float, t: float = 0.0) -> GridFunction:
    """One forward-Euler step of the first-order scheme (plus ``dt * h(x, t)``)."""
    lam = dt / u.grid.dx
    nf = _flux_lambda(cfg.nf, lam)
    _check_cfl(u, nf, lam)
    return _stage(u, replace(cfg, order=1), nf, dt, t)


def step_ssprk3(u: GridFunction, cfg: SchemeConfig, dt: float, t: float = 0.0) -> GridFunction:
    """Three-stage SSP Runge-Kutta step built from forward-Euler stages."""
    lam = dt / u.grid.dx
    nf = _flux_lambda(cfg.nf, lam)
    _check_cfl(u, nf, lam)
    u1 = _stage(u, cfg, nf, dt, t)
    u2 = _stage(u1, cfg, nf, dt, t + dt)
    u2 = u.with_values(0.75 * u.values + 0.25 * u2.values)
    u3 = _stage(u2, cfg, nf, dt, t + 0.5 * dt)
    return u.with_values(u.values / 3.0 + (2.0 / 3.0) * u3.values)


def step_eno_rk3(u: GridFunction, cfg: SchemeConfig, dt: float, t: float = 0.0) -> GridFunction:
    if cfg.order == 1:
        raise ValueError("step_eno_rk3 needs order 2 or 3")
    return step_ssprk3(u, cfg, dt, t)


def step(u: GridFunction, cfg: SchemeConfig, dt: float, t: float = 0.0) -> GridFunction:
    if cfg.time_integrator == "ssprk3":
        return step_ssprk3(u, cfg, dt, t)
    return step_monotone(u, cfg, dt, t)


def time_step(u0: GridFunction, cfg: SchemeConfig) -> float:
    """Uniform step: a fixed Lax-Friedrichs ratio wins, else the CFL formula."""
    if cfg.nf.scheme == "lxf" and cfg.nf.lam is not None:
        return cfg.nf.lam * u0.grid.dx
    lo, hi = u0.state_bounds()
    return cfl_timestep(cfg.nf, u0.grid, lo, hi, cfg.cfl_number)


def _batchable(cfg: SchemeConfig) -> bool:
    return cfg.order == 1 and cfg.integrator == "euler" and cfg.source is None and _is_burgers(cfg.nf)


def run(u0: GridFunction, cfg: SchemeConfig, t_final: float, callback=None):
    """Advance to ``t_final`` with a uniform step, shortening the last one.

    Returns ``(u, n_steps)``.  ``callback(n, t, u)`` is called after every step.
    """
    if t_final < 0:
        raise ValueError("t_final must be non-negative")
    if t_final == 0:
        return u0, 0
    try:
        dt = time_step(u0, cfg)
    except NoWaveSpeed:
        dt = t_final
    n_steps = max(1, math.ceil(t_final / dt - 1e-9))
    nf = _flux_lambda(cfg.nf, dt / u0.grid.dx)
    cfg = replace(cfg, nf=nf)
    u = u0
    if callback is None and _batchable(cfg):
        # the monotone scheme keeps values inside the initial state box, so one
        # CFL check covers every full step
        lam = dt / u0.grid.dx
        _check_cfl(u0, nf, lam)
        code = kernels.SCHEME_CODES[nf.scheme]
        lam_lxf = nf._need_lambda() if nf.scheme == "lxf" else 1.0
        vals = kernels.monotone_steps(u0.values, u0.far_left, u0.far_right, lam, code, lam_lxf, n_steps - 1)
        u = u0.with_values(vals)
        t = (n_steps - 1) * dt
        return step(u, cfg, t_final - t, t), n_steps
    for k in range(n_steps):
        t = k * dt
        h = dt if k < n_steps - 1 else t_final - t
        u = step(u, cfg, h, t)
        if callback is not None:
            callback(k + 1, t + h, u)
    return u, n_steps
