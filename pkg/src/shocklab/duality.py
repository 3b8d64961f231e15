"""Backward dual problem and empirical W1-contractivity checks.

For two solutions ``u``, ``v`` of a conservative scheme the flux difference
at each interface is linear in ``delta = u - v`` with coefficients ``A``, ``B``
(see :func:`shocklab.fluxes.linearization_coefficients`).  The dual variable

    phi^n_i = phi^{n+1}_i + lam * (A_i (phi_{i+1} - phi_i) + B_i (phi_i - phi_{i-1}))

(right-hand side at level ``n+1``) makes ``dx * sum_i phi^n_i delta^n_i`` change
only by the source contribution from one level to the next.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import IncompatibleCoefficients, NotDecreasing
from .fluxes import ConditionReport, NumericalFlux, check_contractivity_conditions, linearization_coefficients
from .fronts import StepFunction
from .grid import Grid, GridFunction, is_decreasing, project
from .metrics import dlip_norm, tv, w1, w1_discrete
from .solver import SchemeConfig, step_monotone


@dataclass
class DualCoefficients:
    """Interface-indexed ``A[n]``, ``B[n]`` (length ``n_cells + 1``) for steps ``n = 0..N-1``."""

    A: list
    B: list
    lam: float

    def __post_init__(self):
        self.A = [np.asarray(a, dtype=float) for a in self.A]
        self.B = [np.asarray(b, dtype=float) for b in self.B]
        if len(self.A) != len(self.B):
            raise IncompatibleCoefficients("A and B cover different numbers of steps")
        shapes = {a.shape for a in self.A} | {b.shape for b in self.B}
        if len(shapes) > 1:
            raise IncompatibleCoefficients(f"coefficient slices have mixed shapes {sorted(shapes)}")

    @property
    def n_steps(self) -> int:
        return len(self.A)

    def check(self, tol: float = 1e-12) -> list[ConditionReport]:
        return [check_contractivity_conditions(a, b, self.lam, tol) for a, b in zip(self.A, self.B)]


@dataclass
class DualTrajectory:
    phi: list
    dlip_history: list

    def is_dlip_monotone(self, tol: float = 1e-12) -> bool:
        """DLip non-increasing going backward from ``N`` to ``0``."""
        h = np.asarray(self.dlip_history)
        return bool(np.all(h[:-1] <= h[1:] * (1 + tol) + tol))


def dual_step(phi: np.ndarray, A: np.ndarray, B: np.ndarray, lam: float) -> np.ndarray:
    """One backward step on bare arrays (constant extension outside)."""
    ext = np.concatenate([[phi[0]], phi, [phi[-1]]])
    fwd = ext[2:] - ext[1:-1]  # phi_{i+1} - phi_i
    bwd = ext[1:-1] - ext[:-2]  # phi_i - phi_{i-1}
    # cell i takes A from interface i+1 and B from interface i
    return phi + lam * (A[1:] * fwd + B[:-1] * bwd)


def backward_solve(phi_N: GridFunction, coeffs: DualCoefficients) -> DualTrajectory:
    """Solve the dual problem from level ``N`` down to ``0``.

    ``phi[n]`` is the level-``n`` grid function; ``dlip_history[n]`` its DLip norm.
    """
    n_cells = phi_N.grid.n_cells
    for a in coeffs.A:
        if a.shape != (n_cells + 1,):
            raise IncompatibleCoefficients(
                f"coefficients have shape {a.shape}; expected ({n_cells + 1},) interfaces"
            )
    vals = [np.asarray(phi_N.values, dtype=float)]
    for n in range(coeffs.n_steps - 1, -1, -1):
        vals.append(dual_step(vals[-1], coeffs.A[n], coeffs.B[n], coeffs.lam))
    vals.reverse()
    phis = [GridFunction(phi_N.grid, v, v[0], v[-1]) for v in vals]
    return DualTrajectory(phis, [dlip_norm(p) for p in phis])


def random_admissible_coefficients(rng, n_cells: int, lam: float, n_steps: int = 1) -> DualCoefficients:
    """Random interface coefficients satisfying the backward conditions."""
    A, B = [], []
    for _ in range(n_steps):
        a = np.sort(rng.uniform(0.0, 1.0, n_cells + 1))[::-1]
        b = -np.sort(rng.uniform(0.0, 1.0, n_cells + 1))
        # scale so that lam * (A[j] - B[j]) <= 1 everywhere
        s = rng.uniform(0.2, 1.0) / (lam * np.max(a - b))
        A.append(a * s)
        B.append(b * s)
    return DualCoefficients(A, B, lam)


def verify_coefficient_conditions(nf: NumericalFlux, u_traj, v_traj, lam: float, tol: float = 1e-12):
    """Check the backward conditions on the linearization of every step.

    Returns ``(ok, step, report)``: ``step`` and ``report`` describe the first
    failing slice, or are ``None`` and the last passing report.
    """
    if len(u_traj) != len(v_traj):
        raise IncompatibleCoefficients("trajectories have different lengths")
    if nf.scheme == "lxf" and nf.lam is None:
        nf = nf.with_lambda(lam)
    report = ConditionReport(True)
    for n, (u, v) in enumerate(zip(u_traj, v_traj)):
        A, B = linearization_coefficients(nf, u, v)
        report = check_contractivity_conditions(A, B, lam, tol)
        if not report:
            return False, n, report
    return True, None, report


@dataclass
class ContractivityReport:
    times: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    scale: float
    dt: float
    conditions_ok: bool
    condition_failure: tuple | None
    sbp_defect: float
    dlip_monotone: bool
    u_traj: list = field(repr=False, default_factory=list)
    v_traj: list = field(repr=False, default_factory=list)

    @property
    def slack(self) -> np.ndarray:
        return self.rhs - self.lhs

    @property
    def max_violation(self) -> float:
        """``max_n (lhs - rhs)``; non-positive when the bound holds."""
        return float(np.max(self.lhs - self.rhs))

    def holds(self, rtol: float = 1e-10) -> bool:
        return self.max_violation <= rtol * self.scale

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "time", "lhs", "rhs", "slack"])
        for n, (t, a, b) in enumerate(zip(self.times, self.lhs, self.rhs)):
            w.writerow([n, f"{t:.10g}", f"{a:.12e}", f"{b:.12e}", f"{b - a:.12e}"])
        return buf.getvalue()


def _source_values(src, grid: Grid, t: float) -> np.ndarray:
    if src is None:
        return np.zeros(grid.n_cells)
    if callable(src):
        return np.asarray(src(grid.centers, t), dtype=float)
    raise TypeError("sources are callables h(x, t) or None")


def sbp_defect(u_traj, v_traj, phi_traj, dt: float, h_list, g_list) -> float:
    """Largest defect of ``dx sum phi^{n+1} d^{n+1} = dx sum phi^n d^n + dt dx sum phi^{n+1} (h^n - g^n)``."""
    worst = 0.0
    for n in range(len(u_traj) - 1):
        dx = u_traj[n].grid.dx
        d0 = u_traj[n].values - v_traj[n].values
        d1 = u_traj[n + 1].values - v_traj[n + 1].values
        p0 = phi_traj[n].values
        p1 = phi_traj[n + 1].values
        lhs = dx * np.dot(p1, d1)
        rhs = dx * np.dot(p0, d0) + dt * dx * np.dot(p1, h_list[n] - g_list[n])
        worst = max(worst, abs(lhs - rhs))
    return worst


def contractivity_experiment(
    u0: StepFunction,
    v0: StepFunction,
    h,
    g,
    nf: NumericalFlux,
    grid: Grid,
    N: int,
    cfl_number: float = 0.3,
    phi_N=None,
) -> ContractivityReport:
    """Run both (inhomogeneous) monotone schemes and compare the two sides of

        W1(u^n, v^n) <= W1D(u^0, v^0) + dt * sum_{m<n} W1D(h^m, g^m)

    at every step.  Also records the backward-condition check, the duality
    bookkeeping defect for a dual solution ending in ``phi_N`` (default
    ``phi_i = x_i``) and whether its DLip norm is non-increasing backward.
    """
    if not (u0.is_decreasing() and v0.is_decreasing()):
        raise NotDecreasing("contractivity experiments need decreasing data")
    uu, vv = project(u0, grid), project(v0, grid)
    lo = min(uu.state_bounds()[0], vv.state_bounds()[0])
    hi = max(uu.state_bounds()[1], vv.state_bounds()[1])
    speed = nf.flux.max_speed(lo, hi)
    dt = cfl_number * grid.dx / speed if speed > 0 else cfl_number * grid.dx
    lam = dt / grid.dx
    if nf.scheme == "lxf" and nf.lam is None:
        nf = nf.with_lambda(lam)
    cfg_u = SchemeConfig(nf, 1, cfl_number, h)
    cfg_v = SchemeConfig(nf, 1, cfl_number, g)

    u_traj, v_traj, h_list, g_list = [uu], [vv], [], []
    lhs = [w1(uu, vv)]
    base = w1_discrete(uu, vv)
    rhs = [base]
    acc = 0.0
    for n in range(N):
        t = n * dt
        hv, gv = _source_values(h, grid, t), _source_values(g, grid, t)
        h_list.append(hv)
        g_list.append(gv)
        if h is not None or g is not None:
            hg = GridFunction(grid, hv, 0.0, 0.0)
            gg = GridFunction(grid, gv, 0.0, 0.0)
            acc += dt * w1_discrete(hg, gg)
        uu = step_monotone(uu, cfg_u, dt, t)
        vv = step_monotone(vv, cfg_v, dt, t)
        u_traj.append(uu)
        v_traj.append(vv)
        lhs.append(w1(uu, vv))
        rhs.append(base + acc)

    ok, bad_step, report = verify_coefficient_conditions(nf, u_traj[:-1], v_traj[:-1], lam)
    A, B = [], []
    for a, b in zip(u_traj[:-1], v_traj[:-1]):
        ca, cb = linearization_coefficients(nf, a, b)
        A.append(ca)
        B.append(cb)
    if phi_N is None:
        phi_N = GridFunction(grid, grid.centers, grid.centers[0], grid.centers[-1])
    traj = backward_solve(phi_N, DualCoefficients(A, B, lam))
    defect = sbp_defect(u_traj, v_traj, traj.phi, dt, h_list, g_list)

    span = grid.n_cells * grid.dx
    scale = max(tv(u0) + tv(v0), 1e-300) * span * max(speed, 1.0)
    return ContractivityReport(
        times=dt * np.arange(N + 1),
        lhs=np.asarray(lhs),
        rhs=np.asarray(rhs),
        scale=scale,
        dt=dt,
        conditions_ok=ok,
        condition_failure=None if ok else (bad_step, report.index, report.failed),
        sbp_defect=defect,
        dlip_monotone=traj.is_dlip_monotone(),
        u_traj=u_traj,
        v_traj=v_traj,
    )


def mass_matched_pair(rng, n_jumps: int = 3, lo: float = -1.0, hi: float = 2.0, span=(0.3, 0.7)):
    """Two random decreasing step functions with equal far states and equal mass.

    The first breakpoint of ``v`` is moved to cancel the mass difference.
    """
    for _ in range(1000):
        vals_u = np.concatenate([[hi], np.sort(rng.uniform(lo, hi, n_jumps - 1))[::-1], [lo]])
        vals_v = np.concatenate([[hi], np.sort(rng.uniform(lo, hi, n_jumps - 1))[::-1], [lo]])
        if np.any(np.diff(vals_u) >= 0) or np.any(np.diff(vals_v) >= 0):
            continue
        bu = np.sort(rng.uniform(*span, n_jumps))
        bv = np.sort(rng.uniform(*span, n_jumps))
        u = StepFunction(bu, vals_u)
        v = StepFunction(bv, vals_v)
        a, b = span[0] - 1.0, span[1] + 1.0
        diff = u.integral(a, b) - v.integral(a, b)
        # shifting v's first jump by s changes its integral by s*(v0 - v1)
        s = diff / (vals_v[0] - vals_v[1])
        bv2 = bv.copy()
        bv2[0] += s
        if bv2[0] < span[0] - 0.2 or (n_jumps > 1 and bv2[0] >= bv2[1] - 1e-3):
            continue
        return u, StepFunction(bv2, vals_v)
    raise RuntimeError("could not draw a mass-matched pair")


def zero_mass_sources(rng, grid: Grid, amplitude: float = 0.5, support=(0.35, 0.65)):
    """Random source pair ``(h, g)`` whose difference has zero mass on the grid."""
    x = grid.centers
    inside = (x > support[0]) & (x < support[1])
    k = rng.uniform(1.0, 4.0)
    shift = rng.uniform(0.0, 2 * np.pi)
    c = 0.5 * (support[0] + support[1])

    def h(xs, t):
        bump = amplitude * np.sin(2 * np.pi * k * (xs - c) + shift + t)
        m = (xs > support[0]) & (xs < support[1])
        out = np.where(m, bump, 0.0)
        return out - m * (out[m].mean() if m.any() else 0.0)

    def g(xs, t):
        return np.zeros_like(xs)

    if not inside.any():
        raise ValueError("source support misses the grid")
    return h, g


def decreasing_window_check(u: GridFunction) -> bool:
    return is_decreasing(u, tol=1e-12)
