"""Discrete shock profiles of monotone schemes.

A discrete shock joining ``u_left > u_right`` is a lattice function ``U`` with

    U(xi - D*lam) = U(xi) - lam * (F(U(xi), U(xi+1)) - F(U(xi-1), U(xi))),

i.e. one step of the scheme translates it by ``D*lam`` cells.  Profiles are
found by running the scheme from Riemann data in a window that is shifted
back by ``p`` cells every ``q`` steps, where ``D*lam = p/q``; once the window
content repeats, sampling the ``q`` intermediate states gives ``U`` on the
finer lattice ``(1/q) Z``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import CflViolation, InsufficientWindow, NoConvergence, NotAShock, TailTooSharp
from .fluxes import NumericalFlux, monotone_cfl_ok
from .fronts import StepFunction, shock_speed
from .grid import Grid, GridFunction, project
from .metrics import w1
from .solver import monotone_update

DEFAULT_TOL = 1e-10
DEFAULT_MAX_STEPS = 10**6
NOISE_FLOOR = 1e-13
MAX_DENOMINATOR = 1000


@dataclass
class DiscreteShockProfile:
    """Converged profile.

    ``offsets``/``values`` hold ``U`` on the integer lattice; ``fine_index``/
    ``fine_values`` hold it on ``(1/q) Z`` (``xi = fine_index / q``).
    """

    offsets: np.ndarray
    values: np.ndarray
    u_left: float
    u_right: float
    speed: float
    lam: float
    scheme: NumericalFlux
    p: int
    q: int
    fine_index: np.ndarray
    fine_values: np.ndarray
    residual: float
    steps: int = 0
    approximate: bool = False
    alpha: float = float("nan")
    beta: float = float("nan")
    meta: dict = field(default_factory=dict)

    @property
    def samples(self) -> dict[int, float]:
        return dict(zip(self.offsets.tolist(), self.values.tolist()))

    @property
    def shift(self) -> float:
        """Translation per step in cells, ``p / q``."""
        return self.p / self.q

    def __call__(self, xi):
        """``U(xi)`` by linear interpolation on the fine lattice, far states outside."""
        x = self.fine_index / self.q
        return np.interp(xi, x, self.fine_values, left=self.u_left, right=self.u_right)

    def to_text(self) -> str:
        lines = [f"{o:d} {v:.17g}" for o, v in zip(self.offsets, self.values)]
        return "\n".join(lines) + "\n"

    def export(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("# offset value\n")
            fh.write(self.to_text())


def _riemann_window(nf: NumericalFlux, u_left: float, u_right: float, half: int) -> np.ndarray:
    i = np.arange(-half, half)
    vals = np.where(i < 0, u_left, u_right).astype(float)
    if nf.scheme == "lxf":
        # centring the jump on a cell avoids the odd-even mode of the
        # Lax-Friedrichs stencil, which otherwise never settles
        vals[i == 0] = 0.5 * (u_left + u_right)
    return vals


def _shifted(u: np.ndarray, p: int, u_left: float, u_right: float) -> np.ndarray:
    if p > 0:
        return np.concatenate([u[p:], np.full(p, u_right)])
    if p < 0:
        return np.concatenate([np.full(-p, u_left), u[:p]])
    return u


def compute_profile(
    nf: NumericalFlux,
    u_left: float,
    u_right: float,
    lam: float,
    window: int = 60,
    tol: float = DEFAULT_TOL,
    max_steps: int = DEFAULT_MAX_STEPS,
    max_window: int = 2000,
) -> DiscreteShockProfile:
    """Discrete shock of scheme ``nf`` at mesh ratio ``lam``.

    ``window`` is the number of cells kept on each side of the jump.  The
    window is doubled (and the iteration restarted) whenever the residual
    stalls while the edge cells still differ from the far states.
    """
    if not u_left > u_right:
        raise NotAShock(f"u_left={u_left} must exceed u_right={u_right}")
    if window < 40:
        raise InsufficientWindow("use at least 40 cells on each side")
    if nf.scheme == "lxf" and nf.lam is None:
        nf = nf.with_lambda(lam)
    if not monotone_cfl_ok(nf, lam, u_right, u_left):
        raise CflViolation(f"lam={lam} violates the monotonicity restriction")
    speed = shock_speed(u_left, u_right, nf.flux)
    ratio = speed * lam
    frac = Fraction(ratio).limit_denominator(MAX_DENOMINATOR)
    p, q = frac.numerator, frac.denominator
    mismatch = abs(ratio - p / q)
    approximate = mismatch > 1e-14
    jump = u_left - u_right
    # an inexact p/q leaves a drift of about q*mismatch*jump per period
    tol_eff = max(tol, 10.0 * q * mismatch * jump) if approximate else tol

    half = window
    u = _riemann_window(nf, u_left, u_right, half)
    steps = 0
    check_every = max(q, 200)
    last_check_res = np.inf
    since_check = 0
    residual = np.inf
    while steps < max_steps:
        prev = u
        for _ in range(q):
            u = monotone_update(u, u_left, u_right, nf, lam)
        steps += q
        u = _shifted(u, p, u_left, u_right)
        residual = float(np.max(np.abs(u - prev)))
        if residual <= tol_eff:
            break
        since_check += q
        if since_check >= check_every:
            since_check = 0
            stalled = residual > 0.9 * last_check_res
            edge = max(abs(u[0] - u_left), abs(u[-1] - u_right))
            if stalled and edge > NOISE_FLOOR:
                if 2 * half > max_window:
                    raise NoConvergence(f"window limit {max_window} reached, residual {residual:.3e}")
                # restart rather than pad: padding a Lax-Friedrichs state can
                # trap an odd-even mass imbalance that never decays
                half *= 2
                u = _riemann_window(nf, u_left, u_right, half)
                last_check_res = np.inf
                continue
            last_check_res = residual
    else:
        raise NoConvergence(f"{max_steps} steps without reaching residual {tol_eff:.1e} (got {residual:.3e})")

    offsets = np.arange(-half, half)
    fine_index, fine_values = _fine_lattice(u, offsets, p, q, u_left, u_right, nf, lam)
    prof = DiscreteShockProfile(
        offsets=offsets,
        values=u,
        u_left=float(u_left),
        u_right=float(u_right),
        speed=speed,
        lam=float(lam),
        scheme=nf,
        p=p,
        q=q,
        fine_index=fine_index,
        fine_values=fine_values,
        residual=residual,
        steps=steps,
        approximate=approximate,
        meta={"window": half, "ratio": ratio, "tol": tol_eff},
    )
    return prof


def _fine_lattice(u, offsets, p, q, u_left, u_right, nf, lam):
    """Interleave the ``q`` states of one period: ``u^m_i = U(i - m*p/q)``."""
    if q == 1:
        return offsets.copy(), u.copy()
    snaps = [u]
    for _ in range(q - 1):
        snaps.append(monotone_update(snaps[-1], u_left, u_right, nf, lam))
    k_all = np.concatenate([q * offsets - m * p for m in range(q)])
    v_all = np.concatenate(snaps)
    order = np.argsort(k_all, kind="stable")
    k_all, v_all = k_all[order], v_all[order]
    # keep the range where every fine node is present
    lo = q * offsets[0] + max(0, -(q - 1) * p)
    hi = q * offsets[-1] - max(0, (q - 1) * p)
    keep = (k_all >= lo) & (k_all <= hi)
    k, v = k_all[keep], v_all[keep]
    if k.size != hi - lo + 1 or np.any(np.diff(k) != 1):
        raise InsufficientWindow("fine lattice has gaps")
    return k, v


def heaviside_profile(nf: NumericalFlux, u_left: float, u_right: float, lam: float) -> DiscreteShockProfile:
    """The exact step as a candidate profile (stationary Godunov shocks are exact)."""
    if not u_left > u_right:
        raise NotAShock(f"u_left={u_left} must exceed u_right={u_right}")
    speed = shock_speed(u_left, u_right, nf.flux)
    frac = Fraction(speed * lam).limit_denominator(MAX_DENOMINATOR)
    offsets = np.arange(-40, 40)
    vals = np.where(offsets < 0, u_left, u_right).astype(float)
    prof = DiscreteShockProfile(
        offsets, vals, float(u_left), float(u_right), speed, float(lam), nf,
        frac.numerator, frac.denominator, offsets * frac.denominator, vals, residual=np.nan,
    )
    if frac.denominator != 1:
        prof.fine_index = np.arange(offsets[0] * frac.denominator, offsets[-1] * frac.denominator + 1)
        prof.fine_values = np.where(prof.fine_index < 0, u_left, u_right).astype(float)
    prof.residual = profile_residual(prof)
    return prof


def profile_residual(prof: DiscreteShockProfile) -> float:
    """Max defect of the traveling-wave equation over the stored fine lattice."""
    k, v, p, q = prof.fine_index, prof.fine_values, prof.p, prof.q
    nf = prof.scheme
    if nf.scheme == "lxf" and nf.lam is None:
        nf = nf.with_lambda(prof.lam)
    # fine index xi*q; needs k - p, k - q and k + q inside the store
    shift_lo = max(q, p)
    shift_hi = max(q, -p)
    if k.size <= shift_lo + shift_hi:
        raise InsufficientWindow("window too small to evaluate the traveling-wave equation")
    centre = v[shift_lo : k.size - shift_hi]
    left = v[shift_lo - q : k.size - shift_hi - q]
    right = v[shift_lo + q : k.size - shift_hi + q]
    moved = v[shift_lo - p : k.size - shift_hi - p]
    rhs = centre - prof.lam * (nf(centre, right) - nf(left, centre))
    return float(np.max(np.abs(moved - rhs)))


def _sample(prof: DiscreteShockProfile, grid: Grid, x_shock: float, zeta: float) -> GridFunction:
    # cell i has its left edge at x_left + i*dx; the profile offset 0 sits at x_shock
    pos = (grid.edges[:-1] - x_shock) / grid.dx + zeta
    return GridFunction(grid, prof(pos), prof.u_left, prof.u_right)


def normalize_mass(prof: DiscreteShockProfile, x_shock: float, grid: Grid) -> GridFunction:
    """Grid sampling of ``prof`` with zero mass relative to the step at ``x_shock``.

    The sampling offset ``zeta`` uses ``sum_i (U(i+zeta) - U(i)) = zeta*(u_r - u_l)``
    to cancel the mass defect in one correction.
    """
    heav = project(StepFunction.heaviside(prof.u_left, prof.u_right, x_shock), grid)
    v0 = _sample(prof, grid, x_shock, 0.0)
    defect = grid.dx * float(np.sum(heav.values - v0.values))
    zeta = -defect / (grid.dx * (prof.u_left - prof.u_right))
    out = _sample(prof, grid, x_shock, zeta)
    out_defect = grid.dx * float(np.sum(heav.values - out.values))
    prof.meta["zeta"] = zeta
    prof.meta["mass_defect"] = out_defect
    return out


@dataclass(frozen=True)
class DecayFit:
    alpha: float
    beta: float
    r: float
    alpha_left: float
    alpha_right: float
    r_left: float
    r_right: float
    n_left: int
    n_right: int
    noise_floor: float


def _tail_fit(xi, dev):
    x = np.abs(xi).astype(float)
    y = np.log(dev)
    slope, _ = np.polyfit(x, y, 1)
    r = float(np.corrcoef(x, y)[0, 1])
    return -float(slope), r


def fit_decay(prof: DiscreteShockProfile, noise_floor: float | None = None) -> DecayFit:
    """Exponential tail fit ``|U(xi) - u_far| <= beta * exp(-alpha * |xi|)``.

    Each tail is fitted by least squares on ``log|U - u_far|`` against ``|xi|``
    using the samples above ``noise_floor`` (by default the larger of 1e-13
    and ten times the profile residual, below which samples carry iteration
    error rather than decay).  ``alpha`` is the smaller tail rate and ``r`` the
    correlation of that tail's fit; ``beta`` is the smallest amplitude for which
    the bound holds on every sample used.  A tail needs three samples.
    """
    if noise_floor is None:
        res = prof.residual if np.isfinite(prof.residual) else 0.0
        noise_floor = max(NOISE_FLOOR, 10.0 * res)
    xi, U = prof.offsets, prof.values
    dev_l = np.abs(U - prof.u_left)
    dev_r = np.abs(U - prof.u_right)
    lmask = (xi < 0) & (dev_l > noise_floor)
    rmask = (xi >= 0) & (dev_r > noise_floor)
    alpha_l = alpha_r = float("inf")
    r_l = r_r = float("nan")
    if lmask.sum() >= 3:
        alpha_l, r_l = _tail_fit(xi[lmask], dev_l[lmask])
    if rmask.sum() >= 3:
        alpha_r, r_r = _tail_fit(xi[rmask], dev_r[rmask])
    if not (np.isfinite(alpha_l) or np.isfinite(alpha_r)):
        raise TailTooSharp("no tail with three samples above the noise floor")
    alpha, r = (alpha_l, r_l) if alpha_l <= alpha_r else (alpha_r, r_r)
    env = []
    if lmask.any():
        env.append(np.max(dev_l[lmask] * np.exp(alpha * np.abs(xi[lmask]))))
    if rmask.any():
        env.append(np.max(dev_r[rmask] * np.exp(alpha * np.abs(xi[rmask]))))
    beta = float(max(env))
    prof.alpha, prof.beta = alpha, beta
    return DecayFit(
        alpha, beta, r, alpha_l, alpha_r, r_l, r_r, int(lmask.sum()), int(rmask.sum()), noise_floor
    )


def gap_grid(prof: DiscreteShockProfile, dx: float, x_shock: float = 0.0, margin: int = 20) -> Grid:
    """Grid of width ``dx`` covering the stored profile plus ``margin`` cells."""
    left = int(-prof.offsets[0]) + margin
    right = int(prof.offsets[-1]) + 1 + margin
    return Grid(x_shock - left * dx, dx, left + right)


def w1_heaviside_gap(prof: DiscreteShockProfile, dx: float, x_shock: float = 0.0, normalize: bool = True) -> float:
    """W1 between the step at ``x_shock`` and the sampled profile at cell width ``dx``."""
    grid = gap_grid(prof, dx, x_shock)
    v = normalize_mass(prof, x_shock, grid) if normalize else _sample(prof, grid, x_shock, 0.0)
    return w1(StepFunction.heaviside(prof.u_left, prof.u_right, x_shock), v)
