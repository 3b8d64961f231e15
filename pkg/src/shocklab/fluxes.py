"""Convex physical fluxes, monotone two-point numerical fluxes and their
linearization coefficients.

Three schemes are provided, selected by name:

``"lxf"``
    Lax-Friedrichs, ``F(a,b) = (f(a)+f(b))/2 - (b-a)/(2*lam)``.
``"eo"``
    Engquist-Osher, ``F(a,b) = (f(a)+f(b))/2 - 1/2 int_a^b |f'|``.
``"godunov"``
    Godunov, the max of ``f`` over ``[b, a]`` when ``a >= b`` and the min over
    ``[a, b]`` otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .errors import IncompatibleFunctions, MissingLambda, NoWaveSpeed

SCHEMES = ("lxf", "eo", "godunov")

# below this state separation a divided difference is replaced by f' at the midpoint
_DIVDIFF_GUARD = 1e-6
_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(16)
_GAUSS_NODES = 0.5 * (_GAUSS_NODES + 1.0)
_GAUSS_WEIGHTS = 0.5 * _GAUSS_WEIGHTS


@dataclass(frozen=True)
class ConvexFlux:
    """Physical flux ``f`` with derivative ``f_prime``.

    ``minimizer`` (the point where ``f' = 0``) enables closed forms for the
    Engquist-Osher and Godunov fluxes; ``quadratic`` holds ``(c2, c1, c0)`` when
    ``f(u) = c2*u**2 + c1*u + c0`` and unlocks exact path averages.
    """

    name: str
    f: Callable
    f_prime: Callable
    minimizer: float | None = None
    quadratic: tuple[float, float, float] | None = None

    def max_speed(self, u_min: float, u_max: float) -> float:
        # f' is monotone, so |f'| peaks at an end of the box
        return float(max(abs(self.f_prime(u_min)), abs(self.f_prime(u_max))))

    def is_convex_on(self, u_min: float, u_max: float, samples: int = 1001) -> bool:
        u = np.linspace(u_min, u_max, samples)
        return bool(np.all(np.diff(self.f_prime(u)) >= -1e-12))

    def derivative_defect(self, u_min: float, u_max: float, h: float = 1e-6, samples: int = 101) -> float:
        u = np.linspace(u_min, u_max, samples)
        fd = (self.f(u + h) - self.f(u - h)) / (2 * h)
        return float(np.max(np.abs(fd - self.f_prime(u))))

    def divided_difference(self, x, y):
        """Mean of ``f'`` on the segment ``[y, x]``."""
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        if self.quadratic is not None:
            c2, c1, _ = self.quadratic
            return c2 * (x + y) + c1
        d = x - y
        small = np.abs(d) <= _DIVDIFF_GUARD * (1.0 + np.abs(x) + np.abs(y))
        with np.errstate(divide="ignore", invalid="ignore"):
            dd = (self.f(x) - self.f(y)) / np.where(small, 1.0, d)
        return np.where(small, self.f_prime(0.5 * (x + y)), dd)


def _burgers_f(u):
    return 0.5 * np.asarray(u) ** 2


def _burgers_fp(u):
    return np.asarray(u, dtype=float) * 1.0


def burgers() -> ConvexFlux:
    return ConvexFlux("burgers", _burgers_f, _burgers_fp, minimizer=0.0, quadratic=(0.5, 0.0, 0.0))


PHYSICAL_FLUXES = {"burgers": burgers}


@dataclass(frozen=True)
class NumericalFlux:
    scheme: str
    flux: ConvexFlux
    lam: float | None = None

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")

    def with_lambda(self, lam: float) -> "NumericalFlux":
        return replace(self, lam=float(lam))

    def _need_lambda(self) -> float:
        if self.lam is None:
            raise MissingLambda("the Lax-Friedrichs flux needs lam = dt/dx")
        return self.lam

    def __call__(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        f = self.flux.f
        if self.scheme == "lxf":
            lam = self._need_lambda()
            return 0.5 * (f(a) + f(b)) - (b - a) / (2.0 * lam)
        if self.scheme == "eo":
            w = self.flux.minimizer
            if w is not None:
                return f(np.maximum(a, w)) + f(np.minimum(b, w)) - f(w)
            return _eo_by_quadrature(self.flux, a, b)
        return _godunov(self.flux, a, b)

    def partials(self, a, b):
        """Pointwise ``(dF/da, dF/db)``."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        fp = self.flux.f_prime
        if self.scheme == "lxf":
            lam = self._need_lambda()
            return 0.5 * (fp(a) + 1.0 / lam), 0.5 * (fp(b) - 1.0 / lam)
        if self.scheme == "eo":
            return np.maximum(fp(a), 0.0), np.minimum(fp(b), 0.0)
        return _godunov_partials(self.flux, a, b)


def numerical_flux(nf: NumericalFlux, a, b):
    return nf(a, b)


def _eo_by_quadrature(flux: ConvexFlux, a, b):
    def one(x, y):
        # |f'| has a kink where f' changes sign; integrate the two smooth pieces
        lo, hi = min(x, y), max(x, y)
        w = float(_argmin_on(flux, lo, hi))
        total = 0.0
        for p, q in ((lo, w), (w, hi)):
            if q > p:
                total += integrate.quad(lambda s: abs(flux.f_prime(s)), p, q, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
        val = total if y >= x else -total
        return 0.5 * (flux.f(x) + flux.f(y)) - 0.5 * val

    return np.vectorize(one, otypes=[float])(a, b)


def _argmin_on(flux: ConvexFlux, x, y):
    """Minimizer of the convex ``f`` on ``[x, y]``."""
    if flux.minimizer is not None:
        return np.clip(flux.minimizer, x, y)

    def one(lo, hi):
        if flux.f_prime(lo) >= 0:
            return lo
        if flux.f_prime(hi) <= 0:
            return hi
        return optimize.brentq(flux.f_prime, lo, hi, xtol=1e-15)

    return np.vectorize(one, otypes=[float])(x, y)


def _godunov(flux: ConvexFlux, a, b):
    f = flux.f
    out = np.maximum(f(a), f(b))
    rising = a < b
    if np.any(rising):
        lo = np.broadcast_to(a, out.shape)[rising]
        hi = np.broadcast_to(b, out.shape)[rising]
        out = np.array(out, dtype=float)
        out[rising] = f(_argmin_on(flux, lo, hi))
    return out


def _godunov_partials(flux: ConvexFlux, a, b):
    fp = flux.f_prime
    a, b = np.broadcast_arrays(a, b)
    # for a >= b the a-branch is taken iff f(a) >= f(b), i.e. the divided
    # difference is non-negative; at a == b this reduces to upwinding on f'(a)
    a_branch = flux.divided_difference(a, b) >= 0
    da = np.where(a_branch, fp(a), 0.0)
    db = np.where(a_branch, 0.0, fp(b))
    rising = a < b
    if np.any(rising):
        w = _argmin_on(flux, a[rising], b[rising])
        da = np.array(da, dtype=float)
        db = np.array(db, dtype=float)
        da[rising] = np.where(w == a[rising], fp(a[rising]), 0.0)
        db[rising] = np.where((w == b[rising]) & (w != a[rising]), fp(b[rising]), 0.0)
    return da, db


def cfl_timestep(nf: NumericalFlux, grid, u_min: float, u_max: float, cfl_number: float) -> float:
    """``dt = cfl_number * dx / max|f'|`` over the state box."""
    if not 0 < cfl_number <= 1:
        raise ValueError("cfl_number must lie in (0, 1]")
    if u_min > u_max:
        raise ValueError("u_min must not exceed u_max")
    speed = nf.flux.max_speed(u_min, u_max)
    if speed == 0:
        raise NoWaveSpeed("max|f'| vanishes on the state box; cap dt externally")
    return cfl_number * grid.dx / speed


def monotone_cfl_ok(nf: NumericalFlux, lam: float, u_min: float, u_max: float) -> bool:
    """Scheme monotonicity: ``lam * max|f'| <= 1`` (and ``lam <= nf.lam`` for LxF)."""
    ok = lam * nf.flux.max_speed(u_min, u_max) <= 1.0 + 1e-12
    if nf.scheme == "lxf" and nf.lam is not None:
        ok = ok and lam <= nf.lam * (1.0 + 1e-12)
    return bool(ok)


def contractivity_cfl_ok(nf: NumericalFlux, lam: float, u_min: float, u_max: float, samples: int = 201) -> bool:
    """``lam * max|dF/da| <= 1/2`` and ``lam * max|dF/db| <= 1/2`` on the state box."""
    u = np.linspace(u_min, u_max, samples)
    a, b = np.meshgrid(u, u, indexing="ij")
    da, db = nf.partials(a, b)
    return bool(lam * np.max(np.abs(da)) <= 0.5 + 1e-12 and lam * np.max(np.abs(db)) <= 0.5 + 1e-12)


# ---------------------------------------------------------------------------
# linearization  F(u_i,u_{i+1}) - F(v_i,v_{i+1}) = A_i du_i + B_{i+1} du_{i+1}
# ---------------------------------------------------------------------------


def _mean_positive_affine(p0, p1):
    """``int_0^1 max(p0 + s*(p1-p0), 0) ds``."""
    p0, p1 = np.broadcast_arrays(np.asarray(p0, float), np.asarray(p1, float))
    both_pos = (p0 >= 0) & (p1 >= 0)
    both_neg = (p0 <= 0) & (p1 <= 0)
    hi = np.maximum(p0, p1)
    span = np.abs(p1 - p0)
    with np.errstate(divide="ignore", invalid="ignore"):
        cross = hi * hi / (2.0 * np.where(span > 0, span, 1.0))
    return np.where(both_pos, 0.5 * (p0 + p1), np.where(both_neg, 0.0, cross))


def _interface_states(u, v):
    if u.grid != v.grid:
        raise IncompatibleFunctions("linearization needs functions on one grid")
    ue, ve = u.extended(1), v.extended(1)
    return ue[:-1], ve[:-1], ue[1:], ve[1:]


def linearization_coefficients(nf: NumericalFlux, u, v):
    """Path-averaged partial derivatives at every interface.

    Returns arrays ``A`` and ``B`` of length ``n_cells + 1``: at interface ``j``
    (between cells ``j-1`` and ``j``, ghost cells holding far states)
    ``F(u_{j-1}, u_j) - F(v_{j-1}, v_j) = A[j]*(u_{j-1}-v_{j-1}) + B[j]*(u_j-v_j)``.
    In the cell-indexed notation ``A[j] = A_{j-1}`` and ``B[j] = B_j``.
    """
    ua, va, ub, vb = _interface_states(u, v)
    flux = nf.flux
    fp = flux.f_prime
    if nf.scheme == "lxf":
        lam = nf._need_lambda()
        A = 0.5 * (flux.divided_difference(ua, va) + 1.0 / lam)
        B = 0.5 * (flux.divided_difference(ub, vb) - 1.0 / lam)
        return A, B
    if nf.scheme == "eo":
        if flux.quadratic is not None:
            A = _mean_positive_affine(fp(va), fp(ua))
            B = -_mean_positive_affine(-fp(vb), -fp(ub))
            return A, B
        if flux.minimizer is not None:
            w = flux.minimizer
            plus = ConvexFlux("plus", lambda x: flux.f(np.maximum(x, w)), lambda x: np.maximum(fp(x), 0.0))
            minus = ConvexFlux("minus", lambda x: flux.f(np.minimum(x, w)), lambda x: np.minimum(fp(x), 0.0))
            return plus.divided_difference(ua, va), minus.divided_difference(ub, vb)
        # f' is monotone, so one minimizer over the whole state range splits
        # f into its increasing and decreasing parts for every path at once
        states = np.concatenate([ua, va, ub, vb])
        w = float(_argmin_on(flux, float(states.min()), float(states.max())))
        plus = ConvexFlux("plus", lambda x: flux.f(np.maximum(x, w)), lambda x: np.maximum(fp(x), 0.0))
        minus = ConvexFlux("minus", lambda x: flux.f(np.minimum(x, w)), lambda x: np.minimum(fp(x), 0.0))
        return plus.divided_difference(ua, va), minus.divided_difference(ub, vb)
    return _godunov_linearization(flux, ua, va, ub, vb)


def _godunov_linearization(flux, ua, va, ub, vb):
    fp = flux.f_prime
    if flux.quadratic is not None:
        c2, c1, _ = flux.quadratic
        # switching function g(s) = divided difference along the path, affine in s
        g0 = c2 * (va + vb) + c1
        g1 = c2 * (ua + ub) + c1
        dg = g1 - g0
        with np.errstate(divide="ignore", invalid="ignore"):
            root = np.where(dg != 0, -g0 / np.where(dg != 0, dg, 1.0), 0.0)
        root = np.clip(root, 0.0, 1.0)
        # S = {s in [0,1] : g(s) >= 0} = [lo, hi]
        lo = np.where(dg > 0, root, 0.0)
        hi = np.where(dg < 0, root, 1.0)
        const = dg == 0
        lo = np.where(const, np.where(g0 >= 0, 0.0, 1.0), lo)
        hi = np.where(const, np.where(g0 >= 0, 1.0, 1.0), hi)
        length = np.maximum(hi - lo, 0.0)
        mid = 0.5 * (lo + hi)
        A = length * fp(va + mid * (ua - va))
        # complement of [lo, hi] inside [0, 1]: [0, lo) and (hi, 1]
        B = lo * fp(vb + 0.5 * lo * (ub - vb)) + (1.0 - hi) * fp(vb + 0.5 * (1.0 + hi) * (ub - vb))
        return A, B
    A = np.empty(ua.shape)
    B = np.empty(ua.shape)
    for j in range(ua.size):
        A[j], B[j] = _godunov_path_average(flux, ua[j], va[j], ub[j], vb[j])
    return A, B


def _godunov_path_average(flux, ua, va, ub, vb, probes: int = 33):
    fp = flux.f_prime

    def a_of(s):
        return va + s * (ua - va)

    def b_of(s):
        return vb + s * (ub - vb)

    def g(s):
        return float(flux.divided_difference(a_of(s), b_of(s)))

    s = np.linspace(0.0, 1.0, probes)
    gs = np.array([g(x) for x in s])
    cuts = [0.0]
    for k in range(probes - 1):
        if (gs[k] >= 0) != (gs[k + 1] >= 0):
            cuts.append(optimize.brentq(g, s[k], s[k + 1], xtol=1e-15))
    cuts.append(1.0)
    A = B = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi <= lo:
            continue
        in_a = g(0.5 * (lo + hi)) >= 0
        path = a_of if in_a else b_of
        nodes = lo + (hi - lo) * _GAUSS_NODES
        val = (hi - lo) * float(_GAUSS_WEIGHTS @ fp(path(nodes)))
        if in_a:
            A += val
        else:
            B += val
    return A, B


@dataclass(frozen=True)
class ConditionReport:
    ok: bool
    index: int | None = None
    failed: str | None = None
    margin: float = 0.0

    def __bool__(self):
        return self.ok


def check_contractivity_conditions(A, B, lam: float, tol: float = 1e-12) -> ConditionReport:
    """Check ``0 <= A_i <= A_{i-1}``, ``0 >= B_{i-1} >= B_i`` and
    ``lam*(A_{i-1} - B_i) <= 1`` on interface-indexed coefficients."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape:
        raise ValueError("A and B must be aligned")
    checks = []
    checks.append(("A >= 0", -A))
    checks.append(("A non-increasing", np.concatenate([[-np.inf], np.diff(A)])))
    checks.append(("B <= 0", B))
    checks.append(("B non-increasing", np.concatenate([[-np.inf], np.diff(B)])))
    checks.append(("lam*(A - B) <= 1", lam * (A - B) - 1.0))
    first = None
    for name, excess in checks:
        bad = np.flatnonzero(excess > tol)
        if bad.size and (first is None or bad[0] < first[1]):
            first = (name, int(bad[0]), float(excess[bad[0]]))
    if first is None:
        return ConditionReport(True)
    return ConditionReport(False, first[1], first[0], first[2])
