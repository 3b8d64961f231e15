"""Pure numpy implementations of the Burgers hot loops.

Every function here has a twin with the same signature in ``_compiled``.
Scheme codes: 0 Lax-Friedrichs, 1 Engquist-Osher, 2 Godunov.
"""

import numpy as np


def burgers_flux(a, b, scheme, lam_lxf):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if scheme == 0:
        return 0.25 * (a * a + b * b) - (b - a) / (2.0 * lam_lxf)
    if scheme == 1:
        ap = np.maximum(a, 0.0)
        bm = np.minimum(b, 0.0)
        return 0.5 * (ap * ap + bm * bm)
    fa = 0.5 * a * a
    fb = 0.5 * b * b
    rising_min = np.where((a < 0.0) & (b > 0.0), 0.0, np.minimum(fa, fb))
    return np.where(a >= b, np.maximum(fa, fb), rising_min)


def monotone_step(u, far_left, far_right, lam, scheme, lam_lxf):
    """One conservative step of the 3-point scheme; returns a new array."""
    u = np.asarray(u, dtype=np.float64)
    ue = np.empty(u.size + 2)
    ue[0] = far_left
    ue[1:-1] = u
    ue[-1] = far_right
    F = burgers_flux(ue[:-1], ue[1:], scheme, lam_lxf)
    return u - lam * (F[1:] - F[:-1])


def monotone_steps(u, far_left, far_right, lam, scheme, lam_lxf, n_steps):
    """``n_steps`` repeated calls of :func:`monotone_step`."""
    u = np.array(u, dtype=np.float64)
    for _ in range(n_steps):
        u = monotone_step(u, far_left, far_right, lam, scheme, lam_lxf)
    return u


def eno_interfaces(u, order, far_left, far_right, coef):
    """ENO point values ``(u_minus, u_plus)`` at the ``n + 1`` interfaces.

    ``coef[r + 1, j]`` weights cell ``i - r + j`` for the value at ``x_{i+1/2}``.
    """
    u = np.asarray(u, dtype=np.float64)
    n = u.size
    k = order
    g = k
    ue = np.concatenate([np.full(g, float(far_left)), u, np.full(g, float(far_right))])
    diffs = [ue]
    for _ in range(1, k):
        diffs.append(np.diff(diffs[-1]))
    cells = np.arange(g - 1, g + n + 1)
    left = cells.copy()
    for m in range(1, k):
        a = np.abs(diffs[m][left - 1])
        b = np.abs(diffs[m][left])
        left = left - (a <= b)
    r = cells - left
    vr = np.zeros(cells.size)
    vl = np.zeros(cells.size)
    for j in range(k):
        vr += coef[r + 1, j] * ue[left + j]
        vl += coef[r, j] * ue[left + j]
    return vr[:-1].copy(), vl[1:].copy()


def eno_rhs(u, order, far_left, far_right, coef, dx):
    """``L(u) = -(F_{i+1/2} - F_{i-1/2}) / dx`` with the Godunov flux on ENO values."""
    um, up = eno_interfaces(u, order, far_left, far_right, coef)
    F = burgers_flux(um, up, 2, 1.0)
    return -(F[1:] - F[:-1]) / dx
