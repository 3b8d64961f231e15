"""Hot loops for the Burgers flux, compiled when available.

The compiled extension is used when it imports; set ``SHOCKLAB_PURE_PYTHON=1``
to force the numpy fallback.  ``BACKEND`` names the active implementation.
"""

import os
from functools import lru_cache

import numpy as np

from . import _fallback as fallback

compiled = None
if os.environ.get("SHOCKLAB_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _compiled as compiled
    except ImportError:  # extension not built
        compiled = None

_impl = compiled if compiled is not None else fallback
BACKEND = "compiled" if compiled is not None else "python"

SCHEME_CODES = {"lxf": 0, "eo": 1, "godunov": 2}

burgers_flux = _impl.burgers_flux
monotone_step = _impl.monotone_step
monotone_steps = _impl.monotone_steps
eno_interfaces = _impl.eno_interfaces
eno_rhs = _impl.eno_rhs


@lru_cache(maxsize=None)
def eno_coefficients(k: int) -> np.ndarray:
    """Weights ``c[r + 1, j]`` of the degree ``k - 1`` point value at ``x_{i+1/2}``
    from the averages on cells ``i - r .. i - r + k - 1``, for ``r = -1 .. k - 1``."""
    c = np.zeros((k + 1, k))
    for r in range(-1, k):
        for j in range(k):
            s = 0.0
            for m in range(j + 1, k + 1):
                num = 0.0
                for l in range(k + 1):
                    if l == m:
                        continue
                    p = 1.0
                    for q in range(k + 1):
                        if q != m and q != l:
                            p *= r - q + 1
                    num += p
                den = 1.0
                for l in range(k + 1):
                    if l != m:
                        den *= m - l
                s += num / den
            c[r + 1, j] = s
    c.setflags(write=False)
    return c


__all__ = [
    "BACKEND",
    "SCHEME_CODES",
    "burgers_flux",
    "monotone_step",
    "monotone_steps",
    "eno_interfaces",
    "eno_rhs",
    "eno_coefficients",
    "fallback",
    "compiled",
]
