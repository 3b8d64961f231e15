import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shocklab import kernels
from shocklab.kernels import fallback

needs_compiled = pytest.mark.skipif(kernels.compiled is None, reason="compiled extension not built")


def test_eno_coefficients_k2():
    np.testing.assert_allclose(kernels.eno_coefficients(2), [[1.5, -0.5], [0.5, 0.5], [-0.5, 1.5]])
    c3 = kernels.eno_coefficients(3)
    # each row reproduces constants
    np.testing.assert_allclose(c3.sum(axis=1), 1.0)
    with pytest.raises(ValueError):
        c3[0, 0] = 1.0


def test_backend_reported():
    assert kernels.BACKEND in ("compiled", "python")
    assert set(kernels.SCHEME_CODES) == {"lxf", "eo", "godunov"}


@pytest.mark.parametrize("value", ["1", "true", "yes"])
def test_env_var_forces_fallback(value):
    env = dict(os.environ, SHOCKLAB_PURE_PYTHON=value)
    out = subprocess.run(
        [sys.executable, "-c", "from shocklab import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


arrays = st.lists(st.floats(-3, 3), min_size=3, max_size=40).map(np.array)


@needs_compiled
@given(arrays, st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 2), st.floats(0.05, 0.3))
def test_monotone_step_parity(u, fl, fr, code, lam):
    a = fallback.monotone_step(u, fl, fr, lam, code, 0.3)
    b = np.asarray(kernels.compiled.monotone_step(u, fl, fr, lam, code, 0.3))
    np.testing.assert_array_equal(a, b)


@needs_compiled
@given(arrays, arrays, st.integers(0, 2))
def test_flux_parity(a, b, code):
    n = min(a.size, b.size)
    x = fallback.burgers_flux(a[:n], b[:n], code, 0.25)
    y = np.asarray(kernels.compiled.burgers_flux(a[:n], b[:n], code, 0.25))
    np.testing.assert_array_equal(x, y)


@needs_compiled
@given(arrays, st.floats(-3, 3), st.floats(-3, 3), st.sampled_from([1, 2, 3]))
def test_eno_parity(u, fl, fr, order):
    coef = kernels.eno_coefficients(order)
    a1, b1 = fallback.eno_interfaces(u, order, fl, fr, coef)
    a2, b2 = kernels.compiled.eno_interfaces(u, order, fl, fr, coef)
    np.testing.assert_array_equal(a1, np.asarray(a2))
    np.testing.assert_array_equal(b1, np.asarray(b2))
    r1 = fallback.eno_rhs(u, order, fl, fr, coef, 0.1)
    r2 = np.asarray(kernels.compiled.eno_rhs(u, order, fl, fr, coef, 0.1))
    np.testing.assert_allclose(r1, r2, rtol=0, atol=1e-12)


@needs_compiled
def test_compiled_accepts_read_only_input():
    u = np.linspace(2, 0, 50)
    u.setflags(write=False)
    np.testing.assert_array_equal(
        np.asarray(kernels.compiled.monotone_step(u, 2.0, 0.0, 0.1, 2, 1.0)),
        fallback.monotone_step(u, 2.0, 0.0, 0.1, 2, 1.0),
    )


def test_fallback_end_to_end_matches():
    code = (
        "from shocklab.study import RunConfig, apply_preset, errors_for;"
        "print(repr(errors_for(apply_preset(RunConfig(order=3), 'tables'), 128)))"
    )
    runs = {}
    for flag in ("0", "1"):
        env = dict(os.environ, SHOCKLAB_PURE_PYTHON=flag)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        runs[flag] = eval(out.stdout)
    np.testing.assert_allclose(runs["0"], runs["1"], rtol=1e-12)
