import importlib

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ramanoam import _backend, _pykernels, bloch
from ramanoam.bloch import DensityMatrix, LambdaSystem

try:
    from ramanoam import _ckernels
except ImportError:  # pragma: no cover - only without a compiler
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")


def test_backend_selected_at_import():
    assert _backend.BACKEND in ("cython", "python")
    expected = "cython" if _ckernels is not None else "python"
    assert _backend.BACKEND == expected


def test_fallback_used_when_extension_missing(monkeypatch):
    import sys

    import ramanoam
    monkeypatch.setitem(sys.modules, "ramanoam._ckernels", None)
    monkeypatch.delattr(ramanoam, "_ckernels", raising=False)
    mod = importlib.reload(_backend)
    try:
        assert mod.BACKEND == "python"
        assert mod.kernels is _pykernels
    finally:
        monkeypatch.undo()
        importlib.reload(_backend)


@needs_ext
@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=9, max_size=9),
       st.lists(st.floats(-1, 1), min_size=9, max_size=9))
def test_rhs_backends_agree(p, x):
    params = [1.0, 0.5, 0.5, abs(p[0]), abs(p[1]), p[2] / 10, p[3] / 10, 3 * p[4], 3 * p[5]]
    a = np.array(_ckernels.rhs(params, x))
    b = np.array(_pykernels.rhs(params, x))
    assert np.abs(a - b).max() <= 1e-15 * max(1.0, np.abs(b).max())


@needs_ext
def test_integration_backends_agree():
    s = LambdaSystem(gamma_p=0.05, omega_c=0.1, omega_s=0.02, delta_c=0.3, delta_s=0.25)
    rho0 = DensityMatrix.pure("c")
    rc = bloch.integrate_to_steady_state(s, rho0, backend=_ckernels)
    rp = bloch.integrate_to_steady_state(s, rho0, backend=_pykernels)
    # Same step sequence; complex rounding differs, so the runs stop at
    # slightly different times within the 1e-10 residual criterion.
    assert rc.n_steps == rp.n_steps
    assert rc.rho.max_abs_diff(rp.rho) < 1e-9
    assert rc.rho.max_abs_diff(bloch.full_steady_state(s)) < 1e-8


def test_python_backend_reaches_full_solution():
    s = LambdaSystem(gamma_p=0.3, omega_c=0.5, omega_s=0.05, delta_c=-0.4, delta_s=0.2)
    res = bloch.integrate_to_steady_state(s, DensityMatrix.pure("a"), backend=_pykernels)
    assert res.rho.max_abs_diff(bloch.full_steady_state(s)) < 1e-8
