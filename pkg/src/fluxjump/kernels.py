"""Backend dispatch for the edge-flux sweeps.

The compiled extension is used when available; setting FLUXJUMP_PURE_PYTHON=1
forces the numpy fallback. Both produce bit-identical results, which the test
suite checks, so solver output never depends on the backend.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_fallback as _fb

if os.environ.get("FLUXJUMP_PURE_PYTHON"):
    _core = None
else:
    try:
        from . import _kernels_core as _core
    except ImportError:
        _core = None

BACKEND = "compiled" if _core is not None else "python"


def _ravel(x):
    return np.ascontiguousarray(x, dtype=float).ravel()


def godunov_sweep(a, b, alpha, beta, gamma):
    """Godunov flux for quadratic edge fluxes; arrays share one shape."""
    a = np.asarray(a, dtype=float)
    out = np.empty(a.shape)
    impl = _core.quad_godunov_sweep if _core is not None else _fb.quad_godunov_sweep
    impl(_ravel(a), _ravel(b), _ravel(alpha), _ravel(beta), _ravel(gamma), out.ravel())
    return out


def eo_sweep(a, b, alpha, beta, gamma):
    """Engquist-Osher flux for quadratic edge fluxes."""
    a = np.asarray(a, dtype=float)
    out = np.empty(a.shape)
    impl = _core.quad_eo_sweep if _core is not None else _fb.quad_eo_sweep
    impl(_ravel(a), _ravel(b), _ravel(alpha), _ravel(beta), _ravel(gamma), out.ravel())
    return out


def poly_godunov_sweep(a, b, w, template):
    """Godunov flux for a general polynomial template (numpy path only)."""
    a = np.asarray(a, dtype=float)
    out = np.empty(a.shape)
    _fb.poly_godunov_sweep(a, np.asarray(b, float), np.asarray(w, float), template, out)
    return out


def poly_eo_sweep(a, b, w, template):
    """Engquist-Osher flux for a general polynomial template."""
    a = np.asarray(a, dtype=float)
    out = np.empty(a.shape)
    _fb.poly_eo_sweep(a, np.asarray(b, float), np.asarray(w, float), template, out)
    return out
