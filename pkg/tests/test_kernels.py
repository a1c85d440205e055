"""Edge-flux kernels: frozen values, scheme properties, backend parity."""

import hashlib
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fluxjump import _kernels_fallback as fb
from fluxjump import kernels
from fluxjump.catalog import template_from_spec
from fluxjump.scenario_io import load_scenario, solution_text
from fluxjump.solver import run

# burgers edge flux f(u) = 0.5 u^2
_B = dict(alpha=0.5, beta=0.0, gamma=0.0)


def _scalar(func, a, b, alpha, beta, gamma):
    out = func(
        np.array([a]),
        np.array([b]),
        np.array([alpha]),
        np.array([beta]),
        np.array([gamma]),
    )
    return float(out[0])


def test_frozen_godunov_values():
    assert _scalar(kernels.godunov_sweep, 1.0, -1.0, **_B) == 0.5  # standing shock
    assert _scalar(kernels.godunov_sweep, -1.0, 1.0, **_B) == 0.0  # transonic fan
    assert _scalar(kernels.godunov_sweep, 0.4, 0.4, **_B) == 0.5 * 0.4 * 0.4


def test_frozen_eo_values():
    assert _scalar(kernels.eo_sweep, 1.0, -1.0, **_B) == 1.0
    assert _scalar(kernels.eo_sweep, -1.0, 1.0, **_B) == 0.0


@given(
    st.floats(-3, 3),
    st.floats(-2, 2),
    st.floats(-2, 2),
    st.floats(-2, 2),
)
def test_consistency_at_equal_states(u, al, be, ga):
    # F(u, u) reproduces the pointwise flux bit for bit
    fa = (al * u) * u + be * u + ga
    assert _scalar(kernels.godunov_sweep, u, u, al, be, ga) == fa
    assert _scalar(kernels.eo_sweep, u, u, al, be, ga) == fa


@pytest.mark.parametrize("sweep", [kernels.godunov_sweep, kernels.eo_sweep])
@settings(max_examples=200)
@given(
    al=st.floats(-2, 2),
    be=st.floats(-2, 2),
    ga=st.floats(-2, 2),
    u1=st.floats(-3, 3),
    u2=st.floats(-3, 3),
    v=st.floats(-3, 3),
)
def test_numerical_flux_is_monotone(sweep, al, be, ga, u1, u2, v):
    lo, hi = min(u1, u2), max(u1, u2)
    # nondecreasing in the left state
    assert _scalar(sweep, lo, v, al, be, ga) <= _scalar(sweep, hi, v, al, be, ga) + 1e-12
    # nonincreasing in the right state
    assert _scalar(sweep, v, hi, al, be, ga) <= _scalar(sweep, v, lo, al, be, ga) + 1e-12


def test_eo_godunov_e_scheme_ordering():
    rng = np.random.default_rng(9)
    n = 2000
    a = rng.uniform(-1.5, 1.5, n)
    b = rng.uniform(-1.5, 1.5, n)
    al = np.full(n, 0.5)
    ze = np.zeros(n)
    g = kernels.godunov_sweep(a, b, al, ze, ze)
    e = kernels.eo_sweep(a, b, al, ze, ze)
    rare = a <= b
    assert np.all(e[rare] <= g[rare] + 1e-14)
    assert np.all(e[~rare] >= g[~rare] - 1e-14)


def test_backends_agree_bitwise():
    rng = np.random.default_rng(7)
    n = 4096
    a = rng.uniform(-2, 2, n)
    b = rng.uniform(-2, 2, n)
    al = rng.uniform(-1, 1, n)
    al[::7] = 0.0  # exercise the linear branch of the EO variation
    be = rng.uniform(-1, 1, n)
    ga = rng.uniform(-1, 1, n)
    if kernels.BACKEND != "compiled":
        pytest.skip("compiled backend not built")
    for name in ("quad_godunov_sweep", "quad_eo_sweep"):
        out_c = np.empty(n)
        out_p = np.empty(n)
        getattr(kernels._core, name)(a, b, al, be, ga, out_c)
        getattr(fb, name)(a, b, al, be, ga, out_p)
        np.testing.assert_array_equal(out_c, out_p)


def test_pure_python_env_forces_fallback_and_matches(scenario_dir, tmp_path):
    path = scenario_dir / "burgers_periodic.cfg"
    code = (
        "import hashlib\n"
        "from fluxjump import kernels\n"
        "from fluxjump.scenario_io import load_scenario, solution_text\n"
        "from fluxjump.solver import run\n"
        f"sol = run(load_scenario({str(path)!r}))\n"
        "print(kernels.BACKEND)\n"
        "print(hashlib.sha256(solution_text(sol).encode()).hexdigest())\n"
    )
    env = dict(os.environ, FLUXJUMP_PURE_PYTHON="1")
    res = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, env=env
    )
    assert res.returncode == 0, res.stderr
    backend, digest = res.stdout.split()
    assert backend == "python"
    sol = run(load_scenario(path))
    assert digest == hashlib.sha256(solution_text(sol).encode()).hexdigest()


def test_poly_path_matches_quad_path():
    rng = np.random.default_rng(3)
    n = 512
    a = rng.uniform(-1, 1, n)
    b = rng.uniform(-1, 1, n)
    w = rng.uniform(0.2, 2.0, n)
    t = template_from_spec("burgers")
    for quad_fn, poly_fn in (
        (kernels.godunov_sweep, kernels.poly_godunov_sweep),
        (kernels.eo_sweep, kernels.poly_eo_sweep),
    ):
        ref = quad_fn(a, b, 0.5 * w, np.zeros(n), np.zeros(n))
        got = poly_fn(a, b, w, t)
        np.testing.assert_allclose(got, ref, rtol=0.0, atol=1e-13)


def test_poly_godunov_matches_dense_extrema():
    t = template_from_spec("poly:0,1,0,-1")  # g = u - u^3
    rng = np.random.default_rng(11)
    one = np.array([1.0])
    for _ in range(50):
        a, b = rng.uniform(-1.2, 1.2, 2)
        got = float(kernels.poly_godunov_sweep(np.array([a]), np.array([b]), one, t)[0])
        grid = np.linspace(min(a, b), max(a, b), 20001)
        ref = float(np.min(t.g(grid))) if a <= b else float(np.max(t.g(grid)))
        assert abs(got - ref) <= 1e-6
