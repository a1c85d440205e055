"""Flux templates, coefficient profiles, and one-sided section fluxes."""

import math

import numpy as np
import pytest

from fluxjump.catalog import (
    Affine,
    Constant,
    Quadratic,
    SectionFlux,
    Tabulated,
    coefficient_from_spec,
    fmt,
    template_from_spec,
)
from fluxjump.exceptions import CouplingError


def test_builtin_template_coefficients():
    assert template_from_spec("burgers").coeffs == (0.0, 0.0, 0.5)
    assert template_from_spec("lwr").coeffs == (0.0, 1.0, -1.0)
    assert template_from_spec("linear").coeffs == (0.0, 1.0)


def test_template_values():
    burgers = template_from_spec("burgers")
    lwr = template_from_spec("lwr")
    assert burgers.g(0.8) == pytest.approx(0.32, abs=1e-15)
    assert burgers.dg(0.8) == pytest.approx(0.8, abs=1e-15)
    assert lwr.g(0.25) == pytest.approx(0.1875, abs=1e-15)
    assert lwr.dg(0.25) == pytest.approx(0.5, abs=1e-15)


def test_critical_points():
    assert template_from_spec("burgers").crit == (0.0,)
    assert template_from_spec("lwr").crit == (0.5,)
    assert template_from_spec("linear").crit == ()


def test_quad_layout():
    # quad is (alpha, beta, gamma) with g = alpha u^2 + beta u + gamma
    assert template_from_spec("burgers").quad == (0.5, 0.0, 0.0)
    assert template_from_spec("linear").quad == (0.0, 1.0, 0.0)
    assert template_from_spec("poly:0,0,0,1").quad is None


def test_poly_template_spec_roundtrip():
    t = template_from_spec("poly:0,0.25,0,-1")
    assert t.coeffs == (0.0, 0.25, 0.0, -1.0)
    assert template_from_spec(t.spec()).coeffs == t.coeffs
    assert template_from_spec("burgers").spec() == "burgers"


@pytest.mark.parametrize("bad", ["poly:", "poly:1", "cubic", "poly:a,b"])
def test_bad_template_specs(bad):
    with pytest.raises(ValueError):
        template_from_spec(bad)


def test_interval_extrema():
    burgers = template_from_spec("burgers")
    lwr = template_from_spec("lwr")
    assert burgers.minmax_g(-1.0, 1.0) == (0.0, 0.5)
    assert lwr.minmax_g(0.0, 1.0) == (0.0, 0.25)
    assert burgers.max_abs_dg(-1.0, 1.0) == 1.0
    assert lwr.max_abs_dg(0.0, 1.0) == 1.0
    assert burgers.lip_dg(-1.0, 1.0) == 1.0
    assert lwr.lip_dg(0.0, 1.0) == 2.0


def test_cubic_extrema_use_critical_points():
    t = template_from_spec("poly:0,1,0,-1")  # g = u - u^3
    lo, hi = t.minmax_g(-1.0, 1.0)
    v = 2.0 / (3.0 * math.sqrt(3.0))
    assert lo == pytest.approx(-v, abs=1e-12)
    assert hi == pytest.approx(v, abs=1e-12)


def test_fmt_roundtrip():
    for x in (math.pi, 1.0 / 3.0, 0.1, -0.0, 2.0**-1074, 1e300):
        assert float(fmt(x)) == x


def test_constant_coefficient():
    c = Constant(2.5)
    assert c.w(0.3) == 2.5
    assert c.dw(0.3) == 0.0
    np.testing.assert_array_equal(c.w(np.array([0.0, 1.0])), [2.5, 2.5])
    assert c.bounds(-1.0, 1.0) == (2.5, 2.5)
    assert c.tv(-1.0, 1.0) == 0.0


def test_affine_coefficient():
    a = Affine(2.0, 0.5)
    assert a.w(1.0) == 2.5
    assert a.dw(123.0) == 0.5
    assert a.bounds(0.0, 2.0) == (2.0, 3.0)
    assert a.tv(0.0, 2.0) == 1.0


def test_quadratic_coefficient_vertex():
    q = Quadratic(0.0, 0.0, 1.0)  # w = x^2
    assert q.bounds(-1.0, 1.0) == (0.0, 1.0)
    assert q.tv(-1.0, 1.0) == 2.0
    assert q.dw(0.25) == 0.5


def test_tabulated_coefficient():
    t = Tabulated((0.0, 1.0, 2.0), (1.0, 3.0, 0.0))
    assert t.w(0.5) == 2.0
    assert t.dw(0.5) == 2.0
    assert t.dw(1.5) == -3.0
    assert t.dw(5.0) == 0.0  # flat continuation outside the table
    assert t.bounds(0.5, 2.0) == (0.0, 3.0)
    assert t.tv(0.5, 2.0) == 4.0


def test_tabulated_rejects_bad_nodes():
    with pytest.raises(ValueError):
        Tabulated((0.0, 0.0, 1.0), (1.0, 2.0, 3.0))
    with pytest.raises(ValueError):
        Tabulated((0.0, 1.0), (1.0,))


def test_coefficient_spec_roundtrip():
    for spec in (
        "constant:1",
        "affine:2,0.5",
        "quadratic:1,-0.25,0.125",
        "tabulated:0,1;0.5,2;1,1.5",
    ):
        c = coefficient_from_spec(spec)
        assert coefficient_from_spec(c.spec()) == c


def test_coefficient_equality_is_by_content():
    assert coefficient_from_spec("constant:1") == Constant(1.0)
    assert hash(coefficient_from_spec("constant:1")) == hash(Constant(1.0))
    assert Constant(1.0) != Affine(1.0, 0.0)


@pytest.mark.parametrize("bad", ["constant:x", "affine:1", "nope:1", "tabulated:0;1"])
def test_bad_coefficient_specs(bad):
    with pytest.raises(ValueError):
        coefficient_from_spec(bad)


def test_section_flux_values():
    f = SectionFlux(2.0, template_from_spec("lwr"))
    assert f(0.25) == pytest.approx(0.375, abs=1e-15)
    assert f.deriv(0.25) == pytest.approx(1.0, abs=1e-15)
    assert f.minmax(0.0, 1.0) == (0.0, 0.5)


def test_section_flux_negative_scale_flips_minmax():
    f = SectionFlux(-1.0, template_from_spec("lwr"))
    assert f.minmax(0.0, 1.0) == (-0.25, 0.0)
    assert f.interior_argmax(0.0, 1.0) is None


def test_interior_argmax():
    f = SectionFlux(1.0, template_from_spec("lwr"))
    assert f.interior_argmax(0.0, 1.0) == 0.5
    assert f.interior_argmax(0.0, 0.4) is None  # extremum not inside
    g = SectionFlux(1.0, template_from_spec("burgers"))
    assert g.interior_argmax(-1.0, 1.0) is None  # interior point is a minimum


def test_solve_on_branch():
    f = SectionFlux(1.0, template_from_spec("lwr"))
    root = f.solve_on_branch(0.16, 0.0, 0.5)
    assert abs(root - 0.2) <= 1e-12
    # flux at the endpoint matches the target exactly: endpoint is returned as is
    assert f.solve_on_branch(0.25, 0.0, 0.5) == 0.5
    with pytest.raises(CouplingError):
        f.solve_on_branch(0.4, 0.0, 0.5)  # above the maximum, no root
