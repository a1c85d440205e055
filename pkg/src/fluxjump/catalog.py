"""Flux templates and coefficient profiles.

The flux is separable, F(x, u) = w(x) * g(u): g is a polynomial template from a
small catalog (burgers, lwr, linear, custom polynomial) and w is a per-region
coefficient profile (constant, affine, quadratic, tabulated piecewise linear).
Extrema of polynomials are computed from critical points, so interval min/max,
total variation and Godunov-type fluxes are exact for the whole catalog.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import polynomial as P

_FMT = "%.17g"


def fmt(x: float) -> str:
    """Render a float with 17 significant digits (bit-exact round trip)."""
    return _FMT % float(x)


def _real_roots(coeffs: tuple[float, ...]) -> tuple[float, ...]:
    # ascending coefficients; returns sorted real roots
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    if c.size <= 1:
        return ()
    roots = P.polyroots(c)
    out = sorted(float(r.real) for r in roots if abs(r.imag) <= 1e-12)
    return tuple(out)


@dataclass(frozen=True)
class TemplateFlux:
    """Polynomial template g(u) with ascending coefficients."""

    name: str
    coeffs: tuple[float, ...]

    def g(self, u):
        return P.polyval(u, np.asarray(self.coeffs, dtype=float))

    def dg(self, u):
        return P.polyval(u, P.polyder(np.asarray(self.coeffs, dtype=float)))

    @cached_property
    def dcoeffs(self) -> tuple[float, ...]:
        return tuple(float(c) for c in P.polyder(np.asarray(self.coeffs, dtype=float)))

    @cached_property
    def crit(self) -> tuple[float, ...]:
        """Real critical points of g (roots of g')."""
        return _real_roots(self.dcoeffs)

    @cached_property
    def quad(self) -> tuple[float, float, float] | None:
        """(alpha, beta, gamma) with g = alpha u^2 + beta u + gamma, if degree <= 2."""
        if len(self.coeffs) > 3:
            return None
        c = list(self.coeffs) + [0.0, 0.0, 0.0]
        return (c[2], c[1], c[0])

    def _candidates(self, lo: float, hi: float) -> list[float]:
        pts = [lo, hi]
        pts.extend(c for c in self.crit if lo < c < hi)
        return pts

    def minmax_g(self, lo: float, hi: float) -> tuple[float, float]:
        vals = [float(self.g(p)) for p in self._candidates(lo, hi)]
        return min(vals), max(vals)

    def max_abs_g(self, lo: float, hi: float) -> float:
        gmin, gmax = self.minmax_g(lo, hi)
        return max(abs(gmin), abs(gmax))

    def max_abs_dg(self, lo: float, hi: float) -> float:
        pts = [lo, hi] + [c for c in _real_roots(tuple(P.polyder(self.dcoeffs))) if lo < c < hi]
        return max(abs(float(self.dg(p))) for p in pts)

    def lip_dg(self, lo: float, hi: float) -> float:
        """Lipschitz constant of g' on [lo, hi] (a modulus bound for g')."""
        d2 = tuple(float(c) for c in P.polyder(self.dcoeffs))
        t = TemplateFlux("d2", (0.0,) if not d2 else d2)
        pts = [lo, hi] + [c for c in t.crit if lo < c < hi]
        return max(abs(float(t.g(p))) for p in pts)

    def spec(self) -> str:
        if self.name in ("burgers", "lwr", "linear"):
            return self.name
        return "poly:" + ",".join(fmt(c) for c in self.coeffs)


_TEMPLATES = {
    "burgers": (0.0, 0.0, 0.5),
    "lwr": (0.0, 1.0, -1.0),
    "linear": (0.0, 1.0),
}


def template_from_spec(s: str) -> TemplateFlux:
    s = s.strip()
    if s in _TEMPLATES:
        return TemplateFlux(s, _TEMPLATES[s])
    if s.startswith("poly:"):
        try:
            coeffs = tuple(float(t) for t in s[5:].split(","))
        except ValueError:
            raise ValueError(f"bad polynomial template {s!r}") from None
        if not coeffs or len(coeffs) < 2:
            raise ValueError("polynomial template needs at least two coefficients")
        return TemplateFlux("poly", coeffs)
    raise ValueError(f"unknown flux template {s!r}")


class Coefficient:
    """Coefficient profile w on a region; subclasses define the shape."""

    def w(self, x):
        raise NotImplementedError

    def dw(self, x):
        raise NotImplementedError

    def bounds(self, xl: float, xr: float) -> tuple[float, float]:
        """(min, max) of w over the closed interval."""
        raise NotImplementedError

    def tv(self, xl: float, xr: float) -> float:
        """Total variation of w over the interval."""
        raise NotImplementedError

    def spec(self) -> str:
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self.spec() == other.spec()

    def __hash__(self):
        return hash(self.spec())

    def __repr__(self):
        return f"{type(self).__name__}({self.spec()!r})"


class Constant(Coefficient):
    def __init__(self, c: float):
        self.c = float(c)

    def w(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.c) if np.ndim(x) else self.c

    def dw(self, x):
        return np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0

    def bounds(self, xl, xr):
        return (self.c, self.c)

    def tv(self, xl, xr):
        return 0.0

    def spec(self):
        return f"constant:{fmt(self.c)}"


class Affine(Coefficient):
    def __init__(self, a: float, b: float):
        self.a, self.b = float(a), float(b)

    def w(self, x):
        return self.a + self.b * np.asarray(x, dtype=float) if np.ndim(x) else self.a + self.b * x

    def dw(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.b) if np.ndim(x) else self.b

    def bounds(self, xl, xr):
        v = (self.a + self.b * xl, self.a + self.b * xr)
        return (min(v), max(v))

    def tv(self, xl, xr):
        return abs(self.b) * (xr - xl)

    def spec(self):
        return f"affine:{fmt(self.a)},{fmt(self.b)}"


class Quadratic(Coefficient):
    def __init__(self, a: float, b: float, c: float):
        self.a, self.b, self.c = float(a), float(b), float(c)

    def w(self, x):
        x = np.asarray(x, dtype=float) if np.ndim(x) else x
        return (self.c * x) * x + self.b * x + self.a

    def dw(self, x):
        x = np.asarray(x, dtype=float) if np.ndim(x) else x
        return 2.0 * self.c * x + self.b

    def _vertex(self):
        return -self.b / (2.0 * self.c) if self.c != 0.0 else None

    def bounds(self, xl, xr):
        vals = [self.w(xl), self.w(xr)]
        v = self._vertex()
        if v is not None and xl < v < xr:
            vals.append(self.w(v))
        return (min(vals), max(vals))

    def tv(self, xl, xr):
        v = self._vertex()
        pts = [xl, xr] if v is None or not (xl < v < xr) else [xl, v, xr]
        return float(sum(abs(self.w(pts[k + 1]) - self.w(pts[k])) for k in range(len(pts) - 1)))

    def spec(self):
        return f"quadratic:{fmt(self.a)},{fmt(self.b)},{fmt(self.c)}"


class Tabulated(Coefficient):
    """Piecewise linear interpolation through given nodes."""

    def __init__(self, xs, ws):
        self.xs = np.asarray(xs, dtype=float)
        self.ws = np.asarray(ws, dtype=float)
        if self.xs.ndim != 1 or self.xs.size < 2 or self.xs.size != self.ws.size:
            raise ValueError("tabulated coefficient needs matching x and w node lists")
        if not np.all(np.diff(self.xs) > 0):
            raise ValueError("tabulated coefficient nodes must be strictly increasing")

    def w(self, x):
        out = np.interp(x, self.xs, self.ws)
        return float(out) if np.ndim(x) == 0 else out

    def dw(self, x):
        slopes = np.diff(self.ws) / np.diff(self.xs)
        idx = np.clip(np.searchsorted(self.xs, x, side="right") - 1, 0, slopes.size - 1)
        out = slopes[idx]
        scalar = np.ndim(x) == 0
        x = np.asarray(x, dtype=float)
        out = np.where((x < self.xs[0]) | (x > self.xs[-1]), 0.0, out)
        return float(out) if scalar else out

    def _nodes_in(self, xl, xr):
        inner = self.xs[(self.xs > xl) & (self.xs < xr)]
        return np.concatenate(([xl], inner, [xr]))

    def bounds(self, xl, xr):
        vals = self.w(self._nodes_in(xl, xr))
        return (float(np.min(vals)), float(np.max(vals)))

    def tv(self, xl, xr):
        vals = self.w(self._nodes_in(xl, xr))
        return float(np.sum(np.abs(np.diff(vals))))

    def spec(self):
        pts = ";".join(f"{fmt(x)},{fmt(w)}" for x, w in zip(self.xs, self.ws))
        return f"tabulated:{pts}"


def coefficient_from_spec(s: str) -> Coefficient:
    s = s.strip()
    kind, _, rest = s.partition(":")
    try:
        if kind == "constant":
            return Constant(float(rest))
        if kind == "affine":
            a, b = (float(t) for t in rest.split(","))
            return Affine(a, b)
        if kind == "quadratic":
            a, b, c = (float(t) for t in rest.split(","))
            return Quadratic(a, b, c)
        if kind == "tabulated":
            pts = [tuple(float(t) for t in p.split(",")) for p in rest.split(";") if p]
            return Tabulated([p[0] for p in pts], [p[1] for p in pts])
    except (ValueError, IndexError) as exc:
        raise ValueError(f"bad coefficient spec {s!r}: {exc}") from None
    raise ValueError(f"unknown coefficient kind {kind!r}")


@dataclass(frozen=True)
class SectionFlux:
    """Flux u -> w*g(u) for one fixed coefficient value (one side of an edge)."""

    w: float
    template: TemplateFlux

    def __call__(self, u):
        return self.w * self.template.g(u)

    def deriv(self, u):
        return self.w * self.template.dg(u)

    def minmax(self, lo: float, hi: float) -> tuple[float, float]:
        gmin, gmax = self.template.minmax_g(lo, hi)
        a, b = self.w * gmin, self.w * gmax
        return (min(a, b), max(a, b))

    def interior_argmax(self, lo: float, hi: float) -> float | None:
        """Unique interior maximizer of the flux on [lo, hi], if there is one."""
        crit = [c for c in self.template.crit if lo < c < hi]
        if len(crit) != 1:
            return None
        theta = crit[0]
        if self(theta) <= max(self(lo), self(hi)):
            return None
        return theta

    def solve_on_branch(self, q: float, lo: float, hi: float, tol: float = 1e-12) -> float:
        """Bisection root of w*g(u) = q on [lo, hi]; f - q must change sign."""
        flo = self(lo) - q
        fhi = self(hi) - q
        if flo == 0.0:
            return lo
        if fhi == 0.0:
            return hi
        if flo * fhi > 0.0:
            from .exceptions import CouplingError

            raise CouplingError(f"no root of flux = {q} on branch [{lo}, {hi}]")
        a, b, fa = lo, hi, flo
        for _ in range(200):
            m = 0.5 * (a + b)
            fm = self(m) - q
            if fm == 0.0 or (b - a) < 1e-16 * max(1.0, abs(lo), abs(hi)):
                break
            if (fa < 0.0) == (fm < 0.0):
                a, fa = m, fm
            else:
                b = m
        m = 0.5 * (a + b)
        if abs(self(m) - q) > max(tol, 1e-9 * abs(q)):
            from .exceptions import CouplingError

            raise CouplingError(f"branch root did not meet residual tolerance at q = {q}")
        return m
