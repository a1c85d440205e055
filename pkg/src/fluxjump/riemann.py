"""Numerical fluxes and interface Riemann couplings.

Interior edges use Godunov or Engquist-Osher fluxes, exact for the polynomial
catalog. Interface edges are closed by a coupling rule: demand-supply (the
vanishing-viscosity choice for bell-shaped fluxes), projection onto a finite
pair set, or pass-through when the coefficient is continuous.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .catalog import SectionFlux
from .exceptions import CouplingError, UnsupportedCouplingError
from .germs import GermSpec, StatePair
from .model import FluxModel


def _quad_coeffs(f: SectionFlux) -> tuple[float, float, float]:
    q = f.template.quad
    if q is None:
        raise UnsupportedCouplingError("edge kernels need a template of degree <= 2")
    return (f.w * q[0], f.w * q[1], f.w * q[2])


def _edge_flux(f: SectionFlux, a, b, scheme: str):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if f.template.quad is not None:
        al, be, ga = _quad_coeffs(f)
        alpha = np.full(a.shape, al)
        beta = np.full(a.shape, be)
        gamma = np.full(a.shape, ga)
        sweep = kernels.godunov_sweep if scheme == "godunov" else kernels.eo_sweep
        return sweep(a, b, alpha, beta, gamma)
    w = np.full(a.shape, f.w)
    if scheme == "godunov":
        return kernels.poly_godunov_sweep(a, b, w, f.template)
    return kernels.poly_eo_sweep(a, b, w, f.template)


def godunov_flux(f: SectionFlux, uL: float, uR: float) -> float:
    return float(_edge_flux(f, np.asarray(uL, dtype=float), np.asarray(uR, dtype=float), "godunov"))


def engquist_osher_flux(f: SectionFlux, uL: float, uR: float) -> float:
    return float(_edge_flux(f, np.asarray(uL, dtype=float), np.asarray(uR, dtype=float), "eo"))


class IdentityCoupling:
    """Pass-through interface for a continuous coefficient (no actual jump)."""

    kind = "identity"

    def __init__(self, fm: SectionFlux, fp: SectionFlux, u_range, scheme: str = "godunov"):
        jump = abs(fp.w - fm.w) * fm.template.max_abs_g(*u_range)
        if jump > 1e-12:
            raise UnsupportedCouplingError(
                f"identity coupling needs a continuous flux; jump mass {jump:g}"
            )
        self.fm, self.fp = fm, fp
        self.scheme = scheme

    def flux(self, a, b):
        return _edge_flux(self.fm, a, b, self.scheme)


class VvCoupling:
    """Demand-supply coupling: the vanishing-viscosity closure for bell fluxes.

    Requires positive w on both sides and a unique interior maximum of the
    one-sided fluxes over u_range. The interface flux is
    q = min(D(uL), S(uR)) with D the nondecreasing and S the nonincreasing
    envelope; the trace pair puts each side on the branch matching q.
    """

    kind = "vv_demand_supply"

    def __init__(self, fm: SectionFlux, fp: SectionFlux, u_range):
        if fm.w <= 0.0 or fp.w <= 0.0:
            raise UnsupportedCouplingError("demand-supply coupling needs w > 0 on both sides")
        lo, hi = u_range
        tm = fm.interior_argmax(lo, hi)
        tp = fp.interior_argmax(lo, hi)
        if tm is None or tp is None:
            raise UnsupportedCouplingError(
                "demand-supply coupling needs an interior flux maximum on both sides"
            )
        self.fm, self.fp = fm, fp
        self.lo, self.hi = lo, hi
        self.theta_m, self.theta_p = tm, tp

    def demand(self, u):
        u = np.asarray(u, dtype=float)
        return np.where(u <= self.theta_m, self.fm(u), self.fm(self.theta_m))

    def supply(self, u):
        u = np.asarray(u, dtype=float)
        return np.where(u <= self.theta_p, self.fp(self.theta_p), self.fp(u))

    def flux(self, a, b):
        d = self.demand(a)
        s = self.supply(b)
        return np.where(d < s, d, s)

    def solve_riemann(self, uL: float, uR: float) -> tuple[StatePair, float]:
        """Trace pair and flux of the interface Riemann problem (uL | uR)."""
        d = float(self.demand(uL))
        s = float(self.supply(uR))
        q = min(d, s)
        # active side keeps its own state when its pointwise flux already is q
        if d <= s:
            um = uL if float(self.fm(uL)) == q else self.fm.solve_on_branch(q, self.lo, self.theta_m)
        else:
            um = self.fm.solve_on_branch(q, self.theta_m, self.hi)
        if s <= d:
            up = uR if float(self.fp(uR)) == q else self.fp.solve_on_branch(q, self.theta_p, self.hi)
        else:
            up = self.fp.solve_on_branch(q, self.lo, self.theta_p)
        return StatePair(float(um), float(up)), q


class PairProjectionCoupling:
    """Projection of edge states onto a fixed finite pair set.

    Picks the member minimizing |u- - uL| + |u+ - uR| (ties resolved toward
    the lexicographically smallest pair) and averages its one-sided fluxes.
    Not monotone in general: this is the negative-control coupling.
    """

    kind = "pair_projection"

    def __init__(self, fm: SectionFlux, fp: SectionFlux, pairs):
        if not pairs:
            raise UnsupportedCouplingError("pair projection needs a nonempty pair set")
        self.fm, self.fp = fm, fp
        self.pairs = tuple(sorted(StatePair(*p) for p in pairs))
        self._fluxes = tuple(
            0.5 * (float(fm(p.minus)) + float(fp(p.plus))) for p in self.pairs
        )

    def project(self, uL: float, uR: float) -> StatePair:
        best = None
        arg = self.pairs[0]
        for p in self.pairs:
            d = abs(p.minus - uL) + abs(p.plus - uR)
            if best is None or d < best:
                best, arg = d, p
        return arg

    def _flux1(self, uL: float, uR: float) -> float:
        best = None
        out = self._fluxes[0]
        for p, q in zip(self.pairs, self._fluxes):
            d = abs(p.minus - uL) + abs(p.plus - uR)
            if best is None or d < best:
                best, out = d, q
        return out

    def flux(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        out = np.empty(np.broadcast(a, b).shape)
        for idx in np.ndindex(out.shape):
            out[idx] = self._flux1(float(a[idx]), float(b[idx]))
        return out


def build_coupling(
    kind: str,
    fm: SectionFlux,
    fp: SectionFlux,
    u_range,
    scheme: str = "godunov",
    pairs=(),
):
    if kind == "identity":
        return IdentityCoupling(fm, fp, u_range, scheme)
    if kind == "vv_demand_supply":
        return VvCoupling(fm, fp, u_range)
    if kind == "pair_projection":
        return PairProjectionCoupling(fm, fp, pairs)
    raise UnsupportedCouplingError(f"unknown coupling kind {kind!r}")


# -- interface-indexed operations ------------------------------------------


def interface_flux_vv(j: int, model: FluxModel, uL, uR):
    """Demand-supply interface flux at interface j for edge states (uL, uR)."""
    c = VvCoupling(model.trace_flux(j, "-"), model.trace_flux(j, "+"), model.u_range)
    out = c.flux(uL, uR)
    return float(out) if np.ndim(uL) == 0 and np.ndim(uR) == 0 else out


def solve_interface_riemann(j: int, model: FluxModel, germ: GermSpec, uL: float, uR: float) -> StatePair:
    """Germ-consistent trace pair of the interface Riemann problem (uL | uR).

    vanishing_viscosity resolves through the demand-supply construction;
    sampled_set projects onto the declared pairs; identity_coupling returns
    the diagonal pair carrying the classical Godunov state's flux.
    """
    fm = model.trace_flux(j, "-")
    fp = model.trace_flux(j, "+")
    if germ.kind == "vanishing_viscosity":
        pair, _ = VvCoupling(fm, fp, model.u_range).solve_riemann(uL, uR)
        return pair
    if germ.kind == "sampled_set":
        return PairProjectionCoupling(fm, fp, germ.pairs).project(uL, uR)
    q = godunov_flux(fm, uL, uR)
    lo, hi = min(uL, uR), max(uL, uR)
    # Godunov state: the candidate achieving the edge flux, ties toward uL
    cands = [uL, uR] + [c for c in fm.template.crit if lo < c < hi]
    u = min(cands, key=lambda v: abs(float(fm(v)) - q))
    return StatePair(float(u), float(u))
