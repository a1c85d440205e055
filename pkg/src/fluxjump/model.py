"""Spatial model: a flux template modulated by per-region coefficients.

A model is a partition of [domain_lo, domain_hi] into contiguous regions, each
carrying a coefficient profile w(x) that is C^1 inside the region. Junctions
between consecutive regions are the interfaces; w may jump there, and all
interface coupling data lives on that finite set. The flux is F(x, u) =
w(x) * g(u) with g a catalog template.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .catalog import Coefficient, SectionFlux, TemplateFlux
from .exceptions import DomainError, InterfaceIndexError, InterfacePointError, StateError


@dataclass(frozen=True)
class Region:
    xl: float
    xr: float
    coefficient: Coefficient

    def __post_init__(self):
        if not self.xl < self.xr:
            raise DomainError(f"region [{self.xl}, {self.xr}] is empty")


@dataclass(frozen=True)
class GnlReport:
    """Outcome of the nonlinearity scan; failures list flat characteristic spots."""

    ok: bool
    failures: tuple[dict, ...]
    n_directions: int
    n_v_samples: int
    zero_tol: float


@dataclass(frozen=True)
class FluxModel:
    """Flux F(x, u) = w(x) * g(u), with w piecewise-smooth across static interfaces."""

    template: TemplateFlux
    regions: tuple[Region, ...]
    u_range: tuple[float, float]

    def __post_init__(self):
        if not self.regions:
            raise DomainError("model needs at least one region")
        for a, b in zip(self.regions, self.regions[1:]):
            if a.xr != b.xl:
                raise DomainError(f"regions are not contiguous at {a.xr} vs {b.xl}")
        lo, hi = self.u_range
        if not lo < hi:
            raise DomainError(f"u_range ({lo}, {hi}) is empty")

    @property
    def domain(self) -> tuple[float, float]:
        return (self.regions[0].xl, self.regions[-1].xr)

    @cached_property
    def interfaces(self) -> tuple[float, ...]:
        return tuple(r.xr for r in self.regions[:-1])

    def region_index(self, x):
        """Region owning each x; points exactly on an interface go right."""
        idx = np.searchsorted(np.asarray(self.interfaces), x, side="right")
        return idx if np.ndim(x) else int(idx)

    def _check_state(self, u) -> None:
        lo, hi = self.u_range
        u = np.asarray(u, dtype=float)
        if np.any(u < lo) or np.any(u > hi):
            raise StateError(f"state outside u_range [{lo}, {hi}]")

    def w(self, x):
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape)
        idx = self.region_index(x)
        for k, r in enumerate(self.regions):
            m = idx == k
            if np.any(m):
                out[m] = r.coefficient.w(x[m])
        return out if out.ndim else float(out)

    def dw(self, x):
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape)
        idx = self.region_index(x)
        for k, r in enumerate(self.regions):
            m = idx == k
            if np.any(m):
                out[m] = r.coefficient.dw(x[m])
        return out if out.ndim else float(out)

    def eval_flux(self, x, u):
        """F(x, u) for x inside the domain and u inside u_range."""
        lo, hi = self.domain
        xa = np.asarray(x, dtype=float)
        if np.any(xa < lo) or np.any(xa > hi):
            raise DomainError(f"x outside domain [{lo}, {hi}]")
        self._check_state(u)
        return self.w(x) * self.template.g(u)

    def div_a(self, x, k: float):
        """Absolutely continuous flux divergence at level k: g(k) * w'(x).

        Defined only away from interfaces, where w is differentiable.
        """
        xa = np.asarray(x, dtype=float)
        for xj in self.interfaces:
            if np.any(np.abs(xa - xj) <= 1e-14 * max(1.0, abs(xj))):
                raise InterfacePointError(f"div_a undefined on the interface at {xj}")
        return float(self.template.g(k)) * self.dw(x)

    def _check_j(self, j: int) -> None:
        if not 0 <= j < len(self.interfaces):
            raise InterfaceIndexError(f"interface index {j} out of range")

    def trace_flux(self, j: int, side: str) -> SectionFlux:
        """One-sided flux function u -> w(x_j -/+) * g(u) at interface j."""
        self._check_j(j)
        xj = self.interfaces[j]
        if side == "-":
            wv = float(self.regions[j].coefficient.w(xj))
        elif side == "+":
            wv = float(self.regions[j + 1].coefficient.w(xj))
        else:
            raise ValueError(f"side must be '-' or '+', got {side!r}")
        return SectionFlux(wv, self.template)

    def flux_traces(self, j: int, u) -> tuple[float, float]:
        """(f_minus(u), f_plus(u)): one-sided flux values at interface j."""
        self._check_state(u)
        return (float(self.trace_flux(j, "-")(u)), float(self.trace_flux(j, "+")(u)))

    def interface_jump(self, j: int) -> float:
        """w(x_j+) - w(x_j-)."""
        self._check_j(j)
        xj = self.interfaces[j]
        return float(self.regions[j + 1].coefficient.w(xj)) - float(
            self.regions[j].coefficient.w(xj)
        )

    @cached_property
    def w_abs_max(self) -> float:
        return max(max(abs(v) for v in r.coefficient.bounds(r.xl, r.xr)) for r in self.regions)

    @cached_property
    def lipschitz_M(self) -> float:
        """Bound on |partial_u F| over the domain and u_range: a wave-speed bound."""
        return self.w_abs_max * self.template.max_abs_dg(*self.u_range)

    @cached_property
    def sigma_s_mass(self) -> tuple[float, ...]:
        """Per-interface flux-jump magnitude sup_u |f+(u) - f-(u)| over u_range."""
        gmax = self.template.max_abs_g(*self.u_range)
        return tuple(abs(self.interface_jump(j)) * gmax for j in range(len(self.interfaces)))

    @cached_property
    def smooth_tv_mass(self) -> float:
        """Mass of the smooth coefficient variation: sum_k TV(w; region k) * max |g|."""
        gmax = self.template.max_abs_g(*self.u_range)
        return sum(r.coefficient.tv(r.xl, r.xr) for r in self.regions) * gmax


def gnl_check(
    model: FluxModel, directions: int = 64, v_samples: int = 512, zero_tol: float = 1e-12
) -> GnlReport:
    """Scan for flat spots of the one-sided characteristic speeds.

    For each interface side and each unit direction (cos phi, sin phi) in the
    (t, x) plane, samples cos phi + sin phi * f'(v) over u_range. A failure is
    a v-interval (two or more consecutive samples) where the value stays within
    zero_tol of zero: the flux is affine there, so traces are not forced. The
    check falsifies; passing does not prove the null-set condition.
    """
    if directions < 2 or v_samples < 2:
        raise ValueError("gnl_check needs at least 2 directions and 2 samples")
    v = np.linspace(model.u_range[0], model.u_range[1], v_samples)
    dg = np.asarray(model.template.dg(v), dtype=float)
    dv = v[1] - v[0]
    failures = []
    for j in range(len(model.interfaces)):
        for side in ("-", "+"):
            wv = model.trace_flux(j, side).w
            for d in range(directions):
                phi = 2.0 * np.pi * d / directions
                hits = np.abs(np.cos(phi) + np.sin(phi) * wv * dg) <= zero_tol
                if not np.any(hits[:-1] & hits[1:]):
                    continue
                run = best = end = 0
                for i, h in enumerate(hits):
                    run = run + 1 if h else 0
                    if run > best:
                        best, end = run, i
                failures.append(
                    {
                        "interface": j,
                        "side": side,
                        "direction_index": d,
                        "v_lo": float(v[end - best + 1]),
                        "v_hi": float(v[end]),
                        "run_length": best,
                        "interval": float((best - 1) * dv),
                    }
                )
    return GnlReport(not failures, tuple(failures), directions, v_samples, zero_tol)


def assumption_report(model: FluxModel) -> dict:
    """Summary of the structural assumptions the verifiers rely on."""
    gnl = gnl_check(model)
    region_bounds = [r.coefficient.bounds(r.xl, r.xr) for r in model.regions]
    return {
        "template": model.template.spec(),
        "template_degree": len(model.template.coeffs) - 1,
        "is_quadratic": model.template.quad is not None,
        "u_range": list(model.u_range),
        "domain": list(model.domain),
        "n_regions": len(model.regions),
        "interfaces": list(model.interfaces),
        "interface_jumps": [model.interface_jump(j) for j in range(len(model.interfaces))],
        "w_bounds_per_region": [list(b) for b in region_bounds],
        "w_positive": all(b[0] > 0.0 for b in region_bounds),
        "lipschitz_M": model.lipschitz_M,
        "sigma_s_mass": list(model.sigma_s_mass),
        "smooth_tv_mass": model.smooth_tv_mass,
        "gnl_ok": gnl.ok,
        "gnl_failures": [dict(f) for f in gnl.failures],
    }
