"""Finite-volume marching for the interface-coupled conservation law.

The scheme is first-order monotone (Godunov or Engquist-Osher) on a uniform
grid whose edges contain every interface. Interior edges use the one-sided
coefficient; interface edges are closed by the scenario's coupling rule. Time
stepping uses one fixed dt derived from the declared state range, so paired
runs on the same model and grid share their dt history exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property, lru_cache

import numpy as np

from . import kernels
from .exceptions import (
    CflError,
    DomainError,
    GridMismatchError,
    ScenarioError,
    SolverError,
    StateError,
)
from .germs import GermSpec, germ_from_spec
from .model import FluxModel
from .riemann import build_coupling

N_SNAPSHOTS = 64
_U_SAMPLE_N = 257
_MAX_STEPS = 2_000_000


def snapshot_schedule(t_end: float, n: int = N_SNAPSHOTS) -> np.ndarray:
    """t = 0 plus n uniformly spaced snapshot times ending at t_end."""
    return np.concatenate(([0.0], t_end * np.arange(1, n + 1) / n))


_EXPR_NAMES = {
    "pi": np.pi,
    "e": np.e,
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "tanh": np.tanh,
    "exp": np.exp,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "sign": np.sign,
    "where": np.where,
    "minimum": np.minimum,
    "maximum": np.maximum,
    "clip": np.clip,
}


@dataclass(frozen=True)
class InitialData:
    """Initial state recipe: constant:c, riemann:uL,uR[,x0], pwc:v0,x1,v1,...,
    or expr:<expression of x and dx>."""

    spec: str

    def __post_init__(self):
        kind, _, rest = self.spec.partition(":")
        try:
            if kind == "constant":
                float(rest)
            elif kind == "riemann":
                vals = [float(t) for t in rest.split(",")]
                if len(vals) not in (2, 3):
                    raise ValueError("riemann data takes uL,uR[,x0]")
            elif kind == "pwc":
                vals = [float(t) for t in rest.split(",")]
                if len(vals) % 2 == 0:
                    raise ValueError("pwc data alternates value,break,...,value")
                if not all(a < b for a, b in zip(vals[1::2], vals[3::2])):
                    raise ValueError("pwc breakpoints must increase")
            elif kind == "expr":
                compile(rest, "<initial>", "eval")
            else:
                raise ValueError(f"unknown initial data kind {kind!r}")
        except (ValueError, SyntaxError) as exc:
            raise ScenarioError(f"bad initial data {self.spec!r}: {exc}") from None

    def sample(self, centers: np.ndarray, dx: float) -> np.ndarray:
        kind, _, rest = self.spec.partition(":")
        if kind == "constant":
            return np.full(centers.shape, float(rest))
        if kind == "riemann":
            vals = [float(t) for t in rest.split(",")]
            x0 = vals[2] if len(vals) == 3 else 0.0
            return np.where(centers < x0, vals[0], vals[1])
        if kind == "pwc":
            vals = [float(t) for t in rest.split(",")]
            levels = np.asarray(vals[0::2])
            breaks = np.asarray(vals[1::2])
            return levels[np.searchsorted(breaks, centers, side="right")]
        out = eval(  # noqa: S307 - restricted namespace, validated at parse
            compile(rest, "<initial>", "eval"),
            {"__builtins__": {}},
            {"x": centers, "dx": dx, **_EXPR_NAMES},
        )
        return np.broadcast_to(np.asarray(out, dtype=float), centers.shape).copy()


@dataclass(frozen=True)
class InterfaceSpec:
    """Coupling rule plus declared germ for one interface."""

    coupling: str
    germ: GermSpec

    @classmethod
    def from_strings(cls, coupling: str, germ: str) -> "InterfaceSpec":
        return cls(coupling.strip(), germ_from_spec(germ))


@dataclass(frozen=True)
class VerifyParams:
    """Verification knobs: entropy level count, ledger ball, tolerance factors."""

    k_levels: int = 17
    radius: float | None = None
    horizon: float | None = None
    c_iface: float = 10.0
    c_bulk: float = 20.0
    c_ledger: float = 50.0


class StaticGrid:
    """Uniform cell grid aligned with the model's interfaces."""

    def __init__(self, model: FluxModel, n: int):
        if n < 4:
            raise DomainError("grid needs at least 4 cells")
        lo, hi = model.domain
        self.model = model
        self.n = int(n)
        self.dx = (hi - lo) / n
        edges = lo + self.dx * np.arange(n + 1)
        edges[-1] = hi
        self.edges = edges
        self.centers = lo + self.dx * (np.arange(n) + 0.5)
        iface_edges = []
        for xj in model.interfaces:
            k = round((xj - lo) / self.dx)
            if not 0 < k < n or abs(edges[k] - xj) > 1e-9 * self.dx:
                raise GridMismatchError(
                    f"interface at x = {xj} does not lie on a grid edge (n = {n})"
                )
            iface_edges.append(int(k))
        self.iface_edges = tuple(iface_edges)
        self.cell_region = np.asarray(model.region_index(self.centers))
        # one-sided coefficient values, always taken from the cell's own region
        cw_l = np.empty(n)
        cw_r = np.empty(n)
        for k, r in enumerate(model.regions):
            m = self.cell_region == k
            if np.any(m):
                cw_l[m] = r.coefficient.w(edges[:-1][m])
                cw_r[m] = r.coefficient.w(edges[1:][m])
        self.cell_w_left = cw_l
        self.cell_w_right = cw_r
        self.edge_w = np.concatenate((cw_l, cw_r[-1:]))
        quad = model.template.quad
        if quad is not None:
            qa, qb, qc = quad
            self.edge_alpha = self.edge_w * qa
            self.edge_beta = self.edge_w * qb
            self.edge_gamma = self.edge_w * qc
        else:
            self.edge_alpha = self.edge_beta = self.edge_gamma = None

    @cached_property
    def wmax_abs(self) -> float:
        return self.model.w_abs_max


@dataclass(frozen=True)
class Scenario:
    """Complete run description: model, interface rules, grid, data, knobs."""

    name: str
    model: FluxModel
    interfaces: tuple[InterfaceSpec, ...]
    initial: InitialData
    grid_n: int
    cfl: float
    t_end: float
    scheme: str = "godunov"
    bc: str = "outflow"
    snapshots: int = N_SNAPSHOTS
    verify: VerifyParams = field(default_factory=VerifyParams)

    def __post_init__(self):
        if len(self.interfaces) != len(self.model.interfaces):
            raise ScenarioError(
                f"model has {len(self.model.interfaces)} interfaces, "
                f"got {len(self.interfaces)} interface specs"
            )
        if not 0.0 < self.cfl < 1.0:
            raise ScenarioError("cfl out of (0,1)")
        if not self.t_end > 0.0:
            raise ScenarioError("t_end must be positive")
        if self.scheme not in ("godunov", "eo"):
            raise ScenarioError(f"unknown scheme {self.scheme!r}")
        if self.bc not in ("outflow", "periodic"):
            raise ScenarioError(f"unknown boundary condition {self.bc!r}")
        if self.snapshots < 1:
            raise ScenarioError("snapshots must be >= 1")
        if self.bc == "periodic":
            lo, hi = self.model.domain
            wl = float(self.model.regions[0].coefficient.w(lo))
            wr = float(self.model.regions[-1].coefficient.w(hi))
            if abs(wl - wr) > 1e-12:
                raise ScenarioError("periodic runs need matching end coefficients")
        for k, spec in enumerate(self.interfaces):
            if spec.coupling == "pair_projection" and spec.germ.kind != "sampled_set":
                raise ScenarioError(
                    f"interface {k}: pair_projection needs a sampled_set germ"
                )
        # surface bad initial expressions at construction, not mid-run
        lo, hi = self.model.domain
        trial = np.linspace(lo, hi, 5)[1:-1]
        try:
            self.initial.sample(trial, (hi - lo) / self.grid_n)
        except ScenarioError:
            raise
        except Exception as exc:
            raise ScenarioError(f"initial data failed to evaluate: {exc}") from None

    def build_couplings(self, grid: StaticGrid):
        out = []
        for j, spec in enumerate(self.interfaces):
            fm = self.model.trace_flux(j, "-")
            fp = self.model.trace_flux(j, "+")
            out.append(
                build_coupling(
                    spec.coupling,
                    fm,
                    fp,
                    self.model.u_range,
                    scheme=self.scheme,
                    pairs=spec.germ.pairs,
                )
            )
        return tuple(out)

    def with_grid(self, n: int) -> "Scenario":
        return replace(self, grid_n=n)


@lru_cache(maxsize=64)
def build_runtime(scenario: Scenario):
    """Grid plus coupling objects for a scenario (cached on the scenario)."""
    grid = StaticGrid(scenario.model, scenario.grid_n)
    return grid, scenario.build_couplings(grid)


def edge_states(grid: StaticGrid, u: np.ndarray, bc: str) -> tuple[np.ndarray, np.ndarray]:
    """Left/right states per edge, ghost cells by copy (outflow) or wrap."""
    if bc == "periodic":
        left, right = u[..., -1:], u[..., :1]
    else:
        left, right = u[..., :1], u[..., -1:]
    a = np.concatenate((left, u), axis=-1)
    b = np.concatenate((u, right), axis=-1)
    return a, b


def edge_flux_arrays(grid: StaticGrid, a: np.ndarray, b: np.ndarray, couplings, scheme: str):
    """Numerical flux per edge; interface columns come from the couplings.

    a, b may carry leading batch dimensions (used for entropy level sweeps).
    """
    if grid.edge_alpha is not None:
        alpha = np.broadcast_to(grid.edge_alpha, a.shape)
        beta = np.broadcast_to(grid.edge_beta, a.shape)
        gamma = np.broadcast_to(grid.edge_gamma, a.shape)
        sweep = kernels.godunov_sweep if scheme == "godunov" else kernels.eo_sweep
        f = sweep(a, b, alpha, beta, gamma)
    else:
        w = np.broadcast_to(grid.edge_w, a.shape)
        if scheme == "godunov":
            f = kernels.poly_godunov_sweep(a, b, w, grid.model.template)
        else:
            f = kernels.poly_eo_sweep(a, b, w, grid.model.template)
    for k, c in zip(grid.iface_edges, couplings):
        f[..., k] = c.flux(a[..., k], b[..., k])
    return f


def _advance(grid: StaticGrid, u: np.ndarray, dt: float, couplings, scheme: str, bc: str):
    a, b = edge_states(grid, u, bc)
    f = edge_flux_arrays(grid, a, b, couplings, scheme)
    lam = dt / grid.dx
    return u - lam * (f[..., 1:] - f[..., :-1])


def cfl_dt(state: np.ndarray, model: FluxModel, cfl: float, dx: float) -> float:
    """Largest dt with lambda * max wave speed = cfl over the given states."""
    speed = model.w_abs_max * float(np.max(np.abs(model.template.dg(state))))
    if speed <= 0.0:
        return math.inf
    return cfl * dx / speed


def step(state: np.ndarray, dt: float, scenario: Scenario) -> np.ndarray:
    """One forward-Euler finite-volume step; dt must satisfy the CFL bound."""
    grid, couplings = build_runtime(scenario)
    state = np.asarray(state, dtype=float)
    if state.shape[-1] != grid.n:
        raise GridMismatchError(f"state has {state.shape[-1]} cells, grid has {grid.n}")
    bound = cfl_dt(state, scenario.model, 1.0, grid.dx)
    if dt > bound * (1.0 + 1e-12):
        raise CflError(f"dt = {dt:g} exceeds the CFL bound {bound:g}")
    return _advance(grid, state, dt, couplings, scenario.scheme, scenario.bc)


@dataclass
class SpaceTimeSolution:
    """States on a fixed grid at increasing times, plus the dt history.

    step_resolved means every solver step is present (a direct run); loaded
    solutions hold only the snapshot schedule and are replayed for
    verification.
    """

    scenario: Scenario
    grid: StaticGrid
    times: np.ndarray
    states: np.ndarray
    dts: np.ndarray
    couplings: tuple
    step_resolved: bool = True
    step_indices: np.ndarray | None = None
    source: str = "run"

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def index_at_time(self, t: float) -> int:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(float(self.times[i]) - t) > 1e-9 * max(1.0, self.t_end):
            raise DomainError(f"no stored state near t = {t}")
        return i

    def schedule_indices(self) -> np.ndarray:
        """Indices of the stored rows matching the snapshot schedule."""
        if not self.step_resolved:
            return np.arange(len(self.times))
        sched = snapshot_schedule(self.scenario.t_end, self.scenario.snapshots)
        sched = sched[sched <= self.t_end * (1.0 + 1e-12)]
        idx = np.unique([int(np.argmin(np.abs(self.times - t))) for t in sched])
        return idx

    def value_range(self) -> tuple[float, float]:
        return float(np.min(self.states)), float(np.max(self.states))


def run(scenario: Scenario) -> SpaceTimeSolution:
    """March the scenario to t_end keeping every step state."""
    grid, couplings = build_runtime(scenario)
    u = scenario.initial.sample(grid.centers, grid.dx)
    lo, hi = scenario.model.u_range
    pad = 1e-12 * max(1.0, abs(lo), abs(hi))
    if np.min(u) < lo - pad or np.max(u) > hi + pad:
        raise StateError(
            f"initial data range [{np.min(u):g}, {np.max(u):g}] escapes "
            f"u_range [{lo:g}, {hi:g}]"
        )
    sample = np.linspace(lo, hi, _U_SAMPLE_N)
    dt0 = min(cfl_dt(sample, scenario.model, scenario.cfl, grid.dx), scenario.t_end)
    times = [0.0]
    states = [u]
    dts = []
    t = 0.0
    for k in range(_MAX_STEPS):
        if t >= scenario.t_end:
            break
        dt = dt0 if t + dt0 < scenario.t_end * (1.0 - 1e-12) else scenario.t_end - t
        u = _advance(grid, u, dt, couplings, scenario.scheme, scenario.bc)
        if not np.all(np.isfinite(u)):
            raise SolverError(
                f"non-finite state at step {k + 1}, t = {t + dt:g}; "
                f"check coupling and CFL settings"
            )
        t = scenario.t_end if dt != dt0 else t + dt
        times.append(t)
        states.append(u)
        dts.append(dt)
    else:
        raise SolverError(f"exceeded {_MAX_STEPS} steps before t_end")
    return SpaceTimeSolution(
        scenario=scenario,
        grid=grid,
        times=np.asarray(times),
        states=np.asarray(states),
        dts=np.asarray(dts),
        couplings=couplings,
    )
