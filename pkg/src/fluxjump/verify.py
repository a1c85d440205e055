"""Numerical certificates: entropy residuals, Kato remainders, contraction.

All checks run on discrete space-time solutions. A step-resolved run is
consumed directly; a loaded snapshot file is replayed deterministically from
its initial row using the stored dt history and cross-checked against every
stored snapshot, so certificates never depend on unverifiable data.

Residual sign convention: nonpositive means dissipative. Entropy production
and Kato divergence concentrated on interface-adjacent cells is reported
separately as per-interface time series; the off-interface part is what the
scheme must keep at the rounding-plus-truncation level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, GridMismatchError, SolverError
from .germs import GermSpec, germ_w, is_dissipative
from .model import FluxModel
from .solver import SpaceTimeSolution, _advance, build_runtime, edge_flux_arrays, edge_states
from .traces import extract_traces

_REPLAY_TOL = 1e-12


def _step_stream(sol: SpaceTimeSolution):
    """Yield (u0, u1, dt, t0) per solver step, replaying loaded solutions.

    Replayed states are validated against every stored snapshot row; any
    mismatch beyond rounding aborts the verification.
    """
    if sol.step_resolved:
        for i in range(len(sol.dts)):
            yield sol.states[i], sol.states[i + 1], float(sol.dts[i]), float(sol.times[i])
        return
    grid, couplings = build_runtime(sol.scenario)
    stored = {int(s): r for r, s in enumerate(sol.step_indices)}
    scale = max(1.0, float(np.max(np.abs(sol.states))))
    u = np.array(sol.states[0])
    t = 0.0
    for i, dt in enumerate(sol.dts):
        dt = float(dt)
        u1 = _advance(grid, u, dt, couplings, sol.scenario.scheme, sol.scenario.bc)
        row = stored.get(i + 1)
        if row is not None:
            err = float(np.max(np.abs(u1 - sol.states[row])))
            if err > _REPLAY_TOL * scale:
                raise SolverError(
                    f"replay diverged from stored snapshot at step {i + 1}: "
                    f"max deviation {err:g}"
                )
            u1 = np.array(sol.states[row])
        yield u, u1, dt, t
        u = u1
        t += dt


def require_paired(u_sol: SpaceTimeSolution, v_sol: SpaceTimeSolution) -> None:
    """Two solutions are comparable iff they share model, interfaces and grid."""
    a, b = u_sol.scenario, v_sol.scenario
    if a.model != b.model:
        raise GridMismatchError("solutions use different flux models")
    if a.interfaces != b.interfaces:
        raise GridMismatchError("solutions use different interface couplings")
    if (a.grid_n, a.cfl, a.t_end, a.scheme, a.bc) != (b.grid_n, b.cfl, b.t_end, b.scheme, b.bc):
        raise GridMismatchError("solutions use different grid or stepping settings")
    if len(u_sol.dts) != len(v_sol.dts) or not np.array_equal(u_sol.dts, v_sol.dts):
        raise GridMismatchError("solutions have different dt histories")


def _interface_masks(grid):
    """Boolean cell masks: adjacent-to-some-interface, and its complement."""
    adj = np.zeros(grid.n, dtype=bool)
    for k in grid.iface_edges:
        adj[k - 1 : k + 1] = True
    return adj, ~adj


# -- entropy --------------------------------------------------------------


@dataclass
class ResidualField:
    """Aggregated Kruzhkov entropy residuals for one solution."""

    k_levels: np.ndarray
    times: np.ndarray
    off_interface_max: float
    off_interface_pos_mass: float
    interface_mass: np.ndarray  # (n_interfaces, n_steps), signed, max over k
    cell_pos_mass: np.ndarray  # (n_cells,), max over k
    tol_off: float
    dx: float
    verdict: bool


def entropy_levels(sol: SpaceTimeSolution, count: int | None = None) -> np.ndarray:
    lo, hi = sol.scenario.model.u_range
    n = count if count is not None else sol.scenario.verify.k_levels
    if n < 1:
        raise ValueError("need at least one entropy level")
    return np.linspace(lo, hi, n) if n > 1 else np.asarray([0.5 * (lo + hi)])


def entropy_residual(sol: SpaceTimeSolution, k_levels=None) -> ResidualField:
    """Discrete Kruzhkov residual per cell, step and level, aggregated.

    R = (|u1-k| - |u0-k|)/dt + (Q_{i+1/2} - Q_{i-1/2})/dx
        + sgn(u0-k) (F(x_i+,k) - F(x_i-,k))/dx,
    with Q the numerical entropy flux F(u or k) - F(u and k) (interface edges
    use the coupling flux of the clipped states). The one-sided coefficient
    source term uses the cell's own region, so for extreme k the residual
    telescopes to rounding away from interfaces.
    """
    if k_levels is None:
        k = entropy_levels(sol)
    else:
        k = np.asarray(k_levels, dtype=float).reshape(-1)
        if k.size == 0:
            raise ValueError("need at least one entropy level")
    scen = sol.scenario
    grid, couplings = build_runtime(scen)
    model = scen.model
    dx = grid.dx
    kcol = k[:, None]
    # per-cell one-sided flux values at level k, same arithmetic as the kernels
    quad = model.template.quad
    if quad is not None:
        qa, qb, qc = quad
        src_l = ((grid.cell_w_left * qa) * kcol) * kcol + (grid.cell_w_left * qb) * kcol + (
            grid.cell_w_left * qc
        )
        src_r = ((grid.cell_w_right * qa) * kcol) * kcol + (grid.cell_w_right * qb) * kcol + (
            grid.cell_w_right * qc
        )
    else:
        src_l = grid.cell_w_left * model.template.g(kcol)
        src_r = grid.cell_w_right * model.template.g(kcol)
    src = src_r - src_l  # (K, n)

    adj, off = _interface_masks(grid)
    n_ifaces = len(grid.iface_edges)
    off_max = -np.inf
    pos_mass_k = np.zeros(k.size)
    cell_pos_k = np.zeros((k.size, grid.n))
    iface_series = []
    times = []
    for u0, u1, dt, t0 in _step_stream(sol):
        a, b = edge_states(grid, u0, scen.bc)
        au, bu = np.maximum(a, kcol), np.maximum(b, kcol)
        ad, bd = np.minimum(a, kcol), np.minimum(b, kcol)
        q_up = edge_flux_arrays(grid, au, bu, couplings, scen.scheme)
        q_dn = edge_flux_arrays(grid, ad, bd, couplings, scen.scheme)
        q = q_up - q_dn  # (K, n+1)
        r = (
            (np.abs(u1 - kcol) - np.abs(u0 - kcol)) / dt
            + (q[:, 1:] - q[:, :-1]) / dx
            + np.sign(u0 - kcol) * src / dx
        )
        if np.any(off):
            off_max = max(off_max, float(np.max(r[:, off])))
            pos_mass_k += np.sum(np.maximum(r[:, off], 0.0), axis=1) * dx * dt
        cell_pos_k += np.maximum(r, 0.0) * dx * dt
        if n_ifaces:
            rates = [
                float(np.max(np.sum(r[:, kk - 1 : kk + 1], axis=1) * dx))
                for kk in grid.iface_edges
            ]
            iface_series.append(rates)
        times.append(t0)
    lip = model.lipschitz_M
    tol_off = scen.verify.c_bulk * dx * lip
    off_max = float(off_max) if np.isfinite(off_max) else 0.0
    if n_ifaces:
        iface_mass = np.asarray(iface_series, dtype=float).T
    else:
        iface_mass = np.zeros((0, len(times)))
    return ResidualField(
        k_levels=k,
        times=np.asarray(times),
        off_interface_max=off_max,
        off_interface_pos_mass=float(np.max(pos_mass_k)) if np.any(off) else 0.0,
        interface_mass=iface_mass,
        cell_pos_mass=np.max(cell_pos_k, axis=0),
        tol_off=tol_off,
        dx=dx,
        verdict=off_max <= tol_off,
    )


# -- Kato remainder --------------------------------------------------------


@dataclass
class KatoReport:
    """Discrete Kato divergence of a solution pair, split bulk vs interface."""

    times: np.ndarray
    w_series: np.ndarray  # (n_interfaces, n_steps)
    max_w: np.ndarray  # (n_interfaces,)
    off_interface_max: float
    off_interface_pos_mass: float
    pred_times: np.ndarray
    pred_w: np.ndarray  # (n_interfaces, n_pred), nan when traces unconverged
    max_w_mismatch: np.ndarray  # (n_interfaces,), nan when never converged
    tol_iface: float
    tol_bulk: float
    germs_dissipative: tuple[bool, ...]
    verdict: bool


def _kato_series(u_sol: SpaceTimeSolution, v_sol: SpaceTimeSolution):
    """Per-step Kato divergence split: interface columns and bulk stats."""
    scen = u_sol.scenario
    grid, couplings = build_runtime(scen)
    dx = grid.dx
    adj, off = _interface_masks(grid)
    n_ifaces = len(grid.iface_edges)
    times, dts, series = [], [], []
    off_max = -np.inf
    pos_mass = 0.0
    for (u0, u1, dt, t0), (v0, v1, _, _) in zip(_step_stream(u_sol), _step_stream(v_sol)):
        a_u, b_u = edge_states(grid, u0, scen.bc)
        a_v, b_v = edge_states(grid, v0, scen.bc)
        q_up = edge_flux_arrays(
            grid, np.maximum(a_u, a_v), np.maximum(b_u, b_v), couplings, scen.scheme
        )
        q_dn = edge_flux_arrays(
            grid, np.minimum(a_u, a_v), np.minimum(b_u, b_v), couplings, scen.scheme
        )
        q = q_up - q_dn
        d = (np.abs(u1 - v1) - np.abs(u0 - v0)) / dt + (q[1:] - q[:-1]) / dx
        if np.any(off):
            off_max = max(off_max, float(np.max(d[off])))
            pos_mass += float(np.sum(np.maximum(d[off], 0.0))) * dx * dt
        series.append([float(np.sum(d[kk - 1 : kk + 1]) * dx) for kk in grid.iface_edges])
        times.append(t0)
        dts.append(dt)
    if n_ifaces:
        w = np.asarray(series, dtype=float).T
    else:
        w = np.zeros((0, len(times)))
    off_max = float(off_max) if np.isfinite(off_max) else 0.0
    return np.asarray(times), np.asarray(dts), w, off_max, pos_mass


def kato_remainder(
    u_sol: SpaceTimeSolution,
    v_sol: SpaceTimeSolution,
    model: FluxModel | None = None,
    germs: tuple[GermSpec, ...] | None = None,
) -> KatoReport:
    """Certify the Kato inequality for a solution pair.

    The divergence D = d_t |u - v| + d_x Q(u, v) is summed per step; its
    restriction to the two interface-adjacent columns is the measured
    remainder w_j(t). Where slab traces of both solutions converge, w_j is
    compared against the germ functional W applied to the trace pairs.
    """
    require_paired(u_sol, v_sol)
    scen = u_sol.scenario
    if model is None:
        model = scen.model
    if germs is None:
        germs = tuple(s.germ for s in scen.interfaces)
    grid, _ = build_runtime(scen)
    times, dts, w, off_max, pos_mass = _kato_series(u_sol, v_sol)
    n_ifaces = len(grid.iface_edges)
    lip = model.lipschitz_M
    lo, hi = model.domain
    tol_iface = scen.verify.c_iface * grid.dx * lip
    tol_bulk = scen.verify.c_bulk * grid.dx * (hi - lo) * u_sol.t_end * lip
    # predict w from germ functional on extracted traces, snapshot by snapshot
    sched = u_sol.times[u_sol.schedule_indices()]
    pred_times = []
    pred = [[] for _ in range(n_ifaces)]
    for t_s in sched:
        if t_s <= 0.0:
            continue
        pred_times.append(float(t_s))
        for j in range(n_ifaces):
            tu = extract_traces(u_sol, j, t_window=(float(t_s), float(t_s)))
            tv = extract_traces(v_sol, j, t_window=(float(t_s), float(t_s)))
            if tu.converged and tv.converged:
                pred[j].append(germ_w(tu.limit_pair, tv.limit_pair, j, model))
            else:
                pred[j].append(np.nan)
    pred_w = (
        np.asarray(pred, dtype=float) if n_ifaces else np.zeros((0, len(pred_times)))
    )
    mismatch = np.full(n_ifaces, np.nan)
    for j in range(n_ifaces):
        vals = []
        for t_s, wp in zip(pred_times, pred_w[j]):
            if np.isnan(wp):
                continue
            i = int(np.argmin(np.abs(times - t_s)))
            vals.append(abs(w[j, i] - wp))
        if vals:
            mismatch[j] = max(vals)
    dissip = tuple(bool(is_dissipative(g, j, model)[0]) for j, g in enumerate(germs))
    max_w = np.max(w, axis=1) if w.size else np.zeros(n_ifaces)
    verdict = bool(pos_mass <= tol_bulk and np.all(max_w <= tol_iface))
    return KatoReport(
        times=times,
        w_series=w,
        max_w=max_w,
        off_interface_max=off_max,
        off_interface_pos_mass=pos_mass,
        pred_times=np.asarray(pred_times),
        pred_w=pred_w,
        max_w_mismatch=mismatch,
        tol_iface=tol_iface,
        tol_bulk=tol_bulk,
        germs_dissipative=dissip,
        verdict=verdict,
    )


# -- contraction ledger ----------------------------------------------------


@dataclass
class ContractionLedger:
    """L1 ball-to-ball budget: initial mass plus interface terms vs final mass."""

    center: float
    radius: float
    horizon: float
    speed: float
    lhs: float
    rhs_initial: float
    rhs_interface: float
    slack: float
    tol_ledger: float
    verdict: bool


def _ball_l1(grid, w_field: np.ndarray, c: float, r: float) -> float:
    """Exact integral of |w_field| over [c-r, c+r] on the piecewise grid."""
    left = np.maximum(grid.edges[:-1], c - r)
    right = np.minimum(grid.edges[1:], c + r)
    overlap = np.maximum(right - left, 0.0)
    return float(np.sum(overlap * np.abs(w_field)))


def contraction_ledger(
    u_sol: SpaceTimeSolution,
    v_sol: SpaceTimeSolution,
    radius: float | None = None,
    horizon: float | None = None,
    model: FluxModel | None = None,
    germs: tuple[GermSpec, ...] | None = None,
) -> ContractionLedger:
    """Certify finite-speed L1 contraction up to the interface remainder.

    lhs is the distance over the ball B_R at the horizon; rhs is the initial
    distance over the enlarged ball B_{R+VT} plus the signed time-integrated
    interface remainders inside the cylinder. Dissipative couplings make the
    interface term nonpositive, so slack >= -tol certifies quasi-contraction.
    """
    require_paired(u_sol, v_sol)
    scen = u_sol.scenario
    if model is None:
        model = scen.model
    del germs  # declared germ data is not needed to measure the remainder
    grid, _ = build_runtime(scen)
    lo, hi = model.domain
    v_speed = model.lipschitz_M
    if horizon is None:
        horizon = u_sol.t_end
    i_t = u_sol.index_at_time(min(horizon, u_sol.t_end))
    t_act = float(u_sol.times[i_t])
    ifaces = model.interfaces
    c = 0.5 * (min(ifaces) + max(ifaces)) if ifaces else 0.5 * (lo + hi)
    reach = v_speed * t_act
    if radius is None:
        radius = min(c - lo, hi - c) - reach
        if radius <= 0.0:
            raise DomainError(
                f"no feasible ball: speed {v_speed:g} times horizon {t_act:g} "
                f"exceeds the domain margin"
            )
    if c - radius - reach < lo - 1e-9 or c + radius + reach > hi + 1e-9:
        raise DomainError(
            f"cylinder B_{{R+VT}} = [{c - radius - reach:g}, {c + radius + reach:g}] "
            f"leaves the domain [{lo}, {hi}]"
        )
    j_v = v_sol.index_at_time(t_act)
    lhs = _ball_l1(grid, u_sol.states[i_t] - v_sol.states[j_v], c, radius)
    rhs0 = _ball_l1(grid, u_sol.states[0] - v_sol.states[0], c, radius + reach)
    times, dts, w, _, _ = _kato_series(u_sol, v_sol)
    rhs_j = 0.0
    for j, xj in enumerate(ifaces):
        if abs(xj - c) <= radius + reach + 1e-12:
            m = times < t_act - 1e-12 * max(1.0, t_act)
            rhs_j += float(np.sum(w[j, m] * dts[m]))
    dt0 = float(dts[0]) if len(dts) else 0.0
    tol = scen.verify.c_ledger * model.lipschitz_M * (grid.dx + dt0) * t_act
    slack = rhs0 + rhs_j - lhs
    return ContractionLedger(
        center=c,
        radius=float(radius),
        horizon=t_act,
        speed=v_speed,
        lhs=lhs,
        rhs_initial=rhs0,
        rhs_interface=rhs_j,
        slack=float(slack),
        tol_ledger=float(tol),
        verdict=bool(slack >= -tol),
    )


# -- interface-free comparison ---------------------------------------------


@dataclass
class SobolevReport:
    """Snapshot L1 distances for a pair on a smooth (interface-free) model."""

    times: np.ndarray
    distances: np.ndarray
    tol: float
    monotone_ok: bool
    bounded_ok: bool
    verdict: bool


def sobolev_contraction_check(
    u_sol: SpaceTimeSolution,
    v_sol: SpaceTimeSolution,
    model: FluxModel | None = None,
) -> SobolevReport:
    """L1 distance decay for a pair without interfaces.

    With no interface set, the classical theory gives plain contraction; the
    check asserts the snapshot distances never grow (up to rounding) and end
    below the initial distance plus the discretization allowance.
    """
    require_paired(u_sol, v_sol)
    scen = u_sol.scenario
    if model is None:
        model = scen.model
    if model.interfaces:
        raise DomainError("smooth contraction check requires a model without interfaces")
    grid, _ = build_runtime(scen)
    idx_u = u_sol.schedule_indices()
    idx_v = v_sol.schedule_indices()
    times = u_sol.times[idx_u]
    d = np.sum(np.abs(u_sol.states[idx_u] - v_sol.states[idx_v]), axis=1) * grid.dx
    dt0 = float(u_sol.dts[0]) if len(u_sol.dts) else 0.0
    tol = scen.verify.c_ledger * model.lipschitz_M * (grid.dx + dt0) * u_sol.t_end
    step_slack = 1e-10 * max(1.0, float(d[0]))
    monotone_ok = bool(np.all(np.diff(d) <= step_slack))
    bounded_ok = bool(np.all(d <= d[0] + tol))
    return SobolevReport(
        times=times,
        distances=d,
        tol=float(tol),
        monotone_ok=monotone_ok,
        bounded_ok=bounded_ok,
        verdict=monotone_ok and bounded_ok,
    )
