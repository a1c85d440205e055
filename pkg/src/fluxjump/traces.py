"""Interface trace extraction by shrinking-slab averages.

One-sided traces at an interface are estimated by averaging the solution over
slabs of r cells on each side, across a time window, for a decreasing sequence
of r. Agreement of the finest slabs certifies convergence; the finest pair is
the trace estimate. On a first-order scheme the estimate carries an O(dx)
bias, so the convergence tolerance scales with the grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConvergenceError, InterfaceIndexError
from .germs import StatePair
from .model import FluxModel
from .solver import SpaceTimeSolution

DEFAULT_SCALES = (32, 16, 8, 4, 2)
_WINDOW_SNAPSHOTS = 5


def trace_tolerance(sol: SpaceTimeSolution) -> float:
    return max(1e-3, 5.0 * sol.grid.dx * sol.scenario.model.lipschitz_M)


@dataclass(frozen=True)
class TraceSample:
    """Slab-averaged one-sided traces at one interface."""

    interface: int
    window: tuple[float, float]
    scales: tuple[int, ...]
    pairs: tuple[StatePair, ...]
    oscillation: float
    tol: float
    converged: bool
    limit_pair: StatePair | None


def extract_traces(
    sol: SpaceTimeSolution,
    j: int,
    t_window: tuple[float, float] | None = None,
    scales: tuple[int, ...] = DEFAULT_SCALES,
) -> TraceSample:
    """Slab-average trace estimates for interface j over a time window.

    The window defaults to the tail of the snapshot schedule. Only schedule
    rows enter the averages, so a full run and its saved file give identical
    samples.
    """
    grid = sol.grid
    if not 0 <= j < len(grid.iface_edges):
        raise InterfaceIndexError(f"interface index {j} out of range")
    scales = tuple(int(r) for r in scales)
    if not scales or any(r < 1 for r in scales):
        raise ValueError("scales must be positive cell counts")
    if any(a <= b for a, b in zip(scales, scales[1:])):
        raise ValueError("scales must strictly decrease")
    k = grid.iface_edges[j]
    if scales[0] > k or scales[0] > grid.n - k:
        raise ValueError(
            f"scale {scales[0]} does not fit: interface edge {k} on {grid.n} cells"
        )
    idx = sol.schedule_indices()
    times = sol.times[idx]
    if t_window is None:
        t_window = (float(times[max(0, len(times) - _WINDOW_SNAPSHOTS)]), float(times[-1]))
    t1, t2 = float(t_window[0]), float(t_window[1])
    if not t1 <= t2:
        raise ValueError(f"empty trace window ({t1}, {t2})")
    eps = 1e-9 * max(1.0, sol.t_end)
    rows = idx[(times >= t1 - eps) & (times <= t2 + eps)]
    if rows.size == 0:
        raise ValueError(f"trace window ({t1}, {t2}) contains no stored snapshots")
    block = sol.states[rows]
    pairs = []
    for r in scales:
        um = float(np.mean(block[:, k - r : k]))
        up = float(np.mean(block[:, k : k + r]))
        pairs.append(StatePair(um, up))
    tail = pairs[-min(3, len(pairs)) :]
    osc = 0.0
    for ii, p in enumerate(tail):
        for q in tail[ii + 1 :]:
            osc = max(osc, abs(p.minus - q.minus), abs(p.plus - q.plus))
    tol = trace_tolerance(sol)
    converged = osc <= tol
    return TraceSample(
        interface=j,
        window=(t1, t2),
        scales=scales,
        pairs=tuple(pairs),
        oscillation=float(osc),
        tol=tol,
        converged=converged,
        limit_pair=pairs[-1] if converged else None,
    )


def rh_check(ts: TraceSample, model: FluxModel) -> float:
    """|f+(u+) - f-(u-)| for the converged trace pair."""
    if not ts.converged or ts.limit_pair is None:
        raise ConvergenceError(
            f"traces at interface {ts.interface} did not converge "
            f"(oscillation {ts.oscillation:g} > tol {ts.tol:g})"
        )
    f_m = model.trace_flux(ts.interface, "-")
    f_p = model.trace_flux(ts.interface, "+")
    return abs(float(f_p(ts.limit_pair.plus)) - float(f_m(ts.limit_pair.minus)))
