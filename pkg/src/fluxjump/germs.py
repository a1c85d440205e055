"""Interface admissibility data: trace pairs, dissipation functional, germs.

A germ at an interface is a set of admissible trace pairs (u-, u+). The
dissipation functional W compares two pairs; a germ is dissipative when
W <= 0 on all ordered pairs of members, which is what the contraction
verifier ultimately certifies against.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .catalog import SectionFlux, fmt
from .exceptions import EmptyGermError, GermError
from .model import FluxModel


class StatePair(NamedTuple):
    """One-sided interface traces (u-, u+)."""

    minus: float
    plus: float


def _sgn(x: float) -> float:
    if x > 0.0:
        return 1.0
    if x < 0.0:
        return -1.0
    return 0.0


def _rh_residual(pair: StatePair, fm: SectionFlux, fp: SectionFlux) -> float:
    return float(fp(pair.plus)) - float(fm(pair.minus))


def _germ_w(p_u: StatePair, p_v: StatePair, fm: SectionFlux, fp: SectionFlux) -> float:
    """Kato-type interface dissipation between two trace pairs.

    W = sgn(u+ - v+) [f+(u+) - f+(v+)] - sgn(u- - v-) [f-(u-) - f-(v-)];
    exactly symmetric under swapping the pairs, zero on the diagonal.
    """
    tp = _sgn(p_u.plus - p_v.plus) * (float(fp(p_u.plus)) - float(fp(p_v.plus)))
    tm = _sgn(p_u.minus - p_v.minus) * (float(fm(p_u.minus)) - float(fm(p_v.minus)))
    return tp - tm


def _reach(h: np.ndarray, u0: float, grid: np.ndarray, zero_tol: float):
    """Index interval reachable from u0 along the phase line u' = h(u).

    The orbit moves up while h > 0 and down while h < 0; points with
    |h| <= zero_tol are rest points and are reached inclusively (germ
    closure). Passing -h gives the backward reach.
    """
    lo = int(np.searchsorted(grid, u0, side="left")) - 1
    hi = int(np.searchsorted(grid, u0, side="right"))
    top = hi - 1
    while hi < grid.size:
        v = h[hi]
        if v > zero_tol:
            top = hi
            hi += 1
        else:
            if v >= -zero_tol:
                top = hi
            break
    bot = lo + 1
    while lo >= 0:
        v = h[lo]
        if v < -zero_tol:
            bot = lo
            lo -= 1
        else:
            if v <= zero_tol:
                bot = lo
            break
    return bot, top


def _vv_membership(
    pair: StatePair,
    fm: SectionFlux,
    fp: SectionFlux,
    u_range: tuple[float, float],
    n: int = 1024,
    zero_tol: float = 1e-12,
    rh_tolerance: float = 1e-10,
) -> bool:
    if abs(_rh_residual(pair, fm, fp)) > rh_tolerance:
        return False
    lo, hi = u_range
    if not (lo <= pair.minus <= hi and lo <= pair.plus <= hi):
        return False
    grid = np.linspace(lo, hi, n)
    s = float(fm(pair.minus))
    # profile runs from u- on the left flux toward u+ on the right flux:
    # forward reach from u- under f-, backward reach from u+ under f+
    # (reversed flow, hence the sign flip).
    mb, mt = _reach(np.asarray(fm(grid), dtype=float) - s, pair.minus, grid, zero_tol)
    pb, pt = _reach(s - np.asarray(fp(grid), dtype=float), pair.plus, grid, zero_tol)
    if mt < pb or pt < mb:
        # allow half-grid slack: endpoints falling between nodes
        gap = min(abs(pb - mt), abs(mb - pt))
        return gap <= 1
    return True


def _sample_vv(
    fm: SectionFlux,
    fp: SectionFlux,
    u_range: tuple[float, float],
    n_minus: int = 33,
    grid_n: int = 1024,
) -> tuple[StatePair, ...]:
    """Candidate vanishing-viscosity germ members on an n_minus grid of u-.

    For each u-, the Rankine-Hugoniot constraint f+(u+) = f-(u-) is solved on
    every monotone branch of f+ and each root is kept iff the viscous-profile
    test accepts the pair.
    """
    lo, hi = u_range
    out: list[StatePair] = []
    for um in np.linspace(lo, hi, n_minus):
        q = float(fm(um))
        knots = sorted({lo, hi, *(c for c in fp.template.crit if lo < c < hi)})
        roots: list[float] = []
        for a, b in zip(knots, knots[1:]):
            fa, fb = float(fp(a)) - q, float(fp(b)) - q
            if fa == 0.0:
                roots.append(a)
            if fb == 0.0:
                roots.append(b)
            if fa * fb < 0.0:
                roots.append(fp.solve_on_branch(q, a, b))
        uniq: list[float] = []
        for r in roots:
            if not any(abs(r - u) <= 1e-9 for u in uniq):
                uniq.append(r)
        for up in uniq:
            pair = StatePair(float(um), float(up))
            if _vv_membership(pair, fm, fp, u_range, n=grid_n):
                out.append(pair)
    return tuple(out)


def _is_dissipative_pairs(
    pairs, fm: SectionFlux, fp: SectionFlux, tol: float = 1e-12
) -> tuple[bool, float, tuple[StatePair, StatePair] | None]:
    worst = -np.inf
    arg = None
    for i, p in enumerate(pairs):
        for q in pairs[i + 1 :]:
            w = _germ_w(p, q, fm, fp)
            if w > worst:
                worst, arg = w, (p, q)
    if arg is None:
        return True, 0.0, None
    return worst <= tol, float(worst), arg


_KINDS = ("vanishing_viscosity", "sampled_set", "identity_coupling")


@dataclass(frozen=True)
class GermSpec:
    """Declared admissibility set for one interface.

    kind 'vanishing_viscosity': membership via viscous profiles, lazily.
    kind 'sampled_set': the explicit finite set `pairs`.
    kind 'identity_coupling': the diagonal {(u, u)}; needs a continuous flux.
    """

    kind: str
    pairs: tuple[StatePair, ...] = field(default=())
    rh_tolerance: float = 1e-10

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise GermError(f"unknown germ kind {self.kind!r}")
        if self.kind == "sampled_set" and not self.pairs:
            raise EmptyGermError("sampled_set germ has no pairs")
        object.__setattr__(self, "pairs", tuple(StatePair(*p) for p in self.pairs))

    def spec(self) -> str:
        if self.kind != "sampled_set":
            return self.kind
        body = ";".join(f"{fmt(p.minus)},{fmt(p.plus)}" for p in self.pairs)
        return f"sampled_set:{body}"

    def member(self, pair: StatePair, fm: SectionFlux, fp: SectionFlux, u_range) -> bool:
        pair = StatePair(*pair)
        if self.kind == "identity_coupling":
            return abs(pair.plus - pair.minus) <= 1e-12 and abs(
                _rh_residual(pair, fm, fp)
            ) <= self.rh_tolerance
        if self.kind == "sampled_set":
            return any(
                abs(p.minus - pair.minus) <= 1e-12 and abs(p.plus - pair.plus) <= 1e-12
                for p in self.pairs
            )
        return _vv_membership(pair, fm, fp, u_range, rh_tolerance=self.rh_tolerance)


def germ_from_spec(s: str) -> GermSpec:
    s = s.strip()
    if s in ("vanishing_viscosity", "identity_coupling"):
        return GermSpec(s)
    if s.startswith("sampled_set:"):
        pairs = []
        for part in s[len("sampled_set:") :].split(";"):
            part = part.strip()
            if not part:
                continue
            try:
                a, b = (float(t) for t in part.split(","))
            except ValueError:
                raise GermError(f"bad germ pair {part!r}") from None
            pairs.append(StatePair(a, b))
        return GermSpec("sampled_set", tuple(pairs))
    raise GermError(f"unknown germ spec {s!r}")


# -- interface-indexed operations ------------------------------------------


def _sides(model: FluxModel, j: int) -> tuple[SectionFlux, SectionFlux]:
    return model.trace_flux(j, "-"), model.trace_flux(j, "+")


def rankine_hugoniot_residual(pair: StatePair, j: int, model: FluxModel) -> float:
    """f+(u+) - f-(u-) for a trace pair at interface j (zero for a static jump)."""
    fm, fp = _sides(model, j)
    return _rh_residual(StatePair(*pair), fm, fp)


def germ_w(p_u: StatePair, p_v: StatePair, j: int, model: FluxModel) -> float:
    fm, fp = _sides(model, j)
    return _germ_w(StatePair(*p_u), StatePair(*p_v), fm, fp)


def vv_membership(
    pair: StatePair,
    j: int,
    model: FluxModel,
    n: int = 1024,
    zero_tol: float = 1e-12,
    rh_tolerance: float = 1e-10,
) -> bool:
    """Viscous-profile admissibility of a trace pair at interface j.

    Accepts iff the pair satisfies Rankine-Hugoniot and a monotone profile
    connects u- to u+ through the jump: the forward reach of u- on the left
    phase line meets the backward reach of u+ on the right one.
    """
    fm, fp = _sides(model, j)
    return _vv_membership(
        StatePair(*pair), fm, fp, model.u_range, n=n, zero_tol=zero_tol, rh_tolerance=rh_tolerance
    )


def sample_vv_germ(
    j: int, model: FluxModel, n_minus: int = 33, grid_n: int = 1024
) -> tuple[StatePair, ...]:
    fm, fp = _sides(model, j)
    return _sample_vv(fm, fp, model.u_range, n_minus=n_minus, grid_n=grid_n)


def is_dissipative(
    germ: GermSpec, j: int, model: FluxModel, tol: float = 1e-12
) -> tuple[bool, float, tuple[StatePair, StatePair] | None]:
    """Check W <= tol over all member pairs of a germ at interface j.

    A vanishing_viscosity germ is represented by its sampled member set and an
    identity_coupling germ by a diagonal sample; sampled_set germs are checked
    exactly. Returns (verdict, worst W, witness pair of pairs).
    """
    fm, fp = _sides(model, j)
    if germ.kind == "sampled_set":
        pairs = germ.pairs
    elif germ.kind == "vanishing_viscosity":
        pairs = _sample_vv(fm, fp, model.u_range, n_minus=64)
    else:
        lo, hi = model.u_range
        pairs = tuple(StatePair(float(u), float(u)) for u in np.linspace(lo, hi, 64))
    if not pairs:
        raise EmptyGermError(f"germ at interface {j} has no members to check")
    return _is_dissipative_pairs(pairs, fm, fp, tol=tol)


def validate_germ(germ: GermSpec, j: int, model: FluxModel) -> dict:
    """Diagnostics for one interface germ: RH residuals and dissipativity."""
    fm, fp = _sides(model, j)
    report: dict = {"interface": j, "kind": germ.kind}
    if germ.kind == "sampled_set":
        res = [abs(_rh_residual(p, fm, fp)) for p in germ.pairs]
        report["n_pairs"] = len(germ.pairs)
        report["max_rh_residual"] = max(res)
        report["rh_ok"] = max(res) <= germ.rh_tolerance
    elif germ.kind == "vanishing_viscosity":
        pairs = _sample_vv(fm, fp, model.u_range, n_minus=64)
        report["n_pairs"] = len(pairs)
        report["max_rh_residual"] = max(
            (abs(_rh_residual(p, fm, fp)) for p in pairs), default=0.0
        )
        report["rh_ok"] = True
    else:
        report["n_pairs"] = 0
        report["max_rh_residual"] = abs(model.interface_jump(j)) * model.template.max_abs_g(
            *model.u_range
        )
        report["rh_ok"] = report["max_rh_residual"] <= germ.rh_tolerance
    ok, worst, witness = is_dissipative(germ, j, model)
    report["dissipative"] = ok
    report["worst_w"] = worst
    if witness is not None:
        report["witness"] = [list(witness[0]), list(witness[1])]
    return report
