"""Command line front end.

Subcommands:
  run <scenario.cfg>            march a scenario, save the solution file
  verify <u.sol> <v.sol>        entropy + Kato + contraction certificates
  germ <scenario.cfg>           interface admissibility diagnostics
  traces <solution.sol>         slab-averaged interface traces

Exit status: 0 all checks pass, 1 a verification failed, 2 bad input,
3 the two solutions are not a comparable pair.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .catalog import fmt
from .exceptions import (
    ConvergenceError,
    DomainError,
    EmptyGermError,
    FluxjumpError,
    GridMismatchError,
    ScenarioError,
    SolverError,
    StateError,
)
from .germs import validate_germ
from .model import gnl_check
from .scenario_io import (
    fingerprint,
    load_scenario,
    load_solution,
    out_dir,
    save_solution,
    write_text_atomic,
)
from .solver import run
from .traces import extract_traces
from .verify import (
    contraction_ledger,
    entropy_residual,
    kato_remainder,
    sobolev_contraction_check,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_PAIRING = 0, 1, 2, 3


def _series_block(header: str, times, columns) -> list[str]:
    lines = [f"[{header}]"]
    cols = np.asarray(columns)
    for i, t in enumerate(times):
        vals = " ".join(fmt(c) for c in cols[:, i]) if cols.size else ""
        lines.append(f"{fmt(float(t))} {vals}".rstrip())
    return lines


def _verdict(ok: bool) -> str:
    return "pass" if ok else "fail"


def cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    sol = run(scenario)
    path = out_dir() / f"{scenario.name}-{fingerprint(scenario)}.sol"
    save_solution(sol, path)
    lo, hi = sol.value_range()
    print(f"solution written to {path}")
    print(
        f"cells = {scenario.grid_n}, steps = {len(sol.dts)}, "
        f"dt0 = {fmt(float(sol.dts[0]))}, range = [{fmt(lo)}, {fmt(hi)}]"
    )
    return EXIT_OK


def _entropy_report_text(sol, rf) -> str:
    s = sol.scenario
    lines = [
        "# entropy residual certificate",
        f"scenario = {s.name}",
        f"fingerprint = {fingerprint(s)}",
        f"k_levels = {len(rf.k_levels)}",
        f"dx = {fmt(rf.dx)}",
        f"off_interface_max = {fmt(rf.off_interface_max)}",
        f"off_interface_pos_mass = {fmt(rf.off_interface_pos_mass)}",
        f"tol_off = {fmt(rf.tol_off)}",
        f"verdict = {_verdict(rf.verdict)}",
    ]
    if rf.interface_mass.shape[0]:
        lines += _series_block("interface_mass", rf.times, rf.interface_mass)
    return "\n".join(lines) + "\n"


def _kato_report_text(u_sol, v_sol, kr) -> str:
    lines = [
        "# kato remainder certificate",
        f"u = {u_sol.scenario.name}",
        f"v = {v_sol.scenario.name}",
        f"fingerprint = {fingerprint(u_sol.scenario)}",
        f"tol_iface = {fmt(kr.tol_iface)}",
        f"tol_bulk = {fmt(kr.tol_bulk)}",
        f"off_interface_max = {fmt(kr.off_interface_max)}",
        f"off_interface_pos_mass = {fmt(kr.off_interface_pos_mass)}",
        "max_w = " + "; ".join(fmt(v) for v in kr.max_w),
        "max_w_mismatch = " + "; ".join(fmt(v) for v in kr.max_w_mismatch),
        "germs_dissipative = " + "; ".join(str(bool(b)).lower() for b in kr.germs_dissipative),
        f"verdict = {_verdict(kr.verdict)}",
    ]
    if kr.w_series.shape[0]:
        lines += _series_block("w_series", kr.times, kr.w_series)
        lines += _series_block("predicted_w", kr.pred_times, kr.pred_w)
    return "\n".join(lines) + "\n"


def _ledger_report_text(u_sol, v_sol, lg) -> str:
    return (
        "\n".join(
            [
                "# contraction ledger certificate",
                f"u = {u_sol.scenario.name}",
                f"v = {v_sol.scenario.name}",
                f"fingerprint = {fingerprint(u_sol.scenario)}",
                f"center = {fmt(lg.center)}",
                f"radius = {fmt(lg.radius)}",
                f"horizon = {fmt(lg.horizon)}",
                f"speed = {fmt(lg.speed)}",
                f"lhs = {fmt(lg.lhs)}",
                f"rhs_initial = {fmt(lg.rhs_initial)}",
                f"rhs_interface = {fmt(lg.rhs_interface)}",
                f"slack = {fmt(lg.slack)}",
                f"tol_ledger = {fmt(lg.tol_ledger)}",
                f"verdict = {_verdict(lg.verdict)}",
            ]
        )
        + "\n"
    )


def cmd_verify(args) -> int:
    u_sol = load_solution(args.u)
    v_sol = load_solution(args.v)
    fp_u = fingerprint(u_sol.scenario)
    fp_v = fingerprint(v_sol.scenario)
    if fp_u != fp_v:
        print(
            f"error: solutions are not a pair (fingerprints {fp_u} vs {fp_v})",
            file=sys.stderr,
        )
        return EXIT_PAIRING
    klv = None
    if args.klevels is not None:
        lo, hi = u_sol.scenario.model.u_range
        klv = np.linspace(lo, hi, args.klevels)
    checks: list[tuple[str, bool, str]] = []
    base = out_dir() / f"{u_sol.scenario.name}-vs-{v_sol.scenario.name}-{fp_u}"
    rf_u = entropy_residual(u_sol, klv)
    rf_v = entropy_residual(v_sol, klv)
    write_text_atomic(
        out_dir() / f"{u_sol.scenario.name}-{fp_u}.entropy.txt",
        _entropy_report_text(u_sol, rf_u),
    )
    write_text_atomic(
        out_dir() / f"{v_sol.scenario.name}-{fp_v}.entropy.txt",
        _entropy_report_text(v_sol, rf_v),
    )
    checks.append(("entropy[u]", rf_u.verdict, f"off_interface_max = {fmt(rf_u.off_interface_max)}"))
    checks.append(("entropy[v]", rf_v.verdict, f"off_interface_max = {fmt(rf_v.off_interface_max)}"))
    kr = kato_remainder(u_sol, v_sol)
    write_text_atomic(base.with_suffix(".kato.txt"), _kato_report_text(u_sol, v_sol, kr))
    max_w = float(np.max(kr.max_w)) if kr.max_w.size else 0.0
    checks.append(
        (
            "kato",
            kr.verdict,
            f"max_w = {fmt(max_w)}, off_mass = {fmt(kr.off_interface_pos_mass)}",
        )
    )
    lg = contraction_ledger(u_sol, v_sol, radius=args.radius, horizon=args.horizon)
    write_text_atomic(base.with_suffix(".ledger.txt"), _ledger_report_text(u_sol, v_sol, lg))
    checks.append(("ledger", lg.verdict, f"slack = {fmt(lg.slack)}"))
    if not u_sol.scenario.model.interfaces:
        sb = sobolev_contraction_check(u_sol, v_sol)
        checks.append(
            ("smooth_contraction", sb.verdict, f"final = {fmt(float(sb.distances[-1]))}")
        )
    else:
        sb = None
    summary = [
        "# verification summary",
        f"u = {u_sol.scenario.name}",
        f"v = {v_sol.scenario.name}",
        f"fingerprint = {fp_u}",
        f"cells = {u_sol.scenario.grid_n}",
        f"dx = {fmt(u_sol.grid.dx)}",
        f"t_end = {fmt(u_sol.scenario.t_end)}",
    ]
    for name, ok, detail in checks:
        summary.append(f"{name} = {_verdict(ok)} ({detail})")
    overall = all(ok for _, ok, _ in checks)
    summary.append(f"verdict = {_verdict(overall)}")
    write_text_atomic(base.with_suffix(".verify.txt"), "\n".join(summary) + "\n")
    for name, ok, detail in checks:
        print(f"{name}: {_verdict(ok)} ({detail})")
    print(f"overall: {_verdict(overall)}")
    print(f"reports written to {base.parent}")
    return EXIT_OK if overall else EXIT_FAIL


def cmd_germ(args) -> int:
    scenario = load_scenario(args.scenario)
    model = scenario.model
    if not model.interfaces:
        print("model has no interfaces; nothing to check")
        return EXIT_OK
    all_ok = True
    for j, spec in enumerate(scenario.interfaces):
        rep = validate_germ(spec.germ, j, model)
        ok = rep["dissipative"] and rep["rh_ok"]
        all_ok = all_ok and ok
        print(
            f"interface {j} at x = {fmt(model.interfaces[j])}: kind = {rep['kind']}, "
            f"pairs = {rep['n_pairs']}, max_rh = {fmt(rep['max_rh_residual'])}, "
            f"dissipative = {str(bool(rep['dissipative'])).lower()}, "
            f"worst_w = {fmt(rep['worst_w'])}"
        )
        if not rep["dissipative"] and "witness" in rep:
            (a, b), (c, d) = rep["witness"]
            print(f"  violating pair: ({fmt(a)}, {fmt(b)}) vs ({fmt(c)}, {fmt(d)})")
    gnl = gnl_check(model)
    print(f"nonlinearity scan: {_verdict(gnl.ok)} ({len(gnl.failures)} flat spots)")
    return EXIT_OK if all_ok else EXIT_FAIL


def cmd_traces(args) -> int:
    sol = load_solution(args.solution)
    model = sol.scenario.model
    n_ifaces = len(model.interfaces)
    if n_ifaces == 0:
        print("error: solution has no interfaces", file=sys.stderr)
        return EXIT_INPUT
    which = [args.interface] if args.interface is not None else list(range(n_ifaces))
    window = tuple(args.window) if args.window else None
    print("# interface t1 t2 scale u_minus u_plus converged rh_residual")
    for j in which:
        ts = extract_traces(sol, j, t_window=window)
        fm = model.trace_flux(j, "-")
        fp = model.trace_flux(j, "+")
        for r, p in zip(ts.scales, ts.pairs):
            rh = abs(float(fp(p.plus)) - float(fm(p.minus)))
            print(
                f"{j} {fmt(ts.window[0])} {fmt(ts.window[1])} {r} "
                f"{fmt(p.minus)} {fmt(p.plus)} "
                f"{str(ts.converged).lower()} {fmt(rh)}"
            )
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="fluxjump",
        description="finite-volume solver and verifier for conservation laws "
        "with flux discontinuous across static interfaces",
    )
    sub = p.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("run", help="run a scenario and save the solution")
    pr.add_argument("scenario", help="scenario file (.cfg)")
    pr.set_defaults(func=cmd_run)

    pv = sub.add_parser("verify", help="certify a solution pair")
    pv.add_argument("u", help="first solution file")
    pv.add_argument("v", help="second solution file")
    pv.add_argument("--R", dest="radius", type=float, default=None,
                    help="contraction ball radius")
    pv.add_argument("--T", dest="horizon", type=float, default=None,
                    help="contraction time horizon")
    pv.add_argument("--klevels", type=int, default=None, help="entropy level count")
    pv.set_defaults(func=cmd_verify)

    pg = sub.add_parser("germ", help="check interface admissibility data")
    pg.add_argument("scenario", help="scenario file (.cfg)")
    pg.set_defaults(func=cmd_germ)

    pt = sub.add_parser("traces", help="print slab-averaged interface traces")
    pt.add_argument("solution", help="solution file (.sol)")
    pt.add_argument("--interface", type=int, default=None, help="interface index")
    pt.add_argument(
        "--window", type=float, nargs=2, default=None, metavar=("T1", "T2"),
        help="time window",
    )
    pt.set_defaults(func=cmd_traces)
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, EmptyGermError, StateError, DomainError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GridMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PAIRING if args.command == "verify" else EXIT_INPUT
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except FluxjumpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
