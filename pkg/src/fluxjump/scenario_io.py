"""Scenario and solution files: strict parsing, canonical text, fingerprints.

Scenario files are sectioned key = value text. Parsing is strict: unknown
sections or keys, duplicate scalar keys and malformed values are rejected
with the offending line number. A scenario round-trips losslessly through
its canonical text, and the fingerprint is a content hash of the canonical
[model], [interfaces] and [grid] sections only, so two runs differing just in
initial data or verification knobs pair up for comparison.

Everything written is plain deterministic text: floats use 17 significant
digits (bit-exact round trip), no timestamps, atomic replace on write.
"""

from __future__ import annotations

import hashlib
import os
import tempfile
from pathlib import Path

import numpy as np

from .catalog import coefficient_from_spec, fmt, template_from_spec
from .exceptions import ScenarioError
from .germs import germ_from_spec
from .model import FluxModel, Region
from .solver import (
    InitialData,
    InterfaceSpec,
    Scenario,
    SpaceTimeSolution,
    VerifyParams,
    build_runtime,
)

_SCHEMA = {
    "model": {"template": False, "u_range": False, "region": True},
    "interfaces": {"interface": True},
    "grid": {
        "cells": False,
        "cfl": False,
        "t_end": False,
        "snapshots": False,
        "scheme": False,
        "boundary": False,
    },
    "initial": {"data": False},
    "verify": {
        "k_levels": False,
        "radius": False,
        "horizon": False,
        "c_iface": False,
        "c_bulk": False,
        "c_ledger": False,
    },
}


def _parse_sections(text: str) -> dict[str, list[tuple[int, str, str]]]:
    """Map section -> [(line_no, key, value)] with strict schema checking."""
    sections: dict[str, list[tuple[int, str, str]]] = {}
    current: str | None = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in _SCHEMA:
                raise ScenarioError(f"unknown section [{name}]", line=no)
            if name in sections:
                raise ScenarioError(f"duplicate section [{name}]", line=no)
            sections[name] = []
            current = name
            continue
        if current is None:
            raise ScenarioError("content before any [section] header", line=no)
        key, sep, value = line.partition("=")
        if not sep:
            raise ScenarioError(f"expected key = value, got {line!r}", line=no)
        key = key.strip()
        value = value.strip()
        schema = _SCHEMA[current]
        if key not in schema:
            raise ScenarioError(f"unknown key {key!r} in [{current}]", line=no)
        if not schema[key] and any(k == key for _, k, _ in sections[current]):
            raise ScenarioError(f"duplicate key {key!r} in [{current}]", line=no)
        sections[current].append((no, key, value))
    return sections


def _get(entries, key):
    for no, k, v in entries:
        if k == key:
            return no, v
    return None, None


def _floats(value: str, n: int, what: str, no: int) -> list[float]:
    try:
        vals = [float(t) for t in value.split(",")]
    except ValueError:
        raise ScenarioError(f"bad {what}: {value!r}", line=no) from None
    if len(vals) != n:
        raise ScenarioError(f"{what} needs {n} comma-separated numbers", line=no)
    return vals


def parse_scenario_text(text: str, name: str) -> Scenario:
    sections = _parse_sections(text)
    for required in ("model", "grid", "initial"):
        if required not in sections:
            raise ScenarioError(f"missing [{required}] section")
    mdl = sections["model"]
    no, tspec = _get(mdl, "template")
    if tspec is None:
        raise ScenarioError("missing template in [model]")
    try:
        template = template_from_spec(tspec)
    except ValueError as exc:
        raise ScenarioError(str(exc), line=no) from None
    regions = []
    for no, key, value in mdl:
        if key != "region":
            continue
        parts = value.split(",", 2)
        if len(parts) != 3:
            raise ScenarioError("region needs xl, xr, coefficient", line=no)
        try:
            xl, xr = float(parts[0]), float(parts[1])
            coeff = coefficient_from_spec(parts[2])
        except ValueError as exc:
            raise ScenarioError(str(exc), line=no) from None
        try:
            regions.append(Region(xl, xr, coeff))
        except Exception as exc:
            raise ScenarioError(str(exc), line=no) from None
    if not regions:
        raise ScenarioError("[model] needs at least one region")

    no, ini = _get(sections["initial"], "data")
    if ini is None:
        raise ScenarioError("missing data in [initial]")
    try:
        initial = InitialData(ini)
    except ScenarioError as exc:
        raise ScenarioError(str(exc), line=no) from None

    grd = sections["grid"]
    values = {}
    for field, conv, required in (
        ("cells", int, True),
        ("cfl", float, True),
        ("t_end", float, True),
        ("snapshots", int, False),
        ("scheme", str, False),
        ("boundary", str, False),
    ):
        no, v = _get(grd, field)
        if v is None:
            if required:
                raise ScenarioError(f"missing {field} in [grid]")
            continue
        try:
            values[field] = conv(v)
        except ValueError:
            raise ScenarioError(f"bad {field}: {v!r}", line=no) from None

    no_r, ur = _get(mdl, "u_range")
    if ur is not None:
        u_range = tuple(_floats(ur, 2, "u_range", no_r))
    else:
        # default: the initial data's range on the run grid, with a margin
        lo, hi = regions[0].xl, regions[-1].xr
        n = values["cells"]
        dx = (hi - lo) / n
        probe = initial.sample(lo + dx * (np.arange(n) + 0.5), dx)
        u_range = (float(np.min(probe)) - 0.1, float(np.max(probe)) + 0.1)
    try:
        model = FluxModel(template, tuple(regions), u_range)
    except Exception as exc:
        raise ScenarioError(str(exc)) from None

    ispecs = []
    entries = sections.get("interfaces", [])
    positions = []
    for no, key, value in entries:
        parts = value.split(",", 2)
        if len(parts) != 3:
            raise ScenarioError("interface needs position, coupling, germ", line=no)
        try:
            pos = float(parts[0])
        except ValueError:
            raise ScenarioError(f"bad interface position {parts[0]!r}", line=no) from None
        try:
            germ = germ_from_spec(parts[2])
        except Exception as exc:
            raise ScenarioError(str(exc), line=no) from None
        positions.append((no, pos))
        ispecs.append(InterfaceSpec(parts[1].strip(), germ))
    if len(ispecs) != len(model.interfaces):
        raise ScenarioError(
            f"model has {len(model.interfaces)} interfaces, "
            f"[interfaces] lists {len(ispecs)}"
        )
    for (no, pos), xj in zip(positions, model.interfaces):
        if pos != xj:
            raise ScenarioError(
                f"interface position {pos} does not match the region junction {xj}",
                line=no,
            )

    vkw = {}
    for field, conv in (
        ("k_levels", int),
        ("radius", float),
        ("horizon", float),
        ("c_iface", float),
        ("c_bulk", float),
        ("c_ledger", float),
    ):
        no, v = _get(sections.get("verify", []), field)
        if v is None:
            continue
        try:
            vkw[field] = conv(v)
        except ValueError:
            raise ScenarioError(f"bad {field}: {v!r}", line=no) from None

    try:
        return Scenario(
            name=name,
            model=model,
            interfaces=tuple(ispecs),
            initial=initial,
            grid_n=values["cells"],
            cfl=values["cfl"],
            t_end=values["t_end"],
            scheme=values.get("scheme", "godunov"),
            bc=values.get("boundary", "outflow"),
            snapshots=values.get("snapshots", 64),
            verify=VerifyParams(**vkw),
        )
    except ScenarioError:
        raise
    except Exception as exc:
        raise ScenarioError(str(exc)) from None


def load_scenario(path: str | os.PathLike) -> Scenario:
    p = Path(path)
    return parse_scenario_text(p.read_text(), p.stem)


def _core_text(s: Scenario) -> str:
    lines = ["[model]", f"template = {s.model.template.spec()}"]
    lo, hi = s.model.u_range
    lines.append(f"u_range = {fmt(lo)}, {fmt(hi)}")
    for r in s.model.regions:
        lines.append(f"region = {fmt(r.xl)}, {fmt(r.xr)}, {r.coefficient.spec()}")
    if s.interfaces:
        lines.append("[interfaces]")
        for xj, spec in zip(s.model.interfaces, s.interfaces):
            lines.append(f"interface = {fmt(xj)}, {spec.coupling}, {spec.germ.spec()}")
    lines += [
        "[grid]",
        f"cells = {s.grid_n}",
        f"cfl = {fmt(s.cfl)}",
        f"t_end = {fmt(s.t_end)}",
        f"snapshots = {s.snapshots}",
        f"scheme = {s.scheme}",
        f"boundary = {s.bc}",
    ]
    return "\n".join(lines)


def scenario_to_text(s: Scenario) -> str:
    lines = [_core_text(s), "[initial]", f"data = {s.initial.spec}", "[verify]"]
    v = s.verify
    lines.append(f"k_levels = {v.k_levels}")
    if v.radius is not None:
        lines.append(f"radius = {fmt(v.radius)}")
    if v.horizon is not None:
        lines.append(f"horizon = {fmt(v.horizon)}")
    lines.append(f"c_iface = {fmt(v.c_iface)}")
    lines.append(f"c_bulk = {fmt(v.c_bulk)}")
    lines.append(f"c_ledger = {fmt(v.c_ledger)}")
    return "\n".join(lines) + "\n"


def fingerprint(s: Scenario) -> str:
    """Content hash of the pairing-relevant sections (model, interfaces, grid)."""
    return hashlib.sha256(_core_text(s).encode()).hexdigest()[:16]


def write_text_atomic(path: str | os.PathLike, text: str) -> None:
    p = Path(path)
    fd, tmp = tempfile.mkstemp(dir=p.parent or Path("."), prefix=p.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, p)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_scenario(s: Scenario, path: str | os.PathLike) -> None:
    write_text_atomic(path, scenario_to_text(s))


def out_dir() -> Path:
    return Path(os.environ.get("FLUXJUMP_OUT", "."))


def _rle_encode(values: np.ndarray) -> str:
    parts = []
    run_val = None
    run_len = 0
    for v in values:
        s = fmt(float(v))
        if s == run_val:
            run_len += 1
        else:
            if run_val is not None:
                parts.append(f"{run_len}*{run_val}")
            run_val, run_len = s, 1
    if run_val is not None:
        parts.append(f"{run_len}*{run_val}")
    return ";".join(parts)


def _rle_decode(text: str) -> np.ndarray:
    out: list[float] = []
    for part in text.split(";"):
        if not part:
            continue
        count, _, val = part.partition("*")
        out.extend([float(val)] * int(count))
    return np.asarray(out)


def solution_text(sol: SpaceTimeSolution) -> str:
    s = sol.scenario
    idx = sol.schedule_indices()
    if sol.step_indices is not None:
        steps = sol.step_indices[idx]
    else:
        steps = idx  # step-resolved: row index equals step index
    lines = [
        "# fluxjump solution format 1",
        "[meta]",
        f"name = {s.name}",
        f"fingerprint = {fingerprint(s)}",
        f"dx = {fmt(sol.grid.dx)}",
        f"steps = {len(sol.dts)}",
        f"dts = {_rle_encode(sol.dts)}",
        "[scenario]",
        scenario_to_text(s).rstrip("\n"),
        "[data]",
    ]
    for row, st in zip(idx, steps):
        vals = " ".join(fmt(v) for v in sol.states[row])
        lines.append(f"{int(st)} {fmt(float(sol.times[row]))} {vals}")
    return "\n".join(lines) + "\n"


def save_solution(sol: SpaceTimeSolution, path: str | os.PathLike) -> None:
    write_text_atomic(path, solution_text(sol))


def load_solution(path: str | os.PathLike) -> SpaceTimeSolution:
    text = Path(path).read_text()
    lines = text.splitlines()
    meta: dict[str, str] = {}
    scen_lines: list[str] = []
    data_rows: list[str] = []
    mode = None
    for line in lines:
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped == "[meta]":
            mode = "meta"
            continue
        if stripped == "[scenario]":
            mode = "scenario"
            continue
        if stripped == "[data]":
            mode = "data"
            continue
        if mode == "meta":
            k, _, v = stripped.partition("=")
            meta[k.strip()] = v.strip()
        elif mode == "scenario":
            scen_lines.append(line)
        elif mode == "data":
            data_rows.append(stripped)
        else:
            raise ScenarioError(f"unexpected content in solution file: {stripped!r}")
    if mode != "data" or not data_rows:
        raise ScenarioError("solution file has no [data] rows")
    scenario = parse_scenario_text("\n".join(scen_lines), meta.get("name", Path(path).stem))
    for key in ("dts", "steps"):
        if key not in meta:
            raise ScenarioError(f"solution file missing {key} in [meta]")
    dts = _rle_decode(meta["dts"])
    if len(dts) != int(meta["steps"]):
        raise ScenarioError("solution dt history does not match declared step count")
    steps, times, states = [], [], []
    for row in data_rows:
        parts = row.split()
        steps.append(int(parts[0]))
        times.append(float(parts[1]))
        states.append([float(v) for v in parts[2:]])
    states_arr = np.asarray(states)
    if states_arr.shape[1] != scenario.grid_n:
        raise ScenarioError(
            f"solution rows have {states_arr.shape[1]} cells, grid has {scenario.grid_n}"
        )
    if steps[0] != 0:
        raise ScenarioError("solution file must store the initial state (step 0)")
    grid, couplings = build_runtime(scenario)
    return SpaceTimeSolution(
        scenario=scenario,
        grid=grid,
        times=np.asarray(times),
        states=states_arr,
        dts=dts,
        couplings=couplings,
        step_resolved=False,
        step_indices=np.asarray(steps, dtype=int),
        source=str(path),
    )
