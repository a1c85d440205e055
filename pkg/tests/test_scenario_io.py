"""Strict scenario parsing, canonical round trips, fingerprints, solution files."""

import dataclasses
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fluxjump import (
    ScenarioError,
    fingerprint,
    load_scenario,
    load_solution,
    parse_scenario_text,
    run,
    save_solution,
    scenario_to_text,
    solution_text,
    write_scenario,
)
from fluxjump.scenario_io import _rle_decode, _rle_encode, out_dir, write_text_atomic

MINIMAL = """\
[model]
template = burgers
region = -1, 1, constant:1
[grid]
cells = 64
cfl = 0.45
t_end = 0.1
[initial]
data = riemann:0,1
"""

# explicit u_range so the fingerprint does not depend on the initial-data probe
EXPLICIT = MINIMAL.replace(
    "template = burgers\n", "template = burgers\nu_range = -1, 2\n"
)


def test_minimal_parse_defaults():
    s = parse_scenario_text(MINIMAL, "mini")
    assert s.name == "mini"
    assert (s.grid_n, s.cfl, s.t_end) == (64, 0.45, 0.1)
    assert (s.scheme, s.bc, s.snapshots) == ("godunov", "outflow", 64)
    assert s.interfaces == ()
    assert s.verify.k_levels == 17
    assert (s.verify.c_iface, s.verify.c_bulk, s.verify.c_ledger) == (10.0, 20.0, 50.0)
    assert s.verify.radius is None and s.verify.horizon is None


def test_default_u_range_probes_initial_data():
    s = parse_scenario_text(MINIMAL, "mini")
    assert s.model.u_range == (-0.1, 1.1)


def test_canonical_text_is_a_fixed_point():
    s = parse_scenario_text(MINIMAL, "mini")
    text = scenario_to_text(s)
    s2 = parse_scenario_text(text, "mini")
    assert s2 == s
    assert scenario_to_text(s2) == text


def test_shipped_scenarios_round_trip(scenario_dir):
    paths = sorted(scenario_dir.glob("*.cfg"))
    assert len(paths) == 12
    for p in paths:
        s = load_scenario(p)
        s2 = parse_scenario_text(scenario_to_text(s), s.name)
        assert s2 == s
        assert scenario_to_text(s2) == scenario_to_text(s)
        assert fingerprint(s2) == fingerprint(s)


def test_shipped_pairs_share_fingerprints(scenario_dir):
    expected = {
        ("burgers_shock", "burgers_zero"): "82d7428281814b85",
        ("lwr_riemann_u", "lwr_riemann_v"): "921e0601daa67bbc",
        ("burgers_adversarial_u", "burgers_adversarial_v"): "4182b7ae03830ae3",
        ("lwr_smooth_u", "lwr_smooth_v"): "e39931ba8ef8f2bd",
    }
    for (a, b), fp in expected.items():
        sa = load_scenario(scenario_dir / f"{a}.cfg")
        sb = load_scenario(scenario_dir / f"{b}.cfg")
        assert fingerprint(sa) == fingerprint(sb) == fp


def test_fingerprint_ignores_initial_and_verify():
    base = parse_scenario_text(EXPLICIT, "a")
    other = parse_scenario_text(EXPLICIT.replace("riemann:0,1", "constant:0.25"), "b")
    knobs = parse_scenario_text(EXPLICIT + "[verify]\nk_levels = 9\n", "c")
    assert fingerprint(other) == fingerprint(base)
    assert fingerprint(knobs) == fingerprint(base)


def test_fingerprint_tracks_the_grid():
    base = parse_scenario_text(EXPLICIT, "a")
    finer = parse_scenario_text(EXPLICIT.replace("cells = 64", "cells = 128"), "a")
    assert fingerprint(finer) != fingerprint(base)


_MODEL = "[model]\ntemplate = burgers\nregion = -1, 1, constant:1\n"
_GRID = "[grid]\ncells = 64\ncfl = 0.45\nt_end = 0.1\n"
_INITIAL = "[initial]\ndata = constant:0\n"
_LWR2 = (
    "[model]\ntemplate = lwr\nu_range = 0, 1\n"
    "region = -1, 0, constant:1\nregion = 0, 1, constant:2\n"
)

BAD_CASES = [
    ("[nope]\n", "unknown section [nope]", 1),
    ("x = 1\n", "content before any [section] header", 1),
    ("[model]\ntemplate burgers\n", "expected key = value", 2),
    ("[model]\nwidth = 3\n", "unknown key 'width' in [model]", 2),
    ("[model]\ntemplate = burgers\ntemplate = lwr\n", "duplicate key 'template'", 3),
    ("[model]\n[model]\n", "duplicate section [model]", 2),
    (_GRID + _INITIAL, "missing [model] section", None),
    (_MODEL + _INITIAL, "missing [grid] section", None),
    (_MODEL + _GRID, "missing [initial] section", None),
    (
        "[model]\nregion = -1, 1, constant:1\n" + _GRID + _INITIAL,
        "missing template in [model]",
        None,
    ),
    ("[model]\ntemplate = burgers\n" + _GRID + _INITIAL, "at least one region", None),
    (
        "[model]\ntemplate = burgers\nregion = -1, 1\n" + _GRID + _INITIAL,
        "region needs xl, xr, coefficient",
        3,
    ),
    ("[model]\ntemplate = burgers\nregion = -1, 1, constant:x\n" + _GRID + _INITIAL, None, 3),
    (
        "[model]\ntemplate = burgers\nu_range = 1\nregion = -1, 1, constant:1\n"
        + _GRID
        + _INITIAL,
        "u_range needs 2 comma-separated numbers",
        3,
    ),
    (
        "[model]\ntemplate = burgers\nregion = -1, 0, constant:1\n"
        "region = 0.5, 1, constant:1\n" + _GRID + _INITIAL,
        None,
        None,
    ),
    (_MODEL + "[grid]\ncfl = 0.45\nt_end = 0.1\n" + _INITIAL, "missing cells in [grid]", None),
    (_MODEL + _GRID + "[initial]\n", "missing data in [initial]", None),
    (_MODEL + "[grid]\ncells = 64\ncfl = fast\nt_end = 0.1\n" + _INITIAL, "bad cfl: 'fast'", 6),
    (_MODEL + _GRID.replace("cfl = 0.45", "cfl = 1.5") + _INITIAL, "cfl out of (0,1)", None),
    (_LWR2 + _GRID + "[initial]\ndata = constant:0.3\n", "[interfaces] lists 0", None),
    (
        _LWR2
        + "[interfaces]\ninterface = 0.25, vv_demand_supply, vanishing_viscosity\n"
        + _GRID
        + "[initial]\ndata = constant:0.3\n",
        "does not match the region junction",
        7,
    ),
    (
        _LWR2 + "[interfaces]\ninterface = 0, identity\n" + _GRID + _INITIAL,
        "interface needs position, coupling, germ",
        7,
    ),
    (
        _LWR2
        + "[interfaces]\ninterface = zero, identity, identity_coupling\n"
        + _GRID
        + _INITIAL,
        "bad interface position",
        7,
    ),
    (
        _LWR2 + "[interfaces]\ninterface = 0, vv_demand_supply, viscous\n" + _GRID + _INITIAL,
        None,
        7,
    ),
]


@pytest.mark.parametrize("text,needle,line", BAD_CASES)
def test_parse_rejects_bad_input(text, needle, line):
    with pytest.raises(ScenarioError) as ei:
        parse_scenario_text(text, "bad")
    if needle is not None:
        assert needle in str(ei.value)
    assert ei.value.line == line
    if line is not None:
        assert str(ei.value).startswith(f"line {line}: ")


def test_rle_encoding_frozen():
    assert _rle_encode(np.array([1.0, 1.0, 2.0])) == "2*1;1*2"
    assert _rle_encode(np.array([])) == ""
    assert _rle_decode("").shape == (0,)


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64), max_size=50))
def test_rle_round_trip_is_bitwise(vals):
    arr = np.asarray(vals, dtype=float)
    out = _rle_decode(_rle_encode(arr))
    assert out.shape == arr.shape
    assert out.tobytes() == arr.tobytes()


@given(st.lists(st.sampled_from([0.0, -0.0, 0.1, 1.0, 2.5e-3]), max_size=60))
def test_rle_round_trip_with_runs(vals):
    arr = np.asarray(vals, dtype=float)
    out = _rle_decode(_rle_encode(arr))
    assert out.tobytes() == arr.tobytes()


@pytest.fixture(scope="module")
def mini_run(tmp_path_factory):
    s = parse_scenario_text(MINIMAL, "mini")
    sol = run(s)
    path = tmp_path_factory.mktemp("sol") / "mini.sol"
    save_solution(sol, path)
    return s, sol, path


def test_solution_file_round_trip(mini_run):
    s, sol, path = mini_run
    loaded = load_solution(path)
    assert loaded.scenario == s
    idx = sol.schedule_indices()
    assert loaded.states.tobytes() == sol.states[idx].tobytes()
    assert loaded.times.tobytes() == sol.times[idx].tobytes()
    assert loaded.dts.tobytes() == sol.dts.tobytes()
    assert loaded.step_resolved is False
    assert loaded.step_indices[0] == 0
    assert loaded.step_indices[-1] == len(loaded.dts)
    assert loaded.source == str(path)


def test_solution_text_idempotent_through_load(mini_run):
    _, _, path = mini_run
    loaded = load_solution(path)
    assert solution_text(loaded) == path.read_text()


def _mutated(path, tmp_path, fn):
    lines = path.read_text().splitlines()
    out = tmp_path / "tampered.sol"
    out.write_text("\n".join(fn(lines)) + "\n")
    return out


def test_load_rejects_empty_data(mini_run, tmp_path):
    _, _, path = mini_run
    bad = _mutated(path, tmp_path, lambda ls: ls[: ls.index("[data]") + 1])
    with pytest.raises(ScenarioError, match=r"no \[data\] rows"):
        load_solution(bad)


def test_load_rejects_missing_dts(mini_run, tmp_path):
    _, _, path = mini_run
    bad = _mutated(path, tmp_path, lambda ls: [l for l in ls if not l.startswith("dts =")])
    with pytest.raises(ScenarioError, match="missing dts"):
        load_solution(bad)


def test_load_rejects_wrong_step_count(mini_run, tmp_path):
    _, sol, path = mini_run
    n = len(sol.dts)
    bad = _mutated(
        path,
        tmp_path,
        lambda ls: [l.replace(f"steps = {n}", f"steps = {n + 1}") for l in ls],
    )
    with pytest.raises(ScenarioError, match="does not match declared step count"):
        load_solution(bad)


def test_load_rejects_missing_initial_row(mini_run, tmp_path):
    _, _, path = mini_run

    def drop_first_row(ls):
        i = ls.index("[data]")
        return ls[: i + 1] + ls[i + 2 :]

    bad = _mutated(path, tmp_path, drop_first_row)
    with pytest.raises(ScenarioError, match="must store the initial state"):
        load_solution(bad)


def test_load_rejects_truncated_rows(mini_run, tmp_path):
    _, _, path = mini_run

    def truncate(ls):
        i = ls.index("[data]")
        return ls[: i + 1] + [" ".join(l.split()[:-1]) for l in ls[i + 1 :]]

    bad = _mutated(path, tmp_path, truncate)
    with pytest.raises(ScenarioError, match="rows have 63 cells, grid has 64"):
        load_solution(bad)


def test_load_rejects_stray_content(mini_run, tmp_path):
    _, _, path = mini_run
    bad = _mutated(path, tmp_path, lambda ls: ["garbage"] + ls)
    with pytest.raises(ScenarioError, match="unexpected content"):
        load_solution(bad)


def test_out_dir_env(monkeypatch, tmp_path):
    monkeypatch.setenv("FLUXJUMP_OUT", str(tmp_path))
    assert out_dir() == tmp_path
    monkeypatch.delenv("FLUXJUMP_OUT")
    assert out_dir() == Path(".")


def test_write_text_atomic_overwrites_cleanly(tmp_path):
    target = tmp_path / "report.txt"
    write_text_atomic(target, "first\n")
    write_text_atomic(target, "second\n")
    assert target.read_text() == "second\n"
    assert list(tmp_path.glob("*.tmp")) == []


def test_write_scenario_names_by_stem(tmp_path):
    s = parse_scenario_text(MINIMAL, "mini")
    p = tmp_path / "renamed.cfg"
    write_scenario(s, p)
    s2 = load_scenario(p)
    assert s2.name == "renamed"
    assert s2 == dataclasses.replace(s, name="renamed")
