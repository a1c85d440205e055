"""Shared fixtures: canonical interface models and the shipped scenario files."""

from pathlib import Path

import pytest

from fluxjump.catalog import Constant, template_from_spec
from fluxjump.model import FluxModel, Region
from fluxjump.solver import InitialData, InterfaceSpec, Scenario

SCENARIO_DIR = Path(__file__).resolve().parents[1] / "scenarios"


@pytest.fixture(scope="session")
def scenario_dir() -> Path:
    assert SCENARIO_DIR.is_dir()
    return SCENARIO_DIR


@pytest.fixture
def lwr12() -> FluxModel:
    """LWR flux with the coefficient jumping 1 -> 2 at x = 0."""
    return FluxModel(
        template_from_spec("lwr"),
        (Region(-1.0, 0.0, Constant(1.0)), Region(0.0, 1.0, Constant(2.0))),
        (0.0, 1.0),
    )


@pytest.fixture
def burgers_iface() -> FluxModel:
    """Burgers flux with an interface carrying no coefficient jump."""
    return FluxModel(
        template_from_spec("burgers"),
        (Region(-1.0, 0.0, Constant(1.0)), Region(0.0, 1.0, Constant(1.0))),
        (-1.0, 1.0),
    )


@pytest.fixture
def mk_scenario():
    """Factory for small in-memory scenarios; couplings is [(kind, germ_spec)]."""

    def make(model, couplings, initial, cells=80, cfl=0.4, t_end=0.2, **kw):
        specs = tuple(InterfaceSpec.from_strings(c, g) for c, g in couplings)
        return Scenario(
            name=kw.pop("name", "case"),
            model=model,
            interfaces=specs,
            initial=InitialData(initial),
            grid_n=cells,
            cfl=cfl,
            t_end=t_end,
            **kw,
        )

    return make
