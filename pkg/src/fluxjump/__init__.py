"""Finite-volume solver and verifier for scalar conservation laws whose flux
jumps across static spatial interfaces.

The solver marches monotone schemes (Godunov, Engquist-Osher) with
germ-consistent interface coupling; the verifier certifies entropy
inequalities, interface traces, the Kato remainder of a solution pair, and an
L1 contraction ledger.
"""

from .catalog import (
    Affine,
    Coefficient,
    Constant,
    Quadratic,
    SectionFlux,
    Tabulated,
    TemplateFlux,
    coefficient_from_spec,
    template_from_spec,
)
from .exceptions import (
    CflError,
    ConvergenceError,
    CouplingError,
    DomainError,
    EmptyGermError,
    FluxjumpError,
    GermError,
    GridMismatchError,
    InterfaceIndexError,
    InterfacePointError,
    ScenarioError,
    SolverError,
    StateError,
    UnsupportedCouplingError,
)
from .germs import (
    GermSpec,
    StatePair,
    germ_from_spec,
    germ_w,
    is_dissipative,
    rankine_hugoniot_residual,
    sample_vv_germ,
    validate_germ,
    vv_membership,
)
from .kernels import BACKEND
from .model import FluxModel, GnlReport, Region, assumption_report, gnl_check
from .riemann import (
    IdentityCoupling,
    PairProjectionCoupling,
    VvCoupling,
    build_coupling,
    engquist_osher_flux,
    godunov_flux,
    interface_flux_vv,
    solve_interface_riemann,
)
from .scenario_io import (
    fingerprint,
    load_scenario,
    load_solution,
    parse_scenario_text,
    save_solution,
    scenario_to_text,
    solution_text,
    write_scenario,
)
from .solver import (
    InitialData,
    InterfaceSpec,
    Scenario,
    SpaceTimeSolution,
    StaticGrid,
    VerifyParams,
    cfl_dt,
    run,
    snapshot_schedule,
    step,
)
from .traces import TraceSample, extract_traces, rh_check, trace_tolerance
from .verify import (
    ContractionLedger,
    KatoReport,
    ResidualField,
    SobolevReport,
    contraction_ledger,
    entropy_levels,
    entropy_residual,
    kato_remainder,
    sobolev_contraction_check,
)

__version__ = "0.1.0"

__all__ = [
    "Affine",
    "BACKEND",
    "CflError",
    "Coefficient",
    "Constant",
    "ContractionLedger",
    "ConvergenceError",
    "CouplingError",
    "DomainError",
    "EmptyGermError",
    "FluxModel",
    "FluxjumpError",
    "GermError",
    "GermSpec",
    "GnlReport",
    "GridMismatchError",
    "IdentityCoupling",
    "InitialData",
    "InterfaceIndexError",
    "InterfacePointError",
    "InterfaceSpec",
    "KatoReport",
    "PairProjectionCoupling",
    "Quadratic",
    "Region",
    "ResidualField",
    "Scenario",
    "ScenarioError",
    "SectionFlux",
    "SobolevReport",
    "SolverError",
    "SpaceTimeSolution",
    "StatePair",
    "StateError",
    "StaticGrid",
    "Tabulated",
    "TemplateFlux",
    "TraceSample",
    "UnsupportedCouplingError",
    "VerifyParams",
    "VvCoupling",
    "assumption_report",
    "build_coupling",
    "cfl_dt",
    "coefficient_from_spec",
    "contraction_ledger",
    "engquist_osher_flux",
    "entropy_levels",
    "entropy_residual",
    "extract_traces",
    "fingerprint",
    "germ_from_spec",
    "germ_w",
    "gnl_check",
    "godunov_flux",
    "interface_flux_vv",
    "is_dissipative",
    "kato_remainder",
    "load_scenario",
    "load_solution",
    "parse_scenario_text",
    "rankine_hugoniot_residual",
    "rh_check",
    "run",
    "sample_vv_germ",
    "save_solution",
    "scenario_to_text",
    "snapshot_schedule",
    "solution_text",
    "solve_interface_riemann",
    "step",
    "template_from_spec",
    "trace_tolerance",
    "validate_germ",
    "vv_membership",
    "write_scenario",
]
