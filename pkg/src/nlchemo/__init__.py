"""Simulation and bound verification for a chemotaxis-consumption model with nonlocal logistic sources."""

from .diagnostics import DiagnosticRecord, Recorder, Verdict, record, verdict
from .errors import PreconditionError, SolverError, StructuralError
from .grid import Field, Grid, chemotaxis_divergence, integrate_power, laplacian, norms
from .model import Params, SourceMode, State, source_eval, validate
from .regimes import (
    GNExponents,
    Regime,
    RegimeCase,
    RegimeReport,
    classify,
    gn_exponents,
    mass_bound,
    ode_comparison_bound,
    regime_report,
    report_for_state,
    v_sup_bound,
)
from .stepper import BlowUp, RunReport, StepOutcome, StepperConfig, adapt_dt, run, step

__all__ = [
    "BlowUp", "DiagnosticRecord", "Field", "GNExponents", "Grid", "Params",
    "PreconditionError", "Recorder", "Regime", "RegimeCase", "RegimeReport",
    "RunReport", "SolverError", "SourceMode", "State", "StepOutcome",
    "StepperConfig", "StructuralError", "Verdict", "adapt_dt",
    "chemotaxis_divergence", "classify", "gn_exponents", "integrate_power",
    "laplacian", "mass_bound", "norms", "ode_comparison_bound", "record",
    "regime_report", "report_for_state", "run", "source_eval", "step",
    "v_sup_bound", "validate", "verdict",
]
