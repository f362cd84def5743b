"""Rigid body with a spherical lubricated damper: simulation, equilibrium
spectra and attainability of the major-axis spin."""
from ._backend import BACKEND, available
from .analysis import (
    AmbiguousLimit,
    AttainabilityReport,
    ConvergenceReport,
    Indeterminate,
    analyze,
    attainability,
    classify_limit_axis,
    fit_decay,
    limit_identities,
)
from .dynamics import BodyParams, ParameterError, State, balances, rhs
from .eigen import EigenvalueConvergenceError, eigenvalues
from .integrator import (
    IntegratorConfig,
    StepFailure,
    StopReason,
    TrajectoryRecord,
    integrate,
    rk4_reference,
    step,
)
from .spectral import (
    AxisLabel,
    Equilibrium,
    Verdict,
    classify,
    equilibrium_set,
    linearization,
    representative_equilibria,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "available", "AmbiguousLimit", "AttainabilityReport", "ConvergenceReport",
    "Indeterminate", "analyze", "attainability", "classify_limit_axis", "fit_decay",
    "limit_identities", "BodyParams", "ParameterError", "State", "balances", "rhs",
    "EigenvalueConvergenceError", "eigenvalues", "IntegratorConfig", "StepFailure",
    "StopReason", "TrajectoryRecord", "integrate", "rk4_reference", "step", "AxisLabel",
    "Equilibrium", "Verdict", "classify", "equilibrium_set", "linearization",
    "representative_equilibria",
]
