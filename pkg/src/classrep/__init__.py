"""Classical-representation energy distributions for bound states of x^(2m).

This library solves the scaled Schroedinger problem psi'' + (eps - x^(2m)) psi = 0,
turns each eigenstate density into an energy distribution of classical
trajectories and checks the result against the equations it must satisfy.
"""

__version__ = "0.1.0"

from .classrep_equation import (
    KernelEvaluation,
    PhiFunction,
    harmonic_ode_solution,
    kernel_q,
    kernel_q_box_limit,
    kernel_q_quadrature,
    phi_from_f,
    residual_density_ode,
    residual_harmonic_ode,
    residual_integro,
)
from .config import INFINITE, GridConfig, Potential, RunConfig, SolverConfig, ToleranceProfile, load_run_config
from .eigensolver import (
    EigenSolution,
    analytic_box,
    analytic_harmonic,
    c_n1,
    c_np,
    density_derivatives,
    density_ode_defect,
    oracle_solve,
    solve,
    turning_point,
)
from .ensemble import (
    EnergyDistribution,
    PositionDensity,
    asymptotic_f,
    build_distribution,
    classical_density,
    cumulative,
    forward_abel,
    inverse_abel,
    limit_nodes,
    mean_energy,
    period,
    scaled_distribution,
    to_physical,
)
from .errors import (
    ClassrepError,
    ConfigurationError,
    ConvergenceError,
    DomainError,
    IntegrabilityError,
    NumericalError,
    RangeError,
)
from .exporter import ResultExporter, ResultManifest
from .processor import ClassrepProcessor
from .special_functions import SeriesResult, beta, double_factorial, gauss_2f1, hermite, laguerre, ln_gamma, s_series
from .wkb import WkbResult, wkb0, wkb2, wkb_limits

__all__ = [
    "__version__",
    "INFINITE",
    "Potential",
    "SolverConfig",
    "GridConfig",
    "ToleranceProfile",
    "RunConfig",
    "load_run_config",
    "ClassrepError",
    "DomainError",
    "RangeError",
    "NumericalError",
    "ConvergenceError",
    "IntegrabilityError",
    "ConfigurationError",
    "SeriesResult",
    "ln_gamma",
    "beta",
    "hermite",
    "laguerre",
    "gauss_2f1",
    "double_factorial",
    "s_series",
    "EigenSolution",
    "solve",
    "oracle_solve",
    "analytic_harmonic",
    "analytic_box",
    "density_derivatives",
    "density_ode_defect",
    "c_n1",
    "c_np",
    "turning_point",
    "WkbResult",
    "wkb0",
    "wkb2",
    "wkb_limits",
    "EnergyDistribution",
    "PositionDensity",
    "period",
    "classical_density",
    "forward_abel",
    "inverse_abel",
    "build_distribution",
    "cumulative",
    "mean_energy",
    "asymptotic_f",
    "limit_nodes",
    "scaled_distribution",
    "to_physical",
    "PhiFunction",
    "KernelEvaluation",
    "phi_from_f",
    "kernel_q",
    "kernel_q_box_limit",
    "kernel_q_quadrature",
    "residual_density_ode",
    "residual_integro",
    "residual_harmonic_ode",
    "harmonic_ode_solution",
    "ClassrepProcessor",
    "ResultExporter",
    "ResultManifest",
]
