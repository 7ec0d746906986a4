"""Configuration models for potentials, solvers, grids and runs.

These are plain pydantic data models. Loading them from files or the
environment is done by :func:`load_run_config`, which the CLI calls.
"""

import logging
import math
import os
from pathlib import Path
from typing import Any, Literal

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import ConfigurationError

logger = logging.getLogger(__name__)

INFINITE = "infinite"

Exponent = int | Literal["infinite"]

WORKERS_ENV_VAR = "CLASSREP_WORKERS"


class Potential(BaseModel):
    """Confining potential lambda * z^(2m) with physical constants.

    The box limit m -> infinity is a distinct value ``"infinite"``, never a
    large integer.
    """

    model_config = ConfigDict(frozen=True)

    m: Exponent = Field(description="Exponent m >= 1 of x^(2m), or 'infinite' for the box limit")
    lam: float = Field(default=1.0, gt=0, description="Coupling constant lambda")
    mu: float = Field(default=1.0, gt=0, description="Particle mass mu")
    hbar: float = Field(default=1.0, gt=0, description="Reduced Planck constant")

    @field_validator("m")
    @classmethod
    def _check_m(cls, value: Exponent) -> Exponent:
        if value != INFINITE and value < 1:
            raise ValueError(f"m must be >= 1 or '{INFINITE}', got {value}")
        return value

    @property
    def is_box(self) -> bool:
        return self.m == INFINITE

    @property
    def beta(self) -> float:
        """Length scale beta = (hbar^2 / (2 mu lambda))^(1/(2m+2)); 1 for the box."""
        if self.is_box:
            return 1.0
        return (self.hbar**2 / (2.0 * self.mu * self.lam)) ** (1.0 / (2 * self.m + 2))

    @property
    def gamma(self) -> float:
        """Energy scale gamma = lambda * beta^(2m); hbar^2/(2 mu) for the box."""
        if self.is_box:
            return self.hbar**2 / (2.0 * self.mu)
        return self.lam * self.beta ** (2 * self.m)


class SolverConfig(BaseModel):
    """Parameters of the double-exponential Sinc collocation eigensolver."""

    model_config = ConfigDict(frozen=True)

    basis_size: int = Field(default=64, ge=8, description="Initial number of collocation nodes on the full line")
    de_step: float = Field(default=0.1, gt=0, description="Largest admissible Sinc step in the mapped variable t")
    target_states: int = Field(default=1, ge=1, description="Number of lowest states the basis must resolve")
    oracle_tolerance: float = Field(default=1e-8, gt=0, description="Relative agreement required against the Numerov oracle")
    mapping_scale: float = Field(default=1.0, gt=0, description="Scale c in the map x = sinh(c sinh t)")
    decay_action: float = Field(default=22.0, gt=0, description="WKB action beyond the top turning point covered by the grid")
    refine_tol: float = Field(default=1e-10, gt=0, description="Relative eigenvalue change accepted between basis doublings")
    residual_tol: float = Field(
        default=1e-7, gt=0, description="Density-equation defect at which refinement stops once eigenvalues agree"
    )
    max_basis: int = Field(default=4097, ge=16, description="Largest number of collocation nodes on the full line")
    upsample: int = Field(default=8, ge=2, description="Oversampling factor of the stored wavefunction interpolant")

    @model_validator(mode="after")
    def _check_basis(self) -> "SolverConfig":
        if self.basis_size < 4 * self.target_states:
            raise ValueError(
                f"basis_size ({self.basis_size}) must be at least 4 * target_states ({self.target_states})"
            )
        if self.max_basis < self.basis_size:
            raise ValueError("max_basis must not be smaller than basis_size")
        return self


class GridConfig(BaseModel):
    """Layout of the energy grid on which distributions are sampled.

    The grid is uniform in z = ln(eps)/log_step + eps^(1/(2m))/dy with
    dy = eps_max^(1/(2m)) / y_points: geometric near zero, uniform in the
    scaled abscissa eps^(1/(2m)) elsewhere.
    """

    model_config = ConfigDict(frozen=True)

    eps_min_factor: float = Field(default=1e-20, gt=0, description="Lower end relative to eps_n")
    y_floor: float = Field(default=0.05, gt=0, lt=1, description="Lower end cap y_floor^(2m) for large m")
    log_step: float = Field(default=0.2, gt=0, description="Step in ln(eps) of the geometric part")
    y_points: int = Field(default=800, ge=50, description="Points across the scaled abscissa range")
    density_cut: float = Field(default=1e-14, gt=0, description="Relative density below which the support ends")
    abel_rtol: float = Field(default=1e-10, gt=0, description="Relative tolerance of the inverse Abel quadrature")
    grid_min: float | None = Field(default=None, gt=0, description="Explicit lower end, overrides eps_min_factor")
    grid_max: float | None = Field(default=None, gt=0, description="Explicit upper end, overrides the density cut")


class ToleranceProfile(BaseModel):
    """Bounds used by the validation suite."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(default="default")
    eigen_harmonic: float = Field(default=1e-9, gt=0)
    oracle_relative: float = Field(default=1e-8, gt=0)
    normalization: float = Field(default=1e-3, gt=0)
    mean_energy_relative: float = Field(default=5e-3, gt=0)
    exponent_absolute: float = Field(default=0.05, gt=0)
    node_absolute: float = Field(default=0.02, gt=0)
    density_ode_analytic: float = Field(default=1e-10, gt=0)
    density_ode_numerical: float = Field(default=1e-6, gt=0)
    integro_analytic: float = Field(default=1e-6, gt=0)
    integro_numerical: float = Field(default=1e-3, gt=0)
    kernel_relative: float = Field(default=1e-8, gt=0)
    harmonic_distribution: float = Field(default=1e-6, gt=0)


TOLERANCE_PROFILES: dict[str, ToleranceProfile] = {
    "default": ToleranceProfile(),
    "strict": ToleranceProfile(
        name="strict",
        normalization=1e-4,
        mean_energy_relative=1e-3,
        exponent_absolute=0.02,
        node_absolute=0.01,
    ),
    "fast": ToleranceProfile(
        name="fast",
        eigen_harmonic=1e-7,
        oracle_relative=1e-6,
        normalization=5e-3,
        mean_energy_relative=1e-2,
        density_ode_numerical=1e-5,
        integro_numerical=5e-3,
    ),
}


def get_tolerance_profile(name: str) -> ToleranceProfile:
    """Look up a named tolerance profile.

    Raises:
        ConfigurationError: If no profile has that name
    """
    try:
        return TOLERANCE_PROFILES[name]
    except KeyError:
        raise ConfigurationError(
            f"Unknown tolerance profile '{name}' (choose from {', '.join(TOLERANCE_PROFILES)})"
        ) from None


class RunConfig(BaseModel):
    """Everything a CLI run needs: which states, which grids, where to write."""

    m_list: list[Exponent] = Field(default_factory=lambda: [1, 2, 3, 5, 10, 100], min_length=1)
    n_list: list[int] = Field(default_factory=lambda: [0, 4], min_length=1)
    output_dir: Path = Field(default=Path("results"))
    format: Literal["csv", "json"] = Field(default="csv")
    workers: int = Field(default=1, ge=1)
    tolerance_profile: str = Field(default="default")
    points: int | None = Field(default=None, ge=2, description="Number of output samples per curve")
    epsilon_shift: float = Field(default=0.0, description="Shift added to eigenvalues before residual checks")
    solver: SolverConfig = Field(default_factory=SolverConfig)
    grid: GridConfig = Field(default_factory=GridConfig)

    @field_validator("m_list")
    @classmethod
    def _check_m_list(cls, value: list[Exponent]) -> list[Exponent]:
        for m in value:
            if m != INFINITE and m < 1:
                raise ValueError(f"m values must be >= 1 or '{INFINITE}', got {m}")
        return value

    @field_validator("n_list")
    @classmethod
    def _check_n_list(cls, value: list[int]) -> list[int]:
        if any(n < 0 for n in value):
            raise ValueError("n values must be >= 0")
        return sorted(set(value))

    @field_validator("tolerance_profile")
    @classmethod
    def _check_profile(cls, value: str) -> str:
        if value not in TOLERANCE_PROFILES:
            raise ValueError(f"unknown tolerance profile '{value}'")
        return value

    @property
    def tolerances(self) -> ToleranceProfile:
        return TOLERANCE_PROFILES[self.tolerance_profile]

    @property
    def finite_m(self) -> list[int]:
        return [m for m in self.m_list if m != INFINITE]


def workers_from_env(default: int = 1) -> int:
    """Read the worker count from CLASSREP_WORKERS (a .env file is honoured)."""
    load_dotenv()
    raw = os.getenv(WORKERS_ENV_VAR)
    if raw is None or raw.strip() == "":
        return default
    try:
        workers = int(raw)
    except ValueError:
        raise ConfigurationError(f"{WORKERS_ENV_VAR} must be an integer, got '{raw}'") from None
    if workers < 1:
        raise ConfigurationError(f"{WORKERS_ENV_VAR} must be >= 1, got {workers}")
    return workers


def load_run_config(path: Path | None = None, overrides: dict[str, Any] | None = None) -> RunConfig:
    """Build a RunConfig from an optional JSON/YAML file plus CLI overrides.

    Override values that are None are ignored, so argparse namespaces can be
    passed through directly.

    Raises:
        ConfigurationError: If the file is unreadable or the result is invalid
    """
    data: dict[str, Any] = {"workers": workers_from_env()}
    if path is not None:
        try:
            loaded = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
        except OSError as e:
            raise ConfigurationError(f"Cannot read config file {path}: {e}") from e
        except yaml.YAMLError as e:
            raise ConfigurationError(f"Cannot parse config file {path}: {e}") from e
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigurationError(f"Config file {path} must contain a mapping at the top level")
        logger.debug(f"Loaded config file {path} with keys {sorted(loaded)}")
        data.update(loaded)

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key in GridConfig.model_fields:
            grid = dict(data.get("grid") or {})
            grid[key] = value
            data["grid"] = grid
        else:
            data[key] = value

    try:
        config = RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid run configuration: {e}") from e

    if config.output_dir.exists() and not os.access(config.output_dir, os.W_OK):
        raise ConfigurationError(f"Output directory {config.output_dir} is not writable")
    return config

