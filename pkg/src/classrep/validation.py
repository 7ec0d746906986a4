"""Self-checks of the whole pipeline against exact results and limiting forms.

Each check yields a CheckResult (name, measured value, bound, pass/fail).
Checks that document a known breakdown, such as the box-limit distribution,
are marked ``expected_failure`` and do not fail the run.
"""

import logging
import math
from typing import Callable, Iterator

import numpy as np
from pydantic import BaseModel, Field

from .classrep_equation import (
    harmonic_ode_solution,
    kernel_q,
    kernel_q_box_limit,
    kernel_q_quadrature,
    phi_from_f,
    residual_density_ode,
    residual_harmonic_ode,
    residual_integro,
)
from .config import INFINITE, Potential, RunConfig
from .eigensolver import analytic_box, analytic_harmonic, box_eigenvalue, oracle_solve, solve
from .ensemble import (
    build_distribution,
    find_nodes,
    fit_small_eps_exponent,
    harmonic_f,
    inverse_abel,
    energy_grid,
    log_singularity_fit,
    mean_energy,
    mean_energy_fraction_below,
)
from .errors import ClassrepError, IntegrabilityError
from .exporter import TaskFailure
from .processor import ClassrepProcessor
from .wkb import wkb0, wkb2, wkb_limits

logger = logging.getLogger(__name__)

BOX_TREND_M = (10, 20, 50, 100, 200)
HARMONIC_LEVELS = 6
TAIL_CUT = 1.0
TAIL_FRACTION = 2e-3
LOG_FIT_R2 = 0.99
KERNEL_M1_RELATIVE = 1e-12
KERNEL_BOX_RATIO = 0.02


class CheckResult(BaseModel):
    name: str
    measured: float
    bound: float
    passed: bool
    expected_failure: bool = False
    detail: str = ""


class ValidationReport(BaseModel):
    """Outcome of a validation run."""

    profile: str
    checks: list[CheckResult] = Field(default_factory=list)
    failures: list[TaskFailure] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed or c.expected_failure for c in self.checks) and not any(
            not f.expected for f in self.failures
        )


def _upper(name: str, measured: float, bound: float, detail: str = "") -> CheckResult:
    """Pass when measured <= bound (NaN fails)."""
    return CheckResult(name=name, measured=measured, bound=bound, passed=bool(measured <= bound), detail=detail)


def _lower(name: str, measured: float, bound: float, detail: str = "") -> CheckResult:
    return CheckResult(name=name, measured=measured, bound=bound, passed=bool(measured >= bound), detail=detail)


def check_wkb(config: RunConfig) -> Iterator[CheckResult]:
    for n in range(HARMONIC_LEVELS + 1):
        deviation = max(abs(wkb0(n, 1).epsilon - (2 * n + 1)), abs(wkb2(n, 1).epsilon - (2 * n + 1)))
        yield _upper(f"wkb_harmonic_n{n}", deviation, 1e-12 * (2 * n + 1))
    for n in config.n_list:
        limit = wkb_limits(n, 1e4)[0]
        yield _upper(f"wkb0_large_m_n{n}", abs(wkb0(n, 1e4).epsilon / limit - 1.0), 1e-3)
    growth = wkb2(0, 1e4).epsilon / wkb2(0, 1e2).epsilon
    yield _lower("wkb2_growth", growth, 10.0, "wkb2(0, 1e4) / wkb2(0, 1e2)")


def check_harmonic(config: RunConfig) -> Iterator[CheckResult]:
    tol = config.tolerances
    states = solve(Potential(m=1), HARMONIC_LEVELS, config.solver)
    worst = max(abs(s.epsilon - (2 * s.n + 1)) for s in states)
    yield _upper("harmonic_eigenvalues", worst, tol.eigen_harmonic, f"n = 0..{HARMONIC_LEVELS}")

    for n in config.n_list:
        if n > HARMONIC_LEVELS:
            continue
        exact = analytic_harmonic(n)
        f = inverse_abel(exact, energy_grid(exact, config.grid), config.grid)
        error = float(np.max(np.abs(f.f - harmonic_f(n, f.eps_grid))))
        yield _upper(f"harmonic_distribution_n{n}", error, tol.harmonic_distribution)

    for n in range(3):
        exact = analytic_harmonic(n)
        yield _upper(f"density_ode_analytic_n{n}", residual_density_ode(exact), tol.density_ode_analytic)
        grid = np.linspace(1e-3, 60.0, 8001)
        phi = harmonic_ode_solution(n, grid)
        yield _upper(f"harmonic_ode_analytic_n{n}", residual_harmonic_ode(phi, 2.0 * n + 1.0), 1e-10)
        yield _upper(f"integro_analytic_n{n}", residual_integro(phi, 2.0 * n + 1.0, 1), tol.integro_analytic)


def check_kernel(config: RunConfig) -> Iterator[CheckResult]:
    tol = config.tolerances
    worst = 0.0
    for eps_tilde in np.linspace(1.0, 20.0, 20):
        eps = 0.3 * eps_tilde
        exact = 7.5 * math.pi * (eps_tilde - 2.0 * eps)
        worst = max(worst, abs(kernel_q(eps_tilde, eps, 1).value - exact) / abs(exact))
    yield _upper("kernel_harmonic_closed_form", worst, KERNEL_M1_RELATIVE)

    worst = 0.0
    for m in (2, 3, 5):
        for eps_tilde, eps in ((2.0, 0.5), (7.0, 0.1), (1.5, 1.2)):
            closed = kernel_q(eps_tilde, eps, m).value
            direct = kernel_q_quadrature(eps_tilde, eps, m)
            worst = max(worst, abs(closed - direct) / abs(direct))
    yield _upper("kernel_closed_form_vs_quadrature", worst, tol.kernel_relative)

    ratio = kernel_q(3.0, 1.0, 200).value / kernel_q_box_limit(3.0, 1.0, 200)
    yield _upper("kernel_box_limit_ratio", abs(ratio - 1.0), KERNEL_BOX_RATIO, "m = 200")


def check_box_trend(config: RunConfig) -> Iterator[CheckResult]:
    """n = 4 eigenvalues approach the box value; the ground state picks the pi^2/4 convention."""
    values = []
    grounds = []
    for m in BOX_TREND_M:
        states = solve(Potential(m=m), 4, config.solver)
        values.append(states[4].epsilon)
        grounds.append(states[0].epsilon)
    gaps = np.abs(np.array(values) - box_eigenvalue(4))
    monotone = bool(np.all(np.diff(gaps) < 0))
    yield CheckResult(
        name="box_limit_trend_n4",
        measured=float(gaps[-1]),
        bound=float(gaps[0]),
        passed=monotone,
        detail=f"eps_4(m) for m in {BOX_TREND_M}: {', '.join(f'{v:.8g}' for v in values)}",
    )
    quarter = abs(grounds[-1] - box_eigenvalue(0))
    eighth = abs(grounds[-1] - box_eigenvalue(0) / 2.0)
    yield CheckResult(
        name="ground_state_limit_convention",
        measured=grounds[-1],
        bound=box_eigenvalue(0),
        passed=quarter < eighth,
        detail=f"eps_0(m=200) is {quarter:.4g} from pi^2/4 and {eighth:.4g} from pi^2/8",
    )


def check_states(config: RunConfig, processor: ClassrepProcessor) -> Iterator[CheckResult]:
    tol = config.tolerances
    for m, n, sol in processor.process_states():
        if m == INFINITE:
            yield _upper(f"box_eigenvalue_n{n}", abs(sol.epsilon - box_eigenvalue(n)), 1e-12 * box_eigenvalue(n))
            continue
        oracle = oracle_solve(m, n)
        yield _upper(f"oracle_m{m}_n{n}", abs(sol.epsilon - oracle) / oracle, tol.oracle_relative)
        epsilon = sol.epsilon + config.epsilon_shift
        yield _upper(
            f"density_ode_m{m}_n{n}",
            residual_density_ode(sol, epsilon),
            tol.density_ode_numerical,
            f"eps = {epsilon:.12g}",
        )


def check_distributions(config: RunConfig, processor: ClassrepProcessor) -> Iterator[CheckResult]:
    tol = config.tolerances
    for m, n, sol, f in processor.process_distributions():
        tag = f"m{m}_n{n}"
        yield _upper(f"normalization_{tag}", abs(f.integral - 1.0), tol.normalization)
        mean = mean_energy(f)
        yield _upper(f"mean_energy_{tag}", abs(mean - sol.epsilon) / sol.epsilon, tol.mean_energy_relative)
        nodes = find_nodes(f)
        yield _upper(f"node_count_{tag}", abs(len(nodes) - n), 0.0, f"{len(nodes)} nodes")
        if n == 0:
            smallest = float(np.min(f.f))
            yield CheckResult(name=f"ground_state_positive_m{m}", measured=smallest, bound=0.0, passed=smallest > 0.0)
        if m >= 3:
            expected = -1.0 + 3.0 / (2 * m)
            yield _upper(f"small_eps_exponent_{tag}", abs(fit_small_eps_exponent(f) - expected), tol.exponent_absolute)
        if m == 2:
            _, _, r_squared = log_singularity_fit(f)
            yield _lower(f"log_singularity_{tag}", r_squared, LOG_FIT_R2)
            if n == 0:
                phi = phi_from_f(f)
                yield _upper(f"integro_{tag}", residual_integro(phi, sol.epsilon, 2), tol.integro_numerical)
        if m >= 100 and n > 0 and len(nodes) == n:
            scaled = nodes ** (1.0 / (2 * m))
            deviation = float(np.max(np.abs(scaled - np.arange(1, n + 1) / (n + 1))))
            yield _upper(f"scaled_nodes_{tag}", deviation, tol.node_absolute)
            fraction = mean_energy_fraction_below(f, TAIL_CUT)
            yield _upper(f"tail_fraction_{tag}", abs(fraction), TAIL_FRACTION, f"eps <= {TAIL_CUT}")


def check_box_distribution(config: RunConfig) -> Iterator[CheckResult]:
    """The box limit has no integrable distribution; this is reported, not failed."""
    if INFINITE not in config.m_list:
        return
    try:
        build_distribution(analytic_box(0), config.grid)
    except IntegrabilityError as e:
        yield CheckResult(
            name="box_distribution",
            measured=e.exponent,
            bound=-1.0,
            passed=False,
            expected_failure=True,
            detail=str(e),
        )


CHECK_GROUPS: tuple[Callable[[RunConfig], Iterator[CheckResult]], ...] = (
    check_wkb,
    check_harmonic,
    check_kernel,
    check_box_trend,
    check_box_distribution,
)


def run_validation(config: RunConfig) -> ValidationReport:
    """Run every check group; a group that raises becomes a failed check and the run continues."""
    report = ValidationReport(profile=config.tolerance_profile)
    processor = ClassrepProcessor(config)
    groups = [*CHECK_GROUPS, lambda c: check_states(c, processor), lambda c: check_distributions(c, processor)]
    names = [g.__name__ for g in CHECK_GROUPS] + ["check_states", "check_distributions"]

    for name, group in zip(names, groups):
        try:
            for check in group(config):
                report.checks.append(check)
                log = logger.info if check.passed or check.expected_failure else logger.warning
                log(f"{check.name}: {check.measured:.3e} (bound {check.bound:.3e}) {'ok' if check.passed else 'FAIL'}")
        except ClassrepError as e:
            logger.error(f"{name} aborted: {e}")
            report.checks.append(
                CheckResult(name=name, measured=math.nan, bound=math.nan, passed=False, detail=f"{type(e).__name__}: {e}")
            )
    report.failures = list(processor.failures)
    logger.info(
        f"Validation ({config.tolerance_profile}): {sum(c.passed for c in report.checks)}/{len(report.checks)} passed"
    )
    return report
