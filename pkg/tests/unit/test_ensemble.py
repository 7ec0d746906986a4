"""Tests for ensemble module."""

import logging
import math

import numpy as np
import pytest
from scipy import integrate
from src.classrep.config import GridConfig, Potential
from src.classrep.eigensolver import analytic_box, analytic_harmonic
from src.classrep.ensemble import (
    EnergyDistribution,
    asymptotic_f,
    build_distribution,
    classical_density,
    cumulative,
    energy_grid,
    find_nodes,
    fit_small_eps_exponent,
    forward_abel,
    harmonic_f,
    inverse_abel,
    limit_nodes,
    mean_energy,
    mean_energy_fraction_below,
    period,
    scaled_distribution,
    tail_profile,
    to_physical,
)
from src.classrep.errors import DomainError, IntegrabilityError, NumericalError
from src.classrep.special_functions import beta

pytestmark = pytest.mark.unit


@pytest.fixture(scope="module")
def harmonic_ground():
    """f_0 for m = 1 built from the exact density."""
    return build_distribution(analytic_harmonic(0))


@pytest.fixture(scope="module")
def harmonic_second():
    """f_2 for m = 1 built from the exact density."""
    return build_distribution(analytic_harmonic(2))


def test_period_harmonic_is_constant():
    """Test T = pi for every energy when m = 1."""
    np.testing.assert_allclose(period(np.array([0.1, 1.0, 10.0]), 1), math.pi)


def test_period_scaling():
    """Test T(eps) = B(1/(2m), 1/2) eps^((1-m)/(2m)) / m."""
    assert period(16.0, 2) == pytest.approx(beta(0.25, 0.5) * 16.0**-0.25 / 2.0)
    with pytest.raises(DomainError):
        period(0.0, 2)


def test_classical_density_normalized():
    """Test that one trajectory spends all of its time between the turning points."""
    eps, m = 3.0, 2
    x_tp = eps ** (1.0 / (2 * m))
    # (eps - x^4) = (x_tp - x)(x_tp + x)(x_tp^2 + x^2)
    value, _ = integrate.quad(
        lambda x: 1.0 / (period(eps, m) * math.sqrt((x_tp + x) * (x_tp**2 + x**2))),
        -x_tp,
        x_tp,
        weight="alg",
        wvar=(0.0, -0.5),
    )

    assert value == pytest.approx(1.0, rel=1e-10)


def test_classical_density_outside_turning_points():
    """Test that positions at or beyond the turning point are rejected."""
    with pytest.raises(DomainError):
        classical_density(1.0, 1.0, 2)


def test_energy_grid_layout():
    """Test that the grid is increasing, starts low and ends where rho is negligible."""
    grid = energy_grid(analytic_harmonic(0))

    assert np.all(np.diff(grid) > 0)
    assert grid[0] == pytest.approx(1e-20)
    assert 25.0 < grid[-1] < 40.0


def test_energy_grid_explicit_bounds():
    """Test that grid_min and grid_max override the automatic range."""
    grid = energy_grid(analytic_harmonic(0), GridConfig(grid_min=1e-3, grid_max=20.0, y_points=100))

    assert grid[0] == pytest.approx(1e-3)
    assert grid[-1] == pytest.approx(20.0)


def test_harmonic_ground_distribution(harmonic_ground):
    """Test f_0 = exp(-eps) and its moments."""
    f = harmonic_ground

    assert isinstance(f, EnergyDistribution)
    np.testing.assert_allclose(f.f, np.exp(-f.eps_grid), atol=1e-6)
    assert f.integral == pytest.approx(1.0, abs=1e-5)
    assert mean_energy(f) == pytest.approx(1.0, rel=1e-5)
    assert fit_small_eps_exponent(f) == pytest.approx(0.0, abs=1e-3)


def test_harmonic_excited_distribution(harmonic_second):
    """Test f_2 = exp(-eps) L_2(2 eps) and its two nodes."""
    f = harmonic_second
    nodes = find_nodes(f)

    np.testing.assert_allclose(f.f, harmonic_f(2, f.eps_grid), atol=1e-6)
    np.testing.assert_allclose(nodes, [1.0 - math.sqrt(0.5), 1.0 + math.sqrt(0.5)], rtol=1e-5)
    assert mean_energy(f) == pytest.approx(5.0, rel=1e-5)


def test_cumulative_harmonic(harmonic_ground):
    """Test F_0 = 1 - exp(-eps)."""
    F = cumulative(harmonic_ground)

    np.testing.assert_allclose(F.F, -np.expm1(-harmonic_ground.eps_grid), atol=1e-5)


def test_mean_energy_fraction_below(harmonic_ground):
    """Test the share of the mean up to the last grid point c <= 1: 1 - (1 + c) exp(-c)."""
    c = harmonic_ground.eps_grid[harmonic_ground.eps_grid <= 1.0][-1]

    assert mean_energy_fraction_below(harmonic_ground, 1.0) == pytest.approx(1.0 - (1.0 + c) * math.exp(-c), abs=1e-5)


def test_mean_energy_truncated_grid():
    """Test that a grid ending before the tail decays is reported."""
    sol = analytic_harmonic(0)
    f = inverse_abel(sol, np.linspace(0.01, 3.0, 40))

    with pytest.raises(NumericalError, match="extend the grid"):
        mean_energy(f)


def test_tail_profile(harmonic_ground):
    """Test the (eps, f, eps f) columns."""
    eps, f, weighted = tail_profile(harmonic_ground)

    np.testing.assert_allclose(weighted, eps * f)


def test_inverse_abel_rejects_bad_grid():
    """Test grid validation."""
    with pytest.raises(DomainError):
        inverse_abel(analytic_harmonic(0), np.array([0.0, 1.0, 2.0, 3.0]))
    with pytest.raises(DomainError):
        inverse_abel(analytic_harmonic(0), np.array([1.0, 0.5, 2.0, 3.0]))


def test_box_limit_is_not_integrable():
    """Test that the box limit raises IntegrabilityError with exponent -1."""
    with pytest.raises(IntegrabilityError) as exc_info:
        build_distribution(analytic_box(0))

    assert exc_info.value.exponent == -1.0


def test_forward_abel_recovers_density(harmonic_ground):
    """Test that the forward transform of f_0 gives back exp(-x^2)/sqrt(pi)."""
    x = np.linspace(0.0, 3.0, 13)
    density = forward_abel(harmonic_ground, x)

    assert density.warnings == ()
    assert density.head_share < 1e-6
    np.testing.assert_allclose(density.rho, np.exp(-x * x) / math.sqrt(math.pi), atol=1e-5)


_RHO_ORIGIN = 5.0 * math.gamma(0.1) / (2.0 * beta(0.1, 0.5))


def _power_law_distribution(eps_grid):
    """m = 5 distribution f = eps^(-7/10) exp(-eps^2), for which rho(0) = 5 Gamma(1/10) / (2 B(1/10, 1/2))."""
    f = eps_grid**-0.7 * np.exp(-(eps_grid**2))
    return EnergyDistribution(
        n=0,
        m=5,
        epsilon_n=1.0,
        eps_grid=eps_grid,
        f=f,
        grid_type="log-linear",
        integral=1.0,
        mean_energy=1.0,
        head_exponent=-0.7,
    )


def test_forward_abel_origin_uses_head_model():
    """Test rho(0) for m = 5 on a grid reaching far below the singular head."""
    density = forward_abel(_power_law_distribution(np.geomspace(1e-60, 12.0, 4000)), np.array([0.0]))

    assert density.rho[0] == pytest.approx(_RHO_ORIGIN, rel=1e-5)
    assert density.head_share < 1e-6
    assert density.warnings == ()


def test_forward_abel_coarse_grid_warning():
    """Test that a grid starting too high for m = 5 is flagged on the result."""
    density = forward_abel(_power_law_distribution(np.geomspace(1e-2, 12.0, 400)), np.array([0.0, 0.5]))

    assert density.head_share > 0.1
    assert len(density.warnings) == 1
    assert "too coarse" in density.warnings[0]
    assert density.rho[0] == pytest.approx(_RHO_ORIGIN, rel=1e-2)


def test_inverse_abel_warns_on_truncated_grid(caplog):
    """Test that a grid cutting off most of the distribution logs a construction warning."""
    with caplog.at_level(logging.WARNING):
        f = inverse_abel(analytic_harmonic(0), np.geomspace(1e-3, 2.0, 60))

    assert f.integral == pytest.approx(1.0 - math.exp(-2.0), abs=1e-3)
    assert "construction bounds" in caplog.text


def test_limit_nodes():
    """Test k/(n+1) node positions."""
    assert limit_nodes(4) == pytest.approx([0.2, 0.4, 0.6, 0.8])
    assert limit_nodes(0) == []
    with pytest.raises(DomainError):
        limit_nodes(-1)


def test_scaled_distribution_keeps_sign(harmonic_second):
    """Test y = eps^(1/2) and g = sgn(f) |f|^(1/2) for m = 1."""
    y, g = scaled_distribution(harmonic_second)

    np.testing.assert_allclose(y, np.sqrt(harmonic_second.eps_grid))
    np.testing.assert_allclose(np.sign(g), np.sign(harmonic_second.f))
    np.testing.assert_allclose(g * np.abs(g), harmonic_second.f)


def test_to_physical(harmonic_ground):
    """Test conversion to physical energies with gamma = 2."""
    potential = Potential(m=1, lam=4.0, mu=0.5)
    physical = to_physical(harmonic_ground, potential)

    assert physical.gamma == pytest.approx(2.0)
    assert physical.eigenenergy == pytest.approx(2.0)
    np.testing.assert_allclose(physical.energies, 2.0 * harmonic_ground.eps_grid)
    assert integrate.trapezoid(physical.f, physical.energies) == pytest.approx(1.0, abs=1e-3)


def test_to_physical_rejects_box(harmonic_ground):
    """Test that the box potential has no physical distribution."""
    with pytest.raises(DomainError):
        to_physical(harmonic_ground, Potential(m="infinite"))


def test_asymptotic_harmonic():
    """Test the finite value (-1)^n at m = 1."""
    form, value = asymptotic_f(1e-6, 3, 1, 1.0)

    assert form.exponent == 0.0
    assert value == -1.0


def test_asymptotic_quartic_log_form():
    """Test the eps^(-1/4) log form for m = 2."""
    c = -0.5
    form, value = asymptotic_f(1e-8, 0, 2, c)
    expected = -c * beta(0.25, 0.5) / (2.0 * math.pi) * math.log(1e-8**-0.25) * 1e-8**-0.25

    assert form.case_tag == "m=2 log"
    assert value == pytest.approx(expected)


def test_asymptotic_power_law():
    """Test the leading power eps^(-1 + 3/(2m)) and the higher terms."""
    form, leading = asymptotic_f(1e-10, 0, 5, -1.0)
    _, both = asymptotic_f(1e-10, 0, 5, -1.0, epsilon_n=3.0, p_terms=2)

    assert form.exponent == pytest.approx(-0.7)
    assert leading == pytest.approx(form.coefficient * 1e-10**-0.7)
    assert both != leading
    with pytest.raises(DomainError):
        asymptotic_f(1e-10, 0, 5, -1.0, p_terms=2)
    with pytest.raises(DomainError):
        asymptotic_f(1e-10, 0, 5, -1.0, epsilon_n=3.0, p_terms=3)
    with pytest.raises(DomainError):
        asymptotic_f(0.0, 0, 5, -1.0)
