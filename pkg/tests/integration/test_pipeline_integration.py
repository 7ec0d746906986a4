"""Integration tests: eigenstates through energy distributions and residuals."""

import math

import numpy as np
import pytest
from src.classrep.classrep_equation import phi_from_f, residual_density_ode, residual_integro
from src.classrep.config import Potential, RunConfig
from src.classrep.eigensolver import c_n1, c_np, density_derivatives, oracle_solve, solve
from src.classrep.ensemble import (
    asymptotic_f,
    build_distribution,
    cumulative,
    find_nodes,
    fit_small_eps_exponent,
    forward_abel,
    harmonic_f,
    limit_nodes,
    log_singularity_fit,
    mean_energy,
    mean_energy_fraction_below,
)
from src.classrep.processor import ClassrepProcessor

pytestmark = pytest.mark.integration


@pytest.fixture(scope="module")
def solved():
    """States n = 0..6 for a given m, solved once per module."""
    cache = {}

    def get(m):
        if m not in cache:
            cache[m] = solve(Potential(m=m), 6)
        return cache[m]

    return get


@pytest.fixture(scope="module")
def distribution(solved):
    """Energy distribution of state (m, n), built once per module."""
    cache = {}

    def get(m, n):
        if (m, n) not in cache:
            cache[m, n] = build_distribution(solved(m)[n])
        return cache[m, n]

    return get


@pytest.fixture(scope="module")
def harmonic_states():
    """Numerical m = 1 states n = 0..4."""
    return solve(Potential(m=1), 4)


@pytest.fixture(scope="module")
def quartic_ground():
    """Numerical m = 2 ground state and its distribution."""
    sol = solve(Potential(m=2), 0)[0]
    return sol, build_distribution(sol)


@pytest.fixture(scope="module")
def sextic_states():
    """Numerical m = 5 states n = 0..4 with distributions for n = 0 and 4."""
    states = solve(Potential(m=5), 4)
    return {n: (states[n], build_distribution(states[n])) for n in (0, 4)}


@pytest.fixture(scope="module")
def steep_state():
    """Numerical m = 100, n = 4 state and its distribution."""
    sol = solve(Potential(m=100), 4)[4]
    return sol, build_distribution(sol)


@pytest.mark.parametrize("n", [0, 2, 4])
def test_harmonic_distribution_from_numerical_state(harmonic_states, n):
    """Test f_n from solved m = 1 states against (-1)^n exp(-eps) L_n(2 eps)."""
    f = build_distribution(harmonic_states[n])

    np.testing.assert_allclose(f.f, harmonic_f(n, f.eps_grid), atol=1e-6)
    assert len(find_nodes(f)) == n


def test_quartic_ground_state(quartic_ground):
    """Test normalization, mean energy and the log singularity for m = 2."""
    sol, f = quartic_ground
    _, _, r_squared = log_singularity_fit(f)

    assert f.integral == pytest.approx(1.0, abs=1e-3)
    assert mean_energy(f) == pytest.approx(sol.epsilon, rel=5e-3)
    assert np.all(f.f > 0)
    assert r_squared > 0.99


def test_quartic_residuals(quartic_ground):
    """Test both equations on the m = 2 ground state."""
    sol, f = quartic_ground

    assert residual_density_ode(sol) < 1e-6
    assert residual_integro(phi_from_f(f), sol.epsilon, 2) < 1e-3


def test_quartic_against_oracle(quartic_ground):
    """Test the collocation eigenvalue against Numerov shooting."""
    sol, _ = quartic_ground

    assert sol.epsilon == pytest.approx(oracle_solve(2, 0), rel=1e-8)


@pytest.mark.parametrize("n", [0, 4])
def test_m5_distributions(sextic_states, n):
    """Test normalization, node count and the eps^(-7/10) head for m = 5."""
    sol, f = sextic_states[n]

    assert f.integral == pytest.approx(1.0, abs=1e-3)
    assert mean_energy(f) == pytest.approx(sol.epsilon, rel=5e-3)
    assert len(find_nodes(f)) == n
    assert fit_small_eps_exponent(f) == pytest.approx(-0.7, abs=0.05)
    assert cumulative(f).F[-1] == pytest.approx(1.0, abs=1e-3)


@pytest.mark.slow
def test_m100_state(steep_state):
    """Test eps_4, nodes near k/5 in the scaled variable and the negligible low-energy share."""
    sol, f = steep_state
    nodes = find_nodes(f)

    assert sol.epsilon == pytest.approx(56.17, rel=5e-3)
    assert f.integral == pytest.approx(1.0, abs=1e-3)
    assert mean_energy(f) == pytest.approx(sol.epsilon, rel=5e-3)
    assert len(nodes) == 4
    np.testing.assert_allclose(nodes ** (1.0 / 200), limit_nodes(4), atol=0.02)
    assert abs(mean_energy_fraction_below(f, 1.0)) < 2e-3
    assert fit_small_eps_exponent(f) == pytest.approx(-1.0 + 3.0 / 200, abs=0.05)


@pytest.mark.slow
def test_box_trend():
    """Test that eps_4(m) approaches 25 pi^2 / 4 monotonically."""
    values = [solve(Potential(m=m), 4)[4].epsilon for m in (10, 20, 50, 100, 200)]
    gaps = np.abs(np.array(values) - 25.0 * math.pi**2 / 4.0)

    assert np.all(np.diff(gaps) < 0)


def test_processor_workers_match_serial():
    """Test that a process pool gives the same distributions as a serial run."""
    config = RunConfig(m_list=[1, 3], n_list=[0, 1])
    serial = list(ClassrepProcessor(config).process_distributions())
    parallel = list(ClassrepProcessor(config.model_copy(update={"workers": 2})).process_distributions())

    assert [(m, n) for m, n, _, _ in parallel] == [(m, n) for m, n, _, _ in serial]
    for (_, _, _, f_serial), (_, _, _, f_parallel) in zip(serial, parallel):
        np.testing.assert_array_equal(f_serial.f, f_parallel.f)


@pytest.mark.parametrize("n", [0, 4])
@pytest.mark.parametrize("m", [3, 5, 10, pytest.param(100, marks=pytest.mark.slow)])
def test_small_energy_exponent(distribution, m, n):
    """Test the fitted small-energy exponent against -1 + 3/(2m)."""
    f = distribution(m, n)

    assert fit_small_eps_exponent(f) == pytest.approx(-1.0 + 3.0 / (2 * m), abs=0.05)


@pytest.mark.parametrize("m", [2, 3, 5])
def test_odd_state_diverges_negatively(solved, distribution, m):
    """Test that f_1 runs to -infinity at small energy with the sign of its asymptotic form."""
    sol = solved(m)[1]
    f = distribution(m, 1)
    body = f.f[f.eps_grid >= 0.1 * sol.epsilon]
    _, leading = asymptotic_f(f.eps_grid[0], 1, m, c_n1(sol))

    assert f.f[0] < -100.0 * np.max(np.abs(body))
    assert leading < 0
    if m > 2:
        assert 0.8 < f.f[0] / leading < 1.25


@pytest.mark.parametrize("n", [0, 1])
def test_c_np_matches_density_derivatives(solved, n):
    """Test c_np (2p-1)! against finite differences of rho'' at the origin for m = 5."""
    sol = solved(5)[n]
    h = 0.02
    _, _, d2rho = density_derivatives(sol, h * np.arange(-3, 4))
    derivatives = {
        1: d2rho[3],
        2: (d2rho[2] - 2.0 * d2rho[3] + d2rho[4]) / h**2,
        3: (d2rho[1] - 4.0 * d2rho[2] + 6.0 * d2rho[3] - 4.0 * d2rho[4] + d2rho[5]) / h**4,
    }

    for p, value in derivatives.items():
        assert c_np(sol, p) * math.factorial(2 * p - 1) == pytest.approx(value, rel=5e-3)


@pytest.mark.parametrize("n", [0, 4])
@pytest.mark.parametrize("m", [1, 2, 5])
def test_forward_abel_round_trip(solved, distribution, m, n):
    """Test that the forward transform of f_n gives back the solver density."""
    f = distribution(m, n)
    x = np.linspace(0.0, 0.9 * f.eps_grid[-1] ** (1.0 / (2 * m)), 41)

    density = forward_abel(f, x)
    expected, _, _ = density_derivatives(solved(m)[n], x)

    assert density.warnings == ()
    assert np.max(np.abs(density.rho - expected)) < 1e-4


@pytest.mark.slow
def test_steep_density_equation(solved):
    """Test the density equation on the m = 100 states n = 0..4."""
    for sol in solved(100)[:5]:
        assert residual_density_ode(sol) < RunConfig().tolerances.density_ode_numerical


@pytest.mark.slow
@pytest.mark.parametrize("m", [1, 2, 3, 5, 10, 50, 100])
def test_collocation_against_oracle(solved, m):
    """Test every eigenvalue n = 0..6 against Numerov shooting."""
    for sol in solved(m):
        assert sol.epsilon == pytest.approx(oracle_solve(m, sol.n), rel=1e-8)
