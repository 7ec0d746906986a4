"""Tests for the panel quadrature and Sinc collocation helpers."""

import math

import numpy as np
import pytest
from src.classrep import sinc
from src.classrep.errors import ConvergenceError
from src.classrep.quadrature import adaptive_panels, gauss_jacobi, gauss_legendre, geometric_breaks, panel_nodes

pytestmark = pytest.mark.unit


def test_gauss_legendre_integrates_polynomials_exactly():
    """Test that an n-point rule is exact to degree 2n - 1."""
    nodes, weights = gauss_legendre(5)

    assert weights.sum() == pytest.approx(2.0)
    assert (weights * nodes**8).sum() == pytest.approx(2.0 / 9.0, rel=1e-14)


def test_gauss_legendre_is_cached_and_read_only():
    """Test that cached rules cannot be modified in place."""
    nodes, _ = gauss_legendre(7)

    assert gauss_legendre(7)[0] is nodes
    with pytest.raises(ValueError):
        nodes[0] = 0.0


def test_gauss_jacobi_weight():
    """Test int_{-1}^{1} (1 - x)^(-1/2) dx = 2 sqrt(2)."""
    _, weights = gauss_jacobi(12, -0.5, 0.0)

    assert weights.sum() == pytest.approx(2.0 * math.sqrt(2.0), rel=1e-13)


def test_panel_nodes_shapes():
    """Test nodes and weights on several panels."""
    x, w = panel_nodes(np.array([0.0, 1.0]), np.array([1.0, 3.0]), 4)

    assert x.shape == (2, 4)
    assert w.sum() == pytest.approx(3.0)
    assert np.all((x[1] > 1.0) & (x[1] < 3.0))


def test_adaptive_panels_smooth():
    """Test a smooth integrand on a single panel."""
    value, error = adaptive_panels(np.exp, np.array([0.0, 1.0]))

    assert value == pytest.approx(math.e - 1.0, rel=1e-12)
    assert error < 1e-9


def test_adaptive_panels_refines_sharp_feature():
    """Test that a narrow peak is resolved by bisection."""
    width = 1e-3

    def peak(x):
        return width / (width**2 + (x - 0.3) ** 2)

    value, _ = adaptive_panels(peak, np.array([0.0, 1.0]), rtol=1e-10)
    exact = math.atan(0.7 / width) + math.atan(0.3 / width)

    assert value == pytest.approx(exact, rel=1e-9)


def test_adaptive_panels_oscillatory_uses_l1_scale():
    """Test convergence when the signed integral nearly cancels."""
    value, _ = adaptive_panels(lambda x: np.sin(2.0 * np.pi * x), np.array([0.0, 1.0]), rtol=1e-12)

    assert abs(value) < 1e-11


def test_adaptive_panels_gives_up():
    """Test that an impossible tolerance raises ConvergenceError with an estimate."""
    with pytest.raises(ConvergenceError) as exc_info:
        adaptive_panels(
            lambda x: 1.0 / np.sqrt(np.abs(x - 0.5) + 1e-300), np.array([0.0, 1.0]), rtol=1e-15, max_rounds=3
        )

    assert exc_info.value.estimate is not None


def test_geometric_breaks():
    """Test doubling breakpoints ending exactly at stop."""
    breaks = geometric_breaks(0.1, 1.0)

    np.testing.assert_allclose(breaks, [0.1, 0.2, 0.4, 0.8, 1.0])
    assert geometric_breaks(2.0, 1.0).tolist() == [1.0]


def test_de_map_derivatives():
    """Test the map derivatives against finite differences."""
    t = np.linspace(-2.0, 2.0, 9)
    step = 1e-5
    x, d1, d2, d3 = sinc.de_map(t, 0.7)
    _, d1p, d2p, _ = sinc.de_map(t + step, 0.7)
    _, d1m, d2m, _ = sinc.de_map(t - step, 0.7)

    np.testing.assert_allclose(d2, (d1p - d1m) / (2 * step), rtol=1e-7, atol=1e-9)
    np.testing.assert_allclose(d3, (d2p - d2m) / (2 * step), rtol=1e-7)
    np.testing.assert_allclose(sinc.inverse_de_map(x, 0.7), t, atol=1e-12)


def test_sinc_derivative_table():
    """Test tabulated derivatives of sinc at integers."""
    offsets = np.array([-2, -1, 0, 1, 2])

    np.testing.assert_allclose(sinc.sinc_derivative(offsets, 0), [0, 0, 1, 0, 0])
    np.testing.assert_allclose(sinc.sinc_derivative(offsets, 1), [-0.5, 1.0, 0.0, -1.0, 0.5])
    assert sinc.sinc_derivative(np.array([0]), 2)[0] == pytest.approx(-np.pi**2 / 3.0)
    with pytest.raises(ValueError):
        sinc.sinc_derivative(offsets, 4)


def test_differentiate_gaussian():
    """Test Sinc differentiation of a well-resolved Gaussian."""
    h = 0.1
    t = h * np.arange(-200, 201)
    f = np.exp(-t * t)

    np.testing.assert_allclose(sinc.differentiate(f, h, 1), -2.0 * t * f, atol=1e-10)
    np.testing.assert_allclose(sinc.differentiate(f, h, 2), (4.0 * t * t - 2.0) * f, atol=1e-9)


def test_mirror_parity():
    """Test even and odd extension of half-grid samples."""
    half = np.array([0.0, 1.0, 2.0])

    assert sinc.mirror(half, 1).tolist() == [2.0, 1.0, 0.0, 1.0, 2.0]
    assert sinc.mirror(half, -1).tolist() == [-2.0, -1.0, 0.0, 1.0, 2.0]


def test_parity_blocks_are_symmetric():
    """Test that both reduced pencils are symmetric with the expected sizes."""
    potential = np.linspace(1.0, 2.0, 6)
    (even, even_w), (odd, odd_w) = sinc.parity_blocks(potential, np.ones(6), 0.2)

    assert even.shape == (6, 6) and odd.shape == (5, 5)
    assert even_w.shape == (6,) and odd_w.shape == (5,)
    np.testing.assert_allclose(even, even.T)
    np.testing.assert_allclose(odd, odd.T)


def test_upsample_length():
    """Test that resampling multiplies the number of samples."""
    assert sinc.upsample(np.exp(-np.linspace(-5, 5, 21) ** 2), 4).size == 84
