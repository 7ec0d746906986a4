"""Tests for figures module."""

import math
from unittest.mock import Mock, patch

import numpy as np
import pytest
from src.classrep.config import RunConfig
from src.classrep.eigensolver import analytic_harmonic
from src.classrep.ensemble import EnergyDistribution, harmonic_f
from src.classrep.errors import DomainError
from src.classrep.figures import FIGURES, figure_config, figure_data

pytestmark = pytest.mark.unit


def _harmonic_solve(potential, n_max, solver):
    return [analytic_harmonic(n) for n in range(n_max + 1)]


def _harmonic_distribution(n: int) -> EnergyDistribution:
    eps = np.geomspace(1e-4, 40.0, 800)
    return EnergyDistribution(
        n=n,
        m=1,
        epsilon_n=2.0 * n + 1.0,
        eps_grid=eps,
        f=harmonic_f(n, eps),
        grid_type="geometric",
        integral=1.0,
        mean_energy=2.0 * n + 1.0,
        head_exponent=0.0,
    )


def _processor_yielding(*items):
    processor = Mock()
    processor.process_distributions.side_effect = lambda: iter(items)
    processor.failures = []
    return processor


def test_eleven_figures():
    """Test that figures 1..11 are defined with their state index."""
    assert sorted(FIGURES) == list(range(1, 12))
    assert [FIGURES[k].n for k in (1, 2, 5, 6)] == [0, 0, 0, 0]
    assert all(FIGURES[k].n == 4 for k in (3, 4, 7, 8, 9, 10, 11))


def test_figure_config_fixed_exponents():
    """Test that fixed-m figures override m_list and every figure sets n."""
    base = RunConfig(m_list=[2, 3], n_list=[0, 1, 2])

    assert figure_config(10, base).m_list == [5, 100]
    assert figure_config(10, base).n_list == [4]
    assert figure_config(5, base).m_list == [2, 3]
    assert base.n_list == [0, 1, 2]


def test_figure_config_unknown_number():
    """Test that figure 12 is rejected."""
    with pytest.raises(DomainError):
        figure_config(12, RunConfig())


@patch("src.classrep.processor.solve", side_effect=_harmonic_solve)
def test_eigenvalue_figure(mock_solve):
    """Test the eigenvalue table including the box row with both conventions."""
    table, processor = figure_data(2, RunConfig(m_list=[1, "infinite"]))

    assert table["m"].tolist() == ["1", "infinite"]
    assert table["epsilon"].tolist() == pytest.approx([1.0, math.pi**2 / 4.0])
    assert table["wkb0"].iloc[0] == pytest.approx(1.0)
    assert math.isnan(table["wkb0"].iloc[1])
    assert table["box_pi2_over_8"].iloc[1] == pytest.approx(math.pi**2 / 8.0)
    assert processor.failures == []


@patch("src.classrep.processor.solve", side_effect=_harmonic_solve)
def test_density_figure(mock_solve):
    """Test the density table samples and turning points."""
    table, _ = figure_data(1, RunConfig(m_list=[1], points=11))

    assert len(table) == 11
    assert table["x"].iloc[0] == 0.0
    assert table["rho"].iloc[0] == pytest.approx(1.0 / math.sqrt(math.pi))
    assert table["turning_point"].unique().tolist() == pytest.approx([1.0])


@patch("src.classrep.figures.ClassrepProcessor")
def test_distribution_with_nodes_figure(mock_processor_class):
    """Test curve rows followed by node rows at f = 0."""
    f = _harmonic_distribution(4)
    mock_processor_class.return_value = _processor_yielding((1, 4, Mock(), f))

    table, _ = figure_data(8, RunConfig())

    nodes = table[table["kind"] == "node"]
    assert len(table[table["kind"] == "curve"]) == f.eps_grid.size
    assert len(nodes) == 4
    assert (nodes["f"] == 0.0).all()


@patch("src.classrep.figures.ClassrepProcessor")
def test_scaled_figure_has_limit_nodes(mock_processor_class):
    """Test that the scaled table ends with the k/(n+1) limit nodes."""
    mock_processor_class.return_value = _processor_yielding((1, 4, Mock(), _harmonic_distribution(4)))

    table, _ = figure_data(10, RunConfig())

    limits = table[table["m"] == "limit"]
    assert limits["y"].tolist() == pytest.approx([0.2, 0.4, 0.6, 0.8])


@patch("src.classrep.figures.ClassrepProcessor")
def test_cumulative_figure_columns(mock_processor_class):
    """Test that the cumulative figures carry F next to f."""
    mock_processor_class.return_value = _processor_yielding((1, 0, Mock(), _harmonic_distribution(0)))

    table, _ = figure_data(6, RunConfig())

    assert list(table.columns) == ["m", "n", "eps", "f", "F"]
    assert table["F"].iloc[-1] == pytest.approx(1.0, abs=1e-3)


@patch("src.classrep.figures.ClassrepProcessor")
def test_empty_distribution_figure(mock_processor_class):
    """Test that a run with no successful distribution yields an empty table."""
    mock_processor_class.return_value = _processor_yielding()

    table, _ = figure_data(5, RunConfig(m_list=["infinite"]))

    assert table.empty
