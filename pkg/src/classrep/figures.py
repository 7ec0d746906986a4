"""Data tables behind the eleven standard plots of densities and distributions.

Each figure is a long-format DataFrame (one row per sample, an ``m`` column
telling the curves apart). Figures that track a fixed set of exponents
ignore the run's m_list; the others follow it.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import pandas as pd

from .config import INFINITE, Exponent, RunConfig
from .eigensolver import box_eigenvalue, support_end, turning_point
from .ensemble import cumulative, find_nodes, limit_nodes, scaled_distribution, tail_profile
from .errors import DomainError
from .processor import ClassrepProcessor
from .wkb import wkb0, wkb2, wkb_limits

logger = logging.getLogger(__name__)

DEFAULT_POINTS = 401


@dataclass(frozen=True)
class FigureSpec:
    """Which states a figure needs and how its table is built."""

    number: int
    title: str
    n: int
    m_values: tuple[Exponent, ...] | None
    builder: Callable[[ClassrepProcessor, int], pd.DataFrame]


def _density_table(processor: ClassrepProcessor, n: int) -> pd.DataFrame:
    points = processor.config.points or DEFAULT_POINTS
    frames = []
    for m, state_n, sol in processor.process_states():
        if state_n != n:
            continue
        x_end = 1.0 if sol.is_box else min(support_end(sol, 1e-10), sol.x_max)
        x = np.linspace(0.0, x_end, points)
        rho = sol.wavefunction(x) ** 2
        frames.append(
            pd.DataFrame(
                {
                    "m": str(m),
                    "n": n,
                    "x": x,
                    "rho": rho,
                    "turning_point": turning_point(sol.epsilon, m),
                }
            )
        )
    return pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()


def _eigenvalue_table(processor: ClassrepProcessor, n: int) -> pd.DataFrame:
    rows = []
    for m, state_n, sol in processor.process_states():
        if state_n != n:
            continue
        if m == INFINITE:
            w0 = w2 = limit0 = limit2 = math.nan
        else:
            w0, w2 = wkb0(n, m).epsilon, wkb2(n, m).epsilon
            limit0, limit2 = wkb_limits(n, m)
        rows.append(
            {
                "m": str(m),
                "n": n,
                "epsilon": sol.epsilon,
                "wkb0": w0,
                "wkb2": w2,
                "wkb0_limit": limit0,
                "wkb2_limit": limit2,
                "box_pi2_over_4": box_eigenvalue(n),
                # the halved convention some references quote for the ground state
                "box_pi2_over_8": box_eigenvalue(n) / 2.0,
            }
        )
    return pd.DataFrame(rows)


def _distribution_table(processor: ClassrepProcessor, n: int, with_cumulative: bool = False) -> pd.DataFrame:
    frames = []
    for m, state_n, _, f in processor.process_distributions():
        if state_n != n:
            continue
        columns = {"m": str(m), "n": n, "eps": f.eps_grid, "f": f.f}
        if with_cumulative:
            columns["F"] = cumulative(f).F
        frames.append(pd.DataFrame(columns))
    return pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()


def _distribution_with_nodes(processor: ClassrepProcessor, n: int) -> pd.DataFrame:
    frames = []
    for m, state_n, _, f in processor.process_distributions():
        if state_n != n:
            continue
        nodes = find_nodes(f)
        frames.append(pd.DataFrame({"m": str(m), "n": n, "kind": "curve", "eps": f.eps_grid, "f": f.f}))
        frames.append(pd.DataFrame({"m": str(m), "n": n, "kind": "node", "eps": nodes, "f": np.zeros_like(nodes)}))
    return pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()


def _scaled_table(processor: ClassrepProcessor, n: int) -> pd.DataFrame:
    frames = []
    for m, state_n, _, f in processor.process_distributions():
        if state_n != n:
            continue
        y, g = scaled_distribution(f)
        frames.append(pd.DataFrame({"m": str(m), "n": n, "kind": "curve", "y": y, "g": g}))
    limits = np.array(limit_nodes(n))
    frames.append(pd.DataFrame({"m": "limit", "n": n, "kind": "node", "y": limits, "g": np.zeros_like(limits)}))
    return pd.concat(frames, ignore_index=True)


def _tail_table(processor: ClassrepProcessor, n: int) -> pd.DataFrame:
    frames = []
    for m, state_n, _, f in processor.process_distributions():
        if state_n != n:
            continue
        eps, values, weighted = tail_profile(f)
        frames.append(pd.DataFrame({"m": str(m), "n": n, "eps": eps, "f": values, "eps_f": weighted}))
    return pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()


FIGURES: dict[int, FigureSpec] = {
    1: FigureSpec(1, "ground-state densities", 0, None, _density_table),
    2: FigureSpec(2, "ground-state eigenvalues against m", 0, None, _eigenvalue_table),
    3: FigureSpec(3, "n = 4 densities", 4, None, _density_table),
    4: FigureSpec(4, "n = 4 eigenvalues against m", 4, None, _eigenvalue_table),
    5: FigureSpec(5, "ground-state distributions", 0, None, _distribution_table),
    6: FigureSpec(6, "ground-state cumulative distributions", 0, None, lambda p, n: _distribution_table(p, n, True)),
    7: FigureSpec(7, "n = 4 distributions for m = 1, 2", 4, (1, 2), _distribution_table),
    8: FigureSpec(8, "n = 4 distribution and nodes for m = 5", 4, (5,), _distribution_with_nodes),
    9: FigureSpec(9, "n = 4 cumulative distributions", 4, None, lambda p, n: _distribution_table(p, n, True)),
    10: FigureSpec(10, "scaled n = 4 distributions against the limit nodes", 4, (5, 100), _scaled_table),
    11: FigureSpec(11, "n = 4 distribution tail for m = 100", 4, (100,), _tail_table),
}


def figure_config(number: int, config: RunConfig) -> RunConfig:
    """The run configuration a figure actually needs (its n, and its m set if fixed)."""
    spec = FIGURES.get(number)
    if spec is None:
        raise DomainError(f"figure number must be in 1..{len(FIGURES)}, got {number}")
    update = {"n_list": [spec.n]}
    if spec.m_values is not None:
        update["m_list"] = list(spec.m_values)
    return config.model_copy(update=update)


def figure_data(number: int, config: RunConfig) -> tuple[pd.DataFrame, ClassrepProcessor]:
    """Build the table for one figure.

    Returns:
        Tuple of (table, processor); the processor carries any task failures

    Raises:
        DomainError: If the figure number is unknown
    """
    run = figure_config(number, config)
    spec = FIGURES[number]
    logger.info(f"Figure {number}: {spec.title} (m in {run.m_list}, n={spec.n})")
    processor = ClassrepProcessor(run)
    return spec.builder(processor, spec.n), processor
