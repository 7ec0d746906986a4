"""Composite Gauss rules on panels, with embedded error estimates."""

import logging
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import special

from .errors import ConvergenceError

logger = logging.getLogger(__name__)

HIGH_ORDER = 20
LOW_ORDER = 10


@lru_cache(maxsize=32)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@lru_cache(maxsize=32)
def gauss_jacobi(order: int, alpha: float, beta: float) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Jacobi rule for the weight (1 - x)^alpha (1 + x)^beta on [-1, 1]."""
    nodes, weights = special.roots_jacobi(order, alpha, beta)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def panel_nodes(left: np.ndarray, right: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of a Gauss-Legendre rule on every panel [left_i, right_i].

    Returns arrays of shape (n_panels, order).
    """
    nodes, weights = gauss_legendre(order)
    half = 0.5 * (right - left)[:, None]
    return left[:, None] + half * (nodes + 1.0), half * weights


def _panel_sums(func, left, right, order):
    x, w = panel_nodes(left, right, order)
    values = np.asarray(func(x.ravel())).reshape(x.shape)
    return (values * w).sum(axis=1), (np.abs(values) * w).sum(axis=1)


def adaptive_panels(
    func: Callable[[np.ndarray], np.ndarray],
    breaks: np.ndarray,
    rtol: float = 1e-10,
    atol: float = 0.0,
    max_rounds: int = 40,
) -> tuple[float, float]:
    """Integrate a vectorized function over panels, bisecting the inaccurate ones.

    Each panel is integrated with a 20-point and a 10-point Gauss-Legendre
    rule and their difference is taken as the panel error. Panels whose error
    exceeds their length-proportional share of max(rtol * L1, atol) are
    halved, L1 being the integral of |func|; the others are frozen.

    Returns:
        Tuple of (integral, error_estimate)

    Raises:
        ConvergenceError: If the tolerance is not met after max_rounds
    """
    breaks = np.asarray(breaks, dtype=float)
    span = breaks[-1] - breaks[0]
    left, right = breaks[:-1], breaks[1:]
    frozen_value = 0.0
    frozen_error = 0.0
    frozen_norm = 0.0
    for _ in range(max_rounds):
        hi, hi_abs = _panel_sums(func, left, right, HIGH_ORDER)
        lo, _ = _panel_sums(func, left, right, LOW_ORDER)
        errors = np.abs(hi - lo)
        total = frozen_value + hi.sum()
        error = frozen_error + errors.sum()
        target = max(rtol * (frozen_norm + hi_abs.sum()), atol)
        if error <= target:
            return float(total), float(error)

        bad = errors > target * (right - left) / span
        if not bad.any():
            # errors are spread evenly; halve the worst panels
            bad = errors >= np.quantile(errors, 0.5)
        frozen_value += hi[~bad].sum()
        frozen_error += errors[~bad].sum()
        frozen_norm += hi_abs[~bad].sum()
        mid = 0.5 * (left[bad] + right[bad])
        left, right = np.concatenate([left[bad], mid]), np.concatenate([mid, right[bad]])
    raise ConvergenceError(
        "adaptive panel quadrature did not converge",
        estimate=float(frozen_value + hi.sum()),
        error_bound=float(frozen_error + errors.sum()),
    )


def geometric_breaks(start: float, stop: float, ratio: float = 2.0) -> np.ndarray:
    """Breakpoints start, start*ratio, ... up to and including stop (start > 0)."""
    if stop <= start:
        return np.array([stop])
    count = int(np.ceil(np.log(stop / start) / np.log(ratio)))
    points = start * ratio ** np.arange(count)
    return np.append(points[points < stop], stop)
