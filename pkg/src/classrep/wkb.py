"""Zeroth- and second-order WKB eigenvalues of x^(2m) and their large-m forms."""

import math
from dataclasses import dataclass

from .errors import DomainError
from .special_functions import beta


@dataclass(frozen=True)
class WkbResult:
    n: int
    m: float
    order: int
    epsilon: float
    b1: float
    b2: float


def _check(n: int, m: float) -> None:
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if not m >= 1:
        raise DomainError(f"m must be >= 1, got {m}")


def _b_constants(m: float) -> tuple[float, float]:
    return beta(1.0 / (2.0 * m), 1.5), beta(1.0 - 1.0 / (2.0 * m), 0.5)


def wkb0(n: int, m: float) -> WkbResult:
    """eps = [pi m (n + 1/2) / B1]^(2m/(m+1)), B1 = B(1/(2m), 3/2)."""
    _check(n, m)
    b1, b2 = _b_constants(m)
    epsilon = (math.pi * m * (n + 0.5) / b1) ** (2.0 * m / (m + 1.0))
    return WkbResult(n=n, m=m, order=0, epsilon=epsilon, b1=b1, b2=b2)


def wkb2(n: int, m: float) -> WkbResult:
    """Second-order WKB eigenvalue including the B1 B2 (2m-1)(m-1) correction."""
    _check(n, m)
    b1, b2 = _b_constants(m)
    q = n + 0.5
    correction = b1 * b2 * (2.0 * m - 1.0) * (m - 1.0) / (6.0 * math.pi**2 * m**2)
    base = math.pi * m / (2.0 * b1) * (q + math.sqrt(q * q + correction))
    epsilon = base ** (2.0 * m / (m + 1.0))
    return WkbResult(n=n, m=m, order=2, epsilon=epsilon, b1=b1, b2=b2)


def wkb_limits(n: int, m: float) -> tuple[float, float]:
    """Large-m forms of wkb0 and wkb2.

    The second form keeps its m dependence (4m / (3 pi^2) under the root).
    """
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    q = n + 0.5
    first = math.pi**2 * q * q / 4.0
    second = math.pi**2 / 16.0 * (q + math.sqrt(q * q + 4.0 * m / (3.0 * math.pi**2))) ** 2
    return first, second
