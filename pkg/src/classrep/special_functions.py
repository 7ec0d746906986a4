"""Special functions and series used throughout the classical-representation formulas.

Gamma, beta and the orthogonal polynomials delegate to scipy.special with
domain checks in front; the Gauss hypergeometric function for z <= 0 and the
auxiliary series S_mp are evaluated here.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import ConvergenceError, DomainError, RangeError

logger = logging.getLogger(__name__)

SERIES_TOLERANCE = 1e-12
MAX_SERIES_TERMS = 10_000_000
# Above this value of the Pfaff variable the power series is replaced by the Euler integral.
PFAFF_SERIES_LIMIT = 0.75
LOG_FLOAT_MAX = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class SeriesResult:
    """Value of a convergent series with its truncation diagnostics."""

    value: float
    terms_used: int
    tail_bound: float

    def __post_init__(self):
        if self.terms_used < 1 or self.tail_bound < 0 or not math.isfinite(self.value):
            raise ValueError(f"inconsistent series result {self}")


def ln_gamma(x: float) -> float:
    """Natural logarithm of Gamma(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"ln_gamma requires x > 0, got {x}")
    return float(special.gammaln(x))


def beta(p: float, q: float) -> float:
    """Euler beta function B(p, q) = Gamma(p) Gamma(q) / Gamma(p + q)."""
    if not (p > 0 and q > 0):
        raise DomainError(f"beta requires p, q > 0, got ({p}, {q})")
    return float(special.beta(p, q))


def _finite(value, what: str):
    if not np.all(np.isfinite(value)):
        raise RangeError(f"{what} is not representable as a finite double")
    return value


def hermite(n: int, x):
    """Physicists' Hermite polynomial H_n(x)."""
    if n < 0:
        raise DomainError(f"hermite requires n >= 0, got {n}")
    value = special.eval_hermite(n, x)
    return _finite(float(value) if np.ndim(value) == 0 else value, f"H_{n}")


def laguerre(n: int, x):
    """Laguerre polynomial L_n(x)."""
    if n < 0:
        raise DomainError(f"laguerre requires n >= 0, got {n}")
    value = special.eval_laguerre(n, x)
    return _finite(float(value) if np.ndim(value) == 0 else value, f"L_{n}")


def double_factorial(k: int) -> float:
    """k!! with the convention (-1)!! = 0!! = 1, evaluated in log space."""
    if k < -1:
        raise DomainError(f"double_factorial requires k >= -1, got {k}")
    if k <= 0:
        return 1.0
    half = k / 2.0
    if k % 2 == 0:
        # (2j)!! = 2^j j!
        log_value = half * math.log(2.0) + special.gammaln(half + 1.0)
    else:
        # (2j+1)!! = 2^(j+1) Gamma(j + 3/2) / sqrt(pi)
        log_value = (half + 0.5) * math.log(2.0) + special.gammaln(half + 1.0) - 0.5 * math.log(math.pi)
    if log_value > LOG_FLOAT_MAX:
        raise RangeError(f"{k}!! overflows a double")
    value = math.exp(log_value)
    return float(round(value)) if value < 2**53 else value


def _is_nonpositive_integer(value: float) -> bool:
    return value <= 0 and float(value).is_integer()


def _terminating_sum(a: float, b: float, c: float, z: float) -> float:
    degree = int(-a) if _is_nonpositive_integer(a) else int(-b)
    k = np.arange(degree)
    ratios = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
    return float(1.0 + np.cumprod(ratios).sum())


def _power_series(a: float, b: float, c: float, w: float) -> float:
    """Sum the 2F1 series at 0 <= w < 1 in vectorized chunks."""
    total = 1.0
    term = 1.0
    start = 0
    chunk = 256
    while start < MAX_SERIES_TERMS:
        k = np.arange(start, start + chunk, dtype=float)
        ratios = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * w
        terms = term * np.cumprod(ratios)
        total += terms.sum()
        term = terms[-1]
        start += chunk
        # geometric tail bound once the ratio has settled below one
        last_ratio = abs(ratios[-1])
        if last_ratio < 1.0:
            tail = abs(term) * last_ratio / (1.0 - last_ratio)
            if tail <= 1e-16 * abs(total) or term == 0.0:
                return float(total)
        chunk = min(chunk * 2, 1 << 16)
    raise ConvergenceError(
        f"2F1({a}, {b}; {c}; {w}) series did not converge in {MAX_SERIES_TERMS} terms",
        estimate=float(total),
        error_bound=abs(float(term)),
    )


def _euler_integral(a: float, b: float, c: float, w: float) -> float:
    """2F1(a, b; c; w) = Gamma(c)/(Gamma(b)Gamma(c-b)) int_0^1 t^(b-1)(1-t)^(c-b-1)(1-wt)^(-a) dt."""
    value, abserr = integrate.quad(
        lambda t: (1.0 - w * t) ** (-a),
        0.0,
        1.0,
        weight="alg",
        wvar=(b - 1.0, c - b - 1.0),
        epsabs=0.0,
        epsrel=1e-13,
        limit=200,
    )
    if abserr > 1e-10 * abs(value):
        raise ConvergenceError(
            f"Euler integral for 2F1({a}, {b}; {c}; {w}) did not converge",
            estimate=value,
            error_bound=abserr,
        )
    log_norm = special.gammaln(c) - special.gammaln(b) - special.gammaln(c - b)
    return float(math.exp(log_norm) * value)


def _gauss_2f1_scalar(a: float, b: float, c: float, z: float) -> float:
    if z > 0:
        raise DomainError(f"gauss_2f1 is restricted to z <= 0, got z={z}")
    if _is_nonpositive_integer(c):
        raise DomainError(f"gauss_2f1 requires c not a non-positive integer, got c={c}")
    if z == 0.0:
        return 1.0
    if _is_nonpositive_integer(a) or _is_nonpositive_integer(b):
        return _terminating_sum(a, b, c, z)

    # Pfaff: F(a,b;c;z) = (1-z)^(-a) F(a, c-b; c; z/(z-1)) with z/(z-1) in [0, 1)
    w = z / (z - 1.0)
    for first, second in ((a, c - b), (b, c - a)):
        prefactor = (1.0 - z) ** (-first)
        if _is_nonpositive_integer(second):
            return prefactor * _terminating_sum(first, second, c, w)
        if w <= PFAFF_SERIES_LIMIT:
            return prefactor * _power_series(first, second, c, w)
        if c > second > 0:
            return prefactor * _euler_integral(first, second, c, w)
    logger.debug(f"2F1({a}, {b}; {c}; {z}): no Euler representation, summing slowly convergent series")
    return (1.0 - z) ** (-a) * _power_series(a, c - b, c, w)


def gauss_2f1(a: float, b: float, c: float, z):
    """Gauss hypergeometric function 2F1(a, b; c; z) for real z <= 0.

    Accepts a scalar or an array of z values.

    Raises:
        DomainError: If c is a non-positive integer or any z > 0
        ConvergenceError: If the series or the Euler integral fails to converge
    """
    if np.ndim(z) == 0:
        return _gauss_2f1_scalar(float(a), float(b), float(c), float(z))
    zs = np.asarray(z, dtype=float)
    return np.array([_gauss_2f1_scalar(a, b, c, float(v)) for v in zs.ravel()]).reshape(zs.shape)


def p_max(m: int) -> int:
    """Largest p for which eps^(-1/2 + p/m) is singular: m/2 - 1 (even m), (m-1)/2 (odd m)."""
    if m < 1:
        raise DomainError(f"p_max requires m >= 1, got {m}")
    return m // 2 - 1 if m % 2 == 0 else (m - 1) // 2


def _log_half_ratio(k):
    """ln[(2k-1)!! / (2k)!!] = ln Gamma(k + 1/2) - ln Gamma(k + 1) - ln(pi)/2."""
    return special.gammaln(k + 0.5) - special.gammaln(k + 1.0) - 0.5 * math.log(math.pi)


def s_series(m: int, p: int) -> SeriesResult:
    """S_mp = sum_k (2k-1)!! / [(2k)!! ((2k+1) m - 2p)] for 1 <= p <= p_max(m).

    Terms decay like k^(-3/2), so the partial sum is completed with an
    Euler-Maclaurin tail (integral plus endpoint corrections). The number of
    explicit terms doubles until the estimated tail error drops below 1e-12.

    Raises:
        DomainError: If p is outside 1..p_max(m), including vanishing denominators
        ConvergenceError: If the tail error bound cannot be met
    """
    if p < 1:
        raise DomainError(f"s_series requires p >= 1, got {p}")
    top = p_max(m)
    if p > top or m - 2 * p <= 0:
        raise DomainError(f"s_series(m={m}, p={p}) requires 1 <= p <= p_max(m) = {top}")

    def term(k):
        return np.exp(_log_half_ratio(k)) / ((2.0 * k + 1.0) * m - 2.0 * p)

    def term_log_derivative(k):
        return special.digamma(k + 0.5) - special.digamma(k + 1.0) - 2.0 * m / ((2.0 * k + 1.0) * m - 2.0 * p)

    terms_used = 64
    while terms_used <= MAX_SERIES_TERMS:
        k = np.arange(terms_used, dtype=float)
        partial = float(term(k).sum())
        big_k = float(terms_used)
        tail_integral, quad_error = integrate.quad(term, big_k, np.inf, epsabs=1e-15, epsrel=1e-13, limit=200)
        g_k = float(term(big_k))
        g_prime = g_k * float(term_log_derivative(big_k))
        # Euler-Maclaurin: sum_{k>=K} g(k) = int_K^inf g + g(K)/2 - g'(K)/12 + ...
        value = partial + tail_integral + 0.5 * g_k - g_prime / 12.0
        # next correction is g'''(K)/720 with g ~ k^(-3/2) so |g'''| ~ (105/8) g / K^3
        tail_bound = (105.0 / 8.0) * g_k / big_k**3 / 720.0 + quad_error
        if tail_bound < SERIES_TOLERANCE:
            logger.debug(f"S_{m},{p} = {value:.15g} with {terms_used} terms, tail bound {tail_bound:.2e}")
            return SeriesResult(value=value, terms_used=terms_used, tail_bound=tail_bound)
        terms_used *= 2
    raise ConvergenceError(f"S_{m},{p} did not reach tolerance {SERIES_TOLERANCE}", estimate=value, error_bound=tail_bound)


def s_series_closed_form(m: int, p: int) -> float:
    """S_mp = B((m - 2p)/(2m), 1/2) / (2m), summing the binomial series under an integral."""
    if not 1 <= p <= p_max(m):
        raise DomainError(f"s_series_closed_form(m={m}, p={p}) requires 1 <= p <= p_max(m)")
    return beta((m - 2.0 * p) / (2.0 * m), 0.5) / (2.0 * m)
