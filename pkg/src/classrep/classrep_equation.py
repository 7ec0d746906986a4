"""The third-order density equation, its integrodifferential form and the kernel Q.

With phi_n = f_n / T the density equation rho''' - 4(v - eps_n) rho' - 2 v' rho = 0
becomes

    (eps - eps_n) phi(eps) = 2/(15 pi) int_eps^inf Q(eps~, eps) phi'''(eps~) deps~

This module evaluates Q in closed form (hypergeometric), by direct quadrature
of its defining x-integral and in the m -> infinity limit, and measures how
well computed states satisfy both equations. It does not solve the integral
equation as an eigenproblem.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .config import INFINITE, Exponent
from .eigensolver import EigenSolution, density_ode_defect
from .ensemble import EnergyDistribution, period
from .errors import DomainError, NumericalError
from .quadrature import gauss_jacobi, gauss_legendre
from .special_functions import beta, gauss_2f1

logger = logging.getLogger(__name__)

FIT_WINDOW = 7
FIT_DEGREE = 5
MAX_CONDITION = 1e10
MAX_SAMPLES = 24
SAMPLE_FLOOR = 0.05
SUPPORT_FLOOR = 1e-8
THIRD_DERIVATIVE_CUT = 1e-12


@dataclass(frozen=True, eq=False)
class PhiFunction:
    """phi_n = f_n / T with its first three energy derivatives on eps_grid."""

    n: int
    m: Exponent
    eps_grid: np.ndarray
    phi: np.ndarray
    first_derivative: np.ndarray
    second_derivative: np.ndarray
    third_derivative: np.ndarray
    epsilon_n: float | None = None


@dataclass(frozen=True)
class KernelEvaluation:
    eps_tilde: float
    eps: float
    m: int
    value: float
    terms: tuple[float, float, float]


def phi_from_f(f: EnergyDistribution) -> PhiFunction:
    """phi = f/T with derivatives from local quintic least squares in u = ln(eps).

    Each sample gets a degree-5 fit over a 7-point window; u-derivatives are
    converted with phi_eps = phi_u/eps, phi_eps2 = (phi_uu - phi_u)/eps^2 and
    phi_eps3 = (phi_uuu - 3 phi_uu + 2 phi_u)/eps^3.

    Raises:
        NumericalError: If the grid is too small or a window is ill-conditioned
    """
    eps = f.eps_grid
    size = eps.size
    if size < FIT_WINDOW:
        raise NumericalError(f"need at least {FIT_WINDOW} grid points for derivative fits, got {size}")
    m = int(f.m)
    phi = f.f / period(eps, m)
    u = np.log(eps)

    centre = np.arange(size)
    start = np.clip(centre - FIT_WINDOW // 2, 0, size - FIT_WINDOW)
    window = start[:, None] + np.arange(FIT_WINDOW)[None, :]
    offsets = u[window] - u[:, None]
    scale = np.max(np.abs(offsets), axis=1)
    design = (offsets / scale[:, None])[:, :, None] ** np.arange(FIT_DEGREE + 1)[None, None, :]

    condition = np.linalg.cond(design)
    if np.max(condition) > MAX_CONDITION:
        raise NumericalError(
            f"derivative fit ill-conditioned (condition number {np.max(condition):.3e}); grid too sparse or irregular"
        )
    coefficients = np.einsum("ijk,ik->ij", np.linalg.pinv(design), phi[window])
    phi_u = coefficients[:, 1] / scale
    phi_uu = 2.0 * coefficients[:, 2] / scale**2
    phi_uuu = 6.0 * coefficients[:, 3] / scale**3

    return PhiFunction(
        n=f.n,
        m=m,
        eps_grid=eps,
        phi=phi,
        first_derivative=phi_u / eps,
        second_derivative=(phi_uu - phi_u) / eps**2,
        third_derivative=(phi_uuu - 3.0 * phi_uu + 2.0 * phi_u) / eps**3,
        epsilon_n=f.epsilon_n,
    )


def harmonic_ode_solution(n: int, eps_grid) -> PhiFunction:
    """phi_n = (-1)^n exp(-eps) L_n(2 eps) / pi with eps_n = 2n + 1, derivatives exact."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    eps = np.asarray(eps_grid, dtype=float)
    x = 2.0 * eps

    def laguerre_derivative(j):
        # d^j/deps^j L_n(2 eps) = (-2)^j L_{n-j}^{(j)}(2 eps)
        if j > n:
            return np.zeros_like(eps)
        return (-2.0) ** j * special.eval_genlaguerre(n - j, j, x)

    p0, p1, p2, p3 = (laguerre_derivative(j) for j in range(4))
    scale = (-1) ** n * np.exp(-eps) / math.pi
    return PhiFunction(
        n=n,
        m=1,
        eps_grid=eps,
        phi=scale * p0,
        first_derivative=scale * (p1 - p0),
        second_derivative=scale * (p2 - 2.0 * p1 + p0),
        third_derivative=scale * (p3 - 3.0 * p2 + 3.0 * p1 - p0),
        epsilon_n=2.0 * n + 1.0,
    )


def kernel_coefficients(m: int) -> tuple[float, float, float]:
    """c_1 = -15 m^2/2, c_2 = 45 m (2m-1)/2, c_3 = -5 (2m-1)(m-1)."""
    return -7.5 * m * m, 22.5 * m * (2 * m - 1), -5.0 * (2 * m - 1) * (m - 1)


def _check_kernel_arguments(eps_tilde: float, eps: float, m) -> None:
    if m == INFINITE or m < 1:
        raise DomainError(f"kernel requires a finite m >= 1, got {m}")
    if not 0 < eps < eps_tilde:
        raise DomainError(f"kernel requires 0 < eps < eps_tilde, got eps={eps}, eps_tilde={eps_tilde}")


def kernel_q(eps_tilde: float, eps: float, m: int) -> KernelEvaluation:
    """Q(eps~, eps) = sum_k c_k(m) I_k with

    I_k = eps^(3-k-1/m) (eps~-eps)^(k-1) B(k-1/2, 1/2) F(k-3+1/m, 1/2; k; -(eps~-eps)/eps).
    """
    _check_kernel_arguments(eps_tilde, eps, m)
    gap = eps_tilde - eps
    z = -gap / eps
    terms = []
    for k, c in enumerate(kernel_coefficients(m), start=1):
        if c == 0.0:
            terms.append(0.0)
            continue
        integral = (
            eps ** (3.0 - k - 1.0 / m) * gap ** (k - 1) * beta(k - 0.5, 0.5) * gauss_2f1(k - 3.0 + 1.0 / m, 0.5, k, z)
        )
        terms.append(c * integral)
    return KernelEvaluation(eps_tilde=eps_tilde, eps=eps, m=m, value=float(sum(terms)), terms=tuple(terms))


def kernel_q_quadrature(eps_tilde: float, eps: float, m: int) -> float:
    """Q from its definition int (x^(2m)-eps)^(-1/2) d^3/dx^3 (eps~ - x^(2m))^(5/2) dx.

    Both endpoint singularities are inverse square roots and go into the
    algebraic quadrature weight; the remaining factor is evaluated with its
    endpoint limits.
    """
    _check_kernel_arguments(eps_tilde, eps, m)
    lo, hi = eps ** (1.0 / (2 * m)), eps_tilde ** (1.0 / (2 * m))
    two_m = 2 * m

    def smooth(x: float) -> float:
        if x <= lo:
            lower = two_m * lo ** (two_m - 1)
        else:
            lower = eps * math.expm1(two_m * math.log1p((x - lo) / lo)) / (x - lo)
        if x >= hi:
            upper = two_m * hi ** (two_m - 1)
        else:
            upper = -eps_tilde * math.expm1(two_m * math.log1p((x - hi) / hi)) / (hi - x)
        u = eps_tilde - x**two_m
        u1 = -two_m * x ** (two_m - 1)
        u2 = -two_m * (two_m - 1) * x ** (two_m - 2)
        u3 = -two_m * (two_m - 1) * (two_m - 2) * x ** (two_m - 3) if m > 1 else 0.0
        # d^3 u^(5/2) = u^(-1/2) [15/8 u'^3 + 45/4 u u' u'' + 5/2 u^2 u''']
        bracket = 1.875 * u1**3 + 11.25 * u * u1 * u2 + 2.5 * u * u * u3
        return bracket / math.sqrt(lower * upper)

    value, abserr = integrate.quad(
        smooth, lo, hi, weight="alg", wvar=(-0.5, -0.5), epsabs=0.0, epsrel=1e-12, limit=200
    )
    logger.debug(f"Q quadrature m={m} ({eps_tilde}, {eps}) = {value:.15g} +- {abserr:.1e}")
    return value


def kernel_q_box_limit(eps_tilde: float, eps: float, m: float) -> float:
    """Large-m form -(15 pi m^2 / 16)(eps~^2 - 18 eps~ eps + 25 eps^2)."""
    if not 0 < eps < eps_tilde:
        raise DomainError(f"kernel requires 0 < eps < eps_tilde, got eps={eps}, eps_tilde={eps_tilde}")
    return -(15.0 * math.pi * m * m / 16.0) * (eps_tilde**2 - 18.0 * eps_tilde * eps + 25.0 * eps**2)


def kernel_values(eps_tilde: np.ndarray, eps: float, m: int, order: int = 16) -> np.ndarray:
    """Q(eps~, eps) for an array of eps~ >= eps, by quadrature of the I_k integrals.

    With v = eps + (eps~ - eps) r^2,
    I_k = 2 (eps~-eps)^(k-1) int_0^1 (1-r^2)^(k-3/2) (eps + (eps~-eps) r^2)^(3-k-1/m) dr,
    which stays regular at eps~ = eps. Panels halve toward r = 0 down to the
    scale sqrt(eps / (eps~ - eps)); the last panel carries the (1-r)^(k-3/2)
    weight in a Gauss-Jacobi rule.
    """
    eps_tilde = np.asarray(eps_tilde, dtype=float)
    if np.any(eps_tilde < eps) or eps <= 0:
        raise DomainError("kernel_values requires eps_tilde >= eps > 0")
    gap = eps_tilde - eps
    ratio = float(np.max(gap)) / eps
    levels = max(1, int(math.ceil(math.log2(4.0 * math.sqrt(ratio) + 1.0))) + 1)
    breaks = 0.5 ** np.arange(1, levels + 1)[::-1]
    breaks = np.concatenate([[0.0], breaks])
    gl_nodes, gl_weights = gauss_legendre(order)
    half = 0.5 * np.diff(breaks)[:, None]
    r_inner = (breaks[:-1, None] + half * (gl_nodes + 1.0)).ravel()
    w_inner = (half * gl_weights).ravel()

    total = np.zeros_like(eps_tilde)
    for k, c in enumerate(kernel_coefficients(m), start=1):
        if c == 0.0:
            continue
        alpha = k - 1.5
        power = 3.0 - k - 1.0 / m
        inner = ((1.0 - r_inner**2) ** alpha * w_inner)[None, :] * (
            eps + gap[:, None] * r_inner[None, :] ** 2
        ) ** power
        gj_nodes, gj_weights = gauss_jacobi(order + 8, alpha, 0.0)
        r_outer = 0.75 + 0.25 * gj_nodes
        outer = (gj_weights * 0.25 ** (alpha + 1.0) * (1.0 + r_outer) ** alpha)[None, :] * (
            eps + gap[:, None] * r_outer[None, :] ** 2
        ) ** power
        integral = 2.0 * gap ** (k - 1) * (inner.sum(axis=1) + outer.sum(axis=1))
        total += c * integral
    return total


def residual_density_ode(sol: EigenSolution, epsilon: float | None = None) -> float:
    """Normalized sup of |rho''' - 4(v - eps) rho' - 2 v' rho| over the density support.

    The norm is the largest sup of the three terms, so a density that does
    not satisfy the equation at all scores O(1). epsilon defaults to the
    solution's eigenvalue.

    Raises:
        DomainError: If derivative data is missing
    """
    arrays = (sol.rho, sol.drho, sol.d3rho)
    if any(a is None for a in arrays) or len({a.shape for a in arrays}) != 1 or sol.rho.shape != sol.grid.shape:
        raise DomainError("solution carries no consistent density derivative data")
    return density_ode_defect(sol, epsilon)


def residual_harmonic_ode(phi: PhiFunction, epsilon_n: float) -> float:
    """Normalized sup of |eps phi'' + phi' - (eps - eps_n) phi| (the m = 1 differential form)."""
    eps = phi.eps_grid
    lhs = (eps - epsilon_n) * phi.phi
    rhs = eps * phi.second_derivative + phi.first_derivative
    return float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(lhs)))


def _sample_indices(phi: PhiFunction, epsilon_n: float, last: int) -> np.ndarray:
    eps = phi.eps_grid
    support = np.abs(phi.phi) > SUPPORT_FLOOR * np.max(np.abs(phi.phi))
    candidates = np.nonzero((eps >= SAMPLE_FLOOR * epsilon_n) & support & (np.arange(eps.size) < last - 4))[0]
    if candidates.size == 0:
        raise NumericalError("no sample energies inside the support of phi")
    if candidates.size <= MAX_SAMPLES:
        return candidates
    return candidates[np.round(np.linspace(0, candidates.size - 1, MAX_SAMPLES)).astype(int)]


def residual_integro(phi: PhiFunction, epsilon_n: float, m: int) -> float:
    """Normalized sup residual of the integrodifferential equation over sample energies.

    The upper limit is truncated where |phi'''| has fallen below 1e-12 of its
    maximum; integrals are Simpson sums in ln(eps~).

    Raises:
        NumericalError: If phi''' has not decayed by the end of the grid
    """
    eps = phi.eps_grid
    third = phi.third_derivative
    peak = np.max(np.abs(third))
    significant = np.nonzero(np.abs(third) >= THIRD_DERIVATIVE_CUT * peak)[0]
    last = int(significant[-1])
    if last == eps.size - 1 and abs(third[-1]) > 1e-8 * peak:
        raise NumericalError(
            f"phi''' is still {abs(third[-1]) / peak:.2e} of its peak at the grid end; the tail is not converged"
        )
    u = np.log(eps)
    samples = _sample_indices(phi, epsilon_n, last)

    deviations = []
    for i in samples:
        span = slice(i, last + 1)
        q = kernel_values(eps[span], float(eps[i]), m)
        integral = integrate.simpson(q * third[span] * eps[span], x=u[span])
        lhs = (eps[i] - epsilon_n) * phi.phi[i]
        deviations.append(lhs - 2.0 / (15.0 * math.pi) * integral)

    region = eps >= SAMPLE_FLOOR * epsilon_n
    scale = np.max(np.abs((eps[region] - epsilon_n) * phi.phi[region]))
    residual = float(np.max(np.abs(deviations)) / scale)
    logger.info(f"integrodifferential residual for n={phi.n}, m={m}: {residual:.3e} over {len(samples)} energies")
    return residual
