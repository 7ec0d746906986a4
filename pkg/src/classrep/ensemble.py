"""Classical ensembles in x^(2m): periods, Abel transforms and energy distributions.

An eigenstate density rho_n(x) is represented by an energy distribution
f_n(eps) of classical trajectories through the Abel pair

    rho(x)   = int_{x^(2m)}^inf [f(eps)/T(eps)] / sqrt(eps - x^(2m)) deps
    f(eps)   = -(T(eps)/pi) int_{x_eps}^inf rho'(x) / sqrt(x^(2m) - eps) dx

Integrals over energy are carried out in u = ln(eps); the part of the
distribution below the first grid point is a fitted power law.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, stats
from scipy.interpolate import CubicSpline

from .config import INFINITE, Exponent, GridConfig, Potential
from .eigensolver import EigenSolution, support_end
from .errors import DomainError, IntegrabilityError, NumericalError
from .quadrature import adaptive_panels, gauss_legendre, geometric_breaks
from .special_functions import beta, laguerre, p_max, s_series

logger = logging.getLogger(__name__)

NODE_SIGNIFICANCE = 1e-10
HEAD_FIT_DECADES = 1.0
HEAD_GAP_SPAN = 0.2
HEAD_SHARE_WARNING = 1e-2
FORWARD_ORDER = 8
NORMALIZATION_WARNING = 1e-3
MEAN_WARNING = 5e-3


@dataclass(frozen=True, eq=False)
class EnergyDistribution:
    """Samples of f_n on a positive, strictly increasing energy grid."""

    n: int
    m: Exponent
    epsilon_n: float
    eps_grid: np.ndarray
    f: np.ndarray
    grid_type: str
    integral: float
    mean_energy: float
    head_exponent: float

    @property
    def log_grid(self) -> np.ndarray:
        return np.log(self.eps_grid)


@dataclass(frozen=True, eq=False)
class CumulativeDistribution:
    n: int
    m: Exponent
    eps_grid: np.ndarray
    F: np.ndarray


@dataclass(frozen=True)
class AsymptoticForm:
    """Small-energy form of f_n: coefficient * eps^exponent (times log(eps^(-1/4)) for m = 2)."""

    n: int
    m: int
    case_tag: str
    coefficient: float
    exponent: float
    terms: int = 1


@dataclass(frozen=True, eq=False)
class PositionDensity:
    """rho(x) rebuilt from an energy distribution.

    ``head_share`` is the part of rho(0) contributed by energies below the
    first grid point, where phi = f/T comes from a fitted small-energy model.
    """

    x: np.ndarray
    rho: np.ndarray
    head_share: float
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True, eq=False)
class PhysicalDistribution:
    """f and F in physical energy units E = gamma * eps."""

    n: int
    energies: np.ndarray
    f: np.ndarray
    F: np.ndarray
    eigenenergy: float
    gamma: float


def _finite_m(m: Exponent) -> int:
    if m == INFINITE:
        raise IntegrabilityError(
            "the box limit has a non-integrable 1/eps divergence and no classical representation",
            exponent=-1.0,
        )
    return int(m)


def period(epsilon, m: int):
    """Classical period T(eps) = B(1/(2m), 1/2) eps^((1-m)/(2m)) / m."""
    eps = np.asarray(epsilon, dtype=float)
    if np.any(eps <= 0):
        raise DomainError("period requires epsilon > 0")
    value = beta(1.0 / (2 * m), 0.5) * eps ** ((1.0 - m) / (2.0 * m)) / m
    return float(value) if np.ndim(value) == 0 else value


def classical_density(epsilon: float, x, m: int):
    """Fraction of time per unit length spent at x: 1 / (T(eps) sqrt(eps - x^(2m)))."""
    x = np.asarray(x, dtype=float)
    gap = epsilon - np.abs(x) ** (2 * m)
    if np.any(gap <= 0):
        raise DomainError("classical_density is only defined strictly inside the turning points")
    value = 1.0 / (period(epsilon, m) * np.sqrt(gap))
    return float(value) if np.ndim(value) == 0 else value


def harmonic_f(n: int, epsilon):
    """Exact m = 1 distribution (-1)^n exp(-eps) L_n(2 eps)."""
    eps = np.asarray(epsilon, dtype=float)
    return (-1) ** n * np.exp(-eps) * laguerre(n, 2.0 * eps)


def energy_grid(sol: EigenSolution, config: GridConfig | None = None) -> np.ndarray:
    """Energy grid uniform in z = ln(eps)/log_step + eps^(1/(2m))/dy.

    The lower end min(eps_min_factor * eps_n, y_floor^(2m)) reaches the
    region where large-m distributions place their nodes; the upper end is
    where the density has fallen below density_cut of its maximum.
    """
    config = config or GridConfig()
    m = _finite_m(sol.m)
    eps_max = config.grid_max or support_end(sol, config.density_cut) ** (2 * m)
    eps_min = config.grid_min or max(1e-300, min(config.eps_min_factor * sol.epsilon, config.y_floor ** (2 * m)))
    if eps_min >= eps_max:
        raise DomainError(f"empty energy range [{eps_min:.3g}, {eps_max:.3g}]")

    dy = eps_max ** (1.0 / (2 * m)) / config.y_points

    def z_of(u):
        return u / config.log_step + np.exp(u / (2 * m)) / dy

    u_lo, u_hi = math.log(eps_min), math.log(eps_max)
    count = int(math.ceil(z_of(u_hi) - z_of(u_lo))) + 1
    targets = np.linspace(z_of(u_lo), z_of(u_hi), count)
    lo = np.full(count, u_lo)
    hi = np.full(count, u_hi)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        above = z_of(mid) > targets
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    u = 0.5 * (lo + hi)
    u[0], u[-1] = u_lo, u_hi
    logger.debug(f"energy grid for m={m}, n={sol.n}: {count} points on [{eps_min:.3g}, {eps_max:.3g}]")
    return np.exp(u)


def _abel_phi(sol: EigenSolution, epsilon: float, x_end: float, m: int, rtol: float) -> float:
    """phi(eps) = -(1/pi) int_{x_eps}^{x_end} rho'(x) / sqrt(x^(2m) - eps) dx with x = x_eps + s^2."""
    x_eps = epsilon ** (1.0 / (2 * m))
    if x_eps >= x_end:
        return 0.0
    s_end = math.sqrt(x_end - x_eps)
    s_scale = math.sqrt(x_eps / (2.0 * m))
    geometric = geometric_breaks(min(0.25 * s_scale, 0.5 * s_end), s_end)
    uniform = np.sqrt(np.linspace(0.0, x_end - x_eps, 33))
    breaks = np.unique(np.concatenate([[0.0], geometric, uniform]))

    def integrand(s):
        x = x_eps + s * s
        psi = sol.interpolant(x)
        dpsi = sol.interpolant(x, nu=1)
        # sqrt(x^(2m) - eps) = x^m sqrt(1 - (x_eps/x)^(2m)), free of cancellation near s = 0
        root = x**m * np.sqrt(-np.expm1(-2.0 * m * np.log1p(s * s / x_eps)))
        return 2.0 * s * (2.0 * psi * dpsi) / root

    value, _ = adaptive_panels(integrand, breaks, rtol=rtol, atol=1e-300)
    return -value / math.pi


def _power_law_fit(eps: np.ndarray, values: np.ndarray) -> tuple[float, float]:
    """Least-squares slope and intercept of log|values| against log(eps)."""
    keep = values != 0
    if np.count_nonzero(keep) < 2:
        raise NumericalError("not enough non-zero samples for a power-law fit")
    slope, intercept = np.polyfit(np.log(eps[keep]), np.log(np.abs(values[keep])), 1)
    return float(slope), float(intercept)


def _smallest_decade(eps: np.ndarray) -> np.ndarray:
    return eps <= eps[0] * 10.0**HEAD_FIT_DECADES * (1.0 + 1e-12)


def _head_exponent(eps: np.ndarray, f: np.ndarray) -> float:
    window = _smallest_decade(eps)
    if np.count_nonzero(window) < 3:
        window = np.arange(eps.size) < 3
    return _power_law_fit(eps[window], f[window])[0]


def inverse_abel(sol: EigenSolution, eps_grid: np.ndarray, config: GridConfig | None = None) -> EnergyDistribution:
    """Energy distribution f_n on eps_grid from the density derivative of sol.

    Raises:
        IntegrabilityError: For the box limit (exponent -1) or a non-integrable fit
        DomainError: If the grid is not positive and strictly increasing
    """
    config = config or GridConfig()
    m = _finite_m(sol.m)
    eps_grid = np.asarray(eps_grid, dtype=float)
    if eps_grid.ndim != 1 or eps_grid.size < 4 or eps_grid[0] <= 0 or np.any(np.diff(eps_grid) <= 0):
        raise DomainError("eps_grid must be positive, strictly increasing and have at least 4 points")

    x_end = min(support_end(sol, config.density_cut), sol.x_max)
    phi = np.array([_abel_phi(sol, float(e), x_end, m, config.abel_rtol) for e in eps_grid])
    f = period(eps_grid, m) * phi
    exponent = _head_exponent(eps_grid, f)
    integral, mean = _moments(eps_grid, f, exponent)
    if abs(integral - 1.0) > NORMALIZATION_WARNING or abs(mean - sol.epsilon) > MEAN_WARNING * sol.epsilon:
        logger.warning(
            f"f_{sol.n} for m={m} breaches its construction bounds: integral {integral:.6f}, "
            f"mean {mean:.8g} against eps_n={sol.epsilon:.8g}"
        )
    logger.info(
        f"f_{sol.n} for m={m}: {eps_grid.size} points, integral {integral:.8f}, "
        f"mean {mean:.8g} (eps_n={sol.epsilon:.8g})"
    )
    return EnergyDistribution(
        n=sol.n,
        m=m,
        epsilon_n=sol.epsilon,
        eps_grid=eps_grid,
        f=f,
        grid_type="log-linear",
        integral=integral,
        mean_energy=mean,
        head_exponent=exponent,
    )


def build_distribution(sol: EigenSolution, config: GridConfig | None = None) -> EnergyDistribution:
    """energy_grid followed by inverse_abel."""
    config = config or GridConfig()
    _finite_m(sol.m)
    return inverse_abel(sol, energy_grid(sol, config), config)


def _check_integrable(exponent: float) -> None:
    if exponent <= -1.0:
        raise IntegrabilityError(f"distribution diverges like eps^{exponent:.4f} at zero", exponent=exponent)


def _moments(eps: np.ndarray, f: np.ndarray, exponent: float) -> tuple[float, float]:
    _check_integrable(exponent)
    u = np.log(eps)
    head = f[0] * eps[0] / (exponent + 1.0)
    head_mean = f[0] * eps[0] ** 2 / (exponent + 2.0)
    integral = float(integrate.simpson(f * eps, x=u) + head)
    mean = float(integrate.simpson(f * eps * eps, x=u) + head_mean)
    return integral, mean


def cumulative(f: EnergyDistribution) -> CumulativeDistribution:
    """F(eps) = int_0^eps f, with the part below the grid from the fitted power law.

    Raises:
        IntegrabilityError: If the fitted small-energy exponent is <= -1
    """
    _check_integrable(f.head_exponent)
    head = f.f[0] * f.eps_grid[0] / (f.head_exponent + 1.0)
    running = integrate.cumulative_simpson(f.f * f.eps_grid, x=f.log_grid, initial=0.0)
    return CumulativeDistribution(n=f.n, m=f.m, eps_grid=f.eps_grid, F=running + head)


def mean_energy(f: EnergyDistribution, tail_tolerance: float = 1e-6) -> float:
    """int eps f(eps) deps over the whole grid including the power-law head.

    Raises:
        NumericalError: If the integrand has not decayed at the upper end of the grid
    """
    weighted = f.eps_grid**2 * f.f
    _, mean = _moments(f.eps_grid, f.f, f.head_exponent)
    # in u = ln(eps) the last integrand sample bounds the missing tail
    if abs(weighted[-1]) > tail_tolerance * max(abs(mean), np.max(np.abs(weighted))):
        raise NumericalError(
            f"mean-energy integrand still {weighted[-1]:.3e} at eps={f.eps_grid[-1]:.4g}; extend the grid"
        )
    return mean


def mean_energy_fraction_below(f: EnergyDistribution, cut: float) -> float:
    """Share of the mean energy contributed by eps <= cut."""
    total = mean_energy(f)
    inside = f.eps_grid <= cut
    if np.count_nonzero(inside) < 2:
        return 0.0
    _, partial = _moments(f.eps_grid[inside], f.f[inside], f.head_exponent)
    return partial / total


def tail_profile(f: EnergyDistribution) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Columns (eps, f, eps f) used to show where the mean energy comes from."""
    return f.eps_grid, f.f, f.eps_grid * f.f


def fit_small_eps_exponent(f: EnergyDistribution) -> float:
    """Slope of log|f| against log(eps) over the smallest decade of the grid."""
    window = _smallest_decade(f.eps_grid)
    return _power_law_fit(f.eps_grid[window], f.f[window])[0]


def log_singularity_fit(f: EnergyDistribution) -> tuple[float, float, float]:
    """Linear fit of f eps^(1/4) against log(eps^(-1/4)) on the smallest decade (m = 2).

    Returns:
        Tuple of (slope, intercept, r_squared)
    """
    window = _smallest_decade(f.eps_grid)
    eps = f.eps_grid[window]
    fit = stats.linregress(-0.25 * np.log(eps), f.f[window] * eps**0.25)
    return float(fit.slope), float(fit.intercept), float(fit.rvalue**2)


def find_nodes(f: EnergyDistribution) -> np.ndarray:
    """Energies where f changes sign, ignoring samples with negligible |eps f|.

    Sign changes are bracketed on the grid and refined with a cubic spline
    of eps f in ln(eps).
    """
    weighted = f.eps_grid * f.f
    significant = np.nonzero(np.abs(weighted) > NODE_SIGNIFICANCE * np.max(np.abs(weighted)))[0]
    spline = CubicSpline(f.log_grid, weighted)
    nodes = []
    for i, j in zip(significant[:-1], significant[1:]):
        if np.sign(weighted[i]) != np.sign(weighted[j]):
            root = optimize.brentq(spline, f.log_grid[i], f.log_grid[j], xtol=1e-14)
            nodes.append(math.exp(root))
    return np.array(nodes)


def limit_nodes(n: int) -> list[float]:
    """Scaled node positions k/(n+1), k = 1..n, of the large-m distribution."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    return [k / (n + 1) for k in range(1, n + 1)]


def scaled_distribution(f: EnergyDistribution) -> tuple[np.ndarray, np.ndarray]:
    """Pairs (eps^(1/(2m)), sgn(f) |f|^(1/(2m)))."""
    m = _finite_m(f.m)
    power = 1.0 / (2 * m)
    return f.eps_grid**power, np.sign(f.f) * np.abs(f.f) ** power


def to_physical(f: EnergyDistribution, potential: Potential) -> PhysicalDistribution:
    """f~(E) = f(E/gamma)/gamma, F~(E) = F(E/gamma), E_n = gamma eps_n."""
    if potential.is_box:
        raise DomainError("the box limit has no energy distribution")
    if potential.m != f.m:
        raise DomainError(f"potential m={potential.m} does not match distribution m={f.m}")
    g = potential.gamma
    return PhysicalDistribution(
        n=f.n,
        energies=g * f.eps_grid,
        f=f.f / g,
        F=cumulative(f).F,
        eigenenergy=g * f.epsilon_n,
        gamma=g,
    )


def asymptotic_f(
    epsilon: float,
    n: int,
    m: int,
    c_n1: float,
    *,
    epsilon_n: float | None = None,
    p_terms: int | None = None,
) -> tuple[AsymptoticForm, float]:
    """Small-energy behaviour of f_n.

    m = 1 gives the finite value (-1)^n, m = 2 a log-corrected eps^(-1/4)
    singularity, m > 2 the power eps^(-1 + 3/(2m)). With p_terms > 1 (m > 2)
    the higher terms c_np S_mp eps^(-1 + (2p+1)/(2m)) up to p_terms are added;
    they need epsilon_n for c_np = (-4 eps_n)^(p-1) c_n1 / (2p-1)!.

    Raises:
        DomainError: If epsilon <= 0, p_terms exceeds p_max(m) or epsilon_n is missing
    """
    if not epsilon > 0:
        raise DomainError(f"asymptotic_f requires epsilon > 0, got {epsilon}")
    if m == 1:
        sign = float((-1) ** n)
        return AsymptoticForm(n=n, m=1, case_tag="m=1 finite-value", coefficient=sign, exponent=0.0), sign
    if m == 2:
        coefficient = -c_n1 * beta(0.25, 0.5) / (2.0 * math.pi)
        value = coefficient * math.log(epsilon**-0.25) * epsilon**-0.25
        return AsymptoticForm(n=n, m=2, case_tag="m=2 log", coefficient=coefficient, exponent=-0.25), value

    top = p_max(m)
    terms = 1 if p_terms is None else p_terms
    if terms < 1 or terms > top:
        raise DomainError(f"p_terms must lie in 1..p_max(m)={top}, got {terms}")
    if terms > 1 and epsilon_n is None:
        raise DomainError("epsilon_n is required for p_terms > 1")

    prefactor = -beta(1.0 / (2 * m), 0.5) / (m * math.pi)
    value = 0.0
    coefficient = 0.0
    for p in range(1, terms + 1):
        c_p = c_n1 if p == 1 else (-4.0 * epsilon_n) ** (p - 1) * c_n1 / math.factorial(2 * p - 1)
        term_coefficient = prefactor * c_p * s_series(m, p).value
        if p == 1:
            coefficient = term_coefficient
        value += term_coefficient * epsilon ** (-1.0 + (2 * p + 1) / (2.0 * m))
    form = AsymptoticForm(
        n=n, m=m, case_tag="m>2 power", coefficient=coefficient, exponent=-1.0 + 3.0 / (2 * m), terms=terms
    )
    return form, value


def _head_exponents(f: EnergyDistribution) -> np.ndarray:
    """Exponents b_k of phi = f/T ~ sum c_k eps^b_k below the grid.

    For m >= 3 the leading exponent is 1/m - 1/2 and the next term sits
    min(1/m, 1/2 - 1/m) above it; the second term is kept when it changes
    enough across the fit window to be told apart from the first. For m <= 2
    the fitted head exponent of f is used.
    """
    m = int(f.m)
    if m < 3:
        return np.array([f.head_exponent + (m - 1.0) / (2.0 * m)])
    lead = 1.0 / m - 0.5
    gap = min(1.0 / m, 0.5 - 1.0 / m)
    if gap * HEAD_FIT_DECADES * math.log(10.0) < HEAD_GAP_SPAN:
        return np.array([lead])
    return np.array([lead, lead + gap])


def _head_model(f: EnergyDistribution) -> tuple[np.ndarray, np.ndarray]:
    """Relative least-squares fit of phi on the smallest decade: phi ~ sum c_k (eps/eps_0)^b_k.

    Raises:
        NumericalError: If the fitted model makes rho(0) diverge
    """
    exponents = _head_exponents(f)
    if np.any(exponents <= -0.5):
        raise NumericalError(f"small-energy exponents {exponents} make rho(0) diverge")
    eps = f.eps_grid
    window = _smallest_decade(eps)
    if np.count_nonzero(window) < 3:
        window = np.arange(eps.size) < 3
    phi = f.f[window] / period(eps[window], int(f.m))
    weight = 1.0 / np.maximum(np.abs(phi), np.finfo(float).tiny)
    design = (eps[window][:, None] / eps[0]) ** exponents[None, :]
    coefficients, *_ = np.linalg.lstsq(design * weight[:, None], phi * weight, rcond=None)
    return exponents, coefficients


def _phi_interpolator(f: EnergyDistribution, exponents: np.ndarray, coefficients: np.ndarray):
    """phi(eps) = f/T from a spline of eps f in ln(eps), the head model below the grid."""
    m = int(f.m)
    spline = CubicSpline(f.log_grid, f.eps_grid * f.f)
    eps0 = f.eps_grid[0]

    def phi(eps):
        eps = np.asarray(eps, dtype=float)
        clipped = np.maximum(eps, eps0)
        inside = spline(np.log(clipped)) / (clipped * period(clipped, m))
        ratio = np.maximum(eps, 1e-300) / eps0
        head = (ratio[..., None] ** exponents) @ coefficients
        return np.where(eps >= eps0, inside, head)

    return phi


def forward_abel(f: EnergyDistribution, x=None) -> PositionDensity:
    """Position density rho(x) = int_{x^(2m)}^inf (f/T)(eps) / sqrt(eps - x^(2m)) deps.

    The substitution eps = v + t^2 removes the endpoint singularity; panels
    follow the energy grid so every panel sees a smooth spline piece. Below
    the grid phi follows the fitted head model; when that part carries more
    than HEAD_SHARE_WARNING of rho(0) for m > 1 the grid is too coarse near
    zero and a warning is attached to the result.
    """
    m = _finite_m(f.m)
    eps = f.eps_grid
    eps_min, eps_max = eps[0], eps[-1]
    if x is None:
        x = np.linspace(0.0, eps_max ** (1.0 / (2 * m)), 401)
    x = np.asarray(x, dtype=float)
    exponents, coefficients = _head_model(f)
    phi = _phi_interpolator(f, exponents, coefficients)
    nodes, weights = gauss_legendre(FORWARD_ORDER)

    def rho_at(v: float) -> tuple[float, float]:
        above = eps[eps > max(v, eps_min)]
        breaks = np.sqrt(np.concatenate([[max(eps_min - v, 0.0)], above - v]))
        half = 0.5 * np.diff(breaks)[:, None]
        t = breaks[:-1, None] + half * (nodes + 1.0)
        body = 2.0 * float((phi(v + t * t) * half * weights).sum())
        if v >= eps_min:
            return body, 0.0
        if v == 0.0:
            # int_0^eps_min (eps/eps_min)^b eps^(-1/2) deps = sqrt(eps_min) / (b + 1/2)
            head = math.sqrt(eps_min) * float(np.sum(coefficients / (exponents + 0.5)))
        else:
            head, _ = integrate.quad(phi, v, eps_min, weight="alg", wvar=(-0.5, 0.0), limit=200)
        return body + head, head

    rho = np.zeros_like(x)
    for i, xi in enumerate(x):
        v = abs(xi) ** (2 * m)
        if v < eps_max:
            rho[i] = rho_at(v)[0]

    origin, head = rho_at(0.0)
    share = abs(head) / abs(origin) if origin != 0.0 else 0.0
    warnings = []
    if m > 1 and share > HEAD_SHARE_WARNING:
        message = (
            f"energy grid too coarse near 0 for m={m}: {share:.2%} of rho(0) comes from eps < {eps_min:.3g}"
        )
        logger.warning(message)
        warnings.append(message)
    return PositionDensity(x=x, rho=rho, head_share=share, warnings=tuple(warnings))
