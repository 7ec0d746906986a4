"""Bound states of psi'' + (eps - x^(2m)) psi = 0.

The production path is a double-exponential Sinc collocation (x = sinh(c sinh t))
with parity-reduced generalized symmetric eigenproblems and basis doubling
until successive eigenvalues agree. An independent Numerov shooting oracle and
the analytic harmonic (m = 1) and box (m -> infinity) solutions serve as checks.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, linalg, optimize, special
from scipy.interpolate import BPoly

from . import sinc
from .config import INFINITE, Exponent, Potential, SolverConfig
from .errors import ConvergenceError, DomainError, NumericalError
from .special_functions import hermite
from .wkb import wkb0

logger = logging.getLogger(__name__)

NUMEROV_STEP = 1e-4
NUMEROV_ACTION = 25.0
OVERFLOW_GUARD = 1e100
BRACKET_RTOL = 1e-8
BRACKET_WIDEN = 1e-6


@dataclass(frozen=True, eq=False)
class EigenSolution:
    """A normalized eigenstate sampled on x >= 0 and mirrored by parity.

    ``grid`` holds the collocation nodes; ``interpolant`` is a piecewise
    polynomial of psi on [0, x_max] matching psi, psi' and psi'' at a finer
    set of knots. Density derivatives on the grid are computed from the
    density samples alone, not from the differential equation.
    """

    n: int
    m: Exponent
    epsilon: float
    grid: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray
    rho: np.ndarray
    drho: np.ndarray
    d2rho: np.ndarray
    d3rho: np.ndarray
    accuracy_estimate: float
    interpolant: BPoly = field(repr=False)
    basis_size: int = 0

    @property
    def is_box(self) -> bool:
        return self.m == INFINITE

    @property
    def parity(self) -> int:
        return 1 if self.n % 2 == 0 else -1

    @property
    def x_max(self) -> float:
        return float(self.interpolant.x[-1])

    def wavefunction(self, x, derivative: int = 0):
        """Evaluate d^k psi/dx^k at x (either sign) from the stored interpolant.

        Raises:
            DomainError: If |x| exceeds the stored support
        """
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        if np.any(ax > self.x_max * (1.0 + 1e-12)):
            raise DomainError(f"x outside the grid support [-{self.x_max:.6g}, {self.x_max:.6g}]")
        values = self.interpolant(np.minimum(ax, self.x_max), nu=derivative)
        sign = np.where(x < 0, self.parity * (-1) ** derivative, 1)
        return values * sign


def turning_point(epsilon: float, m: Exponent) -> float:
    """Classical turning point eps^(1/(2m)); 1 in the box limit."""
    if not epsilon > 0:
        raise DomainError(f"turning_point requires epsilon > 0, got {epsilon}")
    if m == INFINITE:
        return 1.0
    return epsilon ** (1.0 / (2 * m))


def box_eigenvalue(n: int) -> float:
    return math.pi**2 * (n + 1) ** 2 / 4.0


def energy_ceiling(n: int, m: int) -> float:
    """A value safely above eps_n(m), used to size grids and brackets."""
    return min(box_eigenvalue(n) * 1.02, 1.5 * wkb0(n, m).epsilon + 2.0)


def decay_extent(epsilon: float, m: int, action: float) -> float:
    """Position X beyond the turning point with int_{x_tp}^X sqrt(x^(2m) - eps) dx = action."""
    x_tp = turning_point(epsilon, m)

    def excess(x_end: float) -> float:
        value, _ = integrate.quad(
            lambda x: math.sqrt(max(x ** (2 * m) - epsilon, 0.0)), x_tp, x_end, limit=200
        )
        return value - action

    width = 0.1 * x_tp
    while excess(x_tp + width) < 0:
        width *= 2.0
    return optimize.brentq(excess, x_tp, x_tp + width, xtol=1e-12 * x_tp)


def _solve_level(m: int, n_even: int, n_odd: int, half_nodes: int, t_max: float, scale: float):
    h = t_max / half_nodes
    t = h * np.arange(half_nodes + 1)
    x, d1, d2, d3 = sinc.de_map(t, scale)
    potential = d1**2 * x ** (2 * m) - 0.5 * sinc.schwarzian(d1, d2, d3)
    (even_a, even_b), (odd_a, odd_b) = sinc.parity_blocks(potential, d1**2, h)

    values_even, vectors_even = linalg.eigh(even_a, np.diag(even_b), subset_by_index=[0, n_even - 1])
    if n_odd > 0:
        values_odd, vectors_odd = linalg.eigh(odd_a, np.diag(odd_b), subset_by_index=[0, n_odd - 1])
    else:
        values_odd, vectors_odd = np.empty(0), np.empty((half_nodes, 0))

    eigenvalues = np.empty(n_even + n_odd)
    eigenvalues[0::2] = values_even
    eigenvalues[1::2] = values_odd
    floor = 16.0 * np.finfo(float).eps * float(np.max(np.diag(even_a) / even_b))
    return h, eigenvalues, (vectors_even, vectors_odd), floor


def _build_numerical_state(
    n: int, m: int, epsilon: float, vector: np.ndarray, h: float, t_max: float, config: SolverConfig, accuracy: float
) -> EigenSolution:
    half_nodes = int(round(t_max / h))
    t = h * np.arange(half_nodes + 1)
    x, d1, d2, d3 = sinc.de_map(t, config.mapping_scale)

    w = np.zeros(half_nodes + 1)
    if n % 2 == 0:
        w[0] = vector[0] / math.sqrt(h)
        w[1:] = vector[1:] / math.sqrt(2.0 * h)
        parity = 1
    else:
        w[1:] = vector / math.sqrt(2.0 * h)
        parity = -1

    full = sinc.mirror(w, parity)
    full_t = sinc.differentiate(full, h, 1)
    centre = half_nodes
    if (parity == 1 and full[centre] < 0) or (parity == -1 and full_t[centre] < 0):
        full, full_t, w = -full, -full_t, -w
    w_t = full_t[centre:]

    root_d1 = np.sqrt(d1)
    psi = root_d1 * w
    dpsi = (w_t + 0.5 * (d2 / d1) * w) / root_d1

    # density derivatives from r(t) = phi'(t) w(t)^2 = rho(x(t)) by Sinc differentiation
    r_full = sinc.mirror(d1 * w**2, 1)
    r_t = sinc.differentiate(r_full, h, 1)[centre:]
    r_tt = sinc.differentiate(r_full, h, 2)[centre:]
    r_ttt = sinc.differentiate(r_full, h, 3)[centre:]
    rho = psi**2
    drho = r_t / d1
    d2rho = r_tt / d1**2 - r_t * d2 / d1**3
    d3rho = r_ttt / d1**3 - 3.0 * r_tt * d2 / d1**4 - r_t * d3 / d1**4 + 3.0 * r_t * d2**2 / d1**5

    # interpolant on an oversampled grid, psi'' taken from the equation
    factor = config.upsample
    fine_w = sinc.upsample(full, factor)
    fine_wt = sinc.upsample(full_t, factor)
    start = half_nodes * factor
    stop = 2 * half_nodes * factor + 1
    fine_t = (np.arange(start, stop) - start) * (h / factor)
    fx, fd1, fd2, _ = sinc.de_map(fine_t, config.mapping_scale)
    fw, fwt = fine_w[start:stop], fine_wt[start:stop]
    fpsi = np.sqrt(fd1) * fw
    fdpsi = (fwt + 0.5 * (fd2 / fd1) * fw) / np.sqrt(fd1)
    fd2psi = (fx ** (2 * m) - epsilon) * fpsi
    interpolant = BPoly.from_derivatives(fx, np.column_stack([fpsi, fdpsi, fd2psi]))

    return EigenSolution(
        n=n,
        m=m,
        epsilon=float(epsilon),
        grid=x,
        psi=psi,
        dpsi=dpsi,
        rho=rho,
        drho=drho,
        d2rho=d2rho,
        d3rho=d3rho,
        accuracy_estimate=float(accuracy),
        interpolant=interpolant,
        basis_size=2 * half_nodes + 1,
    )


def solve(potential: Potential, n_max: int, config: SolverConfig | None = None) -> list[EigenSolution]:
    """Lowest n_max + 1 eigenstates of the scaled problem by DE Sinc collocation.

    The number of nodes doubles until every requested eigenvalue changes by
    less than max(refine_tol * eps, round-off floor) between levels and the
    density equation defect of every state is at most residual_tol. The last
    eigenvalue change, relative to eps, is reported as accuracy_estimate. When
    max_basis stops the refinement after the eigenvalues have settled, the
    states are returned with a logged warning.

    Raises:
        DomainError: For the box limit (use analytic_box) or n_max < 0
        ConvergenceError: If max_basis is reached before the eigenvalues settle
    """
    if potential.is_box:
        raise DomainError("the box limit has analytic solutions; use analytic_box")
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    config = config or SolverConfig(target_states=n_max + 1, basis_size=max(64, 4 * (n_max + 1)))
    m = int(potential.m)
    n_even, n_odd = n_max // 2 + 1, (n_max + 1) // 2
    scale = config.mapping_scale

    x_end = decay_extent(energy_ceiling(n_max, m), m, config.decay_action)
    t_max = float(sinc.inverse_de_map(x_end, scale))
    half_nodes = max(config.basis_size // 2, math.ceil(t_max / config.de_step), 2 * (n_max + 1))
    logger.info(f"Solving m={m} for n <= {n_max} on x in [0, {x_end:.6g}] (t_max={t_max:.4g})")

    previous = None
    while True:
        h, eigenvalues, vectors, floor = _solve_level(m, n_even, n_odd, half_nodes, t_max, scale)
        at_limit = 2 * (2 * half_nodes) + 1 > config.max_basis
        change = np.full_like(eigenvalues, np.inf) if previous is None else np.abs(eigenvalues - previous)
        allowed = np.maximum(config.refine_tol * np.abs(eigenvalues), floor)
        if previous is not None:
            logger.debug(
                f"m={m} nodes={2 * half_nodes + 1} max change {change.max():.3e} (allowed {allowed.min():.3e})"
            )
        if np.all(change <= allowed):
            # wavefunctions converge more slowly than eigenvalues
            states = _build_states(m, eigenvalues, vectors, h, t_max, config, change / np.abs(eigenvalues))
            defect = max(density_ode_defect(s) for s in states)
            if defect <= config.residual_tol:
                break
            if at_limit:
                logger.warning(
                    f"m={m}: density equation defect {defect:.2e} exceeds {config.residual_tol:.1e} "
                    f"at the basis limit ({2 * half_nodes + 1} nodes)"
                )
                break
            logger.debug(f"m={m} nodes={2 * half_nodes + 1} eigenvalues settled, defect {defect:.3e}")
        elif at_limit:
            raise ConvergenceError(
                f"eigenvalues for m={m} not converged with {2 * half_nodes + 1} nodes",
                estimate=float(eigenvalues[-1]),
                error_bound=float(change.max()),
            )
        previous = eigenvalues
        half_nodes *= 2

    logger.info(f"Solved m={m}: eps = {', '.join(f'{e:.10g}' for e in eigenvalues)}")
    return states


def _build_states(m, eigenvalues, vectors, h, t_max, config, accuracy) -> list[EigenSolution]:
    states = []
    for n, epsilon in enumerate(eigenvalues):
        block = vectors[n % 2]
        states.append(_build_numerical_state(n, m, epsilon, block[:, n // 2], h, t_max, config, accuracy[n]))
        if node_count(states[-1]) != n:
            raise NumericalError(f"state m={m}, n={n} has {node_count(states[-1])} nodes")
    return states


def node_count(sol: EigenSolution) -> int:
    """Number of sign changes of psi on the whole line."""
    psi = sol.psi[1:]
    significant = psi[np.abs(psi) > 1e-8 * np.max(np.abs(sol.psi))]
    positive_side = int(np.count_nonzero(np.diff(np.sign(significant)) != 0))
    return 2 * positive_side + (1 if sol.n % 2 else 0)


def _numerov_coefficients(m: int, epsilon: float, n_steps: int, step: float) -> tuple[list, list]:
    xs = step * np.arange(n_steps + 1)
    g = (step * step / 12.0) * (xs ** (2 * m) - epsilon)
    return (1.0 - g).tolist(), (2.0 + 10.0 * g).tolist()


def _outward_start(odd: bool, step: float, left: list, centre: list) -> tuple[float, float]:
    if odd:
        return 0.0, step
    return 1.0, 0.5 * centre[0] / left[1]


def _numerov_nodes(m: int, epsilon: float, odd: bool, n_steps: int, step: float) -> int:
    """Integrate outward from x = 0 and count nodes on x > 0."""
    left, centre = _numerov_coefficients(m, epsilon, n_steps, step)
    prev, cur = _outward_start(odd, step, left, centre)
    nodes = 0
    for i in range(1, n_steps):
        nxt = (centre[i] * cur - left[i - 1] * prev) / left[i + 1]
        if (nxt < 0.0 < cur) or (cur < 0.0 < nxt):
            nodes += 1
        prev, cur = cur, nxt
        if abs(cur) > OVERFLOW_GUARD:
            break
    return nodes


def _numerov_mismatch(epsilon: float, m: int, odd: bool, n_steps: int, step: float, match: int) -> float:
    """Scaled Casorati determinant of the outward and inward solutions at x = match * step.

    The inward solution starts from psi = 0 at x = n_steps * step. The value is
    continuous in epsilon and vanishes at the discrete eigenvalue.
    """
    left, centre = _numerov_coefficients(m, epsilon, n_steps, step)
    out = list(_outward_start(odd, step, left, centre))
    for i in range(1, match + 1):
        out.append((centre[i] * out[i] - left[i - 1] * out[i - 1]) / left[i + 1])

    inward = [0.0] * (n_steps + 1)
    inward[n_steps - 1] = 1.0
    for i in range(n_steps - 1, match - 1, -1):
        inward[i - 1] = (centre[i] * inward[i] - left[i + 1] * inward[i + 1]) / left[i - 1]
        if abs(inward[i - 1]) > OVERFLOW_GUARD:
            for k in (i - 1, i, i + 1):
                inward[k] /= OVERFLOW_GUARD

    a = [left[k] * out[k] for k in (match, match + 1)]
    b = [left[k] * inward[k] for k in (match, match + 1)]
    scale = max(abs(a[0]), abs(a[1])) * max(abs(b[0]), abs(b[1]))
    return (a[1] * b[0] - a[0] * b[1]) / scale


def _numerov_bracket(m: int, n: int, upper: float, n_steps: int, step: float) -> tuple[float, float]:
    """Node-count bisection down to BRACKET_RTOL, widened by BRACKET_WIDEN on each side."""
    odd = n % 2 == 1
    target = n // 2
    if _numerov_nodes(m, upper, odd, n_steps, step) <= target:
        raise NumericalError(f"Numerov bracket lost for m={m}, n={n} at step {step:.3g}")
    lower = 0.0
    while upper - lower > BRACKET_RTOL * upper:
        middle = 0.5 * (lower + upper)
        if _numerov_nodes(m, middle, odd, n_steps, step) > target:
            upper = middle
        else:
            lower = middle
    widen = BRACKET_WIDEN * upper
    return max(lower - widen, 0.5 * lower), upper + widen


def _numerov_root(
    m: int, n: int, bracket: tuple[float, float], n_steps: int, step: float, match: int, rtol: float
) -> float:
    lower, upper = bracket
    try:
        return optimize.brentq(
            _numerov_mismatch, lower, upper, args=(m, n % 2 == 1, n_steps, step, match), xtol=rtol * upper
        )
    except ValueError as e:
        raise NumericalError(f"Numerov matching for m={m}, n={n} has no sign change: {e}") from e


def oracle_solve(m: int, n: int, step: float = NUMEROV_STEP, rtol: float = 1e-13) -> float:
    """Eigenvalue by Numerov shooting, matched at the turning point and extrapolated in the step.

    psi'(0) = 0 for even n, psi(0) = 0 for odd n, psi = 0 at the far end.
    Bisection on the node count of the outward solution brackets eps_n; the
    root of the outward/inward mismatch inside that bracket is found at steps
    h and h/2 and combined by Richardson extrapolation for the O(h^4) error.

    Raises:
        DomainError: If m or n is invalid
        NumericalError: If no bracket or no matching root is found
    """
    if m == INFINITE or m < 1:
        raise DomainError(f"oracle_solve requires a finite m >= 1, got {m}")
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")

    upper = energy_ceiling(n, m)
    for _ in range(40):
        x_tp = turning_point(upper, m)
        x_end = min(
            x_tp + 10.0 * upper ** (-(m - 1) / (2.0 * m)),
            decay_extent(upper, m, NUMEROV_ACTION),
            (upper + 1.0 / step**2) ** (1.0 / (2 * m)),
        )
        n_steps = int(round(x_end / step))
        if _numerov_nodes(m, upper, n % 2 == 1, n_steps, step) > n // 2:
            break
        upper *= 2.0
    else:
        raise NumericalError(f"no Numerov bracket found for m={m}, n={n}")

    bracket = _numerov_bracket(m, n, upper, n_steps, step)
    match = min(max(int(round(turning_point(bracket[1], m) / step)), 2), n_steps - 2)
    coarse = _numerov_root(m, n, bracket, n_steps, step, match, rtol)
    fine_bracket = _numerov_bracket(m, n, upper, 2 * n_steps, 0.5 * step)
    fine = _numerov_root(m, n, fine_bracket, 2 * n_steps, 0.5 * step, 2 * match, rtol)
    epsilon = fine + (fine - coarse) / 15.0
    logger.debug(f"Numerov oracle m={m}, n={n}: eps = {epsilon:.12g} (step correction {fine - coarse:.2e})")
    return epsilon


def _harmonic_profile(n: int, x: np.ndarray):
    """psi_n and its first three derivatives for m = 1, with psi(0) > 0 or psi'(0) > 0."""
    log_norm = -0.5 * (0.5 * math.log(math.pi) + n * math.log(2.0) + special.gammaln(n + 1))
    envelope = math.exp(log_norm) * np.exp(-0.5 * x * x)

    def h(k):
        return hermite(n - k, x) if n - k >= 0 else np.zeros_like(x)

    h0 = h(0)
    h1 = 2.0 * n * h(1)
    h2 = 4.0 * n * (n - 1) * h(2)
    h3 = 8.0 * n * (n - 1) * (n - 2) * h(3)
    psi = envelope * h0
    dpsi = envelope * (h1 - x * h0)
    d2psi = envelope * (h2 - 2.0 * x * h1 + (x * x - 1.0) * h0)
    d3psi = envelope * (h3 - 3.0 * x * h2 + 3.0 * (x * x - 1.0) * h1 + (3.0 * x - x**3) * h0)
    # leading coefficient sign at the origin: H_n(0) for even n, H_n'(0) for odd n
    sign = (-1) ** (n // 2)
    return sign * psi, sign * dpsi, sign * d2psi, sign * d3psi


def analytic_harmonic(n: int, grid: np.ndarray | None = None, decay_action: float = 22.0) -> EigenSolution:
    """Exact m = 1 state: eps = 2n + 1, rho = exp(-x^2) H_n(x)^2 / (sqrt(pi) 2^n n!)."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    epsilon = 2.0 * n + 1.0
    if grid is None:
        grid = np.linspace(0.0, decay_extent(epsilon, 1, decay_action), 4001)
    grid = np.asarray(grid, dtype=float)
    psi, dpsi, d2psi, d3psi = _harmonic_profile(n, grid)
    return EigenSolution(
        n=n,
        m=1,
        epsilon=epsilon,
        grid=grid,
        psi=psi,
        dpsi=dpsi,
        rho=psi**2,
        drho=2.0 * psi * dpsi,
        d2rho=2.0 * dpsi**2 + 2.0 * psi * d2psi,
        d3rho=6.0 * dpsi * d2psi + 2.0 * psi * d3psi,
        accuracy_estimate=0.0,
        interpolant=BPoly.from_derivatives(grid, np.column_stack([psi, dpsi, d2psi, d3psi])),
    )


def analytic_box(n: int, grid: np.ndarray | None = None) -> EigenSolution:
    """Infinite well on (-1, 1): eps = pi^2 (n+1)^2 / 4, rho = sin^2(pi (n+1)(x+1)/2)."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    k = math.pi * (n + 1) / 2.0
    if grid is None:
        grid = np.linspace(0.0, 1.0, 2001)
    grid = np.asarray(grid, dtype=float)
    phase = k * (grid + 1.0)
    # sin(k) for even n, k cos(k) for odd n fixes the sign at the origin
    sign = 1.0 if (math.sin(k) if n % 2 == 0 else math.cos(k)) > 0 else -1.0
    psi = sign * np.sin(phase)
    dpsi = sign * k * np.cos(phase)
    d2psi = -k * k * psi
    d3psi = -k * k * dpsi
    return EigenSolution(
        n=n,
        m=INFINITE,
        epsilon=k * k,
        grid=grid,
        psi=psi,
        dpsi=dpsi,
        rho=psi**2,
        drho=2.0 * psi * dpsi,
        d2rho=2.0 * dpsi**2 + 2.0 * psi * d2psi,
        d3rho=6.0 * dpsi * d2psi + 2.0 * psi * d3psi,
        accuracy_estimate=0.0,
        interpolant=BPoly.from_derivatives(grid, np.column_stack([psi, dpsi, d2psi, d3psi])),
    )


def potential_values(sol: EigenSolution, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """v(x) = x^(2m) and v'(x); zero inside the box."""
    x = np.asarray(x, dtype=float)
    if sol.is_box:
        return np.zeros_like(x), np.zeros_like(x)
    m = int(sol.m)
    return x ** (2 * m), 2.0 * m * x ** (2 * m - 1)


def density_ode_defect(sol: EigenSolution, epsilon: float | None = None) -> float:
    """sup |rho''' - 4(v - eps) rho' - 2 v' rho| over rho > 1e-10 max(rho), relative to the largest term.

    Raises:
        DomainError: If all three terms vanish
    """
    eps = sol.epsilon if epsilon is None else epsilon
    inside = sol.rho > 1e-10 * np.max(sol.rho)
    v, dv = potential_values(sol, sol.grid[inside])
    third = sol.d3rho[inside]
    middle = 4.0 * (v - eps) * sol.drho[inside]
    last = 2.0 * dv * sol.rho[inside]
    scale = max(np.max(np.abs(third)), np.max(np.abs(middle)), np.max(np.abs(last)))
    if scale == 0.0:
        raise DomainError("density derivative data vanishes identically")
    return float(np.max(np.abs(third - middle - last)) / scale)


def density_derivatives(sol: EigenSolution, x):
    """rho, drho/dx and d^2rho/dx^2 at x from the wavefunction interpolant.

    Raises:
        DomainError: If x lies outside the stored support
    """
    psi = sol.wavefunction(x)
    dpsi = sol.wavefunction(x, 1)
    d2psi = sol.wavefunction(x, 2)
    return psi * psi, 2.0 * psi * dpsi, 2.0 * dpsi * dpsi + 2.0 * psi * d2psi


def c_n1(sol: EigenSolution) -> float:
    """Second density derivative at the origin: -2 eps rho(0) (even n), 2 psi'(0)^2 (odd n)."""
    if sol.n % 2 == 0:
        return -2.0 * sol.epsilon * float(sol.wavefunction(0.0)) ** 2
    return 2.0 * float(sol.wavefunction(0.0, 1)) ** 2


def c_np(sol: EigenSolution, p: int) -> float:
    """c_np = (-4 eps)^(p-1) c_n1 / (2p-1)!, valid for 1 <= p <= m.

    Equals d^(2p) rho / dx^(2p) at 0 divided by (2p-1)!.
    """
    if p < 1 or (not sol.is_box and p > int(sol.m)):
        raise DomainError(f"c_np requires 1 <= p <= m, got p={p}, m={sol.m}")
    return (-4.0 * sol.epsilon) ** (p - 1) * c_n1(sol) / math.factorial(2 * p - 1)


def physical_density(sol: EigenSolution, potential: Potential, z):
    """Physical wavefunction and density at z: psi(z/beta)/sqrt(beta), rho(z/beta)/beta."""
    if potential.m != sol.m:
        raise DomainError(f"potential m={potential.m} does not match solution m={sol.m}")
    b = potential.beta
    psi = sol.wavefunction(np.asarray(z, dtype=float) / b)
    return psi / math.sqrt(b), psi * psi / b


def support_end(sol: EigenSolution, cut: float = 1e-14) -> float:
    """Largest x with rho(x) >= cut * max(rho), located on the interpolant knots."""
    knots = sol.interpolant.x
    rho = sol.interpolant(knots) ** 2
    above = np.nonzero(rho >= cut * rho.max())[0]
    last = above[-1]
    return float(knots[min(last + 1, knots.size - 1)])
