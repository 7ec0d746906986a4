"""Sinc collocation building blocks under the double-exponential map x = sinh(c sinh t).

Grids are uniform in t with step h; only the half grid t_k = k h, k = 0..N, is
stored. Full-line vectors are indexed -N..N and obtained by parity mirroring.
"""

import numpy as np
from scipy import signal


def de_map(t: np.ndarray, scale: float = 1.0) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Return x = phi(t) and its first three derivatives for phi(t) = sinh(c sinh t)."""
    u = scale * np.sinh(t)
    ch_u, sh_u = np.cosh(u), np.sinh(u)
    ct, st = scale * np.cosh(t), scale * np.sinh(t)
    x = sh_u
    d1 = ch_u * ct
    d2 = sh_u * ct**2 + ch_u * st
    d3 = ch_u * ct**3 + 3.0 * sh_u * ct * st + ch_u * ct
    return x, d1, d2, d3


def inverse_de_map(x: np.ndarray, scale: float = 1.0) -> np.ndarray:
    return np.arcsinh(np.arcsinh(x) / scale)


def schwarzian(d1: np.ndarray, d2: np.ndarray, d3: np.ndarray) -> np.ndarray:
    """Schwarzian derivative phi'''/phi' - 3/2 (phi''/phi')^2."""
    return d3 / d1 - 1.5 * (d2 / d1) ** 2


def sinc_derivative(offset: np.ndarray, order: int) -> np.ndarray:
    """Values of the order-th derivative of sinc(t) = sin(pi t)/(pi t) at integer offsets."""
    d = np.asarray(offset, dtype=float)
    sign = np.where(np.mod(np.abs(d), 2) == 0, 1.0, -1.0)
    safe = np.where(d == 0, 1.0, d)
    if order == 0:
        return np.where(d == 0, 1.0, 0.0)
    if order == 1:
        return np.where(d == 0, 0.0, sign / safe)
    if order == 2:
        return np.where(d == 0, -np.pi**2 / 3.0, -2.0 * sign / safe**2)
    if order == 3:
        return np.where(d == 0, 0.0, sign * (6.0 - np.pi**2 * safe**2) / safe**3)
    raise ValueError(f"sinc derivatives are tabulated up to order 3, got {order}")


def mirror(half: np.ndarray, parity: int) -> np.ndarray:
    """Extend samples at k = 0..N to k = -N..N with f(-t) = parity * f(t)."""
    return np.concatenate([parity * half[:0:-1], half])


def differentiate(full: np.ndarray, h: float, order: int) -> np.ndarray:
    """Apply the Sinc differentiation matrix of the given order to a full-line vector."""
    size = full.size
    offsets = np.arange(-(size - 1), size)
    kernel = sinc_derivative(offsets, order) / h**order
    return np.convolve(full, kernel)[size - 1 : 2 * size - 1]


def parity_blocks(
    potential: np.ndarray, weight: np.ndarray, h: float
) -> tuple[tuple[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]:
    """Even and odd reductions of the collocation pencil (-D2 + diag(V), diag(W)).

    Even unknowns are (w_0, sqrt(2) w_1, ..., sqrt(2) w_N); odd unknowns are
    (sqrt(2) w_1, ..., sqrt(2) w_N). Both reductions stay symmetric.
    """
    k = np.arange(potential.size)
    kinetic_diff = -sinc_derivative(k[:, None] - k[None, :], 2) / h**2
    kinetic_sum = -sinc_derivative(k[:, None] + k[None, :], 2) / h**2

    scale = np.ones(k.size)
    scale[0] = 1.0 / np.sqrt(2.0)
    even = scale[:, None] * (kinetic_diff + kinetic_sum) * scale[None, :]
    even[k, k] += potential
    odd = (kinetic_diff - kinetic_sum)[1:, 1:]
    odd[k[:-1], k[:-1]] += potential[1:]
    return (even, weight.copy()), (odd, weight[1:].copy())


def upsample(full: np.ndarray, factor: int) -> np.ndarray:
    """Band-limited resampling of a decaying full-line vector onto a grid factor times finer."""
    return signal.resample(full, full.size * factor)
