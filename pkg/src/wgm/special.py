"""Riccati-Bessel functions for large orders.

ψ_l(z) = z·j_l(z) comes straight from scipy. The Neumann part χ_l(z) = z·y_l(z) grows
like exp(ν·arccosh(ν/z)) below the turning point and overflows for high-index hosts,
so it is carried as a log-magnitude plus sign from a rescaled upward recurrence.
"""

from functools import lru_cache

import numpy as np
from scipy import special

_RESCALE_THRESHOLD = 1e150


def riccati_psi(order: int, z: np.ndarray | float) -> tuple[np.ndarray, np.ndarray]:
    """ψ_l(z) and its derivative ψ_l'(z)."""
    z = np.asarray(z, dtype=float)
    j = special.spherical_jn(order, z)
    dj = special.spherical_jn(order, z, derivative=True)
    return z * j, j + z * dj


def neumann_log(order: int, z: np.ndarray | float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Scaled spherical Neumann function of integer order.

    Runs y_{k+1} = (2k+1)/z·y_k − y_{k−1} upward from y_0 and y_1, rescaling whenever
    the pair grows past ``_RESCALE_THRESHOLD``. Upward recurrence is stable for y.

    Args:
        order: l >= 0
        z: Positive arguments

    Returns:
        (log|y_l(z)|, sign of y_l(z), y_l(z)/y_{l−1}(z)); the ratio is NaN for l = 0
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    previous = -np.cos(z) / z
    current = -np.cos(z) / z**2 - np.sin(z) / z
    log_scale = np.zeros_like(z)

    if order == 0:
        return np.log(np.abs(previous)), np.sign(previous), np.full_like(z, np.nan)

    for k in range(1, order):
        previous, current = current, (2 * k + 1) / z * current - previous
        big = np.abs(current) > _RESCALE_THRESHOLD
        if np.any(big):
            scale = np.where(big, np.abs(current), 1.0)
            current = current / scale
            previous = previous / scale
            log_scale = log_scale + np.log(scale)

    return np.log(np.abs(current)) + log_scale, np.sign(current), current / previous


def chi_log_derivative(order: int, z: np.ndarray | float) -> np.ndarray:
    """χ_l'(z)/χ_l(z) = y_{l−1}/y_l − l/z for l >= 1."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    _, _, ratio = neumann_log(order, z)
    return 1.0 / ratio - order / z


def chi_ratio(order: int, z: np.ndarray, z_ref: float) -> np.ndarray:
    """χ_l(z)/χ_l(z_ref) without forming either value."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    log_y, sign_y, _ = neumann_log(order, z)
    log_ref, sign_ref, _ = neumann_log(order, np.array([z_ref]))
    return (z / z_ref) * sign_y * sign_ref[0] * np.exp(log_y - log_ref[0])


@lru_cache(maxsize=1)
def airy_constants() -> dict[str, float]:
    """First zeros of Ai and Ai' with the companion values used by the asymptotics.

    Keys: ``a1`` (first zero of Ai), ``a1_prime`` (first zero of Ai'), ``ai_prime_at_a1``
    (Ai'(a1)) and ``ai_at_a1_prime`` (Ai(a1')).
    """
    a, ap, ai, aip = special.ai_zeros(1)
    return {
        "a1": float(a[0]),
        "a1_prime": float(ap[0]),
        "ai_prime_at_a1": float(aip[0]),
        "ai_at_a1_prime": float(ai[0]),
    }
