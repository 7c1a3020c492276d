"""Deterministic detuning classes of the inhomogeneous line."""

import math

import numpy as np

from src.echo.schemas import EnsembleSpec

# Gaussian span where the density has dropped by 1e8
_GAUSSIAN_SPAN_SIGMAS = math.sqrt(2.0 * math.log(1e8))
_LORENTZIAN_SPAN_WIDTHS = 25.0


def detuning_span(ensemble: EnsembleSpec) -> float:
    """Largest |detuning| represented on the class grid (rad/s)."""
    fwhm = ensemble.inhomogeneous_width
    if ensemble.distribution == "gaussian":
        sigma = fwhm / (2.0 * math.sqrt(2.0 * math.log(2.0)))
        return _GAUSSIAN_SPAN_SIGMAS * sigma
    if ensemble.distribution == "lorentzian":
        return _LORENTZIAN_SPAN_WIDTHS * fwhm
    return fwhm / 2.0


def detuning_grid(ensemble: EnsembleSpec) -> tuple[np.ndarray, np.ndarray]:
    """Equally spaced detuning classes and their normalised weights.

    The grid is mirror-symmetric about zero and contains zero exactly when ``n_classes``
    is odd. Weights are the line-shape density at the nodes, scaled to sum to one.

    Returns:
        (detunings in rad/s, weights)

    Example:
        >>> spec = EnsembleSpec(inhomogeneous_width=1.0, n_classes=5, t1=1.0, t2=1.0)
        >>> detunings, weights = detuning_grid(spec)
        >>> float(detunings[2]), round(float(weights.sum()), 12)
        (0.0, 1.0)
    """
    span = detuning_span(ensemble)
    n = ensemble.n_classes
    half_count = (n + 1) // 2
    if n % 2:
        half = span * np.linspace(0.0, 1.0, half_count)
        detunings = np.concatenate([-half[:0:-1], half])
    else:
        half = span * (np.arange(half_count) + 0.5) / (half_count - 0.5)
        detunings = np.concatenate([-half[::-1], half])

    fwhm = ensemble.inhomogeneous_width
    if ensemble.distribution == "gaussian":
        sigma = fwhm / (2.0 * math.sqrt(2.0 * math.log(2.0)))
        density = np.exp(-0.5 * (detunings / sigma) ** 2)
    elif ensemble.distribution == "lorentzian":
        density = 1.0 / (1.0 + (2.0 * detunings / fwhm) ** 2)
    else:
        density = np.ones_like(detunings)
    return detunings, density / density.sum()


def echo_sample_step(ensemble: EnsembleSpec) -> float:
    """Sample spacing π/(2Δ_max) used around echo times."""
    return math.pi / (2.0 * detuning_span(ensemble))
