"""Stationary Maxwell-Bloch relation between input and intracavity field.

Fields are normalised so that 2|x|² = 1 is the saturation scale. With the cooperativity
C = g²N/(γ_h·κ), Δ = ω_a − ω_l and δ = ω_c − ω_l the input field is

    y = x·[(1 + C·χ) + i(δ/κ − C·(Δ/γ_h)·χ)]

so the drive intensity is |y|² = u·M(u) with u = |x|² and M the squared modulus of the
bracket.
"""

import numpy as np

from src.bistability.schemas import BistabilityParams
from src.model.errors import PreconditionError

SERIES_THRESHOLD = 1e-6


def susceptibility(u: float | np.ndarray, detuning: float, gamma_h: float) -> float | np.ndarray:
    """Saturated absorption factor χ = ln(1 + 2u/L)/(2u), L = 1 + (Δ/γ_h)².

    The u → 0 limit is 1/L; below ``SERIES_THRESHOLD`` the logarithm is replaced by its
    second-order series.

    Example:
        >>> round(float(susceptibility(0.5, 0.0, 1.0)), 4)
        0.6931
    """
    u_arr = np.asarray(u, dtype=float)
    if np.any(u_arr < 0):
        raise PreconditionError("intracavity intensity u must be >= 0")
    lorentzian = 1.0 + (detuning / gamma_h) ** 2
    s = 2.0 * u_arr / lorentzian
    small = s < SERIES_THRESHOLD
    safe = np.where(small, 1.0, s)
    chi = np.where(small, 1.0 - s / 2.0 + s**2 / 3.0, np.log1p(safe) / safe) / lorentzian
    return float(chi) if chi.ndim == 0 else chi


def cooperativity(params: BistabilityParams) -> float:
    """Low-drive cooperativity g²N/(κ·γ_h)."""
    return params.cooperativity


def _bracket(
    u: float | np.ndarray, params: BistabilityParams, laser_frequency: float
) -> tuple[float | np.ndarray, float | np.ndarray]:
    detuning = params.omega_a - laser_frequency
    cavity_detuning = params.omega_c - laser_frequency
    chi = susceptibility(u, detuning, params.gamma_h)
    c = params.cooperativity
    real = 1.0 + c * chi
    imag = cavity_detuning / params.kappa - c * (detuning / params.gamma_h) * chi
    return real, imag


def bracket_modulus(
    u: float | np.ndarray, params: BistabilityParams, laser_frequency: float
) -> float | np.ndarray:
    """M(u) = |y|²/|x|², always >= 1."""
    real, imag = _bracket(u, params, laser_frequency)
    return real**2 + imag**2


def modulus_bound(params: BistabilityParams, laser_frequency: float) -> float:
    """Upper bound of M(u) over u >= 0, reached by taking χ at its maximum 1/L."""
    detuning = params.omega_a - laser_frequency
    cavity_detuning = params.omega_c - laser_frequency
    lorentzian = 1.0 + (detuning / params.gamma_h) ** 2
    c = params.cooperativity / lorentzian
    return (1.0 + c) ** 2 + (
        abs(cavity_detuning) / params.kappa + c * abs(detuning) / params.gamma_h
    ) ** 2


def steady_state_input(x: complex, params: BistabilityParams, laser_frequency: float) -> complex:
    """Input field y that sustains the intracavity field x.

    Example:
        >>> p = BistabilityParams(g=1.0, n_atoms=0, kappa=1.0, gamma_h=1.0, gamma=1.0)
        >>> steady_state_input(0.3 + 0.1j, p, 0.0)
        (0.3+0.1j)
    """
    real, imag = _bracket(abs(x) ** 2, params, laser_frequency)
    return x * complex(real, imag)


def drive_from_power(power: float, params: BistabilityParams) -> float:
    """|y|² = η·calibration·P for a laser power P in watts."""
    if power < 0:
        raise PreconditionError(f"power must be >= 0, got {power!r}")
    return params.coupling_efficiency * params.drive_calibration * power


def linear_response_transmission(
    params: BistabilityParams, laser_frequency: float | np.ndarray
) -> float | np.ndarray:
    """Weak-drive transmission (1 − loss)/M(0) with χ at its unsaturated value."""
    omega = np.asarray(laser_frequency, dtype=float)
    detuning = params.omega_a - omega
    cavity_detuning = params.omega_c - omega
    chi = 1.0 / (1.0 + (detuning / params.gamma_h) ** 2)
    c = params.cooperativity
    modulus = (1.0 + c * chi) ** 2 + (
        cavity_detuning / params.kappa - c * (detuning / params.gamma_h) * chi
    ) ** 2
    result = (1.0 - params.external_loss) / modulus
    return float(result) if result.ndim == 0 else result


def transmission(
    u: float | np.ndarray, drive_intensity: float, params: BistabilityParams
) -> float | np.ndarray:
    """Detected fraction (1 − loss)·u/|y|² of the input intensity, clipped to [0, 1]."""
    if drive_intensity <= 0:
        raise PreconditionError("transmission needs a positive drive intensity")
    result = np.clip((1.0 - params.external_loss) * np.asarray(u) / drive_intensity, 0.0, 1.0)
    return float(result) if result.ndim == 0 else result
