"""Rate formulas of the cavity-QED calibration chain.

Every function takes and returns SI values with angular rates in rad/s. Two routes lead
to the single-ion coupling g: the echo calibration (Rabi frequency of a π pulse divided
by the intracavity field amplitude) and the dipole route (transition dipole moment and
mode volume). ``dipole_from_g`` inverts the second one.
"""

import logging
import math

from src.cqed.schemas import CouplingEstimate
from src.model.constants import EPSILON_0, HBAR, SPEED_OF_LIGHT
from src.model.errors import PreconditionError
from src.model.schemas import CavityQedParams

logger = logging.getLogger(__name__)

PHOTON_NUMBER_CONVENTION = "U = eta*P*Q/(2*omega); n = U/(hbar*omega)"
REJECTED_PHOTON_NUMBER_CONVENTION = "U = eta*P*Q/omega; n = U/(hbar*omega)"


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise PreconditionError(f"{name} must be > 0, got {value!r}")


def _angular_frequency(wavelength: float) -> float:
    return 2.0 * math.pi * SPEED_OF_LIGHT / wavelength


def kappa_from_q(wavelength: float, quality_factor: float) -> float:
    """Cavity field decay rate κ = πc/(λQ).

    Args:
        wavelength: Vacuum wavelength λ (m)
        quality_factor: Loaded Q

    Returns:
        κ in rad/s (half the energy decay rate ω/Q)

    Example:
        >>> round(kappa_from_q(605.977e-9, 1.8e6) / (2 * math.pi) / 1e6, 1)
        137.4
    """
    _require_positive(wavelength=wavelength, quality_factor=quality_factor)
    return math.pi * SPEED_OF_LIGHT / (wavelength * quality_factor)


def decay_rates(t1: float, t2: float) -> tuple[float, float]:
    """Population and coherence decay rates (γ, γ_h) = (1/T1, 1/T2).

    Raises:
        PreconditionError: If a lifetime is not positive or T2 > 2·T1
    """
    _require_positive(t1=t1, t2=t2)
    if t2 > 2.0 * t1:
        raise PreconditionError(f"T2 <= 2*T1 violated (T2={t2:g} s, T1={t1:g} s)")
    return 1.0 / t1, 1.0 / t2


def rabi_from_pulse(area: float, duration: float) -> float:
    """Rabi frequency Ω = Θ/τ of a square pulse (rad/s)."""
    _require_positive(area=area, duration=duration)
    return area / duration


def intracavity_photon_number(
    input_power: float,
    coupling_efficiency: float,
    quality_factor: float,
    wavelength: float,
) -> float:
    """Mean intracavity photon number for a resonant continuous drive.

    The stored energy is U = η·P·Q/(2ω) and the photon number is U/(ħω).

    Args:
        input_power: Power in front of the coupler (W)
        coupling_efficiency: Fraction η of that power coupled into the mode
        quality_factor: Loaded Q
        wavelength: Vacuum wavelength (m)

    Returns:
        Photon number (dimensionless)

    Raises:
        PreconditionError: If η is outside [0, 1] or another input is not positive
    """
    _require_positive(
        input_power=input_power, quality_factor=quality_factor, wavelength=wavelength
    )
    if not 0.0 <= coupling_efficiency <= 1.0:
        raise PreconditionError(
            f"coupling_efficiency must lie in [0, 1], got {coupling_efficiency}"
        )
    omega = _angular_frequency(wavelength)
    return coupling_efficiency * input_power * quality_factor / (2.0 * HBAR * omega**2)


def photon_number_conventions(
    input_power: float,
    coupling_efficiency: float,
    quality_factor: float,
    wavelength: float,
) -> dict[str, float | str]:
    """Photon number under the adopted and the rejected stored-energy conventions.

    The rejected convention (U = η·P·Q/ω) gives exactly twice the adopted value. Both
    are reported so that the choice is visible in every cqed report.
    """
    adopted = intracavity_photon_number(
        input_power, coupling_efficiency, quality_factor, wavelength
    )
    logger.info(f"Photon number convention: {PHOTON_NUMBER_CONVENTION} (n={adopted:.4g})")
    return {
        "adopted": adopted,
        "adopted_convention": PHOTON_NUMBER_CONVENTION,
        "rejected": 2.0 * adopted,
        "rejected_convention": REJECTED_PHOTON_NUMBER_CONVENTION,
    }


def g_from_echo(rabi_frequency: float, n_photons: float) -> CouplingEstimate:
    """Coupling from the echo calibration, g = Ω/(2√n).

    Args:
        rabi_frequency: Ω of the calibration pulse (rad/s)
        n_photons: Intracavity photon number during the pulse

    Returns:
        Estimate with ``method="echo_calibration"``
    """
    _require_positive(rabi_frequency=rabi_frequency, n_photons=n_photons)
    g = rabi_frequency / (2.0 * math.sqrt(n_photons))
    return CouplingEstimate(
        g=g,
        method="echo_calibration",
        inputs={"rabi_frequency": rabi_frequency, "n_photons": n_photons},
    )


def g_from_dipole(
    dipole_moment: float,
    refractive_index: float,
    transition_frequency: float,
    mode_volume: float,
) -> CouplingEstimate:
    """Coupling from the transition dipole and the mode volume.

    g = (μ/n_r)·√(ω_a/(2ħε₀V))

    Args:
        dipole_moment: μ (C·m)
        refractive_index: n_r of the host
        transition_frequency: ω_a (rad/s)
        mode_volume: V (m³)

    Returns:
        Estimate with ``method="dipole_mode_volume"``
    """
    _require_positive(
        dipole_moment=dipole_moment,
        refractive_index=refractive_index,
        transition_frequency=transition_frequency,
        mode_volume=mode_volume,
    )
    g = (dipole_moment / refractive_index) * math.sqrt(
        transition_frequency / (2.0 * HBAR * EPSILON_0 * mode_volume)
    )
    return CouplingEstimate(
        g=g,
        method="dipole_mode_volume",
        inputs={
            "dipole_moment": dipole_moment,
            "refractive_index": refractive_index,
            "transition_frequency": transition_frequency,
            "mode_volume": mode_volume,
        },
    )


def dipole_from_g(
    g: float,
    refractive_index: float,
    transition_frequency: float,
    mode_volume: float,
) -> float:
    """Dipole moment μ = g·n_r·√(2ħε₀V/ω_a) that yields a given coupling."""
    _require_positive(
        g=g,
        refractive_index=refractive_index,
        transition_frequency=transition_frequency,
        mode_volume=mode_volume,
    )
    scale = math.sqrt(2.0 * HBAR * EPSILON_0 * mode_volume / transition_frequency)
    return g * refractive_index * scale


def critical_numbers(g: float, kappa: float, gamma: float, gamma_h: float) -> CavityQedParams:
    """Critical atom number N0 = 2γ_hκ/g² and photon number n0 = γγ_h/(4g²).

    Returns the full rate set; ``N0`` and ``n0`` are derived properties of it.
    """
    _require_positive(g=g, kappa=kappa, gamma=gamma, gamma_h=gamma_h)
    return CavityQedParams(g=g, kappa=kappa, gamma=gamma, gamma_h=gamma_h)


def coherence_reduction(t2: float, t2_comparison: float) -> float:
    """Relative coherence-time reduction 1 − T2/T2_comparison.

    Positive when the resonator-coupled ions dephase faster than the comparison set.
    """
    _require_positive(t2=t2, t2_comparison=t2_comparison)
    return 1.0 - t2 / t2_comparison
