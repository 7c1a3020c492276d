"""Cavity-QED rates, coupling estimates and critical numbers."""

from src.cqed.rates import (
    coherence_reduction,
    critical_numbers,
    decay_rates,
    dipole_from_g,
    g_from_dipole,
    g_from_echo,
    intracavity_photon_number,
    kappa_from_q,
    photon_number_conventions,
    rabi_from_pulse,
)
from src.cqed.report import strong_coupling_report
from src.cqed.schemas import CouplingEstimate, StrongCouplingReport

__all__ = [
    "CouplingEstimate",
    "StrongCouplingReport",
    "coherence_reduction",
    "critical_numbers",
    "decay_rates",
    "dipole_from_g",
    "g_from_dipole",
    "g_from_echo",
    "intracavity_photon_number",
    "kappa_from_q",
    "photon_number_conventions",
    "rabi_from_pulse",
    "strong_coupling_report",
]
