"""Whispering-gallery modes of a dielectric sphere and their mode volumes."""

from src.wgm.modes import (
    EXACT_SIZE_PARAMETER_LIMIT,
    find_fundamental_mode,
    resonance_wavelength,
    size_parameter,
)
from src.wgm.schemas import FieldProfile, ModeVolumeResult, WgmMode
from src.wgm.volume import grid_mode_volume, mode_volume, peak_field_per_photon, radial_profile

__all__ = [
    "EXACT_SIZE_PARAMETER_LIMIT",
    "FieldProfile",
    "ModeVolumeResult",
    "WgmMode",
    "find_fundamental_mode",
    "grid_mode_volume",
    "mode_volume",
    "peak_field_per_photon",
    "radial_profile",
    "resonance_wavelength",
    "size_parameter",
]
