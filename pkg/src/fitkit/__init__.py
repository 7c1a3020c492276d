from src.fitkit.calibration import fit_heating_quadratic, fit_pi_pulse
from src.fitkit.decay import DECAY_CONSTANTS, FALLBACK_FLAG, fit_decay, fit_two_stage_hole
from src.fitkit.minimize import least_squares
from src.fitkit.schemas import DecayModel, FitResult, HoleFitMode

__all__ = [
    "DECAY_CONSTANTS",
    "FALLBACK_FLAG",
    "DecayModel",
    "FitResult",
    "HoleFitMode",
    "fit_decay",
    "fit_heating_quadratic",
    "fit_pi_pulse",
    "fit_two_stage_hole",
    "least_squares",
]
