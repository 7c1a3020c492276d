"""Steady-state optical bistability of the ion-loaded resonator."""

from src.bistability.fit import fit_bistability, model_transmission
from src.bistability.model import (
    bracket_modulus,
    cooperativity,
    drive_from_power,
    linear_response_transmission,
    steady_state_input,
    susceptibility,
    transmission,
)
from src.bistability.roots import bistable_drive_window, count_roots_bruteforce, solve_output
from src.bistability.schemas import BistabilityFit, BistabilityParams, DriveField, OutputRoots
from src.bistability.sweep import follow_branch, hysteresis_width, sweep, sweep_grid

__all__ = [
    "BistabilityFit",
    "BistabilityParams",
    "DriveField",
    "OutputRoots",
    "bistable_drive_window",
    "bracket_modulus",
    "cooperativity",
    "count_roots_bruteforce",
    "drive_from_power",
    "fit_bistability",
    "follow_branch",
    "hysteresis_width",
    "linear_response_transmission",
    "model_transmission",
    "solve_output",
    "steady_state_input",
    "susceptibility",
    "sweep",
    "sweep_grid",
    "transmission",
]
