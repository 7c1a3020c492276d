"""Domain types, unit conventions and the experiment config schema."""

from src.model.config import ExperimentConfig
from src.model.loader import bundled_config, dump_config, load_config
from src.model.schemas import (
    CavityQedParams,
    EchoTrace,
    IonSpecies,
    Pulse,
    ResonatorSpec,
    SweepTrace,
)
from src.model.units import AngularRate, from_over_2pi, to_over_2pi

__all__ = [
    "AngularRate",
    "CavityQedParams",
    "EchoTrace",
    "ExperimentConfig",
    "IonSpecies",
    "Pulse",
    "ResonatorSpec",
    "SweepTrace",
    "bundled_config",
    "dump_config",
    "from_over_2pi",
    "load_config",
    "to_over_2pi",
]
