"""Shared fixtures for the bistability tests."""

import pytest

from src.bistability.schemas import BistabilityParams
from src.model.config import BistabilityBlock


@pytest.fixture
def resonator_params():
    """Resonator-B parameters with the atomic line half a cavity linewidth above ω_c."""
    return BistabilityParams.from_config(BistabilityBlock())


@pytest.fixture
def empty_cavity(resonator_params):
    """The same resonator without ions."""
    return resonator_params.model_copy(update={"n_atoms": 0.0})
