"""Result records of the cavity-QED calculations."""

from typing import Literal

from pydantic import Field

from src.model.schemas import CavityQedParams, FrozenModel
from src.model.units import AngularRate, to_over_2pi

CouplingMethod = Literal["echo_calibration", "dipole_mode_volume", "bistability_fit"]


class CouplingEstimate(FrozenModel):
    """A single-ion coupling rate together with how it was obtained.

    Attributes:
        g: Coupling rate (rad/s)
        method: Route used to obtain g
        inputs: Raw quantities that entered the estimate, SI units
    """

    g: AngularRate = Field(..., gt=0)
    method: CouplingMethod
    inputs: dict[str, float] = Field(default_factory=dict)

    @property
    def g_over_2pi(self) -> float:
        return to_over_2pi(self.g)


class StrongCouplingReport(FrozenModel):
    """Regime classification of a cavity-QED parameter set.

    The booleans come from exact floating-point comparisons of the unrounded numbers.
    """

    params: CavityQedParams
    n0_below_one: bool
    N0_below_one: bool
    bad_cavity: bool
    g_squared_over_kappa: float
    gamma: float

    def as_outputs(self) -> dict[str, float | bool]:
        """Flat mapping used by scenario reports."""
        return {
            "N0": self.params.N0,
            "n0": self.params.n0,
            "n0_below_one": self.n0_below_one,
            "N0_below_one": self.N0_below_one,
            "bad_cavity": self.bad_cavity,
            "g_squared_over_kappa": self.g_squared_over_kappa,
            "gamma": self.gamma,
        }
