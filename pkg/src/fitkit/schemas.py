"""Fit result record."""

from typing import Literal

from pydantic import Field, model_validator

from src.model.schemas import FrozenModel

DecayModel = Literal["amp_2pe", "int_2pe", "pop_3pe", "hole"]
HoleFitMode = Literal["piecewise", "sum"]


class FitResult(FrozenModel):
    """Outcome of one least-squares reduction.

    Attributes:
        model_name: Model that was fitted (``amp_2pe``, ``pi_pulse``, ...)
        parameters: Fitted and derived values by name
        units: Unit string per parameter
        standard_errors: One-sigma errors from the linearised covariance; None when not
            converged
        residual_norm: ‖model − data‖₂ at the optimum
        converged: True when the optimiser succeeded and produced a covariance
        n_iterations: Residual evaluations used
        flags: Notes such as ``single_exponential_fallback``
        diagnostics: Model-free cross-checks (raw argmax, R², ...) and, for a fit that
            did not converge, the optimiser's stop message and evaluation count
    """

    model_name: str
    parameters: dict[str, float]
    units: dict[str, str] = Field(default_factory=dict)
    standard_errors: dict[str, float] | None = None
    residual_norm: float = Field(..., ge=0)
    converged: bool
    n_iterations: int = Field(default=0, ge=0)
    flags: list[str] = Field(default_factory=list)
    diagnostics: dict[str, float | bool | str] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _errors_iff_converged(self) -> "FitResult":
        if self.converged != (self.standard_errors is not None):
            raise ValueError("standard_errors must be present exactly when converged")
        return self

    def __getitem__(self, name: str) -> float:
        return self.parameters[name]
