"""Parameter and result records of the steady-state bistability model."""

from pydantic import Field, model_validator

from src.cqed.schemas import CouplingEstimate
from src.fitkit.schemas import FitResult
from src.model.config import BistabilityBlock
from src.model.schemas import FrozenModel
from src.model.units import AngularRate


class BistabilityParams(FrozenModel):
    """Rates and couplings of the plane-wave ring-cavity model.

    Frequencies ω_c and ω_a may be absolute or share any common offset; only their
    differences from the laser enter the model. The saturation denominator uses γ_h for
    the optical coherence rate; ``gamma`` is carried for reporting only.

    Attributes:
        g: Single-ion coupling (rad/s)
        n_atoms: Number of ions in the mode
        kappa: Cavity field decay rate (rad/s)
        gamma_h: Homogeneous coherence decay rate (rad/s)
        gamma: Population decay rate (rad/s)
        omega_c: Cavity resonance (rad/s)
        omega_a: Atomic resonance (rad/s)
        coupling_efficiency: Fraction η of the laser power coupled through the prism
        external_loss: Fraction of the output lost before the detector
        drive_calibration: Normalised |y|² per watt coupled into the resonator
    """

    g: AngularRate = Field(..., gt=0)
    n_atoms: float = Field(..., ge=0)
    kappa: AngularRate = Field(..., gt=0)
    gamma_h: AngularRate = Field(..., gt=0)
    gamma: AngularRate = Field(..., gt=0)
    omega_c: AngularRate = 0.0
    omega_a: AngularRate = 0.0
    coupling_efficiency: float = Field(default=1.0, ge=0, le=1)
    external_loss: float = Field(default=0.0, ge=0, lt=1)
    drive_calibration: float = Field(default=1.0, gt=0)

    @property
    def cooperativity(self) -> float:
        """C = g²N/(γ_h·κ)."""
        return self.g**2 * self.n_atoms / (self.gamma_h * self.kappa)

    @classmethod
    def from_config(cls, block: BistabilityBlock, omega_c: float = 0.0) -> "BistabilityParams":
        """Build from a config block, placing ω_a at ω_c + atom_offset·κ."""
        return cls(
            g=block.coupling,
            n_atoms=block.n_atoms,
            kappa=block.kappa,
            gamma_h=block.gamma_h,
            gamma=block.gamma,
            omega_c=omega_c,
            omega_a=omega_c + block.atom_offset * block.kappa,
            coupling_efficiency=block.coupling_efficiency,
            external_loss=block.external_loss,
            drive_calibration=block.drive_calibration,
        )


class DriveField(FrozenModel):
    """Normalised input intensity |y|² and laser frequency ω_l."""

    intensity: float = Field(..., ge=0)
    laser_frequency: AngularRate = 0.0


class OutputRoots(FrozenModel):
    """All steady-state intracavity intensities u = |x|² for one drive.

    Roots are sorted ascending. With three roots the middle one is unstable.

    Attributes:
        roots: Non-negative solutions of |y|² = u·M(u)
        drive_intensity: The |y|² that was solved for
        followed: Index of the root nearest the branch hint, if one was given
        grid_points: Size of the logarithmic bracketing grid that resolved the roots
    """

    roots: list[float]
    drive_intensity: float = Field(..., ge=0)
    followed: int | None = None
    grid_points: int = 0

    @model_validator(mode="after")
    def _check_roots(self) -> "OutputRoots":
        if not self.roots:
            raise ValueError("at least one root is required")
        if any(u < 0 for u in self.roots) or self.roots != sorted(self.roots):
            raise ValueError("roots must be non-negative and sorted ascending")
        if self.followed is not None and not 0 <= self.followed < len(self.roots):
            raise ValueError("followed index out of range")
        return self

    @property
    def count(self) -> int:
        return len(self.roots)

    @property
    def stable(self) -> list[float]:
        """Roots on branches with d|y|²/du > 0."""
        return self.roots[0::2]


class BistabilityFit(FrozenModel):
    """Coupling extracted from sweep traces, with the underlying fit record."""

    estimate: CouplingEstimate
    fit: FitResult
