"""Mode volume V = ∫ε|E|² d³r / max(ε|E|²) and the field of a single photon.

Exact-branch modes are integrated with a tensor-product Simpson rule on an (r, θ) grid
that is doubled until two successive volumes differ by less than ``REFINEMENT_TOLERANCE``.
Asymptotic modes use the closed-form product of the polar integral and the Airy radial
width, with a first-order curvature correction.
"""

import logging
import math
from collections.abc import Sequence

import numpy as np
from scipy import integrate, optimize, special

from src.model.constants import EPSILON_0, HBAR, SPEED_OF_LIGHT
from src.model.errors import ConvergenceError, PreconditionError
from src.wgm.fields import (
    airy_length,
    equatorial_profile,
    polar_factors,
    polar_window,
    radial_factors,
    radial_window,
)
from src.wgm.modes import PROFILE_GRID
from src.wgm.schemas import ModeVolumeResult, WgmMode
from src.wgm.special import airy_constants

logger = logging.getLogger(__name__)

REFINEMENT_TOLERANCE = 1e-3
MAX_REFINEMENTS = 6


def grid_mode_volume(
    values: np.ndarray,
    axes: Sequence[np.ndarray],
    jacobian: np.ndarray | None = None,
) -> float:
    """Mode volume of a sampled ε|E|² on a rectilinear grid.

    Args:
        values: ε|E|² with one array dimension per axis
        axes: Sample coordinates along each dimension
        jacobian: Volume element on the same grid (1 for Cartesian axes)

    Returns:
        ∫values·jacobian / max(values), integrated with Simpson's rule per axis

    Example:
        >>> axis = np.linspace(0.0, 1.0, 5)
        >>> grid_mode_volume(np.ones((5, 5, 5)), [axis, axis, axis])
        1.0
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != len(axes):
        raise PreconditionError("values needs one dimension per axis")
    peak = float(values.max())
    if peak <= 0:
        raise PreconditionError("field profile is identically zero")

    integrand = values if jacobian is None else values * jacobian
    for axis in reversed(axes):
        integrand = integrate.simpson(integrand, x=axis, axis=-1)
    return float(integrand) / peak


def _polished_peak(mode: WgmMode, radii: np.ndarray) -> float:
    profile = equatorial_profile(mode, radii)
    i = int(np.argmax(profile))
    lo, hi = radii[max(i - 1, 0)], radii[min(i + 1, radii.size - 1)]
    result = optimize.minimize_scalar(
        lambda r: -float(equatorial_profile(mode, np.array([r]))[0]),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-6 * (hi - lo)},
    )
    return max(float(profile[i]), -float(result.fun))


def _grid_volume(mode: WgmMode, n_radii: int, n_polar: int) -> float:
    # ε jumps at the surface, so the radial rule runs separately on each side of it
    inner, outer = radial_window(mode)
    segments = [
        np.linspace(inner, mode.radius, n_radii),
        np.linspace(np.nextafter(mode.radius, np.inf), outer, n_radii // 2 + 1),
    ]
    theta = np.linspace(*polar_window(mode.polar_index), n_polar)
    polar_integrals = [
        integrate.simpson(a * np.sin(theta), x=theta) for a in polar_factors(mode, theta)
    ]

    integral = 0.0
    for radii in segments:
        for radial, polar in zip(radial_factors(mode, radii), polar_integrals):
            integral += integrate.simpson(radial * radii**2, x=radii) * polar
    return 2.0 * math.pi * integral / _polished_peak(mode, np.concatenate(segments))


def _exact_volume(mode: WgmMode) -> ModeVolumeResult:
    if mode.field_profile is not None:
        n_radii, n_polar = mode.field_profile.grid_shape
    else:
        n_radii, n_polar = PROFILE_GRID

    previous = _grid_volume(mode, n_radii, n_polar)
    for level in range(1, MAX_REFINEMENTS + 1):
        n_radii, n_polar = 2 * n_radii - 1, 2 * n_polar - 1
        volume = _grid_volume(mode, n_radii, n_polar)
        change = abs(volume - previous) / volume
        logger.debug(
            f"Refinement {level}: grid {n_radii}x{n_polar}, V={volume:.6e}, change={change:.2e}"
        )
        if change < REFINEMENT_TOLERANCE:
            return ModeVolumeResult(
                volume=volume,
                method="exact_small_l",
                estimated_relative_error=change,
                refinements=level,
                grid_shape=(n_radii, n_polar),
            )
        previous = volume

    raise ConvergenceError(
        f"Mode volume did not converge to {REFINEMENT_TOLERANCE:g} after {MAX_REFINEMENTS} "
        f"grid doublings (last change {change:.2e})"
    )


def _asymptotic_volume(mode: WgmMode) -> ModeVolumeResult:
    l = mode.polar_index
    radius = mode.radius
    airy = airy_constants()
    a1, b1 = abs(airy["a1"]), abs(airy["a1_prime"])
    s = airy_length(mode)

    # polar integral of the dominant component; radial exponent p of the integrand J²·r^p
    if mode.polarization == "TE":
        polar = math.exp(special.betaln(0.5, l)) * (2 * l + 2) / (2 * l + 1)
        p = 1
    else:
        polar = math.exp(special.betaln(0.5, l + 1))
        p = -1
    radial = s * radius**2 * airy["ai_prime_at_a1"] ** 2 / airy["ai_at_a1_prime"] ** 2
    curvature = 1.0 - (p * 2.0 / 3.0 * a1 - (p - 2) * (a1 - b1)) * s / radius

    volume = 2.0 * math.pi * polar * radial * curvature
    return ModeVolumeResult(
        volume=volume,
        method="asymptotic_large_l",
        estimated_relative_error=((l + 0.5) / 2.0) ** (-2.0 / 3.0),
    )


def mode_volume(mode: WgmMode) -> ModeVolumeResult:
    """Mode volume of a solved fundamental mode.

    Args:
        mode: Result of ``find_fundamental_mode``

    Returns:
        Volume with method and error estimate

    Raises:
        ConvergenceError: If grid refinement does not reach the tolerance
    """
    result = _exact_volume(mode) if mode.branch == "exact" else _asymptotic_volume(mode)
    logger.info(
        f"Mode volume ({result.method}): V={result.volume:.4e} m^3 "
        f"(±{result.estimated_relative_error:.2%})"
    )
    return result


def peak_field_per_photon(mode: WgmMode, volume: float | ModeVolumeResult) -> float:
    """Peak field of one photon in the mode, √(ħω/(2ε₀n_r²V)) in V/m.

    With this field, μ·E/ħ equals the dipole-route coupling for the same ω, n_r and V.
    """
    if isinstance(volume, ModeVolumeResult):
        volume = volume.volume
    if not volume > 0:
        raise PreconditionError(f"mode volume must be > 0, got {volume!r}")
    omega = 2.0 * math.pi * SPEED_OF_LIGHT / mode.resonance_wavelength
    return math.sqrt(HBAR * omega / (2.0 * EPSILON_0 * mode.refractive_index**2 * volume))


def radial_profile(mode: WgmMode, points: int = 400) -> tuple[np.ndarray, np.ndarray]:
    """Equatorial ε|E|² normalised to its maximum, for plotting.

    Exact modes use the full field; asymptotic modes the Airy profile inside and an
    evanescent tail outside.

    Returns:
        (radii in m, normalised ε|E|²)
    """
    radii = np.linspace(*radial_window(mode), points)
    if mode.branch == "exact":
        values = equatorial_profile(mode, radii)
    else:
        n = mode.refractive_index
        k = mode.wavenumber
        nu = mode.polar_index + 0.5
        scale = (nu / 2.0) ** (1.0 / 3.0)
        zeta = -(n * k * radii - nu) / scale
        zeta_surface = -(mode.size_parameter - nu) / scale
        surface = special.airy(zeta_surface)[0] ** 2
        jump = 1.0 / n**2 if mode.polarization == "TE" else n**2
        decay = np.exp(-2.0 * k * math.sqrt(n**2 - 1.0) * (radii - mode.radius))
        values = np.where(
            radii <= mode.radius, special.airy(zeta)[0] ** 2, surface * jump * decay
        )
    return radii, values / values.max()
