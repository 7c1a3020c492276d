"""Resonances of the fundamental whispering-gallery mode family of a sphere.

Two solvers share one entry point:

- exact: root of the inside/outside matching condition written with Riccati-Bessel
  functions, ψ_l for the interior and the Neumann part χ_l for the exterior;
- asymptotic: the large-order Airy expansion of the same condition, good to a small
  fraction of a free spectral range once l is in the hundreds.

The exact branch is used up to ``EXACT_SIZE_PARAMETER_LIMIT``.
"""

import logging
import math

import numpy as np
from scipy import optimize

from src.model.errors import ModeSearchError
from src.model.schemas import Polarization, ResonatorSpec
from src.wgm.fields import sample_profile
from src.wgm.schemas import SolverBranch, WgmMode
from src.wgm.special import airy_constants, chi_log_derivative, riccati_psi

logger = logging.getLogger(__name__)

EXACT_SIZE_PARAMETER_LIMIT = 500.0
MAX_RESIDUAL = 1e-8
WAVELENGTH_TOLERANCE = 0.01
CANDIDATE_SPREAD = 2
SCAN_POINTS = 256
PROFILE_GRID = (257, 129)


def size_parameter(radius: float, refractive_index: float, wavelength: float) -> float:
    """x = 2πR·n_r/λ."""
    return 2.0 * math.pi * radius * refractive_index / wavelength


def _polarization_factor(polarization: Polarization, n: float) -> float:
    return 1.0 if polarization == "TE" else 1.0 / n**2


def asymptotic_size_parameter(polar_index: float, n: float, polarization: Polarization) -> float:
    """n·k·R of the q = 1 resonance from the Airy expansion in ν = l + ½."""
    a = airy_constants()["a1"]
    p = _polarization_factor(polarization, n)
    h = (polar_index + 0.5) / 2.0
    t = (
        2.0 * h
        - a * h ** (1 / 3)
        + 3 / 20 * a**2 * h ** (-1 / 3)
        + (a**3 + 10) / 1400 * h**-1
        - a * (479 * a**3 - 40) / 504000 * h ** (-5 / 3)
    )
    return (
        t
        - n * p / math.sqrt(n**2 - 1)
        + a * (3 - 2 * p**2) * p * n**3 * h ** (-2 / 3) / (6 * (n**2 - 1) ** 1.5)
        - n**2 * p * (p - 1) * (p**2 * n**2 + p * n**2 - 1) * h**-1 / (4 * (n**2 - 1) ** 2)
    )


def characteristic_function(
    polar_index: int, z: np.ndarray | float, n: float, polarization: Polarization
) -> np.ndarray:
    """Matching condition G(z) at internal size parameter z = n·k·R; resonances are its roots.

    TE: n·ψ'(z) − ψ(z)·χ'(z/n)/χ(z/n); TM: ψ'(z) − n·ψ(z)·χ'(z/n)/χ(z/n).
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    psi, dpsi = riccati_psi(polar_index, z)
    log_derivative = chi_log_derivative(polar_index, z / n)
    if polarization == "TE":
        return n * dpsi - psi * log_derivative
    return dpsi - n * psi * log_derivative


def exact_size_parameter(
    polar_index: int, n: float, polarization: Polarization
) -> tuple[float, float]:
    """Lowest root of the characteristic function above the turning point ν.

    Returns:
        (n·k·R at resonance, |G| at the root)

    Raises:
        ModeSearchError: If no sign change with a small residual is found
    """
    nu = polar_index + 0.5
    width = 4.0 * (nu / 2.0) ** (1 / 3) + 2.0
    scanned: list[tuple[float, float]] = []

    for widening in (1.0, 2.5, 6.0):
        lo, hi = nu, nu + widening * width
        grid = np.linspace(lo, hi, SCAN_POINTS)
        values = characteristic_function(polar_index, grid, n, polarization)
        scanned.append((lo, hi))
        signs = np.sign(values)
        for i in np.flatnonzero(signs[:-1] * signs[1:] < 0):
            root = optimize.brentq(
                lambda z: float(characteristic_function(polar_index, z, n, polarization)[0]),
                grid[i],
                grid[i + 1],
                xtol=1e-12,
                maxiter=200,
            )
            residual = abs(float(characteristic_function(polar_index, root, n, polarization)[0]))
            if residual < MAX_RESIDUAL:
                return root, residual
            # sign change across a pole of χ'/χ, not a resonance
            logger.debug(f"l={polar_index}: rejected pole near z={root:.6f} (|G|={residual:.3g})")

    raise ModeSearchError(
        f"No q=1 resonance bracketed for l={polar_index}",
        bracket={
            "polar_index": polar_index,
            "windows": scanned,
            "n": n,
            "polarization": polarization,
        },
    )


def _estimate_polar_index(x_target: float, n: float, polarization: Polarization) -> int:
    def mismatch(nu: float) -> float:
        return asymptotic_size_parameter(nu - 0.5, n, polarization) - x_target

    lo, hi = 1.5, x_target + 10.0
    if mismatch(lo) > 0:
        return 1
    nu = optimize.brentq(mismatch, lo, hi, xtol=1e-6)
    return max(1, int(round(nu - 0.5)))


def resonance_wavelength(
    radius: float,
    refractive_index: float,
    polar_index: int,
    polarization: Polarization = "TE",
    branch: SolverBranch = "asymptotic",
) -> float:
    """Vacuum wavelength of the (l, q = 1) resonance.

    λ = 2π·n_r·R / z with z the internal size parameter from the chosen solver. Scaling
    R at fixed l scales λ by the same factor.
    """
    if branch == "exact":
        z, _ = exact_size_parameter(polar_index, refractive_index, polarization)
    else:
        z = asymptotic_size_parameter(polar_index, refractive_index, polarization)
    return 2.0 * math.pi * refractive_index * radius / z


def find_fundamental_mode(
    spec: ResonatorSpec,
    target_wavelength: float,
    polarization: Polarization | None = None,
    method: str = "auto",
) -> WgmMode:
    """Fundamental mode (q = 1, m = l) closest to a target wavelength.

    Args:
        spec: Resonator geometry and index
        target_wavelength: Wavelength to match (m)
        polarization: TE or TM; the resonator's configured polarization when omitted
        method: ``auto`` (exact for x <= 500), ``exact`` or ``asymptotic``

    Returns:
        The solved mode; exact-branch modes carry a sampled field profile

    Raises:
        ModeSearchError: If no resonance lies within 1% of the target

    Example:
        >>> spec = ResonatorSpec(radius=10e-6, refractive_index=1.8, quality_factor=1e6)
        >>> find_fundamental_mode(spec, 0.6e-6).branch
        'exact'
    """
    polarization = polarization or spec.polarization
    n = spec.refractive_index
    x_target = size_parameter(spec.radius, n, target_wavelength)

    if method == "auto":
        branch: SolverBranch = "exact" if x_target <= EXACT_SIZE_PARAMETER_LIMIT else "asymptotic"
    elif method in ("exact", "asymptotic"):
        branch = method  # type: ignore[assignment]
    else:
        raise ValueError(f"Unknown mode solver method: {method}")

    l0 = _estimate_polar_index(x_target, n, polarization)
    candidates = [l for l in range(l0 - CANDIDATE_SPREAD, l0 + CANDIDATE_SPREAD + 1) if l >= 1]
    logger.info(
        f"Mode search: x={x_target:.2f}, branch={branch}, {polarization}, "
        f"candidates l={candidates[0]}..{candidates[-1]}"
    )

    best: tuple[float, int, float, float | None] | None = None
    for l in candidates:
        if branch == "exact":
            z, residual = exact_size_parameter(l, n, polarization)
        else:
            z, residual = asymptotic_size_parameter(l, n, polarization), None
        wavelength = 2.0 * math.pi * n * spec.radius / z
        offset = abs(wavelength - target_wavelength)
        if best is None or offset < abs(best[2] - target_wavelength):
            best = (z, l, wavelength, residual)

    assert best is not None
    z, l, wavelength, residual = best
    if abs(wavelength - target_wavelength) > WAVELENGTH_TOLERANCE * target_wavelength:
        raise ModeSearchError(
            f"Closest resonance {wavelength:.6e} m is more than 1% from {target_wavelength:.6e} m",
            bracket={
                "candidates": candidates,
                "closest_polar_index": l,
                "size_parameter": x_target,
            },
        )

    mode = WgmMode(
        polar_index=l,
        azimuthal_index=l,
        radial_index=1,
        polarization=polarization,
        resonance_wavelength=wavelength,
        radius=spec.radius,
        refractive_index=n,
        branch=branch,
        size_parameter=z,
        residual=residual,
    )
    if branch == "exact":
        mode = mode.model_copy(update={"field_profile": sample_profile(mode, *PROFILE_GRID)})

    logger.info(f"Found {polarization} l={l} at λ={wavelength * 1e9:.4f} nm ({branch})")
    return mode
