"""Field distribution of the fundamental (q = 1, m = l) mode of a sphere.

ε|E|² of the exact mode separates into a sum of radial × polar terms: one term for TE,
a radial-E and a tangential-E term for TM. Grid profiles and the tensor-product
quadrature in ``src.wgm.volume`` are both built from these factors.

Radii are handled in units of R and the overall scale is arbitrary; only ratios to the
field maximum matter downstream.
"""

import numpy as np

from src.wgm.schemas import FieldProfile, WgmMode
from src.wgm.special import chi_log_derivative, chi_ratio, riccati_psi

# Widths of the sampled window: inner depth in Airy lengths, outer depth in evanescent
# decay lengths, polar half-width in units of 1/√l.
INNER_AIRY_LENGTHS = 16.0
OUTER_DECAY_LENGTHS = 20.0
POLAR_WIDTHS = 12.0


def airy_length(mode: WgmMode) -> float:
    """Radial Airy scale s = (ν/2)^{1/3}/(n·k) of the mode (m)."""
    nu = mode.polar_index + 0.5
    return (nu / 2.0) ** (1.0 / 3.0) / (mode.refractive_index * mode.wavenumber)


def radial_window(mode: WgmMode) -> tuple[float, float]:
    """Radial span (m) that holds all but a negligible part of the mode energy."""
    n = mode.refractive_index
    inner = max(1e-6 * mode.radius, mode.radius - INNER_AIRY_LENGTHS * airy_length(mode))
    outer = mode.radius + OUTER_DECAY_LENGTHS / (mode.wavenumber * np.sqrt(n**2 - 1.0))
    return inner, outer


def polar_window(polar_index: int) -> tuple[float, float]:
    """Polar span centred on the equator, clipped to [0, π]."""
    half_width = POLAR_WIDTHS / np.sqrt(polar_index)
    return max(0.0, np.pi / 2 - half_width), min(np.pi, np.pi / 2 + half_width)


def polar_factors(mode: WgmMode, theta: np.ndarray) -> list[np.ndarray]:
    """Angular factors matching ``radial_factors`` term by term."""
    l = mode.polar_index
    sin_theta = np.abs(np.sin(theta))
    tangential = sin_theta ** (2 * l - 2) * (1.0 + np.cos(theta) ** 2)
    if mode.polarization == "TE":
        return [tangential]
    return [sin_theta ** (2 * l), tangential]


def radial_factors(mode: WgmMode, radii: np.ndarray) -> list[np.ndarray]:
    """Radial factors of ε|E|² at the given radii (m)."""
    l = mode.polar_index
    n = mode.refractive_index
    k = mode.wavenumber
    radius = mode.radius
    radii = np.asarray(radii, dtype=float)
    rho = radii / radius
    inside = radii <= radius
    z_surface = n * k * radius
    x_surface = k * radius

    psi_surface, _ = riccati_psi(l, z_surface)
    psi_in, dpsi_in = riccati_psi(l, n * k * radii[inside])

    outside_radii = radii[~inside]
    chi_out = chi_ratio(l, k * outside_radii, x_surface) if outside_radii.size else np.empty(0)

    if mode.polarization == "TE":
        # E ∝ j_l(nkr) inside, continuous across the surface
        field = np.empty_like(radii)
        field[inside] = psi_in / (z_surface * rho[inside])
        field[~inside] = (psi_surface / z_surface) * chi_out / rho[~inside]
        epsilon = np.where(inside, n**2, 1.0)
        return [epsilon * field**2]

    # TM: u = ψ(nkr) inside, u = ψ(nkR)·χ(kr)/χ(kR) outside; u'/ε continuous
    u = np.empty_like(radii)
    du = np.empty_like(radii)  # derivative with respect to r/R
    u[inside] = psi_in
    du[inside] = z_surface * dpsi_in
    if outside_radii.size:
        u[~inside] = psi_surface * chi_out
        du[~inside] = x_surface * u[~inside] * chi_log_derivative(l, k * outside_radii)
    inv_epsilon = np.where(inside, 1.0 / n**2, 1.0)
    radial_e = inv_epsilon * (l * (l + 1.0)) ** 2 * u**2 / rho**4
    tangential_e = inv_epsilon * l**2 * du**2 / rho**2
    return [radial_e, tangential_e]


def equatorial_profile(mode: WgmMode, radii: np.ndarray) -> np.ndarray:
    """ε|E|² along the equator θ = π/2, where the fundamental mode peaks."""
    equator = np.array([np.pi / 2])
    return sum(
        r * a[0] for r, a in zip(radial_factors(mode, radii), polar_factors(mode, equator))
    )


def sample_profile(mode: WgmMode, n_radii: int, n_polar: int) -> FieldProfile:
    """ε|E|² on a uniform (r, θ) grid spanning the mode windows."""
    radii = np.linspace(*radial_window(mode), n_radii)
    theta = np.linspace(*polar_window(mode.polar_index), n_polar)
    values = sum(
        np.outer(r, a) for r, a in zip(radial_factors(mode, radii), polar_factors(mode, theta))
    )
    return FieldProfile(radii=radii, polar_angles=theta, values=np.clip(values, 0.0, None))
