"""Single particle hydrodynamics: Stokes drag, Einstein diffusion and a
temperature-viscosity law.

All internal arithmetic is SI (meters, seconds, kelvin, pascal seconds).
Viscosities cross the public API in mPa s and are converted at the
boundary, matching how tracking instruments report them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._validation import check_in_open_interval, check_positive

# Conventional rounded value used by the acquisition software this package
# mirrors. Pass boltzmann_J_per_K=1.380649e-23 for the exact SI constant.
DEFAULT_BOLTZMANN_J_PER_K = 1.38e-23

MPAS_TO_PAS = 1e-3

_RADIUS_LO_M = 1e-9
_RADIUS_HI_M = 1e-6


@dataclass(frozen=True)
class PhysicalParams:
    """Scene description for a tracked nanoparticle in a viscous medium.

    particle_radius_m must lie strictly inside (1e-9, 1e-6); anything
    outside that range is not a trackable nanoparticle and is rejected.
    """

    temperature_K: float = 310.0
    particle_radius_m: float = 2e-8
    viscosity_mPas: float = 1.0
    boltzmann_J_per_K: float = DEFAULT_BOLTZMANN_J_PER_K

    def __post_init__(self) -> None:
        check_positive("temperature_K", self.temperature_K)
        check_in_open_interval("particle_radius_m", self.particle_radius_m, _RADIUS_LO_M, _RADIUS_HI_M)
        check_positive("viscosity_mPas", self.viscosity_mPas)
        check_positive("boltzmann_J_per_K", self.boltzmann_J_per_K)

    @property
    def viscosity_Pas(self) -> float:
        return self.viscosity_mPas * MPAS_TO_PAS


@dataclass(frozen=True)
class ViscosityTempModel:
    """Arrhenius style viscosity law eta(T) = A * exp(b / T), in mPa s.

    No default coefficients are shipped; calibrate A and b against your
    own medium before relying on the extrapolation.
    """

    prefactor_A_mPas: float
    exponent_b_K: float

    def __post_init__(self) -> None:
        check_positive("prefactor_A_mPas", self.prefactor_A_mPas)
        if not math.isfinite(self.exponent_b_K):
            raise ValueError("exponent_b_K must be finite")


def drag_coefficient(particle_radius_m: float, viscosity_mPas: float) -> float:
    """Stokes drag gamma = 6*pi*a*eta in kg/s (eta converted from mPa s)."""
    check_positive("particle_radius_m", particle_radius_m)
    check_positive("viscosity_mPas", viscosity_mPas)
    return 6.0 * math.pi * particle_radius_m * viscosity_mPas * MPAS_TO_PAS


def einstein_diffusion(params: PhysicalParams) -> float:
    """Diffusion coefficient D = kB*T / (6*pi*a*eta) in m^2/s."""
    return params.boltzmann_J_per_K * params.temperature_K / drag_coefficient(
        params.particle_radius_m, params.viscosity_mPas
    )


def viscosity_from_diffusion(
    diffusion_m2s: float,
    temperature_K: float,
    particle_radius_m: float,
    boltzmann_J_per_K: float = DEFAULT_BOLTZMANN_J_PER_K,
) -> float:
    """Invert the Einstein relation: eta in mPa s from a measured D.

    Rejects non-positive D; an estimator upstream that produced one has
    already failed and a silent negative viscosity would mask that.
    """
    check_positive("diffusion_m2s", diffusion_m2s)
    check_positive("temperature_K", temperature_K)
    check_positive("particle_radius_m", particle_radius_m)
    check_positive("boltzmann_J_per_K", boltzmann_J_per_K)
    eta_pas = boltzmann_J_per_K * temperature_K / (6.0 * math.pi * particle_radius_m * diffusion_m2s)
    return eta_pas / MPAS_TO_PAS


def stokes_force(particle_radius_m: float, viscosity_mPas: float, speed_m_s: float) -> float:
    """Drag force magnitude F = 6*pi*a*eta*v in newtons, linear in v and eta."""
    if not math.isfinite(speed_m_s):
        raise ValueError("speed_m_s must be finite")
    return drag_coefficient(particle_radius_m, viscosity_mPas) * speed_m_s


def viscosity_at_temperature(model: ViscosityTempModel, temperature_K: float) -> float:
    """Evaluate eta(T) = A * exp(b / T) in mPa s."""
    check_positive("temperature_K", temperature_K)
    return model.prefactor_A_mPas * math.exp(model.exponent_b_K / temperature_K)
