import math

import pytest
from hypothesis import given, strategies as st

from nanovisc import (
    DEFAULT_BOLTZMANN_J_PER_K,
    PhysicalParams,
    ViscosityTempModel,
    drag_coefficient,
    einstein_diffusion,
    stokes_force,
    viscosity_at_temperature,
    viscosity_from_diffusion,
)

# Frozen by hand from kB*T/(6*pi*a*eta): 1.38e-23*310/(6*pi*2e-8*1e-3).
D_AT_DEFAULTS = 1.1347747442452137e-11
GAMMA_AT_DEFAULTS = 3.769911184307752e-10


def test_default_boltzmann_value():
    assert DEFAULT_BOLTZMANN_J_PER_K == 1.38e-23


def test_einstein_diffusion_frozen():
    assert einstein_diffusion(PhysicalParams()) == pytest.approx(D_AT_DEFAULTS, rel=1e-12)


def test_einstein_diffusion_with_codata_constant():
    params = PhysicalParams(boltzmann_J_per_K=1.380649e-23)
    assert einstein_diffusion(params) == pytest.approx(1.1353084172952247e-11, rel=1e-12)


def test_drag_coefficient_frozen():
    assert drag_coefficient(2e-8, 1.0) == pytest.approx(GAMMA_AT_DEFAULTS, rel=1e-12)


def test_stokes_force_is_linear_in_speed():
    f1 = stokes_force(2e-8, 1.0, 1e-6)
    assert f1 == pytest.approx(3.769911184307752e-16, rel=1e-12)
    assert stokes_force(2e-8, 1.0, 3e-6) == pytest.approx(3.0 * f1, rel=1e-12)
    assert stokes_force(2e-8, 1.0, -1e-6) == pytest.approx(-f1, rel=1e-12)


def test_viscosity_from_diffusion_inverts_einstein():
    params = PhysicalParams(temperature_K=297.0, particle_radius_m=5e-8, viscosity_mPas=0.89)
    d = einstein_diffusion(params)
    eta = viscosity_from_diffusion(d, 297.0, 5e-8, params.boltzmann_J_per_K)
    assert eta == pytest.approx(0.89, rel=1e-12)


@given(
    temperature=st.floats(250.0, 400.0),
    radius=st.floats(2e-9, 9e-7),
    viscosity=st.floats(0.1, 50.0),
)
def test_diffusion_viscosity_round_trip(temperature, radius, viscosity):
    """viscosity -> D -> viscosity is the identity to floating precision."""
    params = PhysicalParams(
        temperature_K=temperature, particle_radius_m=radius, viscosity_mPas=viscosity
    )
    d = einstein_diffusion(params)
    back = viscosity_from_diffusion(d, temperature, radius, params.boltzmann_J_per_K)
    assert back == pytest.approx(viscosity, rel=1e-12)


def test_viscosity_from_diffusion_rejects_nonpositive():
    with pytest.raises(ValueError):
        viscosity_from_diffusion(0.0, 310.0, 2e-8)
    with pytest.raises(ValueError):
        viscosity_from_diffusion(-1e-12, 310.0, 2e-8)


def test_temperature_model_frozen_point():
    # A*exp(b/T) by hand: 0.0158*exp(1290/310)
    model = ViscosityTempModel(prefactor_A_mPas=0.0158, exponent_b_K=1290.0)
    assert viscosity_at_temperature(model, 310.0) == pytest.approx(1.0136371325038318, rel=1e-12)


def test_temperature_model_thins_when_heated():
    model = ViscosityTempModel(prefactor_A_mPas=0.0158, exponent_b_K=1290.0)
    cold = viscosity_at_temperature(model, 290.0)
    hot = viscosity_at_temperature(model, 320.0)
    assert hot < cold


@given(temperature=st.floats(260.0, 380.0))
def test_temperature_model_positive(temperature):
    model = ViscosityTempModel(prefactor_A_mPas=0.0158, exponent_b_K=1290.0)
    assert viscosity_at_temperature(model, temperature) > 0.0


def test_params_validation():
    with pytest.raises(ValueError):
        PhysicalParams(temperature_K=0.0)
    with pytest.raises(ValueError):
        PhysicalParams(viscosity_mPas=-1.0)
    with pytest.raises(ValueError):
        PhysicalParams(particle_radius_m=5e-10)  # below the supported range
    with pytest.raises(ValueError):
        PhysicalParams(particle_radius_m=2e-6)  # above it
    with pytest.raises(ValueError):
        PhysicalParams(boltzmann_J_per_K=0.0)


def test_params_si_viscosity_property():
    assert PhysicalParams(viscosity_mPas=0.89).viscosity_Pas == pytest.approx(8.9e-4, rel=1e-12)


def test_drag_rejects_bad_arguments():
    with pytest.raises(ValueError):
        drag_coefficient(-2e-8, 1.0)
    with pytest.raises(ValueError):
        drag_coefficient(2e-8, 0.0)
    with pytest.raises(ValueError):
        stokes_force(2e-8, 1.0, math.inf)
