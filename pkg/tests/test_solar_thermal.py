"""
Tests for the parabolic-trough incidence factor and the absorption profile.
"""

import numpy as np
import pytest

from app.core.errors import DomainError
from app.core.scenario import SolarThermalPlant, Unit
from app.core.solar_thermal import (
    build_thermal_profile,
    incidence_factor,
    incidence_factors,
    thermal_absorption_cap,
)
from tests.conftest import ts


def _plant(irradiance, theta=None, **overrides):
    fields = dict(
        name="st",
        irradiance=ts(irradiance, Unit.KW_PER_M2),
        incidence_angle=None if theta is None else ts(theta, Unit.DEGREES),
        field_ratio=1.0,
        eta_optical_peak=1.0,
        eta_factor=1.0,
        eta_thermoelectric=0.4,
        storage_hours=7.5,
    )
    fields.update(overrides)
    return SolarThermalPlant(**fields)


@pytest.mark.parametrize(
    "theta,expected",
    [(0.0, 1.0), (30.0, 0.938339), (45.0, 0.852356), (60.0, 0.6568)],
)
def test_incidence_factor_values(theta, expected):
    assert incidence_factor(theta) == pytest.approx(expected, abs=1e-6)


def test_incidence_factor_decreases_until_clamp():
    theta = np.linspace(0.0, 75.0, 301)
    k = incidence_factors(theta)
    assert np.all(np.diff(k) < 0)
    assert np.all(k >= 0)


def test_incidence_factor_clamps_at_zero():
    assert incidence_factor(80.0) == 0.0
    assert incidence_factor(89.9) == 0.0


@pytest.mark.parametrize("theta", [-0.1, 90.0, 120.0])
def test_incidence_factor_domain(theta):
    with pytest.raises(DomainError):
        incidence_factor(theta)


def test_vectorized_matches_scalar():
    theta = np.array([0.0, 12.5, 33.0, 71.0])
    expected = [incidence_factor(t) for t in theta]
    assert incidence_factors(theta) == pytest.approx(expected)


def test_absorption_cap_multiplies_all_factors():
    plant = _plant([1.0], [0.0], field_ratio=2.0, eta_optical_peak=0.75, eta_factor=0.9)
    assert thermal_absorption_cap(0.8, plant, 0.5) == pytest.approx(0.8 * 2.0 * 0.75 * 0.9 * 0.5)


def test_thermal_profile_three_steps():
    print("\n[Test] Absorption profile over three steps")
    profile = build_thermal_profile(_plant([0.0, 1.0, 0.5], [0.0, 30.0, 60.0]))
    values = profile.max_thermal.as_array()
    assert values == pytest.approx([0.0, 0.938339, 0.32840], abs=1e-5)
    assert profile.max_thermal.unit == Unit.RATIO
    assert not profile.assumed_normal_incidence


def test_thermal_profile_ignores_night_angles():
    # 90 degrees is accepted while the irradiance is zero
    profile = build_thermal_profile(_plant([0.0, 0.5], [90.0, 0.0]))
    assert profile.max_thermal.values == pytest.approx([0.0, 0.5])


def test_thermal_profile_rejects_grazing_light():
    with pytest.raises(DomainError):
        build_thermal_profile(_plant([0.5], [90.0]))


def test_thermal_profile_without_angles_assumes_normal_incidence():
    profile = build_thermal_profile(_plant([0.2, 0.4]))
    assert profile.assumed_normal_incidence
    assert profile.max_thermal.values == pytest.approx([0.2, 0.4])


def test_absorption_cap_worked_value():
    plant = _plant([1.0], [0.0], field_ratio=1.2, eta_optical_peak=0.75, eta_factor=0.9)
    assert thermal_absorption_cap(0.8, plant, 0.9383) == pytest.approx(0.6080184, abs=1e-7)


def test_thermal_profile_uses_absorption_cap_per_step():
    irradiance = [0.0, 0.3, 0.7, 1.0]
    theta = [89.0, 10.0, 40.0, 65.0]
    plant = _plant(irradiance, theta, field_ratio=9.0, eta_optical_peak=0.75, eta_factor=0.9)
    expected = [0.0] + [
        thermal_absorption_cap(g, plant, incidence_factor(t)) for g, t in zip(irradiance[1:], theta[1:])
    ]
    profile = build_thermal_profile(plant)
    assert profile.max_thermal.values == pytest.approx(expected)
    k = incidence_factors(np.asarray(theta[1:]))
    assert thermal_absorption_cap(np.asarray(irradiance[1:]), plant, k) == pytest.approx(expected[1:])
