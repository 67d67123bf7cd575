"""Parabolic-trough optics: incidence-angle factor and absorbed-power bound.

The absorbed thermal power of a plant is bounded by irradiance x field ratio
x rated electric power x peak optical efficiency x efficiency factor x K(theta).
Everything except the rated power is known up front, so the bound is
precomputed per step as a coefficient the LP multiplies by the capacity.
"""

import math
from typing import Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.core.errors import DomainError
from app.core.scenario import SolarThermalPlant, TimeSeries, Unit


# Incidence-angle modifier coefficients (theta in degrees)
K_LINEAR = 7e-4
K_QUADRATIC = 36e-6

ArrayLike = Union[float, np.ndarray]


class ThermalProfile(BaseModel):
    """Maximum absorbed thermal MW per installed electric MW, per step."""

    model_config = ConfigDict(frozen=True)

    max_thermal: TimeSeries
    assumed_normal_incidence: bool = False


def incidence_factor(theta: float) -> float:
    """Incidence-angle factor K(theta) for a parabolic trough.

    Args:
        theta: Angle of incidence in degrees, 0 <= theta < 90

    Returns:
        1 - (7e-4*theta + 36e-6*theta^2) / cos(theta), clamped at 0

    Raises:
        DomainError: If theta is negative or >= 90 degrees
    """
    if not (0.0 <= theta < 90.0):
        raise DomainError(f"incidence angle {theta} outside [0, 90) degrees")
    k = 1.0 - (K_LINEAR * theta + K_QUADRATIC * theta * theta) / math.cos(math.radians(theta))
    return max(k, 0.0)


def incidence_factors(theta: np.ndarray) -> np.ndarray:
    """Vectorized ``incidence_factor``."""
    theta = np.asarray(theta, dtype=float)
    bad = np.flatnonzero((theta < 0.0) | (theta >= 90.0))
    if bad.size:
        raise DomainError(f"incidence angle {theta[bad[0]]} at index {bad[0]} outside [0, 90) degrees")
    k = 1.0 - (K_LINEAR * theta + K_QUADRATIC * theta ** 2) / np.cos(np.radians(theta))
    return np.maximum(k, 0.0)


def thermal_absorption_cap(irradiance: ArrayLike, plant: SolarThermalPlant, k: ArrayLike) -> ArrayLike:
    """Absorbed thermal power per installed electric MW (scalars or per-step arrays)."""
    return irradiance * plant.field_ratio * plant.eta_optical_peak * plant.eta_factor * k


def build_thermal_profile(plant: SolarThermalPlant) -> ThermalProfile:
    """Compose the absorption bound over the plant's horizon.

    Steps without irradiance map to 0 without evaluating K, so night-time
    angles at or beyond 90 degrees are accepted there. Without an incidence
    series K is taken as 1 and the profile is flagged.

    Raises:
        DomainError: If a lit step has an incidence angle >= 90 degrees
    """
    irradiance = plant.irradiance.as_array()
    lit = irradiance > 0
    k = np.ones_like(irradiance)
    if plant.incidence_angle is not None:
        theta = plant.incidence_angle.as_array()
        k[lit] = incidence_factors(theta[lit])
    cap = thermal_absorption_cap(irradiance, plant, k)
    values = np.where(lit, cap, 0.0)
    return ThermalProfile(
        max_thermal=plant.irradiance.with_values(values, unit=Unit.RATIO),
        assumed_normal_incidence=plant.incidence_angle is None,
    )
