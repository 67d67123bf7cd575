"""Deterministic synthetic year for the bundled experiments.

Generates hourly demand, PV and wind capacity factors, direct normal
irradiance and the incidence angle of a north-south tracking trough for one
location, then assembles the no-storage, pumped-storage and solar-thermal
scenario variants. Everything is drawn from ``numpy.random.default_rng(seed)``
so the same seed always gives the same files.
"""

import logging
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Union

import numpy as np
from scipy.signal import lfilter

from app.core.catalog import capex_per_mw, opex_per_mwh_from_fixed, technology
from app.core.errors import DomainError
from app.core.scenario import (
    DEFAULT_START,
    BusShare,
    ConventionalPlant,
    PumpedStoragePlant,
    RenewableTechnology,
    ScenarioConfig,
    SolarThermalPlant,
    TimeSeries,
    Unit,
    VariableRenewablePlant,
)
from app.ingestion.writers import write_scenario

logger = logging.getLogger(__name__)

HOURS_PER_YEAR = 8760

# Fraction of overnight CAPEX charged against one year of operation
CAPEX_ANNUITY = 0.08
COAL_OPEX_PER_MWH = 110.0


@dataclass(frozen=True)
class SyntheticYear:
    demand: TimeSeries
    pv: TimeSeries
    wind: TimeSeries
    irradiance: TimeSeries
    incidence_angle: TimeSeries

    @property
    def hours(self) -> int:
        return len(self.demand)


def solar_geometry(hours: int, start: datetime, latitude: float, longitude: float):
    """Cosine of the zenith angle, declination and hour angle per hour (radians).

    Declination follows 23.45 sin(360 (284 + n) / 365) and the hour angle is
    15 degrees per hour from local solar noon.
    """
    stamps = np.arange(hours)
    day_of_year = (start.timetuple().tm_yday - 1 + (start.hour + stamps) // 24) % 365 + 1
    utc_hour = (start.hour + stamps) % 24 + 0.5
    solar_hour = utc_hour + longitude / 15.0

    declination = np.radians(23.45 * np.sin(np.radians(360.0 * (284 + day_of_year) / 365.0)))
    hour_angle = np.radians(15.0 * (solar_hour - 12.0))
    phi = np.radians(latitude)
    cos_zenith = np.sin(phi) * np.sin(declination) + np.cos(phi) * np.cos(declination) * np.cos(hour_angle)
    return cos_zenith, declination, hour_angle


def tracking_incidence_angle(cos_zenith: np.ndarray, declination: np.ndarray, hour_angle: np.ndarray) -> np.ndarray:
    """Incidence angle in degrees for a trough tracking about a north-south axis."""
    cos_theta = np.sqrt(np.clip(cos_zenith, 0.0, None) ** 2 + np.cos(declination) ** 2 * np.sin(hour_angle) ** 2)
    theta = np.degrees(np.arccos(np.clip(cos_theta, 0.0, 1.0)))
    # Below the horizon the trough sees nothing; report the boundary angle
    return np.where(cos_zenith > 0, theta, 90.0)


def _smooth_noise(rng: np.random.Generator, n: int, rho: float) -> np.ndarray:
    """Unit-variance AR(1) noise."""
    return lfilter([np.sqrt(1.0 - rho ** 2)], [1.0, -rho], rng.standard_normal(n))


def generate_year(
    seed: int = 2019,
    hours: int = HOURS_PER_YEAR,
    start: datetime = DEFAULT_START,
    peak_demand_mw: float = 900.0,
    latitude: float = 28.3,
    longitude: float = -16.5,
    calm_hour: int = 3,
) -> SyntheticYear:
    """Draw one synthetic year.

    Args:
        seed: Random seed
        hours: Number of hourly steps
        start: UTC timestamp of the first step
        peak_demand_mw: Demand peak in MW
        latitude: Site latitude in degrees
        longitude: Site longitude in degrees
        calm_hour: Night-time step with no wind, so no renewable resource at all

    Returns:
        SyntheticYear of hourly series

    Raises:
        DomainError: If hours or calm_hour are out of range
    """
    if hours < 24:
        raise DomainError(f"synthetic year needs at least 24 hours, got {hours}")
    if not (0 <= calm_hour < hours):
        raise DomainError(f"calm hour {calm_hour} outside horizon {hours}")

    rng = np.random.default_rng(seed)
    t = np.arange(hours)
    cos_zenith, declination, hour_angle = solar_geometry(hours, start, latitude, longitude)
    sun = np.clip(cos_zenith, 0.0, None)

    # Daily clearness index, shared by PV and irradiance
    days = hours // 24 + 1
    clearness = np.repeat(np.clip(0.75 + 0.2 * rng.standard_normal(days), 0.2, 1.0), 24)[:hours]

    pv = np.clip(0.85 * sun * clearness, 0.0, 1.0)
    dni = np.where(sun > 0, 0.95 * sun ** 0.3 * clearness ** 1.5, 0.0)
    theta = tracking_incidence_angle(cos_zenith, declination, hour_angle)

    season = np.cos(2.0 * np.pi * t / HOURS_PER_YEAR)
    wind = np.clip(0.38 + 0.08 * season + 0.22 * _smooth_noise(rng, hours, 0.97), 0.0, 1.0)
    wind[calm_hour] = 0.0
    pv[calm_hour] = 0.0
    dni[calm_hour] = 0.0

    local_hour = (t + longitude / 15.0) % 24
    daily = 0.78 + 0.12 * np.sin(2.0 * np.pi * (local_hour - 8.0) / 24.0) + 0.08 * np.exp(-((local_hour - 20.5) ** 2) / 4.0)
    demand = daily * (1.0 + 0.05 * season) * (1.0 + 0.02 * rng.standard_normal(hours))
    demand = peak_demand_mw * demand / demand.max()

    def series(values, unit: Unit) -> TimeSeries:
        return TimeSeries.from_values(np.round(values, 6), unit, start=start)

    logger.info("[LOAD] synthetic year: %d h, seed %d, peak %.0f MW", hours, seed, peak_demand_mw)
    return SyntheticYear(
        demand=series(demand, Unit.MW),
        pv=series(pv, Unit.PER_UNIT),
        wind=series(wind, Unit.PER_UNIT),
        irradiance=series(dni, Unit.KW_PER_M2),
        incidence_angle=series(theta, Unit.DEGREES),
    )


def synthetic_scenarios(year: SyntheticYear, alpha: float = 0.5) -> Dict[str, ScenarioConfig]:
    """No-storage, pumped-storage and solar-thermal variants over one year.

    CAPEX comes from the technology catalog midpoints and is annualized to
    the generated horizon; OPEX converts the catalog's fixed costs at typical
    capacity factors. The storage variant adds a pre-installed pumped-storage
    plant at 10% of peak demand with no CAPEX.
    """
    peak = float(np.max(year.demand.as_array()))
    annualization = CAPEX_ANNUITY * year.hours / HOURS_PER_YEAR

    coal = ConventionalPlant(name="coal", installed_capacity=round(1.2 * peak), opex=COAL_OPEX_PER_MWH)
    pv = VariableRenewablePlant(
        name="pv",
        technology=RenewableTechnology.PV,
        availability=year.pv,
        capex=capex_per_mw("PV"),
        opex=round(opex_per_mwh_from_fixed(technology("PV").opex_per_kw_year.mid, 0.2), 3),
    )
    wind = VariableRenewablePlant(
        name="wind",
        technology=RenewableTechnology.WIND,
        availability=year.wind,
        capex=capex_per_mw("W", "low"),
        opex=round(opex_per_mwh_from_fixed(technology("W").opex_per_kw_year.low, 0.35), 3),
    )
    hydro = PumpedStoragePlant(
        name="pshpp",
        fixed_capacity=round(0.1 * peak),
        storage_hours=8.0,
        eta_pump=0.85,
        eta_turbine=0.9,
        opex=round(opex_per_mwh_from_fixed(technology("PS-HPP").opex_per_kw_year.mid, 0.2), 3),
    )
    solar = SolarThermalPlant(
        name="st",
        irradiance=year.irradiance,
        incidence_angle=year.incidence_angle,
        field_ratio=9.0,
        eta_optical_peak=0.75,
        eta_factor=0.9,
        eta_thermoelectric=0.38,
        storage_hours=7.5,
        capex=capex_per_mw("ST"),
        opex=round(opex_per_mwh_from_fixed(technology("ST").opex_per_kw_year.mid, 0.4), 3),
    )

    common = dict(
        demand=year.demand,
        conventional=[coal],
        renewables=[pv, wind],
        alpha=alpha,
        capex_annualization=annualization,
    )
    return {
        "synthetic_nostorage": ScenarioConfig(name="synthetic_nostorage", **common),
        "synthetic_storage": ScenarioConfig(name="synthetic_storage", hydro=[hydro], **common),
        "synthetic_solar_thermal": ScenarioConfig(
            name="synthetic_solar_thermal",
            solar_thermal=[solar],
            bus_allocation={"st": [BusShare(bus="4", weight=0.5), BusShare(bus="6", weight=0.5)]},
            **common,
        ),
    }


def write_synthetic(
    directory: Union[str, Path],
    seed: int = 2019,
    hours: int = HOURS_PER_YEAR,
    alpha: float = 0.5,
) -> List[Path]:
    """Generate the synthetic year and write each variant as scenario JSON.

    Series CSVs are written once per variant under ``<directory>/series_<name>``.

    Returns:
        Paths of the scenario files
    """
    directory = Path(directory)
    year = generate_year(seed=seed, hours=hours)
    written = []
    for name, cfg in synthetic_scenarios(year, alpha=alpha).items():
        written.append(write_scenario(cfg, directory / f"{name}.json", series_dir=f"series_{name}"))
    logger.info("[DONE] %d synthetic scenarios -> %s", len(written), directory)
    return written
