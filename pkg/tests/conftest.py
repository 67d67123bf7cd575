import os
import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to sys.path
sys.path.append(os.getcwd())

from app.config import get_settings
from app.core.scenario import (
    ConventionalPlant,
    PumpedStoragePlant,
    RenewableTechnology,
    ScenarioConfig,
    SolarThermalPlant,
    TimeSeries,
    Unit,
    VariableRenewablePlant,
)

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def ts(values, unit=Unit.MW, step_hours=1.0) -> TimeSeries:
    return TimeSeries.from_values(values, unit, step_hours=step_hours)


@pytest.fixture(autouse=True)
def _settings_env(monkeypatch, tmp_path):
    """Keep tests independent of a developer's .env and cache directory."""
    monkeypatch.setenv("SOLVER_BACKEND", "simplex")
    monkeypatch.setenv("SWEEP_JOBS", "1")
    monkeypatch.setenv("RESSIZE_NINJA_TOKEN", "")
    monkeypatch.setenv("RESOURCE_CACHE_DIR", str(tmp_path / "cache"))
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def make_simple():
    """One conventional plant plus one sized renewable plant."""

    def factory(
        demand,
        availability,
        alpha=0.0,
        capex=100.0,
        opex_conventional=50.0,
        opex_renewable=5.0,
        conventional_capacity=10.0,
        name="simple",
        **options,
    ) -> ScenarioConfig:
        return ScenarioConfig(
            name=name,
            demand=ts(demand),
            conventional=[
                ConventionalPlant(name="coal", installed_capacity=conventional_capacity, opex=opex_conventional)
            ],
            renewables=[
                VariableRenewablePlant(
                    name="wind",
                    technology=RenewableTechnology.WIND,
                    availability=ts(availability, Unit.PER_UNIT),
                    capex=capex,
                    opex=opex_renewable,
                )
            ],
            alpha=alpha,
            **options,
        )

    return factory


@pytest.fixture
def full_config() -> ScenarioConfig:
    """I=1, J=2 (sized), K=1 (fixed), L=1 (sized), T=24."""
    hours = np.arange(24)
    daylight = (hours >= 6) & (hours < 18)
    sun = np.where(daylight, np.sin(np.pi * (hours - 6) / 12), 0.0)
    demand = 100 + 20 * np.sin(2 * np.pi * (hours - 9) / 24)
    wind = 0.4 + 0.3 * np.cos(2 * np.pi * hours / 24)
    theta = np.where(daylight, 60 - 50 * sun, 89.0)
    return ScenarioConfig(
        name="full",
        demand=ts(demand),
        conventional=[ConventionalPlant(name="coal", installed_capacity=150.0, opex=80.0)],
        renewables=[
            VariableRenewablePlant(
                name="pv", technology=RenewableTechnology.PV,
                availability=ts(0.8 * sun, Unit.PER_UNIT), capex=300.0, opex=1.0,
            ),
            VariableRenewablePlant(
                name="wind", technology=RenewableTechnology.WIND,
                availability=ts(wind, Unit.PER_UNIT), capex=500.0, opex=2.0,
            ),
        ],
        hydro=[
            PumpedStoragePlant(
                name="pshpp", fixed_capacity=20.0, storage_hours=6.0,
                eta_pump=0.85, eta_turbine=0.9, opex=0.5,
            )
        ],
        solar_thermal=[
            SolarThermalPlant(
                name="st",
                irradiance=ts(0.9 * sun, Unit.KW_PER_M2),
                incidence_angle=ts(theta, Unit.DEGREES),
                field_ratio=3.0, eta_optical_peak=0.75, eta_factor=0.9, eta_thermoelectric=0.4,
                storage_hours=7.5, capex=2000.0, opex=3.0,
            )
        ],
        alpha=0.6,
    )
