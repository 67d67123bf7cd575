"""Scenario and plant domain types plus the pure evaluation helpers.

The helpers here (storage step, balance residual, renewable share and cost)
are shared by the LP formulation and by the tests that check its solutions,
so they must stay independent of any solver state.
"""

import math
from datetime import datetime, timedelta, timezone
from enum import Enum
from typing import Any, Dict, Iterator, List, Mapping, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from app.core.errors import ConfigError


DEFAULT_START = datetime(2019, 1, 1, tzinfo=timezone.utc)
RESERVED_NAMES = {"timestamp", "demand"}
WEIGHT_TOLERANCE = 1e-9


class Unit(str, Enum):
    """Physical unit tag carried by every time series."""
    MW = "MW"
    PER_UNIT = "per_unit"
    KW_PER_M2 = "kW_per_m2"
    DEGREES = "degrees"
    MWH = "MWh"
    RATIO = "ratio"  # non-negative, unbounded (thermal MW per electric MW)


UNIT_BOUNDS: Dict[Unit, Tuple[float, float]] = {
    Unit.PER_UNIT: (0.0, 1.0),
    Unit.DEGREES: (0.0, 90.0),
    Unit.RATIO: (0.0, math.inf),
}


def first_out_of_range(values, unit: Unit) -> Optional[int]:
    """Return the index of the first value violating the unit's bounds.

    Args:
        values: Sequence of numbers
        unit: Unit whose bounds apply

    Returns:
        Index of the first violation, or None if all values are in range
    """
    if unit not in UNIT_BOUNDS:
        return None
    lo, hi = UNIT_BOUNDS[unit]
    arr = np.asarray(values, dtype=float)
    bad = np.flatnonzero((arr < lo) | (arr > hi))
    return int(bad[0]) if bad.size else None


class TimeSeries(BaseModel):
    """Uniformly sampled series with an explicit unit tag."""

    model_config = ConfigDict(frozen=True)

    start_timestamp: datetime = Field(..., description="UTC instant of the first value")
    step: timedelta = Field(default=timedelta(hours=1), description="Sampling step")
    values: List[float] = Field(..., description="Ordered values")
    unit: Unit = Field(..., description="Physical unit")

    @field_validator("start_timestamp")
    @classmethod
    def _as_utc(cls, v: datetime) -> datetime:
        if v.tzinfo is None:
            return v.replace(tzinfo=timezone.utc)
        return v.astimezone(timezone.utc)

    @field_validator("step")
    @classmethod
    def _positive_step(cls, v: timedelta) -> timedelta:
        if v <= timedelta(0):
            raise ValueError("step must be positive")
        return v

    @model_validator(mode="after")
    def _check_values(self) -> "TimeSeries":
        if not self.values:
            raise ValueError("values must be non-empty")
        arr = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise ValueError("values must be finite")
        bad = first_out_of_range(arr, self.unit)
        if bad is not None:
            lo, hi = UNIT_BOUNDS[self.unit]
            raise ValueError(f"{self.unit.value} value {arr[bad]} at index {bad} outside [{lo}, {hi}]")
        return self

    @classmethod
    def from_values(
        cls,
        values,
        unit: Unit,
        start: datetime = DEFAULT_START,
        step_hours: float = 1.0,
    ) -> "TimeSeries":
        """Build a series from raw values."""
        return cls(
            start_timestamp=start,
            step=timedelta(hours=step_hours),
            values=[float(v) for v in values],
            unit=unit,
        )

    def __len__(self) -> int:
        return len(self.values)

    @property
    def step_hours(self) -> float:
        return self.step.total_seconds() / 3600.0

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def timestamps(self) -> pd.DatetimeIndex:
        return pd.date_range(self.start_timestamp, periods=len(self.values), freq=self.step)

    def with_values(self, values, unit: Optional[Unit] = None) -> "TimeSeries":
        """Same start and step, new values (and optionally a new unit)."""
        return TimeSeries(
            start_timestamp=self.start_timestamp,
            step=self.step,
            values=[float(v) for v in values],
            unit=unit or self.unit,
        )

    def total(self) -> float:
        """Sum of value x step, i.e. energy for power series."""
        return float(np.sum(self.as_array()) * self.step_hours)


# ============== Plants ==============

class ConventionalTechnology(str, Enum):
    COAL = "coal"
    COMBINED_CYCLE = "combined_cycle"
    NUCLEAR = "nuclear"
    OTHER = "other"


class RenewableTechnology(str, Enum):
    PV = "pv"
    WIND = "wind"


class ConventionalPlant(BaseModel):
    """Already-installed dispatchable plant; only OPEX is charged."""

    model_config = ConfigDict(frozen=True)

    name: str
    installed_capacity: float = Field(..., description="Installed capacity G_C [MW]")
    opex: float = Field(..., description="Operating cost [money/MWh]")
    technology: ConventionalTechnology = ConventionalTechnology.COAL


class VariableRenewablePlant(BaseModel):
    """PV or wind plant bounded by a per-unit availability series."""

    model_config = ConfigDict(frozen=True)

    name: str
    technology: RenewableTechnology
    availability: TimeSeries
    capex: float = Field(..., description="Capital cost [money/MW]")
    opex: float = Field(..., description="Operating cost [money/MWh]")
    fixed_capacity: Optional[float] = Field(None, description="Already-built capacity [MW]")


class PumpedStoragePlant(BaseModel):
    """Pumped-storage hydro without natural inflow."""

    model_config = ConfigDict(frozen=True)

    name: str
    fixed_capacity: Optional[float] = Field(None, description="Rated power, same for pump and turbine [MW]")
    storage_hours: float = Field(..., description="Reservoir size in hours at rated power")
    eta_pump: float
    eta_turbine: float
    initial_fill: float = Field(0.5, description="Initial level as fraction of reservoir size")
    capex: float = 0.0
    opex: float = Field(0.0, description="Operating cost per MWh generated")


class SolarThermalPlant(BaseModel):
    """Parabolic-trough plant with a thermal storage tank."""

    model_config = ConfigDict(frozen=True)

    name: str
    fixed_capacity: Optional[float] = None
    irradiance: TimeSeries
    incidence_angle: Optional[TimeSeries] = None
    field_ratio: float = Field(..., description="Collector area per kW electric [m2/kWe]")
    eta_optical_peak: float
    eta_factor: float
    eta_thermoelectric: float
    storage_hours: float = Field(..., description="Tank size in hours at rated electric power")
    initial_fill: float = 0.5
    capex: float = 0.0
    opex: float = 0.0


class BusShare(BaseModel):
    """Share of one plant's capacity placed on a bus (reporting only)."""

    model_config = ConfigDict(frozen=True)

    bus: str
    weight: float


class ScenarioConfig(BaseModel):
    """Full problem description."""

    model_config = ConfigDict(frozen=True)

    name: str
    demand: TimeSeries
    conventional: List[ConventionalPlant] = Field(default_factory=list)
    renewables: List[VariableRenewablePlant] = Field(default_factory=list)
    hydro: List[PumpedStoragePlant] = Field(default_factory=list)
    solar_thermal: List[SolarThermalPlant] = Field(default_factory=list)
    alpha: float = Field(..., description="Minimum annual renewable share")
    capex_annualization: float = 1.0
    enforce_cyclic_storage: bool = True
    assume_normal_incidence: bool = False
    bus_allocation: Dict[str, List[BusShare]] = Field(default_factory=dict)

    def all_plants(self) -> Iterator[Tuple[str, int, BaseModel]]:
        """Yield (group, index, plant) for every plant in declaration order."""
        for group in ("conventional", "renewables", "hydro", "solar_thermal"):
            for idx, plant in enumerate(getattr(self, group)):
                yield group, idx, plant


class ValidatedScenario(BaseModel):
    """A scenario whose invariants have been checked; horizon is fixed."""

    model_config = ConfigDict(frozen=True)

    config: ScenarioConfig
    horizon: int
    step_hours: float

    @property
    def name(self) -> str:
        return self.config.name

    @property
    def alpha(self) -> float:
        return self.config.alpha

    def demand(self) -> np.ndarray:
        return self.config.demand.as_array()

    def timestamps(self) -> pd.DatetimeIndex:
        return self.config.demand.timestamps()

    def plant(self, name: str) -> BaseModel:
        for _, _, plant in self.config.all_plants():
            if plant.name == name:
                return plant
        raise KeyError(name)

    def with_alpha(self, alpha: float) -> "ValidatedScenario":
        """Copy of this scenario with a different share target (re-validated)."""
        return validate_scenario(self.config.model_copy(update={"alpha": alpha}))


# ============== Validation ==============

def _pointer(loc) -> str:
    return "/" + "/".join(str(part) for part in loc)


def _reason(err: Mapping[str, Any]) -> str:
    if err.get("type") == "missing":
        return "missing"
    msg = str(err.get("msg", "invalid"))
    return msg.removeprefix("Value error, ")


def _series_problems(
    ts: TimeSeries,
    path: str,
    unit: Unit,
    demand: TimeSeries,
) -> Iterator[Tuple[str, str]]:
    if ts.unit != unit:
        yield path, f"unit must be {unit.value}"
    if len(ts) != len(demand):
        yield path, f"length mismatch ({len(ts)} vs demand {len(demand)})"
    if ts.start_timestamp != demand.start_timestamp:
        yield path, "start mismatch"
    if ts.step != demand.step:
        yield path, "step mismatch"


def _fraction_problem(value: float, path: str, open_low: bool = True) -> Iterator[Tuple[str, str]]:
    low_ok = value > 0 if open_low else value >= 0
    if not (low_ok and value <= 1):
        bracket = "(0, 1]" if open_low else "[0, 1]"
        yield path, f"must lie in {bracket}"


def _cost_problems(plant, path: str) -> Iterator[Tuple[str, str]]:
    for field in ("capex", "opex"):
        if hasattr(plant, field) and getattr(plant, field) < 0:
            yield f"{path}/{field}", "negative cost"
    fixed = getattr(plant, "fixed_capacity", None)
    if fixed is not None and fixed < 0:
        yield f"{path}/fixed_capacity", "negative capacity"


def _scenario_problems(cfg: ScenarioConfig) -> Iterator[Tuple[str, str]]:
    if not (0.0 <= cfg.alpha <= 1.0):
        yield "/alpha", "alpha out of range"
    if cfg.capex_annualization <= 0:
        yield "/capex_annualization", "must be positive"

    demand = cfg.demand
    if demand.unit != Unit.MW:
        yield "/demand", "unit must be MW"
    if np.any(demand.as_array() < 0):
        yield "/demand", "negative demand"

    seen: Dict[str, str] = {}
    for group, idx, plant in cfg.all_plants():
        path = f"/{group}/{idx}"
        if not plant.name:
            yield f"{path}/name", "empty name"
        elif plant.name in RESERVED_NAMES:
            yield f"{path}/name", "reserved name"
        elif "." in plant.name:
            yield f"{path}/name", "name may not contain '.'"
        elif plant.name in seen:
            yield f"{path}/name", f"duplicate plant name (also {seen[plant.name]})"
        seen.setdefault(plant.name, path)
        yield from _cost_problems(plant, path)

    for idx, plant in enumerate(cfg.conventional):
        if plant.installed_capacity < 0:
            yield f"/conventional/{idx}/installed_capacity", "negative capacity"

    for idx, plant in enumerate(cfg.renewables):
        yield from _series_problems(plant.availability, f"/renewables/{idx}/availability", Unit.PER_UNIT, demand)

    for idx, plant in enumerate(cfg.hydro):
        path = f"/hydro/{idx}"
        yield from _fraction_problem(plant.eta_pump, f"{path}/eta_pump")
        yield from _fraction_problem(plant.eta_turbine, f"{path}/eta_turbine")
        yield from _fraction_problem(plant.initial_fill, f"{path}/initial_fill", open_low=False)
        if plant.storage_hours <= 0:
            yield f"{path}/storage_hours", "must be positive"

    for idx, plant in enumerate(cfg.solar_thermal):
        path = f"/solar_thermal/{idx}"
        for field in ("eta_optical_peak", "eta_factor", "eta_thermoelectric"):
            yield from _fraction_problem(getattr(plant, field), f"{path}/{field}")
        yield from _fraction_problem(plant.initial_fill, f"{path}/initial_fill", open_low=False)
        if plant.field_ratio <= 0:
            yield f"{path}/field_ratio", "must be positive"
        if plant.storage_hours < 0:
            yield f"{path}/storage_hours", "must be non-negative"
        yield from _series_problems(plant.irradiance, f"{path}/irradiance", Unit.KW_PER_M2, demand)
        if np.any(plant.irradiance.as_array() < 0):
            yield f"{path}/irradiance", "negative irradiance"
        if plant.incidence_angle is None:
            if not cfg.assume_normal_incidence:
                yield f"{path}/incidence_angle", "incidence angle missing (set assume_normal_incidence)"
        else:
            yield from _series_problems(plant.incidence_angle, f"{path}/incidence_angle", Unit.DEGREES, demand)
            if len(plant.incidence_angle) == len(plant.irradiance):
                theta = plant.incidence_angle.as_array()
                lit = plant.irradiance.as_array() > 0
                bad = np.flatnonzero(lit & ((theta < 0) | (theta >= 90.0)))
                if bad.size:
                    step = int(bad[0])
                    yield f"{path}/incidence_angle", f"angle {theta[step]:g} at lit step {step} outside [0, 90) degrees"

    for name, shares in cfg.bus_allocation.items():
        path = f"/bus_allocation/{name}"
        if name not in seen:
            yield path, "unknown plant"
        if not shares:
            yield path, "empty allocation"
            continue
        if any(share.weight < 0 for share in shares):
            yield path, "negative weight"
        total = math.fsum(share.weight for share in shares)
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            yield path, f"weights must sum to 1 (got {total})"


def validate_scenario(cfg: Union[ScenarioConfig, Mapping[str, Any]]) -> ValidatedScenario:
    """Check every scenario invariant and fix the horizon.

    Args:
        cfg: Scenario model or a raw mapping with the model's field names

    Returns:
        ValidatedScenario with horizon T and step in hours

    Raises:
        ConfigError: With the JSON-pointer path of the first failing field
    """
    if not isinstance(cfg, ScenarioConfig):
        try:
            cfg = ScenarioConfig.model_validate(cfg)
        except ValidationError as exc:
            err = exc.errors()[0]
            raise ConfigError(_pointer(err["loc"]), _reason(err)) from exc

    for path, reason in _scenario_problems(cfg):
        raise ConfigError(path, reason)

    return ValidatedScenario(
        config=cfg,
        horizon=len(cfg.demand),
        step_hours=cfg.demand.step_hours,
    )


# ============== Dispatch ==============

class PlantKind(str, Enum):
    CONVENTIONAL = "conventional"
    VARIABLE_RENEWABLE = "variable_renewable"
    PUMPED_STORAGE = "pumped_storage"
    SOLAR_THERMAL = "solar_thermal"


RENEWABLE_KINDS = {PlantKind.VARIABLE_RENEWABLE, PlantKind.SOLAR_THERMAL}


class PlantDispatch(BaseModel):
    """Trajectories of one plant over the horizon."""

    model_config = ConfigDict(frozen=True)

    kind: PlantKind
    technology: str = Field(..., description="Reporting technology key (coal, pv, wind, hydro, solar_thermal, ...)")
    generation: TimeSeries
    pumping: Optional[TimeSeries] = None
    absorption: Optional[TimeSeries] = None
    storage: Optional[TimeSeries] = None

    def all_series(self) -> List[TimeSeries]:
        return [s for s in (self.generation, self.pumping, self.absorption, self.storage) if s is not None]


class Dispatch(BaseModel):
    """Dispatch of every plant plus the capacities it was produced with."""

    model_config = ConfigDict(frozen=True)

    plants: Dict[str, PlantDispatch] = Field(default_factory=dict)
    capacities: Dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_series(self) -> "Dispatch":
        lengths = {len(s) for p in self.plants.values() for s in p.all_series()}
        if len(lengths) > 1:
            raise ValueError(f"dispatch series lengths differ: {sorted(lengths)}")
        for name, plant in self.plants.items():
            for series in plant.all_series():
                if np.any(series.as_array() < 0):
                    raise ValueError(f"negative value in dispatch of {name}")
        return self

    @property
    def horizon(self) -> int:
        for plant in self.plants.values():
            return len(plant.generation)
        return 0

    def generation_total(self) -> np.ndarray:
        total = np.zeros(self.horizon)
        for plant in self.plants.values():
            total += plant.generation.as_array()
        return total

    def pumping_total(self) -> np.ndarray:
        total = np.zeros(self.horizon)
        for plant in self.plants.values():
            if plant.pumping is not None:
                total += plant.pumping.as_array()
        return total


class CostBreakdown(BaseModel):
    """Cost terms of the objective, in money."""

    model_config = ConfigDict(frozen=True)

    opex_conventional: float = 0.0
    capex_renewable: float = 0.0
    opex_renewable: float = 0.0
    total: float = 0.0

    @classmethod
    def from_parts(cls, opex_conventional: float, capex_renewable: float, opex_renewable: float) -> "CostBreakdown":
        return cls(
            opex_conventional=opex_conventional,
            capex_renewable=capex_renewable,
            opex_renewable=opex_renewable,
            total=opex_conventional + capex_renewable + opex_renewable,
        )


# ============== Evaluation helpers ==============

def storage_step(
    level: float,
    pump: float,
    gen: float,
    eta_pump: float,
    eta_turbine: float,
    step_hours: float = 1.0,
) -> float:
    """Advance a storage level by one step.

    Args:
        level: Stored energy at the start of the step [MWh]
        pump: Charging power [MW]
        gen: Discharging power [MW]
        eta_pump: Charging efficiency
        eta_turbine: Discharging efficiency
        step_hours: Step length in hours

    Returns:
        Stored energy at the end of the step [MWh]
    """
    return level + (pump * eta_pump - gen / eta_turbine) * step_hours


def energy_balance_residual(dispatch: Dispatch, demand: TimeSeries, t: int) -> float:
    """Generation minus demand minus pumping at step t (zero when balanced)."""
    horizon = len(demand)
    if t < 0 or t >= horizon:
        raise IndexError(f"time index {t} outside horizon {horizon}")
    generation = sum(p.generation.values[t] for p in dispatch.plants.values())
    pumping = sum(p.pumping.values[t] for p in dispatch.plants.values() if p.pumping is not None)
    return generation - demand.values[t] - pumping


def renewable_share(dispatch: Dispatch, demand: TimeSeries) -> float:
    """Delivered PV, wind and solar-thermal energy over total demand.

    Pumped-storage generation and curtailed energy do not count.

    Raises:
        ValueError: If the dispatch horizon differs from the demand's
        ZeroDivisionError: If total demand is zero
    """
    if dispatch.plants and dispatch.horizon != len(demand):
        raise ValueError(f"dispatch horizon {dispatch.horizon} != demand horizon {len(demand)}")
    total_demand = math.fsum(demand.values)
    if total_demand == 0:
        raise ZeroDivisionError("total demand is zero")
    renewable = math.fsum(
        math.fsum(p.generation.values) for p in dispatch.plants.values() if p.kind in RENEWABLE_KINDS
    )
    return renewable / total_demand


def annual_cost(dispatch: Dispatch, cfg: ValidatedScenario) -> CostBreakdown:
    """Recompute the objective terms from a dispatch.

    CAPEX is charged only on capacity the optimization sized (plants without
    ``fixed_capacity``) and is multiplied by ``capex_annualization``.
    """
    dt = cfg.step_hours
    scenario = cfg.config

    def energy(name: str) -> float:
        plant = dispatch.plants.get(name)
        return math.fsum(plant.generation.values) * dt if plant is not None else 0.0

    opex_conv = sum(p.opex * energy(p.name) for p in scenario.conventional)

    capex = 0.0
    opex_ren = 0.0
    for plant in [*scenario.renewables, *scenario.hydro, *scenario.solar_thermal]:
        opex_ren += plant.opex * energy(plant.name)
        if plant.fixed_capacity is None:
            capex += plant.capex * dispatch.capacities.get(plant.name, 0.0)

    return CostBreakdown.from_parts(opex_conv, capex * scenario.capex_annualization, opex_ren)
