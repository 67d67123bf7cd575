"""Generation mix tables, emissions and capacity-versus-energy shares."""

import logging
import math
from typing import Dict, Literal, Optional

import pandas as pd
from pydantic import BaseModel, ConfigDict

from app.core.catalog import emission_factor
from app.core.formulation import SizingResult
from app.core.scenario import RENEWABLE_KINDS, Dispatch, TimeSeries

logger = logging.getLogger(__name__)

Granularity = Literal["hourly", "daily", "monthly"]

PUMPING_COLUMN = "hydro_pumping"
PERIOD_HOURS = {"hourly": 1.0, "daily": 24.0}


def energy_by_technology(result: SizingResult) -> Dict[str, float]:
    """Annual energy per technology key in MWh; pumping as a negative entry."""
    if result.dispatch is None or result.demand is None:
        return {}
    dt = result.demand.step_hours
    energy: Dict[str, float] = {}
    pumping: Optional[float] = None
    for plant in result.dispatch.plants.values():
        energy[plant.technology] = energy.get(plant.technology, 0.0) + math.fsum(plant.generation.values) * dt
        if plant.pumping is not None:
            pumping = (pumping or 0.0) + math.fsum(plant.pumping.values) * dt
    if pumping is not None:
        energy[PUMPING_COLUMN] = -pumping
    return energy


def _period_keys(index: pd.DatetimeIndex, granularity: Granularity) -> pd.DatetimeIndex:
    if granularity == "hourly":
        return index.floor("h")
    if granularity == "daily":
        return index.floor("D")
    if granularity == "monthly":
        days = index.floor("D")
        return days - pd.to_timedelta(days.day - 1, unit="D")
    raise ValueError(f"unknown granularity {granularity!r}")


def _period_hours(key: pd.Timestamp, granularity: Granularity) -> float:
    if granularity == "monthly":
        return key.days_in_month * 24.0
    return PERIOD_HOURS[granularity]


def aggregate_dispatch(
    dispatch: Dispatch,
    granularity: Granularity = "daily",
    demand: Optional[TimeSeries] = None,
) -> pd.DataFrame:
    """Energy per period and technology.

    Args:
        dispatch: Dispatch to aggregate
        granularity: "hourly", "daily" or "monthly" (calendar months, UTC)
        demand: Demand series; supplies timestamps and a ``demand`` column

    Returns:
        DataFrame indexed by period start with one MWh column per
        technology, ``hydro_pumping`` as negative energy when a plant pumps,
        ``demand`` when given, and a ``partial`` flag for periods the
        horizon covers only in part

    Raises:
        ValueError: If neither dispatch nor demand carries timestamps, or
            the granularity is unknown
    """
    reference = demand
    if reference is None:
        for plant in dispatch.plants.values():
            reference = plant.generation
            break
    if reference is None:
        raise ValueError("no series to take timestamps from")

    dt = reference.step_hours
    index = reference.timestamps()
    columns: Dict[str, pd.Series] = {}
    pumping = None
    for plant in dispatch.plants.values():
        energy = pd.Series(plant.generation.as_array() * dt, index=index)
        columns[plant.technology] = columns[plant.technology] + energy if plant.technology in columns else energy
        if plant.pumping is not None:
            drawn = pd.Series(-plant.pumping.as_array() * dt, index=index)
            pumping = drawn if pumping is None else pumping + drawn
    if pumping is not None:
        columns[PUMPING_COLUMN] = pumping
    if demand is not None:
        columns["demand"] = pd.Series(demand.as_array() * dt, index=index)

    frame = pd.DataFrame(columns, index=index)
    keys = _period_keys(index, granularity)
    table = frame.groupby(keys).sum()
    steps = pd.Series(1, index=index).groupby(keys).sum()
    table["partial"] = [
        count * dt < _period_hours(key, granularity) - 1e-9 for key, count in steps.items()
    ]
    table.index.name = "period"
    logger.info("[EXTRACT] %s mix: %d periods, %d technologies", granularity, len(table), len(dispatch.plants))
    return table


def estimate_emissions(result: SizingResult, which: Literal["low", "mid", "high"] = "mid") -> Dict[str, float]:
    """Annual emissions in t CO2-eq per technology, from catalog factors.

    Technologies without a catalog entry are left out.
    """
    emissions = {}
    for tech, energy in energy_by_technology(result).items():
        factor = emission_factor(tech, which)
        if factor is not None and energy > 0:
            emissions[tech] = energy * factor
    return emissions


class CapacityEnergyShares(BaseModel):
    """Renewable share of installed capacity and of generated energy."""

    model_config = ConfigDict(frozen=True)

    capacity_share: float
    energy_share: float


def capacity_energy_shares(result: SizingResult) -> CapacityEnergyShares:
    """Compare the renewable share of capacity with its share of generation.

    Raises:
        ValueError: If the result carries no dispatch
        ZeroDivisionError: If total capacity or total generation is zero
    """
    if result.dispatch is None:
        raise ValueError(f"result for {result.scenario} has no dispatch ({result.status.value})")
    plants = result.dispatch.plants
    renewable = {name for name, p in plants.items() if p.kind in RENEWABLE_KINDS}

    total_capacity = math.fsum(result.capacities.get(name, 0.0) for name in plants)
    total_energy = math.fsum(math.fsum(p.generation.values) for p in plants.values())
    if total_capacity == 0 or total_energy == 0:
        raise ZeroDivisionError("total capacity or generation is zero")
    return CapacityEnergyShares(
        capacity_share=math.fsum(result.capacities.get(name, 0.0) for name in renewable) / total_capacity,
        energy_share=math.fsum(math.fsum(plants[name].generation.values) for name in renewable) / total_energy,
    )
