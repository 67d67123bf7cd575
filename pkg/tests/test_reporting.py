"""
Tests for generation-mix tables, emissions, capacity/energy shares and bus tables.
"""

import numpy as np
import pytest

from app.core.errors import WeightError
from app.core.formulation import SizingResult
from app.core.lp import SolveStatus
from app.core.pipeline import SizingPipeline
from app.core.scenario import BusShare, Dispatch
from app.reporting.buses import allocate_to_buses
from app.reporting.mix import (
    PUMPING_COLUMN,
    aggregate_dispatch,
    capacity_energy_shares,
    energy_by_technology,
    estimate_emissions,
)


@pytest.fixture
def solved(full_config):
    return SizingPipeline(verbose=False).run_config(full_config)


# ============== Mix ==============

def test_energy_by_technology(solved):
    energy = energy_by_technology(solved)
    assert set(energy) == {"coal", "pv", "wind", "hydro", "solar_thermal", PUMPING_COLUMN}
    assert energy[PUMPING_COLUMN] <= 0
    total = sum(energy.values())
    assert total == pytest.approx(solved.demand.total(), rel=1e-7)


def test_daily_mix_is_one_full_day(solved):
    print("\n[Test] Daily and hourly generation mix")
    table = aggregate_dispatch(solved.dispatch, "daily", solved.demand)
    assert len(table) == 1
    assert table.index.name == "period"
    assert not table["partial"].iloc[0]
    generation = table.drop(columns=["demand", "partial"]).sum(axis=1).iloc[0]
    assert generation == pytest.approx(table["demand"].iloc[0], rel=1e-7)


def test_hourly_mix(solved):
    table = aggregate_dispatch(solved.dispatch, "hourly", solved.demand)
    assert len(table) == 24
    assert not table["partial"].any()
    assert table["coal"].to_numpy() == pytest.approx(solved.dispatch.plants["coal"].generation.as_array())


def test_monthly_mix_is_partial(solved):
    table = aggregate_dispatch(solved.dispatch, "monthly", solved.demand)
    assert len(table) == 1
    assert table.index[0].day == 1
    assert table["partial"].iloc[0]


def test_mix_without_demand_uses_dispatch_timestamps(solved):
    table = aggregate_dispatch(solved.dispatch, "daily")
    assert "demand" not in table.columns


def test_mix_errors(solved):
    with pytest.raises(ValueError):
        aggregate_dispatch(Dispatch(), "daily")
    with pytest.raises(ValueError):
        aggregate_dispatch(solved.dispatch, "weekly", solved.demand)


def test_emissions_use_catalog_factors(solved):
    factors = {"coal": 0.9875, "pv": 0.099, "wind": 0.024, "hydro": 0.101, "solar_thermal": 0.036}
    energy = energy_by_technology(solved)
    emissions = estimate_emissions(solved)
    assert PUMPING_COLUMN not in emissions
    for tech, amount in energy.items():
        if tech in factors and amount > 0:
            assert emissions[tech] == pytest.approx(amount * factors[tech])
        else:
            assert tech not in emissions
    low = estimate_emissions(solved, "low")
    if energy["coal"] > 0:
        assert low["coal"] == pytest.approx(energy["coal"] * 0.85)


def test_capacity_energy_shares(solved):
    shares = capacity_energy_shares(solved)
    assert 0 < shares.capacity_share < 1
    assert shares.energy_share > 0.4
    plants = solved.dispatch.plants
    generated = sum(np.sum(p.generation.as_array()) for p in plants.values())
    renewable = sum(np.sum(plants[n].generation.as_array()) for n in ("pv", "wind", "st"))
    assert shares.energy_share == pytest.approx(renewable / generated)


def test_shares_need_a_dispatch():
    result = SizingResult(scenario="x", alpha=0.5, status=SolveStatus.INFEASIBLE)
    with pytest.raises(ValueError):
        capacity_energy_shares(result)
    assert energy_by_technology(result) == {}
    assert estimate_emissions(result) == {}


# ============== Buses ==============

def test_bus_allocation(solved):
    table = allocate_to_buses(solved, {
        "pv": [BusShare(bus="3", weight=0.25), BusShare(bus="4", weight=0.75)],
        "st": [BusShare(bus="4", weight=1.0)],
    })
    assert len(table.entries) == 3
    totals = table.by_bus()
    assert totals["3"] == pytest.approx(0.25 * solved.capacities["pv"])
    assert totals["4"] == pytest.approx(0.75 * solved.capacities["pv"] + solved.capacities["st"])
    assert list(table.to_frame().columns) == ["plant", "bus", "capacity_mw"]


def test_bus_allocation_without_entries(solved):
    assert allocate_to_buses(solved).entries == []
    assert allocate_to_buses(solved).to_frame().empty


@pytest.mark.parametrize(
    "shares",
    [
        [],
        [BusShare(bus="1", weight=0.5), BusShare(bus="2", weight=0.49)],
        [BusShare(bus="1", weight=1.5), BusShare(bus="2", weight=-0.5)],
    ],
)
def test_bad_bus_weights(solved, shares):
    with pytest.raises(WeightError):
        allocate_to_buses(solved, {"pv": shares})
