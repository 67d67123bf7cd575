"""
Tests for alpha sweeps, the alpha grid and cost normalization.
"""

from unittest.mock import patch

import pytest
from pydantic import ValidationError

from app.core.errors import DomainError, GridMismatchError, NumericalBreakdownError
from app.core.scenario import PumpedStoragePlant, validate_scenario
from app.core.solver import SolverOptions
from app.ingestion.loaders import read_scenario
from app.reporting.sweep import (
    ERROR_STATUS,
    SweepReport,
    SweepRow,
    alpha_grid,
    normalize_costs,
    sweep_alpha,
)


@pytest.fixture
def nostorage(data_dir):
    return validate_scenario(read_scenario(data_dir / "scenarios" / "nostorage.json"))


# ============== Grid ==============

def test_alpha_grid_inclusive():
    assert alpha_grid(0.9, 1.0, 0.05) == [0.9, 0.95, 1.0]
    assert alpha_grid(0.0, 1.0, 0.25) == [0.0, 0.25, 0.5, 0.75, 1.0]


def test_alpha_grid_near_one():
    assert alpha_grid(0.9, 1.0, 0.05, near_one=True) == [0.9, 0.95, 0.99, 0.999, 1.0]
    assert alpha_grid(0.0, 0.5, 0.25, near_one=True) == [0.0, 0.25, 0.5]


@pytest.mark.parametrize("args", [(0.0, 1.0, 0.0), (0.5, 0.4, 0.1), (-0.1, 0.5, 0.1), (0.0, 1.5, 0.5)])
def test_alpha_grid_rejects(args):
    with pytest.raises(DomainError):
        alpha_grid(*args)


# ============== Sweeps ==============

def test_sweep_keeps_infeasible_rows(nostorage):
    print("\n[Test] Sweep up to alpha=1 on the no-storage scenario")
    report = sweep_alpha(nostorage, [0.9, 0.95, 1.0], jobs=1)
    assert report.alphas == [0.9, 0.95, 1.0]
    assert [row.status for row in report.rows] == ["optimal", "optimal", "infeasible"]
    assert report.rows[-1].total_cost is None
    assert report.rows[1].total_cost >= report.rows[0].total_cost
    assert report.cost_decreases() == []
    assert report.plants == ["coal", "wind"]


def test_sweep_frame_columns(nostorage):
    frame = sweep_alpha(nostorage, [0.2, 1.0], jobs=1).to_frame()
    assert list(frame.columns) == [
        "alpha", "status", "total_cost", "normalized_cost", "coal_mw", "wind_mw", "coal_mwh", "wind_mwh",
    ]
    assert frame["status"].tolist() == ["optimal", "infeasible"]


@pytest.mark.parametrize("alphas", [[], [0.5, 0.5], [0.6, 0.4], [0.5, 1.2]])
def test_sweep_rejects_bad_alphas(nostorage, alphas):
    with pytest.raises(DomainError):
        sweep_alpha(nostorage, alphas, jobs=1)


def test_solver_failure_becomes_error_row(nostorage):
    with patch("app.reporting.sweep.SizingPipeline.run", side_effect=NumericalBreakdownError("singular basis")):
        report = sweep_alpha(nostorage, [0.1, 0.2], jobs=1)
    assert [row.status for row in report.rows] == [ERROR_STATUS, ERROR_STATUS]
    assert "singular" in report.rows[0].error


@pytest.mark.slow
def test_parallel_sweep_matches_serial(nostorage):
    alphas = [0.0, 0.3, 0.6, 0.9]
    serial = sweep_alpha(nostorage, alphas, jobs=1)
    parallel = sweep_alpha(nostorage, alphas, jobs=2)
    assert [r.total_cost for r in parallel.rows] == pytest.approx([r.total_cost for r in serial.rows])


# ============== Normalization ==============

def test_normalize_against_itself(nostorage):
    report = sweep_alpha(nostorage, [0.5, 1.0], jobs=1)
    normalized = normalize_costs(report, report)
    assert normalized.rows[0].normalized_cost == pytest.approx(1.0)
    assert normalized.rows[1].normalized_cost is None


def test_normalize_grid_mismatch():
    a = SweepReport(scenario="a", rows=[SweepRow(alpha=0.1, status="optimal", total_cost=1.0)])
    b = SweepReport(scenario="b", rows=[SweepRow(alpha=0.2, status="optimal", total_cost=1.0)])
    with pytest.raises(GridMismatchError):
        normalize_costs(a, b)


def test_normalize_zero_base_cost():
    a = SweepReport(scenario="a", rows=[SweepRow(alpha=0.1, status="optimal", total_cost=1.0)])
    b = SweepReport(scenario="b", rows=[SweepRow(alpha=0.1, status="optimal", total_cost=0.0)])
    with pytest.raises(ZeroDivisionError):
        normalize_costs(a, b)


# ============== Report model ==============

def test_report_requires_increasing_alphas():
    with pytest.raises(ValidationError):
        SweepReport(scenario="x", rows=[SweepRow(alpha=0.5, status="optimal"), SweepRow(alpha=0.4, status="optimal")])


def test_cost_decreases_flags_drops():
    report = SweepReport(scenario="x", rows=[
        SweepRow(alpha=0.1, status="optimal", total_cost=10.0),
        SweepRow(alpha=0.2, status="infeasible"),
        SweepRow(alpha=0.3, status="optimal", total_cost=9.0),
        SweepRow(alpha=0.4, status="optimal", total_cost=9.0),
    ])
    assert report.cost_decreases() == [0.3]


# ============== Shape over alpha ==============

SHAPE_ALPHAS = [0.0, 0.2, 0.5, 0.8, 0.9, 0.95]


def test_capacity_nondecreasing_in_alpha(nostorage):
    print("\n[Test] Wind capacity over alpha")
    report = sweep_alpha(nostorage, SHAPE_ALPHAS, jobs=1)
    assert all(row.is_optimal for row in report.rows)
    wind = [row.capacities["wind"] for row in report.rows]
    assert all(b >= a - 1e-7 * max(wind) for a, b in zip(wind, wind[1:]))
    costs = [row.total_cost for row in report.rows]
    assert all(b >= a * (1 - 1e-9) for a, b in zip(costs, costs[1:]))


@pytest.mark.parametrize("backend", ["simplex", "highs"])
def test_storage_normalized_at_most_one(nostorage, backend):
    stored = validate_scenario(nostorage.config.model_copy(update={
        "name": "with_storage",
        "hydro": [PumpedStoragePlant(
            name="pshpp", fixed_capacity=20.0, storage_hours=4.0, eta_pump=0.85, eta_turbine=0.9, opex=0.0,
        )],
    }))
    options = SolverOptions(backend=backend)
    base = sweep_alpha(nostorage, SHAPE_ALPHAS[1:], jobs=1, options=options)
    normalized = normalize_costs(sweep_alpha(stored, SHAPE_ALPHAS[1:], jobs=1, options=options), base)
    ratios = [row.normalized_cost for row in normalized.rows]
    assert None not in ratios
    assert max(ratios) <= 1.0 + 1e-7
