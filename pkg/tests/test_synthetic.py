"""
Tests for the synthetic-year generator and its scenario variants.
"""

import numpy as np
import pytest

from app.core.errors import DomainError
from app.core.pipeline import SizingPipeline
from app.core.scenario import validate_scenario
from app.core.solver import SolverOptions
from app.ingestion.loaders import read_scenario, resample_scenario
from app.ingestion.synthetic import generate_year, synthetic_scenarios, write_synthetic
from app.reporting.sweep import normalize_costs, sweep_alpha


@pytest.fixture(scope="module")
def two_days():
    return generate_year(seed=7, hours=48)


def test_same_seed_same_year(two_days):
    again = generate_year(seed=7, hours=48)
    assert again.demand.values == two_days.demand.values
    assert again.wind.values == two_days.wind.values
    other = generate_year(seed=8, hours=48)
    assert other.wind.values != two_days.wind.values


def test_series_ranges(two_days):
    assert two_days.hours == 48
    assert max(two_days.demand.values) == pytest.approx(900.0, abs=1e-5)
    for series in (two_days.pv, two_days.wind):
        values = series.as_array()
        assert np.all((values >= 0) & (values <= 1))
    theta = two_days.incidence_angle.as_array()
    assert np.all((theta >= 0) & (theta <= 90))


def test_night_has_no_sun(two_days):
    pv = two_days.pv.as_array()
    dni = two_days.irradiance.as_array()
    theta = two_days.incidence_angle.as_array()
    dark = theta == 90.0
    assert dark.any()
    assert np.all(pv[dark] == 0)
    assert np.all(dni[dark] == 0)
    assert np.any(dni > 0)


def test_calm_hour_has_no_resource(two_days):
    assert two_days.wind.values[3] == 0.0
    assert two_days.pv.values[3] == 0.0
    assert two_days.irradiance.values[3] == 0.0


@pytest.mark.parametrize("kwargs", [{"hours": 12}, {"hours": 48, "calm_hour": 48}])
def test_bad_arguments(kwargs):
    with pytest.raises(DomainError):
        generate_year(**kwargs)


def test_variants_validate(two_days):
    variants = synthetic_scenarios(two_days, alpha=0.4)
    assert set(variants) == {"synthetic_nostorage", "synthetic_storage", "synthetic_solar_thermal"}
    for cfg in variants.values():
        s = validate_scenario(cfg)
        assert s.alpha == 0.4
        assert cfg.capex_annualization == pytest.approx(0.08 * 48 / 8760)
    assert variants["synthetic_storage"].hydro[0].fixed_capacity == round(0.1 * max(two_days.demand.values))
    assert variants["synthetic_solar_thermal"].bus_allocation["st"][0].bus == "4"


def test_nostorage_variant_solves(two_days):
    cfg = synthetic_scenarios(two_days, alpha=0.3)["synthetic_nostorage"]
    result = SizingPipeline(verbose=False).run_config(cfg)
    assert result.is_optimal
    assert result.achieved_share >= 0.3 - 1e-7


def test_full_share_is_infeasible(two_days):
    cfg = synthetic_scenarios(two_days, alpha=1.0)["synthetic_nostorage"]
    result = SizingPipeline(verbose=False).run_config(cfg)
    assert not result.is_optimal


def test_write_synthetic(tmp_path):
    paths = write_synthetic(tmp_path, seed=3, hours=24, alpha=0.2)
    assert sorted(p.name for p in paths) == [
        "synthetic_nostorage.json", "synthetic_solar_thermal.json", "synthetic_storage.json",
    ]
    cfg = read_scenario(tmp_path / "synthetic_solar_thermal.json")
    assert validate_scenario(cfg).horizon == 24
    assert (tmp_path / "series_synthetic_solar_thermal" / "st_incidence_angle.csv").exists()


# ============== Full year, four-hour steps ==============

YEAR_ALPHAS = [0.3, 0.5, 0.7, 0.9, 0.95, 0.99]


@pytest.fixture(scope="module")
def year_sweeps():
    """Every variant of the default synthetic year, resampled to 2190 steps, swept with HiGHS."""
    variants = synthetic_scenarios(generate_year(seed=2019))
    options = SolverOptions(backend="highs")
    sweeps = {}
    for name, cfg in variants.items():
        s = validate_scenario(resample_scenario(cfg, 4))
        assert s.horizon == 2190
        sweeps[name] = sweep_alpha(s, YEAR_ALPHAS, jobs=1, options=options)
    return sweeps


@pytest.mark.slow
def test_year_capacity_grows_superlinearly(year_sweeps):
    print("\n[Test] Renewable capacity near full share")
    rows = year_sweeps["synthetic_nostorage"].rows
    assert all(row.is_optimal for row in rows)
    built = np.array([row.capacities["pv"] + row.capacities["wind"] for row in rows])
    assert np.all(np.diff(built) >= -1e-6 * built.max())
    slopes = np.diff(built) / np.diff(YEAR_ALPHAS)
    assert slopes[-1] > slopes[-2] > slopes[0]


@pytest.mark.slow
def test_year_solar_thermal_only_at_high_share(year_sweeps):
    rows = year_sweeps["synthetic_solar_thermal"].rows
    assert all(row.is_optimal for row in rows)
    st = {row.alpha: row.capacities["st"] for row in rows}
    assert all(st[a] < 1e-3 for a in YEAR_ALPHAS if a <= 0.5)
    threshold = min(a for a in YEAR_ALPHAS if st[a] > 1.0)
    assert threshold > 0.5
    assert st[0.99] >= st[threshold]


@pytest.mark.slow
def test_year_storage_never_costs_more(year_sweeps):
    normalized = normalize_costs(year_sweeps["synthetic_storage"], year_sweeps["synthetic_nostorage"])
    ratios = [row.normalized_cost for row in normalized.rows if row.normalized_cost is not None]
    assert len(ratios) == len(YEAR_ALPHAS)
    assert max(ratios) <= 1.0 + 1e-6
