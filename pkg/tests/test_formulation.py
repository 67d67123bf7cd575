"""
Tests for the LP formulation: layout, row counts, solution extraction and
agreement with an exhaustive search on tiny instances.
"""

import numpy as np
import pytest

from app.core.errors import ConsistencyError, DimensionError
from app.core.formulation import VariableLayout, build_lp, constraint_residuals, extract_solution
from app.core.lp import SolveStatus
from app.core.pipeline import SizingPipeline
from app.core.scenario import (
    ConventionalPlant,
    PlantKind,
    ScenarioConfig,
    energy_balance_residual,
    storage_step,
    validate_scenario,
)
from app.core.solver import LpSolution
from tests.conftest import ts


def _brute_force(demand, availability, alpha, capex, opex_conventional, opex_renewable):
    """Minimum cost over capacities and outputs on a grid of hundredths."""
    d = np.round(np.asarray(demand) * 100).astype(int)
    a = np.asarray(availability, dtype=float)
    need = alpha * d.sum()
    best = np.inf
    for g in range(0, 101):
        caps = np.minimum(np.floor(a * g + 1e-9).astype(int), d)
        grids = np.meshgrid(*[np.arange(c + 1) for c in caps], indexing="ij")
        renewable = sum(grids)
        feasible = renewable >= need - 1e-9
        if not feasible.any():
            continue
        cost = capex * g + opex_renewable * renewable + opex_conventional * (d.sum() - renewable)
        best = min(best, cost[feasible].min() / 100.0)
    return best


# ============== Layout ==============

def test_layout_of_full_scenario(full_config):
    print("\n[Test] Variable layout I=1, J=2, K=1 fixed, L=1, T=24")
    s = validate_scenario(full_config)
    layout = VariableLayout.from_scenario(s)
    assert layout.num_vars == 219
    sizes = layout.block_sizes()
    assert sizes["renewable_capacity"] == 2
    assert sizes["hydro_capacity"] == 0
    assert sizes["solar_capacity"] == 1
    assert layout.hydro_capacity(0) is None
    assert layout.renewable_capacity(1) == 24 + 1
    assert len(layout.var_names()) == 219
    assert len(set(layout.var_names())) == 219


def test_blocks_are_contiguous(full_config):
    layout = VariableLayout.from_scenario(validate_scenario(full_config))
    stop = 0
    for block in layout.blocks().values():
        assert block.start == stop
        stop = block.stop
    assert stop == layout.num_vars


def test_conventional_only_row_counts():
    cfg = ScenarioConfig(
        name="conv",
        demand=ts([1.0, 2.0]),
        conventional=[ConventionalPlant(name="coal", installed_capacity=5.0, opex=10.0)],
        alpha=0.0,
    )
    lp = build_lp(validate_scenario(cfg))
    assert lp.num_vars == 2
    assert lp.num_eq == 2
    assert lp.num_ub == 3
    assert lp.ub_names[-1] == "share"
    assert list(lp.objective) == [10.0, 10.0]


def test_conventional_only_positive_alpha_is_infeasible():
    cfg = ScenarioConfig(
        name="conv",
        demand=ts([1.0, 2.0]),
        conventional=[ConventionalPlant(name="coal", installed_capacity=5.0, opex=10.0)],
        alpha=0.1,
    )
    result = SizingPipeline(verbose=False).run_config(cfg)
    assert result.status == SolveStatus.INFEASIBLE
    assert result.dispatch is None


def test_capacity_shortfall_is_infeasible(make_simple):
    # demand above conventional capacity with no renewable resource
    result = SizingPipeline(verbose=False).run_config(make_simple([20.0, 5.0], [0.0, 0.0]))
    assert result.status == SolveStatus.INFEASIBLE


def test_share_row_coefficients(make_simple):
    s = validate_scenario(make_simple([0.5, 0.3, 0.4], [0.5, 0.5, 0.8], alpha=0.75))
    lp = build_lp(s)
    share = lp.a_ub[lp.num_ub - 1].toarray().ravel()
    dispatch = lp.layout.renewable_dispatch(0)
    assert share[dispatch] == pytest.approx([-1.0, -1.0, -1.0])
    assert lp.b_ub[-1] == pytest.approx(-0.75 * 1.2)


# ============== Oracle ==============

@pytest.mark.parametrize(
    "demand,availability,alpha,expected",
    [
        ([0.5, 0.3, 0.4], [0.5, 0.5, 0.8], 0.75, 69.5),
        ([0.4, 0.5, 0.2, 0.5], [0.5, 0.2, 0.4, 0.5], 0.5, 94.0),
    ],
)
def test_lp_matches_exhaustive_search(make_simple, demand, availability, alpha, expected):
    print(f"\n[Test] Exhaustive search, demand={demand}")
    brute = _brute_force(demand, availability, alpha, capex=100.0, opex_conventional=50.0, opex_renewable=5.0)
    assert brute == pytest.approx(expected)

    result = SizingPipeline(verbose=False).run_config(make_simple(demand, availability, alpha=alpha))
    assert result.is_optimal
    assert result.cost.total == pytest.approx(brute, rel=1e-3)
    assert result.achieved_share >= alpha - 1e-7


def test_oracle_capacity(make_simple):
    result = SizingPipeline(verbose=False).run_config(make_simple([0.5, 0.3, 0.4], [0.5, 0.5, 0.8], alpha=0.75))
    assert result.capacities["wind"] == pytest.approx(0.5, abs=1e-6)
    assert result.cost.total == pytest.approx(69.5, rel=1e-9)


# ============== Solved dispatch properties ==============

@pytest.fixture
def full_result(full_config):
    s = validate_scenario(full_config)
    return s, SizingPipeline(verbose=False).run(s)


def test_full_scenario_dispatch(full_result):
    s, result = full_result
    assert result.is_optimal
    assert len(result.dispatch.plants) == 5
    assert result.plant_kinds() == {
        "coal": PlantKind.CONVENTIONAL,
        "pv": PlantKind.VARIABLE_RENEWABLE,
        "wind": PlantKind.VARIABLE_RENEWABLE,
        "pshpp": PlantKind.PUMPED_STORAGE,
        "st": PlantKind.SOLAR_THERMAL,
    }
    assert result.capacities["pshpp"] == 20.0
    assert all(v >= 0 for v in result.capacities.values())


def test_full_scenario_balance_and_share(full_result):
    s, result = full_result
    demand = s.config.demand
    for t in range(s.horizon):
        assert abs(energy_balance_residual(result.dispatch, demand, t)) <= 1e-6 * max(1.0, demand.values[t])
    assert result.achieved_share >= s.alpha - 1e-7


def test_full_scenario_capacity_bounds(full_result):
    s, result = full_result
    cfg = s.config
    for plant in cfg.renewables:
        gen = result.dispatch.plants[plant.name].generation.as_array()
        bound = plant.availability.as_array() * result.capacities[plant.name]
        assert np.all(gen <= bound + 1e-6)
    coal = result.dispatch.plants["coal"].generation.as_array()
    assert np.all(coal <= cfg.conventional[0].installed_capacity + 1e-6)


def test_full_scenario_storage_trajectories(full_result):
    s, result = full_result
    cfg = s.config
    hydro = cfg.hydro[0]
    h = result.dispatch.plants["pshpp"]
    level, pump, gen = h.storage.values, h.pumping.values, h.generation.values
    assert level[0] == pytest.approx(hydro.initial_fill * hydro.storage_hours * 20.0, abs=1e-6)
    for t in range(s.horizon - 1):
        expected = storage_step(level[t], pump[t], gen[t], hydro.eta_pump, hydro.eta_turbine)
        assert level[t + 1] == pytest.approx(expected, abs=1e-6)
    end = storage_step(level[-1], pump[-1], gen[-1], hydro.eta_pump, hydro.eta_turbine)
    assert end >= level[0] - 1e-6
    assert max(level) <= hydro.storage_hours * 20.0 + 1e-6

    st = cfg.solar_thermal[0]
    p = result.dispatch.plants["st"]
    for t in range(s.horizon - 1):
        expected = storage_step(p.storage.values[t], p.absorption.values[t], p.generation.values[t], 1.0, st.eta_thermoelectric)
        assert p.storage.values[t + 1] == pytest.approx(expected, abs=1e-6)


def test_acyclic_storage_does_not_cost_more(full_config):
    pipeline = SizingPipeline(verbose=False)
    cyclic = pipeline.run_config(full_config)
    free = pipeline.run_config(full_config.model_copy(update={"enforce_cyclic_storage": False}))
    assert free.cost.total <= cyclic.cost.total * (1 + 1e-7)


def test_curtailment_is_available_minus_dispatched(full_result):
    s, result = full_result
    for plant in s.config.renewables:
        gen = result.dispatch.plants[plant.name].generation.as_array()
        spilled = result.curtailment[plant.name].as_array()
        available = plant.availability.as_array() * result.capacities[plant.name]
        assert gen + spilled == pytest.approx(np.maximum(available, gen), abs=1e-6)


# ============== Extraction errors ==============

def test_extract_rejects_wrong_length(make_simple):
    s = validate_scenario(make_simple([1.0], [0.5]))
    lp = build_lp(s)
    sol = LpSolution(x=np.zeros(lp.num_vars + 1), y=np.zeros(0), objective=0.0, status=SolveStatus.OPTIMAL)
    with pytest.raises(DimensionError):
        extract_solution(sol, s, lp)


def test_extract_rejects_negative_components(make_simple):
    s = validate_scenario(make_simple([1.0], [0.5]))
    lp = build_lp(s)
    x = np.zeros(lp.num_vars)
    x[0] = -0.5
    sol = LpSolution(x=x, y=np.zeros(0), objective=0.0, status=SolveStatus.OPTIMAL)
    with pytest.raises(ConsistencyError):
        extract_solution(sol, s, lp)


def test_extract_non_optimal_has_no_dispatch(make_simple):
    s = validate_scenario(make_simple([1.0], [0.5]))
    lp = build_lp(s)
    sol = LpSolution(x=np.zeros(lp.num_vars), y=np.zeros(0), objective=0.0, status=SolveStatus.UNBOUNDED)
    result = extract_solution(sol, s, lp)
    assert result.status == SolveStatus.UNBOUNDED
    assert result.dispatch is None
    assert result.cost is None


def test_constraint_residuals_zero_at_solution(make_simple):
    s = validate_scenario(make_simple([0.5, 0.3, 0.4], [0.5, 0.5, 0.8], alpha=0.75))
    lp = build_lp(s)
    sol = SizingPipeline(verbose=False).solve_lp(lp)
    assert constraint_residuals(lp, sol.x) <= 1e-7
