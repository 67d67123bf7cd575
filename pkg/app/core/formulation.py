"""Translate a validated scenario into a sparse LP and map LP solutions back.

Variable blocks, in order:

    conventional dispatch        I*T
    renewable capacities         J'  (plants without fixed_capacity)
    renewable dispatch           J*T
    hydro capacities             K'
    hydro generation + pumping   2*K*T  (per plant: generation T, then pumping T)
    hydro storage levels         K*T
    solar-thermal capacities     L'
    thermal absorption           L*T
    thermal-electric dispatch    L*T
    thermal storage levels       L*T
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from pydantic import BaseModel, ConfigDict, Field

from app.core.errors import ConsistencyError, DimensionError
from app.core.lp import LpProblem, SolveStatus
from app.core.scenario import (
    CostBreakdown,
    Dispatch,
    PlantDispatch,
    PlantKind,
    TimeSeries,
    Unit,
    ValidatedScenario,
    annual_cost,
    renewable_share,
)
from app.core.solar_thermal import ThermalProfile, build_thermal_profile

logger = logging.getLogger(__name__)

# Relative agreement required between recomputed cost and the LP objective
COST_AGREEMENT_TOL = 1e-6
# Negative solver noise below this (relative to max |x|) is clamped to zero
NEGATIVE_CLAMP_TOL = 1e-6


# ============== Layout ==============

@dataclass(frozen=True)
class VariableLayout:
    """Contiguous variable blocks of one scenario's LP."""

    horizon: int
    conventional: Tuple[str, ...]
    renewables: Tuple[str, ...]
    renewable_sized: Tuple[bool, ...]
    hydro: Tuple[str, ...]
    hydro_sized: Tuple[bool, ...]
    solar_thermal: Tuple[str, ...]
    solar_sized: Tuple[bool, ...]

    @classmethod
    def from_scenario(cls, s: ValidatedScenario) -> "VariableLayout":
        cfg = s.config
        return cls(
            horizon=s.horizon,
            conventional=tuple(p.name for p in cfg.conventional),
            renewables=tuple(p.name for p in cfg.renewables),
            renewable_sized=tuple(p.fixed_capacity is None for p in cfg.renewables),
            hydro=tuple(p.name for p in cfg.hydro),
            hydro_sized=tuple(p.fixed_capacity is None for p in cfg.hydro),
            solar_thermal=tuple(p.name for p in cfg.solar_thermal),
            solar_sized=tuple(p.fixed_capacity is None for p in cfg.solar_thermal),
        )

    def block_sizes(self) -> Dict[str, int]:
        T = self.horizon
        return {
            "conventional_dispatch": len(self.conventional) * T,
            "renewable_capacity": sum(self.renewable_sized),
            "renewable_dispatch": len(self.renewables) * T,
            "hydro_capacity": sum(self.hydro_sized),
            "hydro_flow": 2 * len(self.hydro) * T,
            "hydro_level": len(self.hydro) * T,
            "solar_capacity": sum(self.solar_sized),
            "solar_absorption": len(self.solar_thermal) * T,
            "solar_dispatch": len(self.solar_thermal) * T,
            "solar_level": len(self.solar_thermal) * T,
        }

    def blocks(self) -> Dict[str, slice]:
        out = {}
        start = 0
        for name, size in self.block_sizes().items():
            out[name] = slice(start, start + size)
            start += size
        return out

    @property
    def num_vars(self) -> int:
        return sum(self.block_sizes().values())

    def _series(self, block: str, k: int) -> slice:
        begin = self.blocks()[block].start + k * self.horizon
        return slice(begin, begin + self.horizon)

    @staticmethod
    def _cap_position(sized: Sequence[bool], k: int) -> Optional[int]:
        return sum(sized[:k]) if sized[k] else None

    def _cap(self, block: str, sized: Sequence[bool], k: int) -> Optional[int]:
        pos = self._cap_position(sized, k)
        return None if pos is None else self.blocks()[block].start + pos

    def conventional_dispatch(self, i: int) -> slice:
        return self._series("conventional_dispatch", i)

    def renewable_capacity(self, j: int) -> Optional[int]:
        return self._cap("renewable_capacity", self.renewable_sized, j)

    def renewable_dispatch(self, j: int) -> slice:
        return self._series("renewable_dispatch", j)

    def hydro_capacity(self, k: int) -> Optional[int]:
        return self._cap("hydro_capacity", self.hydro_sized, k)

    def hydro_generation(self, k: int) -> slice:
        return self._series("hydro_flow", 2 * k)

    def hydro_pumping(self, k: int) -> slice:
        return self._series("hydro_flow", 2 * k + 1)

    def hydro_level(self, k: int) -> slice:
        return self._series("hydro_level", k)

    def solar_capacity(self, l: int) -> Optional[int]:
        return self._cap("solar_capacity", self.solar_sized, l)

    def solar_absorption(self, l: int) -> slice:
        return self._series("solar_absorption", l)

    def solar_dispatch(self, l: int) -> slice:
        return self._series("solar_dispatch", l)

    def solar_level(self, l: int) -> slice:
        return self._series("solar_level", l)

    def var_names(self) -> Tuple[str, ...]:
        """Readable name per variable, used by the MPS dump."""
        names: List[str] = []
        T = range(self.horizon)

        def series(prefix: str, plant: str):
            names.extend(f"{prefix}[{plant}][{t}]" for t in T)

        for p in self.conventional:
            series("gen", p)
        names.extend(f"cap[{p}]" for p, sized in zip(self.renewables, self.renewable_sized) if sized)
        for p in self.renewables:
            series("gen", p)
        names.extend(f"cap[{p}]" for p, sized in zip(self.hydro, self.hydro_sized) if sized)
        for p in self.hydro:
            series("gen", p)
            series("pump", p)
        for p in self.hydro:
            series("soc", p)
        names.extend(f"cap[{p}]" for p, sized in zip(self.solar_thermal, self.solar_sized) if sized)
        for p in self.solar_thermal:
            series("abs", p)
        for p in self.solar_thermal:
            series("gen", p)
        for p in self.solar_thermal:
            series("soc", p)
        return tuple(names)


# ============== Row assembly ==============

class _RowBuilder:
    """Accumulates blocks of sparse rows in COO form."""

    def __init__(self):
        self.rows: List[np.ndarray] = []
        self.cols: List[np.ndarray] = []
        self.vals: List[np.ndarray] = []
        self.rhs: List[np.ndarray] = []
        self.names: List[str] = []
        self.count = 0

    def add(self, terms, rhs, name: str) -> None:
        """Append len(rhs) rows; each term is (column index or indices, coefficient(s))."""
        rhs = np.atleast_1d(np.asarray(rhs, dtype=float))
        k = rhs.shape[0]
        row_ids = self.count + np.arange(k)
        for cols, coefs in terms:
            cols = np.broadcast_to(np.asarray(cols), (k,))
            coefs = np.broadcast_to(np.asarray(coefs, dtype=float), (k,))
            keep = coefs != 0
            self.rows.append(row_ids[keep])
            self.cols.append(cols[keep])
            self.vals.append(coefs[keep])
        self.rhs.append(rhs)
        self.names.extend([name] if k == 1 else [f"{name}[{t}]" for t in range(k)])
        self.count += k

    def add_row(self, cols, coefs, rhs: float, name: str) -> None:
        """Append one row with explicit column indices and coefficients."""
        cols = np.asarray(cols, dtype=int)
        self.rows.append(np.full(cols.shape[0], self.count, dtype=int))
        self.cols.append(cols)
        self.vals.append(np.broadcast_to(np.asarray(coefs, dtype=float), cols.shape).copy())
        self.rhs.append(np.array([rhs], dtype=float))
        self.names.append(name)
        self.count += 1

    def matrix(self, n: int) -> Tuple[sp.csr_matrix, np.ndarray]:
        if not self.rows:
            return sp.csr_matrix((self.count, n)), np.concatenate(self.rhs) if self.rhs else np.zeros(0)
        a = sp.coo_matrix(
            (np.concatenate(self.vals), (np.concatenate(self.rows), np.concatenate(self.cols))),
            shape=(self.count, n),
        ).tocsr()
        a.eliminate_zeros()
        b = np.concatenate(self.rhs) if self.rhs else np.zeros(0)
        return a, b


def _capacity_term(cap_col: Optional[int], coef, fixed: Optional[float]):
    """Split a capacity-proportional bound into (lhs terms, rhs contribution)."""
    coef = np.asarray(coef, dtype=float)
    if cap_col is None:
        return [], coef * float(fixed)
    return [(cap_col, -coef)], np.zeros_like(coef)


def _storage_rows(
    eq: _RowBuilder,
    ub: _RowBuilder,
    name: str,
    level: slice,
    charge: slice,
    discharge: slice,
    eta_in: float,
    eta_out: float,
    hours: float,
    fill: float,
    cap_col: Optional[int],
    fixed: Optional[float],
    dt: float,
    T: int,
    cyclic: bool,
) -> None:
    """Recurrence, initial level, size bound and terminal rows for one store."""
    lv = np.arange(level.start, level.stop)
    ch = np.arange(charge.start, charge.stop)
    dis = np.arange(discharge.start, discharge.stop)

    # initial level = fill * hours * G
    terms, rhs = _capacity_term(cap_col, fill * hours, fixed)
    eq.add([(lv[0], 1.0), *terms], rhs, f"soc_init[{name}]")

    # level[t+1] - level[t] - eta_in*dt*charge[t] + dt/eta_out*discharge[t] = 0
    if T > 1:
        eq.add(
            [(lv[1:], 1.0), (lv[:-1], -1.0), (ch[:-1], -eta_in * dt), (dis[:-1], dt / eta_out)],
            np.zeros(T - 1),
            f"soc_step[{name}]",
        )

    # level[t] <= hours * G
    terms, rhs = _capacity_term(cap_col, np.full(T, hours), fixed)
    ub.add([(lv, 1.0), *terms], rhs, f"soc_max[{name}]")

    # end level = level[T-1] + dt*(eta_in*charge[T-1] - discharge[T-1]/eta_out)
    end = [(lv[-1], 1.0), (ch[-1], eta_in * dt), (dis[-1], -dt / eta_out)]
    negated = [(col, -c) for col, c in end]
    if cyclic:
        ub.add([*negated, (lv[0], 1.0)], 0.0, f"soc_cyclic[{name}]")
    else:
        ub.add(negated, 0.0, f"soc_end_min[{name}]")
    terms, rhs = _capacity_term(cap_col, hours, fixed)
    ub.add([*end, *terms], rhs, f"soc_end_max[{name}]")


def build_lp(s: ValidatedScenario) -> LpProblem:
    """Emit the sizing LP for a validated scenario.

    Fixed-capacity plants have their capacity substituted as a constant, so
    their bound rows move the capacity term to the right-hand side.

    Args:
        s: Validated scenario

    Returns:
        LpProblem with equality rows (storage, balance) and inequality rows
        (capacity bounds, storage bounds, share)
    """
    cfg = s.config
    layout = VariableLayout.from_scenario(s)
    T = s.horizon
    dt = s.step_hours
    n = layout.num_vars
    demand = s.demand()
    ann = cfg.capex_annualization

    c = np.zeros(n)
    eq = _RowBuilder()
    ub = _RowBuilder()
    generation: List[Tuple[np.ndarray, float]] = []  # (columns, sign) in the balance
    renewable_cols: List[np.ndarray] = []

    for i, plant in enumerate(cfg.conventional):
        cols = np.arange(layout.conventional_dispatch(i).start, layout.conventional_dispatch(i).stop)
        c[cols] = plant.opex * dt
        ub.add([(cols, 1.0)], np.full(T, plant.installed_capacity), f"conv_cap[{plant.name}]")
        generation.append((cols, 1.0))

    for j, plant in enumerate(cfg.renewables):
        cols = np.arange(layout.renewable_dispatch(j).start, layout.renewable_dispatch(j).stop)
        cap = layout.renewable_capacity(j)
        c[cols] = plant.opex * dt
        if cap is not None:
            c[cap] = plant.capex * ann
        terms, rhs = _capacity_term(cap, plant.availability.as_array(), plant.fixed_capacity)
        ub.add([(cols, 1.0), *terms], rhs, f"ren_cap[{plant.name}]")
        generation.append((cols, 1.0))
        renewable_cols.append(cols)

    for k, plant in enumerate(cfg.hydro):
        gen = layout.hydro_generation(k)
        pump = layout.hydro_pumping(k)
        gen_cols = np.arange(gen.start, gen.stop)
        pump_cols = np.arange(pump.start, pump.stop)
        cap = layout.hydro_capacity(k)
        c[gen_cols] = plant.opex * dt
        if cap is not None:
            c[cap] = plant.capex * ann
        terms, rhs = _capacity_term(cap, np.ones(T), plant.fixed_capacity)
        ub.add([(gen_cols, 1.0), *terms], rhs, f"hydro_gen_cap[{plant.name}]")
        ub.add([(pump_cols, 1.0), *terms], rhs, f"hydro_pump_cap[{plant.name}]")
        _storage_rows(
            eq, ub, plant.name,
            level=layout.hydro_level(k), charge=pump, discharge=gen,
            eta_in=plant.eta_pump, eta_out=plant.eta_turbine,
            hours=plant.storage_hours, fill=plant.initial_fill,
            cap_col=cap, fixed=plant.fixed_capacity,
            dt=dt, T=T, cyclic=cfg.enforce_cyclic_storage,
        )
        generation.append((gen_cols, 1.0))
        generation.append((pump_cols, -1.0))

    for l, plant in enumerate(cfg.solar_thermal):
        profile = build_thermal_profile(plant)
        absorb = layout.solar_absorption(l)
        gen = layout.solar_dispatch(l)
        abs_cols = np.arange(absorb.start, absorb.stop)
        gen_cols = np.arange(gen.start, gen.stop)
        cap = layout.solar_capacity(l)
        c[gen_cols] = plant.opex * dt
        if cap is not None:
            c[cap] = plant.capex * ann
        terms, rhs = _capacity_term(cap, profile.max_thermal.as_array(), plant.fixed_capacity)
        ub.add([(abs_cols, 1.0), *terms], rhs, f"st_abs_cap[{plant.name}]")
        terms, rhs = _capacity_term(cap, np.ones(T), plant.fixed_capacity)
        ub.add([(gen_cols, 1.0), *terms], rhs, f"st_gen_cap[{plant.name}]")
        _storage_rows(
            eq, ub, plant.name,
            level=layout.solar_level(l), charge=absorb, discharge=gen,
            eta_in=1.0, eta_out=plant.eta_thermoelectric,
            hours=plant.storage_hours, fill=plant.initial_fill,
            cap_col=cap, fixed=plant.fixed_capacity,
            dt=dt, T=T, cyclic=cfg.enforce_cyclic_storage,
        )
        generation.append((gen_cols, 1.0))
        renewable_cols.append(gen_cols)

    # sum(generation) - sum(pumping) = D_t
    eq.add(generation, demand, "balance")

    # renewable energy >= alpha * total demand energy
    share_cols = np.concatenate(renewable_cols) if renewable_cols else np.zeros(0, dtype=int)
    ub.add_row(share_cols, -dt, -s.alpha * math.fsum(demand) * dt, "share")

    a_eq, b_eq = eq.matrix(n)
    a_ub, b_ub = ub.matrix(n)
    lp = LpProblem(
        objective=c,
        a_eq=a_eq,
        b_eq=b_eq,
        a_ub=a_ub,
        b_ub=b_ub,
        lower=np.zeros(n),
        upper=np.full(n, np.inf),
        layout=layout,
        eq_names=tuple(eq.names),
        ub_names=tuple(ub.names),
        name=s.name,
    )
    logger.info(
        "[BUILD] %s: %d vars, %d eq rows, %d ineq rows, %d nonzeros",
        s.name, n, lp.num_eq, lp.num_ub, a_eq.nnz + a_ub.nnz,
    )
    return lp


# ============== Results ==============

class SolverStats(BaseModel):
    """Solver bookkeeping reported with a result."""

    backend: str = "simplex"
    iterations: int = 0
    phase_one_iterations: int = 0
    objective: Optional[float] = None
    primal_residual: float = 0.0
    dual_residual: float = 0.0
    max_row_violation: float = 0.0
    elapsed_seconds: float = 0.0


class SizingResult(BaseModel):
    """Capacities, dispatch and costs of one solved scenario."""

    model_config = ConfigDict(frozen=True)

    scenario: str
    alpha: float
    status: SolveStatus
    capacities: Dict[str, float] = Field(default_factory=dict)
    dispatch: Optional[Dispatch] = None
    demand: Optional[TimeSeries] = None
    curtailment: Dict[str, TimeSeries] = Field(default_factory=dict)
    cost: Optional[CostBreakdown] = None
    achieved_share: Optional[float] = None
    solver: SolverStats = Field(default_factory=SolverStats)
    notes: List[str] = Field(default_factory=list)

    @property
    def is_optimal(self) -> bool:
        return self.status == SolveStatus.OPTIMAL

    def plant_kinds(self) -> Dict[str, PlantKind]:
        if self.dispatch is None:
            return {}
        return {name: p.kind for name, p in self.dispatch.plants.items()}


def _clamped(x: np.ndarray) -> np.ndarray:
    if x.size == 0:
        return x
    scale = max(1.0, float(np.max(np.abs(x))))
    worst = float(np.min(x))
    if worst < -NEGATIVE_CLAMP_TOL * scale:
        raise ConsistencyError(f"solution has negative component {worst:.3g}")
    return np.maximum(x, 0.0)


def extract_solution(
    sol,
    s: ValidatedScenario,
    lp: LpProblem,
    stats: Optional[SolverStats] = None,
) -> SizingResult:
    """Slice an LP solution back into capacities, dispatch and costs.

    Args:
        sol: LpSolution in the variables of ``lp`` (original, unscaled)
        s: Scenario the LP was built from
        lp: Problem returned by build_lp
        stats: Solver statistics to attach

    Returns:
        SizingResult; non-optimal statuses carry no dispatch

    Raises:
        DimensionError: If the solution length differs from lp.num_vars
        ConsistencyError: If the recomputed cost deviates from the objective
    """
    x = np.asarray(sol.x, dtype=float)
    if x.shape != (lp.num_vars,):
        raise DimensionError(f"solution has {x.size} entries, LP has {lp.num_vars} variables")
    stats = stats or SolverStats(objective=sol.objective)
    status = SolveStatus(sol.status)
    if status != SolveStatus.OPTIMAL:
        logger.info("[EXTRACT] %s at alpha=%.4g: %s", s.name, s.alpha, status.value)
        return SizingResult(scenario=s.name, alpha=s.alpha, status=status, solver=stats)

    x = _clamped(x)
    cfg = s.config
    layout = lp.layout or VariableLayout.from_scenario(s)
    demand = cfg.demand
    T = s.horizon

    def series(sl: slice, unit: Unit = Unit.MW) -> TimeSeries:
        return demand.with_values(x[sl], unit=unit)

    def capacity(cap_col: Optional[int], fixed: Optional[float]) -> float:
        return float(fixed) if cap_col is None else float(x[cap_col])

    plants: Dict[str, PlantDispatch] = {}
    capacities: Dict[str, float] = {}
    curtailment: Dict[str, TimeSeries] = {}
    notes: List[str] = []

    for i, plant in enumerate(cfg.conventional):
        plants[plant.name] = PlantDispatch(
            kind=PlantKind.CONVENTIONAL,
            technology=plant.technology.value,
            generation=series(layout.conventional_dispatch(i)),
        )
        capacities[plant.name] = plant.installed_capacity

    for j, plant in enumerate(cfg.renewables):
        g = capacity(layout.renewable_capacity(j), plant.fixed_capacity)
        sl = layout.renewable_dispatch(j)
        plants[plant.name] = PlantDispatch(
            kind=PlantKind.VARIABLE_RENEWABLE,
            technology=plant.technology.value,
            generation=series(sl),
        )
        capacities[plant.name] = g
        spilled = np.maximum(plant.availability.as_array() * g - x[sl], 0.0)
        curtailment[plant.name] = demand.with_values(spilled)

    for k, plant in enumerate(cfg.hydro):
        capacities[plant.name] = capacity(layout.hydro_capacity(k), plant.fixed_capacity)
        plants[plant.name] = PlantDispatch(
            kind=PlantKind.PUMPED_STORAGE,
            technology="hydro",
            generation=series(layout.hydro_generation(k)),
            pumping=series(layout.hydro_pumping(k)),
            storage=series(layout.hydro_level(k), Unit.MWH),
        )

    for l, plant in enumerate(cfg.solar_thermal):
        g = capacity(layout.solar_capacity(l), plant.fixed_capacity)
        profile: ThermalProfile = build_thermal_profile(plant)
        sl = layout.solar_absorption(l)
        capacities[plant.name] = g
        plants[plant.name] = PlantDispatch(
            kind=PlantKind.SOLAR_THERMAL,
            technology="solar_thermal",
            generation=series(layout.solar_dispatch(l)),
            absorption=series(sl),
            storage=series(layout.solar_level(l), Unit.MWH),
        )
        spilled = np.maximum(profile.max_thermal.as_array() * g - x[sl], 0.0)
        curtailment[plant.name] = demand.with_values(spilled)
        if profile.assumed_normal_incidence:
            notes.append(f"{plant.name}: incidence angle not given, K = 1 assumed")

    dispatch = Dispatch(plants=plants, capacities=capacities)
    cost = annual_cost(dispatch, s)
    objective = float(lp.objective @ x)
    if abs(cost.total - objective) > COST_AGREEMENT_TOL * max(1.0, abs(objective)):
        raise ConsistencyError(f"recomputed cost {cost.total:.9g} differs from LP objective {objective:.9g}")

    try:
        share: Optional[float] = renewable_share(dispatch, demand)
    except ZeroDivisionError:
        share = None
        notes.append("total demand is zero, renewable share undefined")

    logger.info(
        "[EXTRACT] %s at alpha=%.4g: cost %.6g, share %s, T=%d",
        s.name, s.alpha, cost.total, "n/a" if share is None else f"{share:.4f}", T,
    )
    return SizingResult(
        scenario=s.name,
        alpha=s.alpha,
        status=status,
        capacities=capacities,
        dispatch=dispatch,
        demand=demand,
        curtailment=curtailment,
        cost=cost,
        achieved_share=share,
        solver=stats,
        notes=notes,
    )


def constraint_residuals(lp: LpProblem, x: np.ndarray) -> float:
    """Largest relative row violation of x in lp (equalities and inequalities)."""
    eq, ub = lp.row_violations(x)
    return max(eq, ub)
