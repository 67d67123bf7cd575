"""Alpha sweeps and cost normalization.

Each sweep point is an independent build + solve of the same scenario with
a different minimum renewable share. Infeasible points stay in the report
as rows with their status; solver failures become rows with status "error".
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.config import get_settings
from app.core.errors import ConsistencyError, DomainError, GridMismatchError, SolverError
from app.core.formulation import SizingResult
from app.core.pipeline import SizingPipeline
from app.core.scenario import ValidatedScenario
from app.core.solver import SolverOptions
from app.reporting.mix import energy_by_technology

logger = logging.getLogger(__name__)

ERROR_STATUS = "error"
NEAR_ONE_ALPHAS = (0.99, 0.999)
GRID_TOLERANCE = 1e-12


class SweepRow(BaseModel):
    """Outcome of one alpha."""

    model_config = ConfigDict(frozen=True)

    alpha: float
    status: str
    total_cost: Optional[float] = None
    normalized_cost: Optional[float] = None
    capacities: Dict[str, float] = Field(default_factory=dict)
    energy_mwh: Dict[str, float] = Field(default_factory=dict)
    achieved_share: Optional[float] = None
    error: Optional[str] = None

    @property
    def is_optimal(self) -> bool:
        return self.status == "optimal"


class SweepReport(BaseModel):
    """Rows sorted by strictly increasing alpha."""

    model_config = ConfigDict(frozen=True)

    scenario: str
    plants: List[str] = Field(default_factory=list)
    rows: List[SweepRow] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_alphas(self) -> "SweepReport":
        alphas = self.alphas
        if any(b <= a for a, b in zip(alphas, alphas[1:])):
            raise ValueError("sweep alphas must be strictly increasing")
        return self

    @property
    def alphas(self) -> List[float]:
        return [row.alpha for row in self.rows]

    def technologies(self) -> List[str]:
        seen: Dict[str, None] = {}
        for row in self.rows:
            for tech in row.energy_mwh:
                seen.setdefault(tech)
        return list(seen)

    def cost_decreases(self, rtol: float = 1e-6) -> List[float]:
        """Alphas at which the optimal cost drops below the previous optimal point."""
        drops = []
        previous: Optional[float] = None
        for row in self.rows:
            if not row.is_optimal or row.total_cost is None:
                continue
            if previous is not None and row.total_cost < previous - rtol * max(1.0, abs(previous)):
                drops.append(row.alpha)
            previous = row.total_cost
        return drops

    def to_frame(self) -> pd.DataFrame:
        """Table with the sweep.csv columns.

        Columns: alpha, status, total_cost, normalized_cost, ``<plant>_mw``
        for every plant, ``<technology>_mwh`` for every technology seen.
        """
        technologies = self.technologies()
        records = []
        for row in self.rows:
            record = {
                "alpha": row.alpha,
                "status": row.status,
                "total_cost": row.total_cost,
                "normalized_cost": row.normalized_cost,
            }
            for plant in self.plants:
                record[f"{plant}_mw"] = row.capacities.get(plant)
            for tech in technologies:
                record[f"{tech}_mwh"] = row.energy_mwh.get(tech)
            records.append(record)
        columns = ["alpha", "status", "total_cost", "normalized_cost"]
        columns += [f"{p}_mw" for p in self.plants] + [f"{t}_mwh" for t in technologies]
        return pd.DataFrame(records, columns=columns)


def row_from_result(result: SizingResult) -> SweepRow:
    return SweepRow(
        alpha=result.alpha,
        status=result.status.value,
        total_cost=result.cost.total if result.cost is not None else None,
        capacities=dict(result.capacities),
        energy_mwh=energy_by_technology(result),
        achieved_share=result.achieved_share,
    )


def _solve_point(args: Tuple[ValidatedScenario, float, SolverOptions, Optional[int]]) -> SweepRow:
    """Worker: one alpha, failures turned into an error row."""
    s, alpha, options, scaling_passes = args
    pipeline = SizingPipeline(options=options, scaling_passes=scaling_passes, verbose=False)
    try:
        result = pipeline.run(s.with_alpha(alpha))
    except (SolverError, ConsistencyError) as exc:
        logger.warning("[SWEEP] %s at alpha=%.4g failed: %s", s.name, alpha, exc)
        return SweepRow(alpha=alpha, status=ERROR_STATUS, error=str(exc))
    return row_from_result(result)


def _check_alphas(alphas: Sequence[float]) -> List[float]:
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise DomainError("alpha list is empty")
    for a in alphas:
        if not (0.0 <= a <= 1.0):
            raise DomainError(f"alpha {a} outside [0, 1]")
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise DomainError("alphas must be sorted and distinct")
    return alphas


def sweep_alpha(
    s: ValidatedScenario,
    alphas: Sequence[float],
    jobs: Optional[int] = None,
    options: Optional[SolverOptions] = None,
    scaling_passes: Optional[int] = None,
) -> SweepReport:
    """Solve the scenario once per alpha.

    Args:
        s: Validated scenario (its own alpha is ignored)
        alphas: Sorted, distinct fractions in [0, 1]
        jobs: Worker processes (default SWEEP_JOBS; 1 runs serially)
        options: Solver options (default from settings)
        scaling_passes: Equilibration passes (default from settings)

    Returns:
        SweepReport with one row per alpha, infeasible and failed points included

    Raises:
        DomainError: If alphas are empty, unsorted, repeated or outside [0, 1]
    """
    alphas = _check_alphas(alphas)
    jobs = jobs or get_settings().SWEEP_JOBS
    # Callbacks do not cross process boundaries
    options = options or SolverOptions.from_settings()
    if jobs > 1:
        options = options.model_copy(update={"callback": None})

    tasks = [(s, a, options, scaling_passes) for a in alphas]
    logger.info("[SWEEP] %s: %d alphas in [%.4g, %.4g], %d job(s)", s.name, len(alphas), alphas[0], alphas[-1], jobs)
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            rows = list(pool.map(_solve_point, tasks))
    else:
        rows = [_solve_point(task) for task in tasks]

    rows.sort(key=lambda row: row.alpha)
    report = SweepReport(scenario=s.name, plants=[p.name for _, _, p in s.config.all_plants()], rows=rows)
    counts: Dict[str, int] = {}
    for row in rows:
        counts[row.status] = counts.get(row.status, 0) + 1
    logger.info("[SWEEP] %s done: %s", s.name, ", ".join(f"{k}={v}" for k, v in sorted(counts.items())))
    return report


def normalize_costs(report: SweepReport, base: SweepReport) -> SweepReport:
    """Divide each total cost by the base report's cost at the same alpha.

    Rows where either side has no cost get ``normalized_cost`` None.

    Raises:
        GridMismatchError: If the alpha grids differ
        ZeroDivisionError: If a base cost is zero where the report has a cost
    """
    mine, theirs = np.asarray(report.alphas), np.asarray(base.alphas)
    if mine.shape != theirs.shape or np.any(np.abs(mine - theirs) > GRID_TOLERANCE):
        raise GridMismatchError(f"alpha grids differ: {report.alphas} vs {base.alphas}")

    rows = []
    for row, ref in zip(report.rows, base.rows):
        ratio = None
        if row.total_cost is not None and ref.total_cost is not None:
            if ref.total_cost == 0:
                raise ZeroDivisionError(f"base cost is zero at alpha {ref.alpha}")
            ratio = row.total_cost / ref.total_cost
        rows.append(row.model_copy(update={"normalized_cost": ratio}))
    return report.model_copy(update={"rows": rows})


def alpha_grid(start: float, end: float, step: float, near_one: bool = False) -> List[float]:
    """Evenly spaced alphas from start to end inclusive.

    Args:
        start: First alpha
        end: Last alpha (included when on the grid)
        step: Positive spacing
        near_one: Also include 0.99 and 0.999 when inside [start, end]

    Raises:
        DomainError: If the bounds are outside [0, 1], reversed, or step <= 0
    """
    if step <= 0:
        raise DomainError(f"alpha step must be positive, got {step}")
    if not (0.0 <= start <= end <= 1.0):
        raise DomainError(f"alpha range [{start}, {end}] invalid")
    count = int(math.floor((end - start) / step + 1e-9)) + 1
    grid = {round(start + i * step, 10) for i in range(count)}
    if near_one:
        grid.update(a for a in NEAR_ONE_ALPHAS if start <= a <= end)
    return sorted(grid)
