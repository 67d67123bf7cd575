"""API routes for the RES sizing service."""

from typing import Dict, List, Optional

from fastapi import APIRouter, HTTPException
from pydantic import BaseModel, Field

from app.core.catalog import get_catalog
from app.core.errors import (
    ConfigError,
    ConsistencyError,
    DomainError,
    GridMismatchError,
    ParseError,
    RangeError,
    SolverError,
    UnboundedDomainError,
)
from app.core.pipeline import get_pipeline
from app.core.scenario import CostBreakdown, ValidatedScenario, validate_scenario
from app.core.solver import SolverOptions
from app.ingestion.loaders import read_scenario, resample_scenario
from app.ingestion.writers import write_results
from app.reporting.mix import estimate_emissions
from app.reporting.sweep import SweepRow, alpha_grid, normalize_costs, sweep_alpha


router = APIRouter(prefix="/api", tags=["RES sizing"])

INPUT_ERRORS = (ConfigError, ParseError, RangeError, DomainError, UnboundedDomainError, GridMismatchError)
SOLVER_ERRORS = (SolverError, ConsistencyError)


# ============== Request/Response Models ==============

class ScenarioRequest(BaseModel):
    """Scenario file on the server plus optional resampling."""
    scenario_path: str = Field(..., description="Path of the scenario JSON on the server", min_length=1)
    resample: int = Field(default=1, description="Average every N steps", ge=1)


class ValidateResponse(BaseModel):
    name: str
    horizon: int
    step_hours: float
    alpha: float
    plants: Dict[str, List[str]]


class SolveRequest(ScenarioRequest):
    """Request model for a single solve."""
    alpha: Optional[float] = Field(None, description="Override the scenario's alpha", ge=0.0, le=1.0)
    backend: Optional[str] = Field(None, description="simplex or highs", pattern="^(simplex|highs)$")
    out_dir: Optional[str] = Field(None, description="Write result files to this directory")


class SolveResponse(BaseModel):
    scenario: str
    alpha: float
    status: str
    capacities: Dict[str, float]
    cost: Optional[CostBreakdown]
    achieved_share: Optional[float]
    emissions_t: Dict[str, float]
    iterations: int
    notes: List[str]


class SweepRequest(ScenarioRequest):
    """Request model for an alpha sweep."""
    alpha_start: float = Field(..., ge=0.0, le=1.0)
    alpha_end: float = Field(..., ge=0.0, le=1.0)
    alpha_step: float = Field(..., gt=0.0)
    near_one: bool = Field(default=False, description="Add 0.99 and 0.999 to the grid")
    base_path: Optional[str] = Field(None, description="Base-case scenario for normalized costs")
    jobs: Optional[int] = Field(None, ge=1)


class SweepResponse(BaseModel):
    scenario: str
    plants: List[str]
    rows: List[SweepRow]


def _load(request: ScenarioRequest, path: Optional[str] = None, alpha: Optional[float] = None) -> ValidatedScenario:
    cfg = read_scenario(path or request.scenario_path)
    if request.resample > 1:
        cfg = resample_scenario(cfg, request.resample)
    if alpha is not None:
        cfg = cfg.model_copy(update={"alpha": alpha})
    return validate_scenario(cfg)


# ============== Sizing Endpoints ==============

@router.post("/validate", response_model=ValidateResponse)
def validate(request: ScenarioRequest):
    """
    Load and validate a scenario without solving it.
    """
    try:
        s = _load(request)
    except INPUT_ERRORS as e:
        raise HTTPException(status_code=422, detail=str(e))
    cfg = s.config
    plants = {
        group: [p.name for p in getattr(cfg, group)]
        for group in ("conventional", "renewables", "hydro", "solar_thermal")
    }
    return ValidateResponse(
        name=s.name, horizon=s.horizon, step_hours=s.step_hours, alpha=s.alpha, plants=plants
    )


@router.post("/solve", response_model=SolveResponse)
def solve(request: SolveRequest):
    """
    Size one scenario. Infeasible scenarios return 200 with their status.
    """
    try:
        s = _load(request, alpha=request.alpha)
        options = SolverOptions.from_settings(backend=request.backend)
        result = get_pipeline(options, verbose=False).run(s)
    except INPUT_ERRORS as e:
        raise HTTPException(status_code=422, detail=str(e))
    except SOLVER_ERRORS as e:
        raise HTTPException(status_code=500, detail=f"solver failure: {e}")

    if request.out_dir:
        try:
            write_results(result, request.out_dir)
        except Exception as e:
            raise HTTPException(status_code=500, detail=str(e))

    return SolveResponse(
        scenario=result.scenario,
        alpha=result.alpha,
        status=result.status.value,
        capacities=result.capacities,
        cost=result.cost,
        achieved_share=result.achieved_share,
        emissions_t=estimate_emissions(result),
        iterations=result.solver.iterations,
        notes=result.notes,
    )


@router.post("/sweep", response_model=SweepResponse)
def sweep(request: SweepRequest):
    """
    Solve a scenario over an alpha grid, optionally normalized against a base case.
    """
    try:
        alphas = alpha_grid(request.alpha_start, request.alpha_end, request.alpha_step, request.near_one)
        report = sweep_alpha(_load(request), alphas, jobs=request.jobs)
        if request.base_path:
            base = sweep_alpha(_load(request, path=request.base_path), alphas, jobs=request.jobs)
            report = normalize_costs(report, base)
    except INPUT_ERRORS as e:
        raise HTTPException(status_code=422, detail=str(e))
    except ZeroDivisionError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))
    return SweepResponse(scenario=report.scenario, plants=report.plants, rows=report.rows)


# ============== Catalog & Health Endpoints ==============

@router.get("/catalog")
async def catalog():
    """
    Technology catalog: technical characteristics, costs and emissions.
    """
    return {"technologies": [p.model_dump() for p in get_catalog().values()]}


@router.get("/health")
async def health_check():
    """
    Health check endpoint.
    """
    return {"status": "healthy", "service": "RES sizing"}
