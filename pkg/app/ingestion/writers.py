"""Writers for series CSVs, scenario JSON, result sets and report tables."""

import json
import logging
import os
from pathlib import Path
from typing import Dict, List, Union

import numpy as np
import pandas as pd

from app.core.errors import IoError
from app.core.formulation import SizingResult
from app.core.scenario import Dispatch, ScenarioConfig, TimeSeries
from app.ingestion.loaders import (
    PUMP_SUFFIX,
    SOC_SUFFIX,
    THERMAL_SUFFIX,
    BusEntry,
    ConventionalEntry,
    HydroEntry,
    OptionsEntry,
    RenewableEntry,
    ScenarioDocument,
    SolarThermalEntry,
)

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

FLOAT_FORMAT = "%.9g"
TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M:%SZ"


def _timestamps(ts: TimeSeries) -> List[str]:
    return list(ts.timestamps().strftime(TIMESTAMP_FORMAT))


def _atomic_write(path: Path, text: str) -> None:
    """Write through a temporary file and rename (last writer wins)."""
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f".{path.name}.{os.getpid()}.tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _write(path: PathLike, text: str) -> Path:
    path = Path(path)
    try:
        _atomic_write(path, text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    return path


def _csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


# ============== Series and scenarios ==============

def write_timeseries_csv(ts: TimeSeries, path: PathLike) -> Path:
    """Write a series as ``timestamp,value`` with 9 significant digits.

    Raises:
        IoError: If the file cannot be written
    """
    frame = pd.DataFrame({"timestamp": _timestamps(ts), "value": ts.as_array()})
    return _write(path, _csv(frame))


def scenario_document(cfg: ScenarioConfig, series_paths: Dict[str, str]) -> ScenarioDocument:
    """On-disk document for cfg, given relative CSV paths keyed by series id."""
    return ScenarioDocument(
        name=cfg.name,
        alpha=cfg.alpha,
        demand_csv=series_paths["demand"],
        conventional=[
            ConventionalEntry(
                name=p.name, capacity_mw=p.installed_capacity, opex_per_mwh=p.opex, technology=p.technology
            )
            for p in cfg.conventional
        ],
        renewables=[
            RenewableEntry(
                name=p.name,
                technology=p.technology.value,
                availability_csv=series_paths[f"{p.name}.availability"],
                capex_per_mw=p.capex,
                opex_per_mwh=p.opex,
                fixed_capacity_mw=p.fixed_capacity,
            )
            for p in cfg.renewables
        ],
        hydro=[
            HydroEntry(
                name=p.name,
                fixed_capacity_mw=p.fixed_capacity,
                storage_hours=p.storage_hours,
                eta_pump=p.eta_pump,
                eta_turbine=p.eta_turbine,
                initial_fill=p.initial_fill,
                capex_per_mw=p.capex,
                opex_per_mwh=p.opex,
            )
            for p in cfg.hydro
        ],
        solar_thermal=[
            SolarThermalEntry(
                name=p.name,
                irradiance_csv=series_paths[f"{p.name}.irradiance"],
                incidence_angle_csv=series_paths.get(f"{p.name}.incidence_angle"),
                field_ratio_m2_per_kwe=p.field_ratio,
                eta_optical_peak=p.eta_optical_peak,
                eta_factor=p.eta_factor,
                eta_thermoelectric=p.eta_thermoelectric,
                storage_hours=p.storage_hours,
                fixed_capacity_mw=p.fixed_capacity,
                initial_fill=p.initial_fill,
                capex_per_mw=p.capex,
                opex_per_mwh=p.opex,
            )
            for p in cfg.solar_thermal
        ],
        options=OptionsEntry(
            capex_annualization=cfg.capex_annualization,
            enforce_cyclic_storage=cfg.enforce_cyclic_storage,
            assume_normal_incidence=cfg.assume_normal_incidence,
        ),
        bus_allocation={
            plant: [BusEntry(bus=s.bus, weight=s.weight) for s in shares]
            for plant, shares in cfg.bus_allocation.items()
        },
    )


def write_scenario(cfg: ScenarioConfig, path: PathLike, series_dir: str = "series") -> Path:
    """Write cfg as scenario JSON plus one CSV per series.

    Series go to ``<scenario dir>/<series_dir>/<plant>_<field>.csv`` and are
    referenced by relative path, so read_scenario(path) reproduces cfg.

    Raises:
        IoError: If a file cannot be written
    """
    path = Path(path)
    base = path.parent
    paths: Dict[str, str] = {}

    def put(key: str, filename: str, ts: TimeSeries) -> None:
        rel = f"{series_dir}/{filename}"
        write_timeseries_csv(ts, base / rel)
        paths[key] = rel

    put("demand", "demand.csv", cfg.demand)
    for p in cfg.renewables:
        put(f"{p.name}.availability", f"{p.name}_availability.csv", p.availability)
    for p in cfg.solar_thermal:
        put(f"{p.name}.irradiance", f"{p.name}_irradiance.csv", p.irradiance)
        if p.incidence_angle is not None:
            put(f"{p.name}.incidence_angle", f"{p.name}_incidence_angle.csv", p.incidence_angle)

    doc = scenario_document(cfg, paths)
    text = json.dumps(doc.model_dump(mode="json"), indent=2) + "\n"
    _write(path, text)
    logger.info("[WRITE] scenario %s -> %s", cfg.name, path)
    return path


# ============== Results ==============

def dispatch_frame(dispatch: Dispatch, demand: TimeSeries) -> pd.DataFrame:
    """Wide table: timestamp, demand, then per plant generation and suffixed columns."""
    if not dispatch.plants:
        return pd.DataFrame(columns=["timestamp", "demand"])
    columns: Dict[str, np.ndarray] = {"timestamp": _timestamps(demand), "demand": demand.as_array()}
    for name, plant in dispatch.plants.items():
        columns[name] = plant.generation.as_array()
        if plant.pumping is not None:
            columns[f"{name}{PUMP_SUFFIX}"] = plant.pumping.as_array()
        if plant.absorption is not None:
            columns[f"{name}{THERMAL_SUFFIX}"] = plant.absorption.as_array()
        if plant.storage is not None:
            columns[f"{name}{SOC_SUFFIX}"] = plant.storage.as_array()
    return pd.DataFrame(columns)


def sizing_document(result: SizingResult) -> dict:
    """Content of sizing.json."""
    plants = {}
    if result.dispatch is not None:
        for name, plant in result.dispatch.plants.items():
            plants[name] = {
                "kind": plant.kind.value,
                "technology": plant.technology,
                "capacity_mw": result.capacities.get(name, 0.0),
            }
    return {
        "scenario": result.scenario,
        "alpha": result.alpha,
        "status": result.status.value,
        "capacities_mw": result.capacities,
        "plants": plants,
        "cost": result.cost.model_dump() if result.cost is not None else None,
        "achieved_share": result.achieved_share,
        "solver": result.solver.model_dump(),
        "notes": result.notes,
    }


def write_results(result: SizingResult, directory: PathLike) -> List[Path]:
    """Write sizing.json and, for optimal results, dispatch.csv and curtailment.csv.

    Stale dispatch/curtailment files from an earlier run are removed when
    the result is not optimal.

    Returns:
        Paths written

    Raises:
        IoError: If the directory or a file cannot be written
    """
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {directory}: {exc}") from exc

    written = [_write(directory / "sizing.json", json.dumps(sizing_document(result), indent=2) + "\n")]
    dispatch_path = directory / "dispatch.csv"
    curtail_path = directory / "curtailment.csv"

    if not result.is_optimal or result.dispatch is None:
        for stale in (dispatch_path, curtail_path):
            stale.unlink(missing_ok=True)
        logger.info("[WRITE] %s (%s) -> %s", result.scenario, result.status.value, directory)
        return written

    written.append(_write(dispatch_path, _csv(dispatch_frame(result.dispatch, result.demand))))

    curtail = {"timestamp": _timestamps(result.demand)} if result.curtailment else {}
    for name, ts in result.curtailment.items():
        curtail[name] = ts.as_array()
    frame = pd.DataFrame(curtail) if curtail else pd.DataFrame(columns=["timestamp"])
    written.append(_write(curtail_path, _csv(frame)))

    logger.info("[WRITE] %s -> %s (%d files)", result.scenario, directory, len(written))
    return written


# ============== Report tables ==============

def write_table_csv(frame: pd.DataFrame, path: PathLike) -> Path:
    """Write a report table (index written as the first column when named)."""
    out = frame.reset_index() if frame.index.name else frame
    path = _write(path, _csv(out))
    logger.info("[WRITE] %d rows -> %s", len(frame), path)
    return path

