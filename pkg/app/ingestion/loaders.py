"""Readers for time-series CSVs, scenario JSON and dispatch CSVs, plus resampling."""

import json
import logging
import re
from datetime import timedelta
from pathlib import Path
from typing import Dict, List, Literal, Mapping, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from app.core.errors import ConfigError, DomainError, GapError, ParseError, RangeError
from app.core.scenario import (
    BusShare,
    ConventionalPlant,
    ConventionalTechnology,
    Dispatch,
    PlantDispatch,
    PlantKind,
    PumpedStoragePlant,
    ScenarioConfig,
    SolarThermalPlant,
    TimeSeries,
    Unit,
    VariableRenewablePlant,
    first_out_of_range,
)

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

CSV_HEADER = ["timestamp", "value"]
_UTC_SUFFIX = re.compile(r"(?:Z|[+-]00:?00)$")
_PANDAS_LINE = re.compile(r"line (\d+)")

# dispatch.csv column suffixes
PUMP_SUFFIX = ".pump"
SOC_SUFFIX = ".soc"
THERMAL_SUFFIX = ".thermal"


# ============== Time series ==============

def read_timeseries_csv(path: PathLike, expected_unit: Unit) -> TimeSeries:
    """Read a ``timestamp,value`` CSV.

    Line numbers in errors count the header as line 1.

    Args:
        path: CSV file
        expected_unit: Unit attached to the series and checked against

    Returns:
        TimeSeries with the file's start and uniform step

    Raises:
        ParseError: Bad header, unparsable timestamp or value, missing field
        GapError: Timestamps not strictly increasing with a uniform step
        RangeError: A value outside the unit's range
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skip_blank_lines=False)
    except pd.errors.ParserError as exc:
        match = _PANDAS_LINE.search(str(exc))
        raise ParseError(f"{path.name}: wrong number of fields", int(match.group(1)) if match else None) from exc
    except pd.errors.EmptyDataError as exc:
        raise ParseError(f"{path.name}: empty file", 1) from exc
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path.name}: not valid UTF-8 (byte {exc.start})") from exc

    header = [str(c).strip() for c in frame.columns]
    if header != CSV_HEADER:
        raise ParseError(f"{path.name}: header must be 'timestamp,value', got {','.join(header)!r}", 1)
    if frame.empty:
        raise ParseError(f"{path.name}: no data rows", 2)

    raw_ts = frame["timestamp"].fillna("").str.strip()
    raw_values = frame["value"].fillna("").str.strip()

    missing = np.flatnonzero((raw_ts == "").to_numpy() | (raw_values == "").to_numpy())
    if missing.size:
        raise ParseError(f"{path.name}: missing field", int(missing[0]) + 2)

    not_utc = np.flatnonzero(~raw_ts.str.contains(_UTC_SUFFIX).to_numpy())
    if not_utc.size:
        i = int(not_utc[0])
        raise ParseError(f"{path.name}: timestamp {raw_ts.iloc[i]!r} is not UTC", i + 2)
    stamps = pd.to_datetime(raw_ts, utc=True, errors="coerce", format="ISO8601")
    bad = np.flatnonzero(stamps.isna().to_numpy())
    if bad.size:
        i = int(bad[0])
        raise ParseError(f"{path.name}: cannot parse timestamp {raw_ts.iloc[i]!r}", i + 2)

    values = pd.to_numeric(raw_values, errors="coerce").to_numpy(dtype=float)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        i = int(bad[0])
        raise ParseError(f"{path.name}: cannot parse value {raw_values.iloc[i]!r}", i + 2)

    step = timedelta(hours=1)
    if len(stamps) > 1:
        diffs = stamps.diff().iloc[1:].to_numpy()
        step_ns = diffs[0]
        if step_ns <= np.timedelta64(0, "ns"):
            raise GapError(f"{path.name}: timestamps not strictly increasing", 3)
        off = np.flatnonzero(diffs != step_ns)
        if off.size:
            raise GapError(f"{path.name}: non-uniform step at {raw_ts.iloc[int(off[0]) + 1]}", int(off[0]) + 3)
        step = pd.Timedelta(step_ns).to_pytimedelta()

    out = first_out_of_range(values, expected_unit)
    if out is not None:
        raise RangeError(
            f"{path.name} line {out + 2}: value {values[out]} outside the range of unit {expected_unit.value}"
        )

    ts = TimeSeries(
        start_timestamp=stamps.iloc[0].to_pydatetime(),
        step=step,
        values=values.tolist(),
        unit=expected_unit,
    )
    logger.debug("[LOAD] %s: %d rows, step %s", path.name, len(ts), step)
    return ts


def resample(ts: TimeSeries, factor: int, mode: Literal["mean", "decimate"] = "mean") -> TimeSeries:
    """Coarsen a series by an integer factor.

    A trailing remainder shorter than ``factor`` is dropped with a warning.

    Raises:
        DomainError: If factor < 1 or the series is shorter than factor
    """
    if factor < 1:
        raise DomainError(f"resample factor must be a positive integer, got {factor}")
    if factor == 1:
        return ts
    values = ts.as_array()
    blocks = len(values) // factor
    if blocks == 0:
        raise DomainError(f"series of length {len(values)} is shorter than factor {factor}")
    dropped = len(values) - blocks * factor
    if dropped:
        logger.warning("[LOAD] resample by %d drops %d trailing values", factor, dropped)
    trimmed = values[: blocks * factor]
    if mode == "mean":
        new_values = trimmed.reshape(blocks, factor).mean(axis=1)
    elif mode == "decimate":
        new_values = trimmed[::factor]
    else:
        raise DomainError(f"unknown resample mode {mode!r}")
    return ts.model_copy(update={"values": new_values.tolist(), "step": ts.step * factor})


def resample_scenario(cfg: ScenarioConfig, factor: int) -> ScenarioConfig:
    """Resample every series of a scenario by the mean."""
    if factor == 1:
        return cfg

    def plants(group: str, fields: Tuple[str, ...]) -> List[BaseModel]:
        out = []
        for plant in getattr(cfg, group):
            update = {
                f: resample(getattr(plant, f), factor)
                for f in fields
                if getattr(plant, f) is not None
            }
            out.append(plant.model_copy(update=update))
        return out

    return cfg.model_copy(
        update={
            "demand": resample(cfg.demand, factor),
            "renewables": plants("renewables", ("availability",)),
            "solar_thermal": plants("solar_thermal", ("irradiance", "incidence_angle")),
        }
    )


# ============== Scenario JSON ==============

class _Document(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ConventionalEntry(_Document):
    name: str
    capacity_mw: float
    opex_per_mwh: float
    technology: ConventionalTechnology = ConventionalTechnology.COAL


class RenewableEntry(_Document):
    name: str
    technology: Literal["pv", "wind"]
    availability_csv: str
    capex_per_mw: float
    opex_per_mwh: float
    fixed_capacity_mw: Optional[float] = None


class HydroEntry(_Document):
    name: str
    fixed_capacity_mw: Optional[float] = None
    storage_hours: float
    eta_pump: float
    eta_turbine: float
    initial_fill: float = 0.5
    capex_per_mw: float = 0.0
    opex_per_mwh: float


class SolarThermalEntry(_Document):
    name: str
    irradiance_csv: str
    incidence_angle_csv: Optional[str] = None
    field_ratio_m2_per_kwe: float
    eta_optical_peak: float
    eta_factor: float
    eta_thermoelectric: float
    storage_hours: float
    fixed_capacity_mw: Optional[float] = None
    initial_fill: float = 0.5
    capex_per_mw: float
    opex_per_mwh: float


class OptionsEntry(_Document):
    capex_annualization: float = 1.0
    enforce_cyclic_storage: bool = True
    assume_normal_incidence: bool = False


class BusEntry(_Document):
    bus: str
    weight: float


class ScenarioDocument(_Document):
    """On-disk scenario layout; series are referenced by relative CSV paths."""

    name: str
    alpha: float
    demand_csv: str
    conventional: List[ConventionalEntry] = Field(default_factory=list)
    renewables: List[RenewableEntry] = Field(default_factory=list)
    hydro: List[HydroEntry] = Field(default_factory=list)
    solar_thermal: List[SolarThermalEntry] = Field(default_factory=list)
    options: OptionsEntry = Field(default_factory=OptionsEntry)
    bus_allocation: Dict[str, List[BusEntry]] = Field(default_factory=dict)


def _pointer(loc) -> str:
    return "/" + "/".join(str(part) for part in loc)


def _load_series(base: Path, rel: str, unit: Unit, pointer: str) -> TimeSeries:
    try:
        return read_timeseries_csv(base / rel, unit)
    except FileNotFoundError as exc:
        raise ConfigError(pointer, f"file not found: {rel}") from exc
    except OSError as exc:
        raise ConfigError(pointer, f"cannot read {rel}: {exc.strerror or exc}") from exc
    except (ParseError, RangeError) as exc:
        raise ConfigError(pointer, str(exc)) from exc


def scenario_from_document(doc: ScenarioDocument, base: PathLike) -> ScenarioConfig:
    """Resolve CSV references relative to ``base`` and build a ScenarioConfig.

    Raises:
        ConfigError: If a referenced series is missing or malformed, or the
            assembled scenario does not type-check
    """
    base = Path(base)
    try:
        return ScenarioConfig(
            name=doc.name,
            alpha=doc.alpha,
            demand=_load_series(base, doc.demand_csv, Unit.MW, "/demand_csv"),
            conventional=[
                ConventionalPlant(
                    name=e.name, installed_capacity=e.capacity_mw, opex=e.opex_per_mwh, technology=e.technology
                )
                for e in doc.conventional
            ],
            renewables=[
                VariableRenewablePlant(
                    name=e.name,
                    technology=e.technology,
                    availability=_load_series(base, e.availability_csv, Unit.PER_UNIT, f"/renewables/{i}/availability_csv"),
                    capex=e.capex_per_mw,
                    opex=e.opex_per_mwh,
                    fixed_capacity=e.fixed_capacity_mw,
                )
                for i, e in enumerate(doc.renewables)
            ],
            hydro=[
                PumpedStoragePlant(
                    name=e.name,
                    fixed_capacity=e.fixed_capacity_mw,
                    storage_hours=e.storage_hours,
                    eta_pump=e.eta_pump,
                    eta_turbine=e.eta_turbine,
                    initial_fill=e.initial_fill,
                    capex=e.capex_per_mw,
                    opex=e.opex_per_mwh,
                )
                for e in doc.hydro
            ],
            solar_thermal=[
                SolarThermalPlant(
                    name=e.name,
                    fixed_capacity=e.fixed_capacity_mw,
                    irradiance=_load_series(base, e.irradiance_csv, Unit.KW_PER_M2, f"/solar_thermal/{i}/irradiance_csv"),
                    incidence_angle=(
                        _load_series(base, e.incidence_angle_csv, Unit.DEGREES, f"/solar_thermal/{i}/incidence_angle_csv")
                        if e.incidence_angle_csv
                        else None
                    ),
                    field_ratio=e.field_ratio_m2_per_kwe,
                    eta_optical_peak=e.eta_optical_peak,
                    eta_factor=e.eta_factor,
                    eta_thermoelectric=e.eta_thermoelectric,
                    storage_hours=e.storage_hours,
                    initial_fill=e.initial_fill,
                    capex=e.capex_per_mw,
                    opex=e.opex_per_mwh,
                )
                for i, e in enumerate(doc.solar_thermal)
            ],
            capex_annualization=doc.options.capex_annualization,
            enforce_cyclic_storage=doc.options.enforce_cyclic_storage,
            assume_normal_incidence=doc.options.assume_normal_incidence,
            bus_allocation={
                plant: [BusShare(bus=b.bus, weight=b.weight) for b in shares]
                for plant, shares in doc.bus_allocation.items()
            },
        )
    except ValidationError as exc:
        err = exc.errors()[0]
        raise ConfigError(_pointer(err["loc"]), err.get("msg", "invalid")) from exc


def parse_scenario(data: Mapping, base: PathLike) -> ScenarioConfig:
    """Build a ScenarioConfig from an already-decoded scenario document."""
    try:
        doc = ScenarioDocument.model_validate(data)
    except ValidationError as exc:
        err = exc.errors()[0]
        reason = "missing" if err.get("type") == "missing" else err.get("msg", "invalid")
        raise ConfigError(_pointer(err["loc"]), reason) from exc
    return scenario_from_document(doc, base)


def read_scenario(path: PathLike) -> ScenarioConfig:
    """Read a scenario JSON file; series paths resolve relative to the file.

    Defaults: initial_fill 0.5, capex_annualization 1.0,
    enforce_cyclic_storage true.

    Raises:
        ConfigError: With the JSON-pointer path of the offending field
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError("/", f"scenario file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("/", f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    except UnicodeDecodeError as exc:
        raise ConfigError("/", f"scenario file is not valid UTF-8 (byte {exc.start})") from exc
    if not isinstance(data, dict):
        raise ConfigError("/", "top level must be an object")
    cfg = parse_scenario(data, path.parent)
    logger.info("[LOAD] scenario %s from %s (T=%d)", cfg.name, path, len(cfg.demand))
    return cfg


# ============== Dispatch CSV ==============

def read_dispatch_csv(
    path: PathLike,
    plants: Optional[Mapping[str, Tuple[PlantKind, str]]] = None,
) -> Tuple[Dispatch, Optional[TimeSeries]]:
    """Read a wide dispatch CSV back into a Dispatch and the demand series.

    Args:
        path: dispatch.csv written by write_results
        plants: Optional (kind, technology) per plant, as stored in
            sizing.json. Without it, kinds are inferred from the column
            suffixes and other plants are read as conventional.

    Returns:
        (Dispatch without capacities, demand TimeSeries)

    Raises:
        ParseError: If the file is malformed
        GapError: If the timestamps are not uniform
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype={"timestamp": str})
    except pd.errors.ParserError as exc:
        match = _PANDAS_LINE.search(str(exc))
        raise ParseError(f"{path.name}: wrong number of fields", int(match.group(1)) if match else None) from exc
    if list(frame.columns[:2]) != ["timestamp", "demand"]:
        raise ParseError(f"{path.name}: first columns must be timestamp,demand", 1)
    if frame.empty:
        return Dispatch(), None

    stamps = pd.to_datetime(frame["timestamp"], utc=True, errors="coerce", format="ISO8601")
    if stamps.isna().any():
        raise ParseError(f"{path.name}: cannot parse timestamp", int(np.flatnonzero(stamps.isna())[0]) + 2)
    step = timedelta(hours=1)
    if len(stamps) > 1:
        diffs = stamps.diff().iloc[1:].to_numpy()
        off = np.flatnonzero(diffs != diffs[0])
        if diffs[0] <= np.timedelta64(0, "ns") or off.size:
            raise GapError(f"{path.name}: non-uniform timestamps", int(off[0]) + 3 if off.size else 3)
        step = pd.Timedelta(diffs[0]).to_pytimedelta()
    start = stamps.iloc[0].to_pydatetime()

    def series(column: str, unit: Unit = Unit.MW) -> TimeSeries:
        values = frame[column].to_numpy(dtype=float)
        if not np.all(np.isfinite(values)):
            raise ParseError(f"{path.name}: non-numeric value in column {column}")
        return TimeSeries(start_timestamp=start, step=step, values=values.tolist(), unit=unit)

    columns = list(frame.columns[2:])
    names = [c for c in columns if "." not in c]
    meta = dict(plants or {})
    out: Dict[str, PlantDispatch] = {}
    for name in names:
        has_pump = f"{name}{PUMP_SUFFIX}" in columns
        has_thermal = f"{name}{THERMAL_SUFFIX}" in columns
        if name in meta:
            kind, technology = meta[name]
        elif has_pump:
            kind, technology = PlantKind.PUMPED_STORAGE, "hydro"
        elif has_thermal:
            kind, technology = PlantKind.SOLAR_THERMAL, "solar_thermal"
        else:
            kind, technology = PlantKind.CONVENTIONAL, "other"
        out[name] = PlantDispatch(
            kind=kind,
            technology=technology,
            generation=series(name),
            pumping=series(f"{name}{PUMP_SUFFIX}") if has_pump else None,
            absorption=series(f"{name}{THERMAL_SUFFIX}") if has_thermal else None,
            storage=series(f"{name}{SOC_SUFFIX}", Unit.MWH) if f"{name}{SOC_SUFFIX}" in columns else None,
        )
    return Dispatch(plants=out), series("demand")


def read_results(directory: PathLike) -> Tuple[dict, Optional[Dispatch], Optional[TimeSeries]]:
    """Read sizing.json and, when present, dispatch.csv from a results directory.

    Raises:
        ParseError: If sizing.json is missing or malformed
    """
    directory = Path(directory)
    try:
        sizing = json.loads((directory / "sizing.json").read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ParseError(f"no sizing.json in {directory}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"sizing.json: {exc.msg}", exc.lineno) from exc

    dispatch_path = directory / "dispatch.csv"
    if not dispatch_path.exists():
        return sizing, None, None
    plants = {
        name: (PlantKind(info["kind"]), info["technology"])
        for name, info in sizing.get("plants", {}).items()
    }
    dispatch, demand = read_dispatch_csv(dispatch_path, plants)
    capacities = {name: info["capacity_mw"] for name, info in sizing.get("plants", {}).items()}
    return sizing, dispatch.model_copy(update={"capacities": capacities}), demand
