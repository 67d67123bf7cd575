"""Optional fetcher for hourly PV / wind capacity factors from renewables.ninja.

Downloads are cached as ``timestamp,value`` CSVs; callers always get the
series back by reading the cache file, so offline runs see the same data.
"""

import logging
from pathlib import Path
from typing import Literal, Optional

import numpy as np
import pandas as pd
import requests

from app.config import get_settings
from app.core.errors import AuthError, NetworkError, QuotaError, RangeError
from app.core.scenario import TimeSeries, Unit, first_out_of_range
from app.ingestion.loaders import read_timeseries_csv
from app.ingestion.writers import write_timeseries_csv

logger = logging.getLogger(__name__)

TOKEN_ENV = "RESSIZE_NINJA_TOKEN"

Technology = Literal["pv", "wind"]

# Request parameters besides location and dates; capacity 1 yields per-unit output
DEFAULT_ARGS = {
    "pv": {
        "dataset": "merra2",
        "capacity": 1.0,
        "system_loss": 0.1,
        "tracking": 0,
        "tilt": 35,
        "azim": 180,
    },
    "wind": {
        "capacity": 1.0,
        "height": 100,
        "turbine": "Vestas V90 2000",
    },
}


def cache_path(lat: float, lon: float, year: int, technology: Technology, cache_dir: Optional[str] = None) -> Path:
    base = Path(cache_dir or get_settings().RESOURCE_CACHE_DIR)
    return base / f"{technology}_{lat:.4f}_{lon:.4f}_{year}.csv"


def _request_args(lat: float, lon: float, year: int, technology: Technology) -> dict:
    return {
        "lat": lat,
        "lon": lon,
        "date_from": f"{year}-01-01",
        "date_to": f"{year}-12-31",
        "format": "json",
        "local_time": "false",
        "raw": "false",
        **DEFAULT_ARGS[technology],
    }


def _parse_payload(payload: dict, technology: Technology) -> TimeSeries:
    data = payload.get("data") if isinstance(payload, dict) else None
    if not data:
        raise NetworkError("response carries no data")
    frame = pd.DataFrame.from_dict(data, orient="index")
    if "electricity" not in frame.columns:
        raise NetworkError("response data has no 'electricity' column")
    # keys are epoch milliseconds (JSON object keys arrive as strings) or ISO dates
    millis = pd.to_numeric(pd.Series(frame.index), errors="coerce")
    if millis.notna().all():
        stamps = pd.to_datetime(millis.to_numpy(dtype=np.int64), unit="ms", utc=True)
    else:
        stamps = pd.to_datetime(frame.index, utc=True)
    frame.index = stamps
    frame = frame.sort_index()

    values = frame["electricity"].to_numpy(dtype=float) / DEFAULT_ARGS[technology]["capacity"]
    bad = first_out_of_range(values, Unit.PER_UNIT)
    if bad is not None:
        raise RangeError(f"provider returned {values[bad]} at {frame.index[bad]} outside [0, 1]")
    step = frame.index[1] - frame.index[0] if len(frame) > 1 else pd.Timedelta(hours=1)
    return TimeSeries(
        start_timestamp=frame.index[0].to_pydatetime(),
        step=step.to_pytimedelta(),
        values=values.tolist(),
        unit=Unit.PER_UNIT,
    )


def fetch_resource(
    lat: float,
    lon: float,
    year: int,
    technology: Technology,
    token: Optional[str] = None,
    cache_dir: Optional[str] = None,
    session: Optional[requests.Session] = None,
) -> TimeSeries:
    """Hourly per-unit capacity factors for one location and year.

    Args:
        lat: Latitude in degrees
        lon: Longitude in degrees
        year: Calendar year
        technology: "pv" or "wind"
        token: API token (default RESSIZE_NINJA_TOKEN)
        cache_dir: Cache directory (default RESOURCE_CACHE_DIR)
        session: requests session to reuse

    Returns:
        TimeSeries read back from the cache file

    Raises:
        AuthError: Missing or rejected token
        QuotaError: Rate limit hit
        NetworkError: Any other transport or protocol failure
        RangeError: Provider values outside [0, 1]
    """
    path = cache_path(lat, lon, year, technology, cache_dir)
    if path.exists():
        logger.info("[FETCH] cache hit %s", path)
        return read_timeseries_csv(path, Unit.PER_UNIT)

    settings = get_settings()
    token = token or settings.RESSIZE_NINJA_TOKEN
    if not token:
        raise AuthError(f"no API token: set {TOKEN_ENV}")

    s = session or requests.Session()
    # Send token header with each request
    s.headers.update({"Authorization": f"Token {token}"})
    url = settings.NINJA_API_BASE.rstrip("/") + f"/data/{technology}"
    logger.info("[FETCH] %s %s lat=%.4f lon=%.4f", technology, year, lat, lon)
    try:
        response = s.get(url, params=_request_args(lat, lon, year, technology), timeout=settings.NINJA_TIMEOUT_S)
    except requests.RequestException as exc:
        raise NetworkError(f"request to {url} failed: {exc}") from exc

    if response.status_code in (401, 403):
        raise AuthError(f"token rejected (HTTP {response.status_code}); check {TOKEN_ENV}")
    if response.status_code == 429:
        raise QuotaError("rate limit reached (HTTP 429); retry later")
    if response.status_code != 200:
        raise NetworkError(f"HTTP {response.status_code} from {url}")
    try:
        payload = response.json()
    except ValueError as exc:
        raise NetworkError(f"invalid JSON from {url}") from exc

    ts = _parse_payload(payload, technology)
    write_timeseries_csv(ts, path)
    logger.info("[FETCH] cached %d values -> %s", len(ts), path)
    return read_timeseries_csv(path, Unit.PER_UNIT)
