"""Technology catalog: technical characteristics, costs and emission factors.

Figures are the literature ranges used to parameterize the bundled
scenarios. Costs are in $ per kW (CAPEX) and $ per kW-year (OPEX); LCOE in
$ per kWh; emissions in g CO2-eq per kWh. Single values are stored as a
range with equal ends.
"""

from functools import lru_cache
from typing import Dict, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.core.errors import DomainError

HOURS_PER_YEAR = 8760.0


class Range(BaseModel):
    model_config = ConfigDict(frozen=True)

    low: float
    high: float

    @property
    def mid(self) -> float:
        return 0.5 * (self.low + self.high)

    def pick(self, which: Literal["low", "mid", "high"] = "mid") -> float:
        return self.mid if which == "mid" else getattr(self, which)


def _r(low: float, high: Optional[float] = None) -> Range:
    return Range(low=low, high=low if high is None else high)


class TechnologyProfile(BaseModel):
    """One technology's characteristics."""

    model_config = ConfigDict(frozen=True)

    code: str
    name: str
    response_time: str
    inherent_storage: str
    controllability: int = Field(..., ge=1, le=5)
    dispatchability: int = Field(..., ge=1, le=5)
    generator: str
    lcoe_per_kwh: Range
    capex_per_kw: Range
    opex_per_kw_year: Range
    fuel_cost: str
    co2_g_per_kwh: Range
    notes: str = ""


_PROFILES = [
    TechnologyProfile(
        code="PV", name="solar photovoltaic", response_time="100 ms - 5 s", inherent_storage="0",
        controllability=1, dispatchability=1, generator="PE",
        lcoe_per_kwh=_r(0.029, 0.042), capex_per_kw=_r(1313), opex_per_kw_year=_r(15.25),
        fuel_cost="0", co2_g_per_kwh=_r(18, 180),
    ),
    TechnologyProfile(
        code="ST", name="solar thermal", response_time="15 min - 4 h", inherent_storage="0 - 24 h",
        controllability=2, dispatchability=3, generator="SG",
        lcoe_per_kwh=_r(0.126, 0.156), capex_per_kw=_r(7221), opex_per_kw_year=_r(85.40),
        fuel_cost="0", co2_g_per_kwh=_r(9, 63),
        notes="ramping 6% of full load/min, hot start-up 2.5 h",
    ),
    TechnologyProfile(
        code="W", name="wind", response_time="0.5 ms - 1 s", inherent_storage="0",
        controllability=1, dispatchability=2, generator="SG/IG+PE",
        lcoe_per_kwh=_r(0.026, 0.086), capex_per_kw=_r(1265, 4375), opex_per_kw_year=_r(26.34, 110),
        fuel_cost="0", co2_g_per_kwh=_r(8, 40),
        notes="LCOE 0.026-0.054 onshore, 0.086 offshore",
    ),
    TechnologyProfile(
        code="HYD", name="hydropower", response_time="2 - 5 min", inherent_storage="4 - 16 h",
        controllability=3, dispatchability=4, generator="SG",
        lcoe_per_kwh=_r(0.0473), capex_per_kw=_r(5316), opex_per_kw_year=_r(29.86),
        fuel_cost="0", co2_g_per_kwh=_r(2, 200),
    ),
    TechnologyProfile(
        code="BIO", name="biomass", response_time="10 min - 6 h", inherent_storage="weeks",
        controllability=4, dispatchability=4, generator="SG",
        lcoe_per_kwh=_r(0.0656), capex_per_kw=_r(4097), opex_per_kw_year=_r(27.47),
        fuel_cost="20-50% of LCOE", co2_g_per_kwh=_r(50, 400),
        notes="ramping 8% of full load/min, hot start-up 3 h",
    ),
    TechnologyProfile(
        code="CF-TPS", name="coal-fired thermal power station", response_time="80 min - 8 h",
        inherent_storage="months", controllability=5, dispatchability=4, generator="SG",
        lcoe_per_kwh=_r(0.065, 0.159), capex_per_kw=_r(3676, 5876), opex_per_kw_year=_r(40.58, 59.54),
        fuel_cost="42.47 $/t", co2_g_per_kwh=_r(850, 1125),
    ),
    TechnologyProfile(
        code="CC-TPS", name="combined-cycle thermal power station", response_time="5 min - 3 h",
        inherent_storage="months", controllability=5, dispatchability=4, generator="SG",
        lcoe_per_kwh=_r(0.044, 0.073), capex_per_kw=_r(958, 2481), opex_per_kw_year=_r(12.20, 27.60),
        fuel_cost="0.106 $/m3", co2_g_per_kwh=_r(450, 525),
    ),
    TechnologyProfile(
        code="N-TPS", name="nuclear thermal power station", response_time="~24 h",
        inherent_storage="18 - 24 months", controllability=5, dispatchability=4, generator="SG",
        lcoe_per_kwh=_r(0.129, 0.198), capex_per_kw=_r(6041, 6191), opex_per_kw_year=_r(95.00, 125.72),
        fuel_cost="3-5 EUR/MWh", co2_g_per_kwh=_r(15, 30),
    ),
    TechnologyProfile(
        code="PS-HPP", name="pumped-storage hydropower plant", response_time="2 - 5 min",
        inherent_storage="4 - 16 h", controllability=3, dispatchability=5, generator="SG",
        lcoe_per_kwh=_r(0.0473), capex_per_kw=_r(5316), opex_per_kw_year=_r(29.86),
        fuel_cost="0", co2_g_per_kwh=_r(2, 200),
    ),
    TechnologyProfile(
        code="GEO", name="geothermal", response_time="30 s - 2 min", inherent_storage="inf",
        controllability=5, dispatchability=4, generator="SG",
        lcoe_per_kwh=_r(0.059, 0.101), capex_per_kw=_r(2521), opex_per_kw_year=_r(129.70),
        fuel_cost="0", co2_g_per_kwh=_r(50),
    ),
]

# Dispatch technology keys -> catalog codes ("other" has no entry)
TECHNOLOGY_CODES: Dict[str, str] = {
    "pv": "PV",
    "wind": "W",
    "solar_thermal": "ST",
    "hydro": "PS-HPP",
    "coal": "CF-TPS",
    "combined_cycle": "CC-TPS",
    "nuclear": "N-TPS",
}


@lru_cache()
def get_catalog() -> Dict[str, TechnologyProfile]:
    """Catalog keyed by technology code."""
    return {p.code: p for p in _PROFILES}


def technology(code: str) -> TechnologyProfile:
    """Look up a technology by catalog code or dispatch technology key.

    Raises:
        KeyError: If the code is unknown
    """
    catalog = get_catalog()
    code = TECHNOLOGY_CODES.get(code, code)
    if code not in catalog:
        raise KeyError(f"unknown technology {code!r}")
    return catalog[code]


def capex_per_mw(code: str, which: Literal["low", "mid", "high"] = "mid") -> float:
    """CAPEX in $ per MW."""
    return technology(code).capex_per_kw.pick(which) * 1000.0


def opex_per_mwh_from_fixed(opex_per_kw_year: float, capacity_factor: float) -> float:
    """Convert a fixed OPEX ($/kW-year) into a variable one ($/MWh).

    Args:
        opex_per_kw_year: Fixed operating cost
        capacity_factor: Expected annual capacity factor in (0, 1]

    Raises:
        DomainError: If capacity_factor is outside (0, 1]
    """
    if not (0.0 < capacity_factor <= 1.0):
        raise DomainError(f"capacity factor {capacity_factor} outside (0, 1]")
    return opex_per_kw_year * 1000.0 / (HOURS_PER_YEAR * capacity_factor)


def emission_factor(key: str, which: Literal["low", "mid", "high"] = "mid") -> Optional[float]:
    """Emission factor in t CO2-eq per MWh for a dispatch technology key, None if unknown."""
    code = TECHNOLOGY_CODES.get(key)
    if code is None:
        return None
    return get_catalog()[code].co2_g_per_kwh.pick(which) / 1000.0
