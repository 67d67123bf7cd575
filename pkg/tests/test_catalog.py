"""
Tests for the technology catalog and cost conversions.
"""

import pytest

from app.core.catalog import (
    capex_per_mw,
    emission_factor,
    get_catalog,
    opex_per_mwh_from_fixed,
    technology,
)
from app.core.errors import DomainError


def test_catalog_codes():
    catalog = get_catalog()
    assert {"PV", "ST", "W", "PS-HPP", "CF-TPS", "CC-TPS"} <= set(catalog)
    assert catalog["ST"].capex_per_kw.low == 7221


def test_lookup_by_dispatch_key():
    assert technology("wind").code == "W"
    assert technology("solar_thermal").code == "ST"
    with pytest.raises(KeyError):
        technology("fusion")


def test_capex_per_mw():
    assert capex_per_mw("PV") == pytest.approx(1_313_000.0)
    assert capex_per_mw("W", "low") == pytest.approx(1_265_000.0)
    assert capex_per_mw("W", "high") == pytest.approx(4_375_000.0)


def test_fixed_opex_conversion():
    # 15.25 $/kW-year at a 20% capacity factor
    assert opex_per_mwh_from_fixed(15.25, 0.2) == pytest.approx(15250.0 / 1752.0)
    with pytest.raises(DomainError):
        opex_per_mwh_from_fixed(15.25, 0.0)


def test_emission_factors():
    assert emission_factor("coal") == pytest.approx(0.9875)
    assert emission_factor("coal", "high") == pytest.approx(1.125)
    assert emission_factor("other") is None
