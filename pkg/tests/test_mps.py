"""
Tests for the free-MPS dump.
"""

import numpy as np
import pytest

from app.core.errors import IoError
from app.core.formulation import build_lp
from app.core.lp import LpProblem
from app.core.mps import mps_text, write_mps
from app.core.scenario import ConventionalPlant, ScenarioConfig, validate_scenario
from tests.conftest import ts


def _conventional_lp():
    cfg = ScenarioConfig(
        name="conv",
        demand=ts([1.0, 2.0]),
        conventional=[ConventionalPlant(name="coal", installed_capacity=5.0, opex=10.0)],
        alpha=0.0,
    )
    return build_lp(validate_scenario(cfg))


def test_sections_and_rows():
    lines = mps_text(_conventional_lp()).splitlines()
    assert lines[0] == "NAME conv"
    assert lines[-1] == "ENDATA"
    for section in ("ROWS", "COLUMNS", "RHS", "BOUNDS"):
        assert section in lines
    assert " E balance[0]" in lines
    assert " L conv_cap[coal][1]" in lines
    assert " L share" in lines


def test_columns_and_rhs():
    text = mps_text(_conventional_lp())
    assert "    gen[coal][0] COST 10\n" in text
    assert "    gen[coal][0] balance[0] 1\n" in text
    assert "    RHS balance[1] 2\n" in text
    assert "    RHS conv_cap[coal][0] 5\n" in text
    # zero right-hand sides are omitted
    assert "RHS share" not in text


def test_bounds_section():
    lp = LpProblem.from_arrays(
        c=[1.0, 1.0, 1.0, 1.0],
        a_ub=[[1.0, 1.0, 1.0, 1.0]],
        b_ub=[1.0],
        lower=[-np.inf, -np.inf, 2.0, 0.0],
        upper=[np.inf, 5.0, np.inf, 3.0],
    )
    lines = mps_text(lp).splitlines()
    assert " FR BND x0" in lines
    assert " MI BND x1" in lines
    assert " UP BND x1 5" in lines
    assert " LO BND x2 2" in lines
    assert " UP BND x3 3" in lines


def test_write_mps(tmp_path):
    path = write_mps(_conventional_lp(), tmp_path / "out" / "conv.mps")
    assert path.exists()
    assert path.read_text(encoding="utf-8").endswith("ENDATA\n")


def test_write_mps_to_directory_fails(tmp_path):
    with pytest.raises(IoError):
        write_mps(_conventional_lp(), tmp_path)


def test_sanitized_names_stay_distinct():
    cfg = ScenarioConfig(
        name="clash",
        demand=ts([1.0, 2.0]),
        conventional=[
            ConventionalPlant(name="coal plant", installed_capacity=5.0, opex=10.0),
            ConventionalPlant(name="coal_plant", installed_capacity=5.0, opex=20.0),
        ],
        alpha=0.0,
    )
    lp = build_lp(validate_scenario(cfg))
    lines = mps_text(lp).splitlines()
    columns = {line.split()[0] for line in lines[lines.index("COLUMNS") + 1:lines.index("RHS")]}
    assert len(columns) == lp.num_vars
    rows = [line.split()[1] for line in lines[lines.index("ROWS") + 1:lines.index("COLUMNS")]]
    assert len(set(rows)) == len(rows)
    assert "    gen[coal_plant][0] COST 10" in lines
    assert "    gen[coal_plant][0]_2 COST 20" in lines
