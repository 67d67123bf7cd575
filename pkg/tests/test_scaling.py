"""
Tests for power-of-two equilibration of LpProblem.
"""

import numpy as np
import pytest

from app.core.formulation import build_lp
from app.core.lp import LpProblem
from app.core.pipeline import SizingPipeline
from app.core.scaling import scale_problem
from app.core.scenario import validate_scenario


def test_well_scaled_problem_keeps_factors_near_one():
    lp = LpProblem.from_arrays(c=[1.0, 1.0, 1.0], a_eq=np.diag([1.0, 2.0, 0.5]), b_eq=[1.0, 1.0, 1.0])
    _, record = scale_problem(lp, passes=3)
    assert np.all(record.col >= 0.5)
    assert np.all(record.col <= 2.0)


def test_large_column_is_scaled_down():
    lp = LpProblem.from_arrays(
        c=[1.0, 1.0],
        a_ub=[[1.0, 1e6], [2.0, 3e6]],
        b_ub=[1.0, 1.0],
    )
    scaled, record = scale_problem(lp, passes=4)
    assert 0.25e-6 <= record.col[1] <= 4e-6
    assert abs(scaled.a_ub).max() <= 4.0


def test_factors_are_powers_of_two():
    rng = np.random.default_rng(3)
    lp = LpProblem.from_arrays(
        c=rng.uniform(1, 1e4, 5),
        a_eq=rng.uniform(1e-3, 1e3, (3, 5)),
        b_eq=rng.uniform(1, 10, 3),
    )
    _, record = scale_problem(lp, passes=2)
    for factors in (record.col, record.row_eq, np.array([record.objective_scale])):
        exponents = np.log2(factors)
        assert exponents == pytest.approx(np.round(exponents))


def test_primal_scaling_is_exact():
    rng = np.random.default_rng(5)
    lp = LpProblem.from_arrays(c=np.ones(4), a_eq=rng.uniform(1e-4, 1e4, (2, 4)), b_eq=[1.0, 2.0])
    _, record = scale_problem(lp)
    x = rng.uniform(0, 100, 4)
    assert np.array_equal(record.scale_primal(record.unscale_primal(x)), x)


def test_zero_passes_is_identity():
    lp = LpProblem.from_arrays(c=[4.0, 8.0], a_ub=[[3.0, 5.0]], b_ub=[7.0])
    scaled, record = scale_problem(lp, passes=0)
    assert np.array_equal(record.col, np.ones(2))
    assert scaled.a_ub.toarray() == pytest.approx(lp.a_ub.toarray())
    assert record.unscale_objective(float(scaled.objective @ [1.0, 1.0])) == pytest.approx(12.0)


def test_scaling_does_not_change_the_optimum(make_simple):
    s = validate_scenario(make_simple([0.5, 0.3, 0.4], [0.5, 0.5, 0.8], alpha=0.75, capex=1e6, opex_renewable=0.01))
    lp = build_lp(s)
    plain = SizingPipeline(scaling_passes=0, verbose=False).solve_lp(lp)
    scaled = SizingPipeline(scaling_passes=4, verbose=False).solve_lp(lp)
    assert scaled.objective == pytest.approx(plain.objective, rel=1e-9)
    assert scaled.x == pytest.approx(plain.x, abs=1e-8)


def test_duals_are_unscaled():
    # min x1 + 2 x2  s.t.  1000 x1 + 1000 x2 >= 1000
    lp = LpProblem.from_arrays(c=[1.0, 2.0], a_ub=[[-1000.0, -1000.0]], b_ub=[-1000.0])
    plain = SizingPipeline(scaling_passes=0, verbose=False).solve_lp(lp)
    scaled = SizingPipeline(scaling_passes=3, verbose=False).solve_lp(lp)
    assert scaled.y == pytest.approx(plain.y, rel=1e-9)
    assert abs(plain.y[0]) == pytest.approx(1e-3)
