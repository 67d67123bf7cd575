"""Geometric-mean equilibration of an LpProblem.

Row and column factors are rounded to powers of two, so scaling and
unscaling a vector is exact in floating point.
"""

import logging
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp

from app.config import get_settings
from app.core.lp import LpProblem

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScalingRecord:
    """Factors such that A' = R A C, b' = R b, c' = sigma C c, x = C x'."""

    row_eq: np.ndarray
    row_ub: np.ndarray
    col: np.ndarray
    objective_scale: float

    def unscale_primal(self, x_scaled: np.ndarray) -> np.ndarray:
        return np.asarray(x_scaled, dtype=float) * self.col

    def scale_primal(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float) / self.col

    def unscale_duals(self, y_eq: np.ndarray, y_ub: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return (
            np.asarray(y_eq, dtype=float) * self.row_eq / self.objective_scale,
            np.asarray(y_ub, dtype=float) * self.row_ub / self.objective_scale,
        )

    def unscale_objective(self, value: float) -> float:
        return value / self.objective_scale


def _power_of_two(factors: np.ndarray) -> np.ndarray:
    return np.exp2(np.round(np.log2(factors)))


def _geometric_factors(a: sp.spmatrix, axis: int) -> np.ndarray:
    """1 / sqrt(max |a| * min |a|) along axis, 1 for empty lines."""
    a = abs(sp.csr_matrix(a) if axis == 1 else sp.csc_matrix(a))
    size = a.shape[0] if axis == 1 else a.shape[1]
    if a.nnz == 0:
        return np.ones(size)
    big = np.asarray(a.max(axis=axis).todense()).ravel()
    inv = a.copy()
    inv.data = 1.0 / inv.data
    small_inv = np.asarray(inv.max(axis=axis).todense()).ravel()
    factors = np.ones(size)
    nonempty = big > 0
    factors[nonempty] = 1.0 / np.sqrt(big[nonempty] / small_inv[nonempty])
    return _power_of_two(factors)


def scale_problem(lp: LpProblem, passes: Optional[int] = None) -> Tuple[LpProblem, ScalingRecord]:
    """Equilibrate rows and columns of lp.

    Each pass scales columns, then rows, by the inverse geometric mean of
    their largest and smallest magnitudes. The objective is scaled last so
    that its largest coefficient lies near 1.

    Args:
        lp: Problem to scale
        passes: Number of column/row passes (default SCALING_PASSES)

    Returns:
        Scaled problem and the record needed to map solutions back
    """
    passes = get_settings().SCALING_PASSES if passes is None else passes
    m_eq = lp.num_eq
    a = sp.vstack([lp.a_eq, lp.a_ub], format="csr") if lp.num_eq + lp.num_ub else sp.csr_matrix((0, lp.num_vars))
    rows = np.ones(a.shape[0])
    cols = np.ones(lp.num_vars)

    for _ in range(max(passes, 0) if a.nnz else 0):
        cf = _geometric_factors(a, axis=0)
        a = sp.csr_matrix(a @ sp.diags(cf))
        cols *= cf
        rf = _geometric_factors(a, axis=1)
        a = sp.csr_matrix(sp.diags(rf) @ a)
        rows *= rf

    c = lp.objective * cols
    peak = float(np.max(np.abs(c))) if c.size else 0.0
    sigma = float(_power_of_two(np.array([1.0 / peak]))[0]) if peak > 0 else 1.0

    record = ScalingRecord(row_eq=rows[:m_eq], row_ub=rows[m_eq:], col=cols, objective_scale=sigma)
    scaled = replace(
        lp,
        objective=c * sigma,
        a_eq=sp.csr_matrix(a[:m_eq]),
        b_eq=lp.b_eq * record.row_eq,
        a_ub=sp.csr_matrix(a[m_eq:]),
        b_ub=lp.b_ub * record.row_ub,
        lower=lp.lower / cols,
        upper=lp.upper / cols,
    )
    if cols.size:
        logger.info(
            "[SCALE] %s: column factors in [%.3g, %.3g], objective scale %.3g",
            lp.name, cols.min(), cols.max(), sigma,
        )
    return scaled, record
