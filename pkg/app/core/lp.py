"""Sparse linear program container shared by the formulation and the solver."""

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from app.core.errors import DimensionError

if TYPE_CHECKING:
    from app.core.formulation import VariableLayout


class SolveStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


def _as_csr(matrix, n: int) -> sp.csr_matrix:
    if matrix is None:
        return sp.csr_matrix((0, n))
    return sp.csr_matrix(matrix, dtype=float)


@dataclass(frozen=True)
class LpProblem:
    """minimize c.x  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  lower <= x <= upper."""

    objective: np.ndarray
    a_eq: sp.csr_matrix
    b_eq: np.ndarray
    a_ub: sp.csr_matrix
    b_ub: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    layout: Optional["VariableLayout"] = None
    eq_names: Tuple[str, ...] = field(default=())
    ub_names: Tuple[str, ...] = field(default=())
    name: str = "lp"

    def __post_init__(self):
        n = self.objective.shape[0]
        if self.a_eq.shape != (self.b_eq.shape[0], n):
            raise DimensionError(f"A_eq shape {self.a_eq.shape} does not match b_eq {self.b_eq.shape} / {n} vars")
        if self.a_ub.shape != (self.b_ub.shape[0], n):
            raise DimensionError(f"A_ub shape {self.a_ub.shape} does not match b_ub {self.b_ub.shape} / {n} vars")
        if self.lower.shape != (n,) or self.upper.shape != (n,):
            raise DimensionError("bound vectors must have one entry per variable")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound exceeds upper bound")
        if not np.all(np.isfinite(self.objective)):
            raise ValueError("objective must be finite")

    @classmethod
    def from_arrays(
        cls,
        c: Sequence[float],
        a_eq=None,
        b_eq: Optional[Sequence[float]] = None,
        a_ub=None,
        b_ub: Optional[Sequence[float]] = None,
        lower: Optional[Sequence[float]] = None,
        upper: Optional[Sequence[float]] = None,
        name: str = "lp",
    ) -> "LpProblem":
        """Build a problem from dense or sparse pieces (missing parts are empty)."""
        c = np.asarray(c, dtype=float)
        n = c.shape[0]
        return cls(
            objective=c,
            a_eq=_as_csr(a_eq, n),
            b_eq=np.asarray(b_eq if b_eq is not None else [], dtype=float),
            a_ub=_as_csr(a_ub, n),
            b_ub=np.asarray(b_ub if b_ub is not None else [], dtype=float),
            lower=np.zeros(n) if lower is None else np.asarray(lower, dtype=float),
            upper=np.full(n, np.inf) if upper is None else np.asarray(upper, dtype=float),
            name=name,
        )

    @property
    def num_vars(self) -> int:
        return self.objective.shape[0]

    @property
    def num_eq(self) -> int:
        return self.a_eq.shape[0]

    @property
    def num_ub(self) -> int:
        return self.a_ub.shape[0]

    def var_names(self) -> Tuple[str, ...]:
        if self.layout is not None:
            return self.layout.var_names()
        return tuple(f"x{j}" for j in range(self.num_vars))

    def row_names(self) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
        eq = self.eq_names or tuple(f"e{i}" for i in range(self.num_eq))
        ub = self.ub_names or tuple(f"u{i}" for i in range(self.num_ub))
        return eq, ub

    def row_violations(self, x: np.ndarray) -> Tuple[float, float]:
        """Largest equality and inequality violation at x, relative to row scale.

        Each row's violation is divided by max(1, max |a_ij|, |b_i|).
        """
        x = np.asarray(x, dtype=float)

        def scale(a: sp.csr_matrix, b: np.ndarray) -> np.ndarray:
            if a.shape[0] == 0 or a.shape[1] == 0:
                row_max = np.zeros(a.shape[0])
            else:
                row_max = abs(a).max(axis=1).toarray().ravel()
            return np.maximum(1.0, np.maximum(row_max, np.abs(b)))

        eq = np.abs(self.a_eq @ x - self.b_eq) / scale(self.a_eq, self.b_eq) if self.num_eq else np.zeros(0)
        ub = np.maximum(self.a_ub @ x - self.b_ub, 0.0) / scale(self.a_ub, self.b_ub) if self.num_ub else np.zeros(0)
        return float(eq.max(initial=0.0)), float(ub.max(initial=0.0))
