"""Sparse LP solver: standard-form conversion, two-phase revised simplex, KKT check.

The basis is kept as a sparse LU factorization (``scipy.sparse.linalg.splu``)
followed by product-form eta updates; it is refactorized every
``refactor_every`` pivots or after a weak pivot. Pricing is Dantzig's rule
until ``stall_window`` consecutive degenerate pivots, then Bland's rule until
the next pivot that makes progress.
"""

import logging
import time
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from pydantic import BaseModel, ConfigDict
from scipy.optimize import linprog
from scipy.sparse.linalg import splu

from app.config import Settings, get_settings
from app.core.errors import IterationLimitError, NumericalBreakdownError, UnboundedDomainError
from app.core.lp import LpProblem, SolveStatus

logger = logging.getLogger(__name__)

# Variable transforms used by StandardLp
SHIFT, MIRROR, SPLIT = 0, 1, 2
# Row origins used by StandardLp
ROW_EQ, ROW_UB, ROW_BOUND = 0, 1, 2


class SolverOptions(BaseModel):
    """Tolerances and limits for one solve."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    backend: str = "simplex"
    feas_tol: float = 1e-7
    opt_tol: float = 1e-7
    pivot_tol: float = 1e-9
    max_iters: int = 0
    stall_window: int = 50
    refactor_every: int = 100
    trace: bool = False
    callback: Optional[Callable[["SimplexIterate"], None]] = None

    @classmethod
    def from_settings(cls, settings: Optional[Settings] = None, **overrides) -> "SolverOptions":
        """Options from Settings; keyword overrides win (None values are ignored)."""
        settings = settings or get_settings()
        values = {
            "backend": settings.SOLVER_BACKEND,
            "feas_tol": settings.SOLVER_FEAS_TOL,
            "opt_tol": settings.SOLVER_OPT_TOL,
            "pivot_tol": settings.SOLVER_PIVOT_TOL,
            "max_iters": settings.SOLVER_MAX_ITERS,
            "stall_window": settings.SOLVER_STALL_WINDOW,
            "refactor_every": settings.SOLVER_REFACTOR_EVERY,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True)
class SimplexIterate:
    """One pivot as reported to a callback."""

    phase: int
    iteration: int
    entering: int
    leaving: int
    objective: float
    dual_objective: float
    bland: bool


@dataclass(frozen=True)
class LpSolution:
    """Result of a solve in the variables of the problem that was solved.

    ``status`` is None only for the best iterate attached to an
    IterationLimitError.
    """

    x: np.ndarray
    y: np.ndarray
    objective: float
    status: Optional[SolveStatus]
    iterations: int = 0
    phase_one_iterations: int = 0
    primal_residual: float = 0.0
    dual_residual: float = 0.0
    ray: Optional[np.ndarray] = None
    backend: str = "simplex"


class ResidualReport(BaseModel):
    """Optimality conditions evaluated independently of the solver."""

    primal_residual: float
    min_x: float
    min_reduced_cost: float
    complementarity: float
    duality_gap: float

    def is_optimal(self, feas_tol: float = 1e-7, opt_tol: float = 1e-7) -> bool:
        return (
            self.primal_residual <= feas_tol
            and self.min_x >= -feas_tol
            and self.min_reduced_cost >= -opt_tol
        )


# ============== Standard form ==============

@dataclass(frozen=True)
class StandardLp:
    """min c.x s.t. A x = b, x >= 0, with b >= 0, plus the map back to an LpProblem.

    Columns: structural (one per original variable, two for a free variable),
    then one slack per finite-bound row, then one slack per inequality row.
    """

    a: sp.csc_matrix
    b: np.ndarray
    c: np.ndarray
    objective_offset: float
    var_kind: np.ndarray
    var_col: np.ndarray
    var_col_minus: np.ndarray
    var_offset: np.ndarray
    num_structural: int
    row_kind: np.ndarray
    row_index: np.ndarray
    row_sign: np.ndarray
    num_orig_eq: int
    num_orig_ub: int
    bound_rows: Tuple[int, ...] = ()
    infeasible_rows: Tuple[str, ...] = ()

    @property
    def num_rows(self) -> int:
        return self.a.shape[0]

    @property
    def n(self) -> int:
        return self.a.shape[1]

    def recover(self, x_std: np.ndarray) -> np.ndarray:
        """Original variables from a standard-form vector."""
        x_std = np.asarray(x_std, dtype=float)
        plus = x_std[self.var_col]
        minus = np.where(self.var_col_minus >= 0, x_std[np.maximum(self.var_col_minus, 0)], 0.0)
        return np.where(
            self.var_kind == MIRROR,
            self.var_offset - plus,
            self.var_offset + plus - minus,
        )

    def lift(self, x: np.ndarray, lp: LpProblem) -> np.ndarray:
        """Standard-form vector (slacks included) for original variables x."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(self.n)
        structural = np.where(self.var_kind == MIRROR, self.var_offset - x, x - self.var_offset)
        split = self.var_kind == SPLIT
        out[self.var_col] = np.where(split, np.maximum(x, 0.0), structural)
        out[self.var_col_minus[split]] = np.maximum(-x[split], 0.0)
        slack_col = self.num_structural
        for j in self.bound_rows:
            out[slack_col] = lp.upper[j] - x[j]
            slack_col += 1
        if lp.num_ub:
            out[slack_col:slack_col + lp.num_ub] = lp.b_ub - lp.a_ub @ x
        return out

    def recover_duals(self, y_std: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Row duals of the original equality and inequality rows."""
        y_eq = np.zeros(self.num_orig_eq)
        y_ub = np.zeros(self.num_orig_ub)
        y = np.asarray(y_std, dtype=float) * self.row_sign
        eq = self.row_kind == ROW_EQ
        ub = self.row_kind == ROW_UB
        y_eq[self.row_index[eq]] = y[eq]
        y_ub[self.row_index[ub]] = y[ub]
        return y_eq, y_ub


def to_standard_form(lp: LpProblem, drop_tol: float = 1e-12) -> StandardLp:
    """Convert an LpProblem to equality form with non-negative variables.

    Finite lower bounds are shifted to 0; a variable with only an upper bound
    is mirrored (x = ub - x'); a free variable is split into two. A finite
    upper bound on a shifted variable becomes a row x' + s = ub - lb.
    Inequality rows gain slacks and rows with negative right-hand side are
    negated. Rows left without nonzeros are dropped when their right-hand
    side is zero and recorded in ``infeasible_rows`` otherwise.

    Raises:
        UnboundedDomainError: If a free variable appears in no row and has
            zero cost
    """
    n = lp.num_vars
    lower, upper = lp.lower, lp.upper
    used = np.zeros(n, dtype=bool)
    if lp.num_eq:
        used |= np.diff(sp.csc_matrix(lp.a_eq).indptr) > 0
    if lp.num_ub:
        used |= np.diff(sp.csc_matrix(lp.a_ub).indptr) > 0

    kind = np.full(n, SHIFT)
    col = np.zeros(n, dtype=int)
    col_minus = np.full(n, -1)
    offset = np.zeros(n)
    bound_rows: List[int] = []
    m_rows, m_cols, m_vals = [], [], []
    next_col = 0
    for j in range(n):
        lo, hi = lower[j], upper[j]
        col[j] = next_col
        m_rows.append(j)
        m_cols.append(next_col)
        if np.isfinite(lo):
            offset[j] = lo
            m_vals.append(1.0)
            if np.isfinite(hi):
                bound_rows.append(j)
        elif np.isfinite(hi):
            kind[j] = MIRROR
            offset[j] = hi
            m_vals.append(-1.0)
        else:
            if not used[j] and lp.objective[j] == 0:
                raise UnboundedDomainError(f"variable {j} is free and appears nowhere")
            kind[j] = SPLIT
            m_vals.append(1.0)
            next_col += 1
            col_minus[j] = next_col
            m_rows.append(j)
            m_cols.append(next_col)
            m_vals.append(-1.0)
        next_col += 1
    n_s = next_col
    transform = sp.csr_matrix(
        (np.asarray(m_vals, dtype=float), (np.asarray(m_rows, dtype=int), np.asarray(m_cols, dtype=int))),
        shape=(n, n_s),
    )

    n_bound = len(bound_rows)
    n_ub = lp.num_ub
    width = n_s + n_bound + n_ub

    blocks = []
    rhs = []
    kinds = []
    index = []
    if lp.num_eq:
        blocks.append(sp.hstack([lp.a_eq @ transform, sp.csr_matrix((lp.num_eq, n_bound + n_ub))]))
        rhs.append(lp.b_eq - lp.a_eq @ offset)
        kinds.append(np.full(lp.num_eq, ROW_EQ))
        index.append(np.arange(lp.num_eq))
    if n_ub:
        blocks.append(sp.hstack([lp.a_ub @ transform, sp.csr_matrix((n_ub, n_bound)), sp.identity(n_ub)]))
        rhs.append(lp.b_ub - lp.a_ub @ offset)
        kinds.append(np.full(n_ub, ROW_UB))
        index.append(np.arange(n_ub))
    if n_bound:
        br = np.asarray(bound_rows)
        pick = sp.csr_matrix((np.ones(n_bound), (np.arange(n_bound), col[br])), shape=(n_bound, n_s))
        blocks.append(sp.hstack([pick, sp.identity(n_bound), sp.csr_matrix((n_bound, n_ub))]))
        rhs.append(upper[br] - lower[br])
        kinds.append(np.full(n_bound, ROW_BOUND))
        index.append(br)

    if blocks:
        a = sp.vstack(blocks, format="csr")
        b = np.concatenate(rhs)
        row_kind = np.concatenate(kinds)
        row_index = np.concatenate(index)
    else:
        a = sp.csr_matrix((0, width))
        b = np.zeros(0)
        row_kind = np.zeros(0, dtype=int)
        row_index = np.zeros(0, dtype=int)
    a.eliminate_zeros()

    sign = np.where(b < 0, -1.0, 1.0)
    a = sp.diags(sign) @ a if a.shape[0] else a
    b = b * sign

    nnz = np.diff(sp.csr_matrix(a).indptr)
    empty = nnz == 0
    infeasible = []
    if np.any(empty):
        eq_names, ub_names = lp.row_names()
        for r in np.flatnonzero(empty & (np.abs(b) > drop_tol)):
            names = eq_names if row_kind[r] == ROW_EQ else ub_names
            infeasible.append(names[row_index[r]])
        keep = ~empty
        a = sp.csr_matrix(a)[keep]
        b = b[keep]
        row_kind = row_kind[keep]
        row_index = row_index[keep]
        sign = sign[keep]

    c = np.concatenate([transform.T @ lp.objective, np.zeros(n_bound + n_ub)])
    return StandardLp(
        a=sp.csc_matrix(a),
        b=b,
        c=c,
        objective_offset=float(lp.objective @ offset),
        var_kind=kind,
        var_col=col,
        var_col_minus=col_minus,
        var_offset=offset,
        num_structural=n_s,
        row_kind=row_kind,
        row_index=row_index,
        row_sign=sign,
        num_orig_eq=lp.num_eq,
        num_orig_ub=lp.num_ub,
        bound_rows=tuple(bound_rows),
        infeasible_rows=tuple(infeasible),
    )


# ============== Revised simplex ==============

class _Basis:
    """LU factorization of the basis matrix plus product-form eta updates."""

    def __init__(self, a: sp.csc_matrix, basis: np.ndarray):
        self.a = a
        self.basis = basis
        self.etas: List[Tuple[int, np.ndarray]] = []
        self.refactor()

    def refactor(self) -> None:
        try:
            self.lu = splu(sp.csc_matrix(self.a[:, self.basis]))
        except RuntimeError as exc:
            raise NumericalBreakdownError(f"basis is singular: {exc}") from exc
        self.etas = []

    def ftran(self, v: np.ndarray) -> np.ndarray:
        w = self.lu.solve(np.asarray(v, dtype=float))
        for r, d in self.etas:
            wr = w[r] / d[r]
            w -= wr * d
            w[r] = wr
        return w

    def btran(self, v: np.ndarray) -> np.ndarray:
        z = np.array(v, dtype=float)
        for r, d in reversed(self.etas):
            z[r] = (z[r] - (d @ z - d[r] * z[r])) / d[r]
        return self.lu.solve(z, trans="T")

    def replace(self, r: int, entering: int, d: np.ndarray) -> None:
        self.basis[r] = entering
        self.etas.append((r, d.copy()))


class _Simplex:
    """Working state of one two-phase solve. Not shared between threads."""

    def __init__(self, slp: StandardLp, opts: SolverOptions):
        self.opts = opts
        self.m, self.n = slp.a.shape
        self.b = slp.b
        self.c = slp.c
        self.iterations = 0
        self.phase_one_iterations = 0

        basis, artificial_rows = self._initial_basis(slp.a, slp.b)
        n_art = artificial_rows.size
        art = sp.csc_matrix(
            (np.ones(n_art), (artificial_rows, np.arange(n_art))), shape=(self.m, n_art)
        )
        self.a = sp.csc_matrix(sp.hstack([slp.a, art])) if n_art else slp.a
        basis[artificial_rows] = self.n + np.arange(n_art)
        self.total = self.n + n_art
        self.is_artificial = np.zeros(self.total, dtype=bool)
        self.is_artificial[self.n:] = True
        self.max_iters = opts.max_iters or 50 * (self.m + self.total)

        self.basis = _Basis(self.a, basis)
        self.x_b = self.basis.ftran(self.b)

    @staticmethod
    def _initial_basis(a: sp.csc_matrix, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Rightmost positive singleton column per row; other rows get artificials."""
        m = a.shape[0]
        basis = np.full(m, -1)
        counts = np.diff(a.indptr)
        for j in np.flatnonzero(counts == 1)[::-1]:
            r = a.indices[a.indptr[j]]
            if basis[r] < 0 and a.data[a.indptr[j]] > 0:
                basis[r] = j
        return basis, np.flatnonzero(basis < 0)

    # ---- helpers ----

    def _x(self) -> np.ndarray:
        x = np.zeros(self.total)
        x[self.basis.basis] = self.x_b
        return x

    def _refactor(self) -> None:
        self.basis.refactor()
        self.x_b = self.basis.ftran(self.b)

    def _duals(self, cost: np.ndarray) -> np.ndarray:
        return self.basis.btran(cost[self.basis.basis])

    def _price(self, d: np.ndarray, eligible: np.ndarray, bland: bool) -> int:
        candidates = np.flatnonzero(eligible & (d < -self.opts.opt_tol))
        if candidates.size == 0:
            return -1
        if bland:
            return int(candidates[0])
        return int(candidates[np.argmin(d[candidates])])

    def _ratio(self, u: np.ndarray, bland: bool, phase: int) -> int:
        tol = self.opts.pivot_tol
        basic = self.basis.basis
        rows = np.flatnonzero(u > tol)
        theta = np.maximum(self.x_b[rows], 0.0) / u[rows]
        if phase == 2:
            # artificials stuck in redundant rows must stay at zero
            stuck = np.flatnonzero(self.is_artificial[basic] & (np.abs(u) > tol) & (u <= tol))
            rows = np.concatenate([rows, stuck])
            theta = np.concatenate([theta, np.zeros(stuck.size)])
        if rows.size == 0:
            return -1
        best = theta.min()
        ties = rows[theta <= best + 1e-12 * max(1.0, best)]
        if bland:
            return int(ties[np.argmin(basic[ties])])
        return int(ties[np.argmax(np.abs(u[ties]))])

    # ---- main loop ----

    def run(self, cost: np.ndarray, phase: int, eligible: np.ndarray):
        """Pivot to optimality for cost; returns ("optimal", None) or ("unbounded", ray)."""
        opts = self.opts
        stall = 0
        bland = False
        while True:
            y = self._duals(cost)
            d = cost - self.a.T @ y
            is_basic = np.zeros(self.total, dtype=bool)
            is_basic[self.basis.basis] = True
            j = self._price(d, eligible & ~is_basic, bland)
            if j < 0:
                return "optimal", None

            column = self.a[:, [j]].toarray().ravel()
            u = self.basis.ftran(column)
            r = self._ratio(u, bland, phase)
            if r < 0:
                ray = np.zeros(self.total)
                ray[j] = 1.0
                ray[self.basis.basis] = -u
                return "unbounded", ray

            if self.iterations >= self.max_iters:
                raise IterationLimitError(
                    f"iteration limit {self.max_iters} reached in phase {phase}",
                    solution=LpSolution(
                        x=self._x()[: self.n],
                        y=y,
                        objective=float(self.c @ self._x()[: self.n]),
                        status=None,
                        iterations=self.iterations,
                        phase_one_iterations=self.phase_one_iterations,
                    ),
                )

            theta = max(self.x_b[r], 0.0) / u[r]
            leaving = int(self.basis.basis[r])
            self.x_b = self.x_b - theta * u
            self.x_b[r] = theta
            self.basis.replace(r, j, u)
            self.iterations += 1
            if phase == 1:
                self.phase_one_iterations += 1

            if theta <= opts.feas_tol:
                stall += 1
                if not bland and stall >= opts.stall_window:
                    bland = True
                    logger.debug("[SOLVE] %d degenerate pivots, switching to Bland's rule", stall)
            else:
                stall = 0
                bland = False

            weak = abs(u[r]) < 1e-7 * max(1.0, float(np.max(np.abs(u))))
            if weak or len(self.basis.etas) >= opts.refactor_every:
                self._refactor()

            if opts.trace or opts.callback is not None:
                objective = float(cost[self.basis.basis] @ self.x_b)
                dual_objective = float(self.b @ self._duals(cost)) if opts.callback is not None else objective
                if opts.trace:
                    logger.debug(
                        "[SOLVE] phase %d it %d enter %d leave %d theta %.3g obj %.12g%s",
                        phase, self.iterations, j, leaving, theta, objective, " bland" if bland else "",
                    )
                if opts.callback is not None:
                    opts.callback(SimplexIterate(phase, self.iterations, j, leaving, objective, dual_objective, bland))

    def drive_out_artificials(self) -> None:
        """Pivot basic artificials out on any usable structural column."""
        tol = self.opts.pivot_tol
        for r in range(self.m):
            if not self.is_artificial[self.basis.basis[r]]:
                continue
            e = np.zeros(self.m)
            e[r] = 1.0
            rho = self.basis.btran(e)
            alpha = self.a.T @ rho
            is_basic = np.zeros(self.total, dtype=bool)
            is_basic[self.basis.basis] = True
            usable = np.flatnonzero(~is_basic & ~self.is_artificial & (np.abs(alpha) > tol))
            if usable.size == 0:
                continue  # redundant row
            j = int(usable[np.argmax(np.abs(alpha[usable]))])
            u = self.basis.ftran(self.a[:, [j]].toarray().ravel())
            theta = self.x_b[r] / u[r]
            self.x_b = self.x_b - theta * u
            self.x_b[r] = theta
            self.basis.replace(r, j, u)
            if len(self.basis.etas) >= self.opts.refactor_every:
                self._refactor()
        self._refactor()


def _simplex(slp: StandardLp, opts: SolverOptions) -> LpSolution:
    m, n = slp.a.shape
    if slp.infeasible_rows:
        logger.info("[SOLVE] empty rows with nonzero right-hand side: %s", ", ".join(slp.infeasible_rows[:5]))
        return LpSolution(x=np.zeros(n), y=np.zeros(m), objective=0.0, status=SolveStatus.INFEASIBLE)
    if m == 0:
        if np.any(slp.c < -opts.opt_tol):
            ray = (slp.c < -opts.opt_tol).astype(float)
            return LpSolution(x=np.zeros(n), y=np.zeros(0), objective=0.0, status=SolveStatus.UNBOUNDED, ray=ray)
        return LpSolution(x=np.zeros(n), y=np.zeros(0), objective=0.0, status=SolveStatus.OPTIMAL)

    state = _Simplex(slp, opts)
    eligible_all = np.ones(state.total, dtype=bool)

    if state.is_artificial.any():
        phase_one_cost = state.is_artificial.astype(float)
        state.run(phase_one_cost, phase=1, eligible=eligible_all)
        infeasibility = float(np.sum(state._x()[state.is_artificial]))
        if infeasibility > opts.feas_tol * max(1.0, float(np.max(np.abs(slp.b), initial=0.0))):
            logger.info("[SOLVE] phase 1 ended with infeasibility %.3g", infeasibility)
            y = state._duals(phase_one_cost)
            return LpSolution(
                x=state._x()[:n],
                y=y,
                objective=infeasibility,
                status=SolveStatus.INFEASIBLE,
                iterations=state.iterations,
                phase_one_iterations=state.phase_one_iterations,
            )
        state.drive_out_artificials()

    cost = np.concatenate([slp.c, np.zeros(state.total - n)])
    outcome, ray = state.run(cost, phase=2, eligible=~state.is_artificial)

    x = np.maximum(state._x()[:n], 0.0)
    y = state._duals(cost)
    reduced = slp.c - slp.a.T @ y
    primal = float(np.max(np.abs(slp.a @ x - slp.b), initial=0.0))
    status = SolveStatus.OPTIMAL if outcome == "optimal" else SolveStatus.UNBOUNDED
    return LpSolution(
        x=x,
        y=y,
        objective=float(slp.c @ x),
        status=status,
        iterations=state.iterations,
        phase_one_iterations=state.phase_one_iterations,
        primal_residual=primal,
        dual_residual=float(max(0.0, -np.min(reduced, initial=0.0))),
        ray=None if ray is None else ray[:n],
    )


def _highs(slp: StandardLp, opts: SolverOptions) -> LpSolution:
    m, n = slp.a.shape
    if slp.infeasible_rows:
        return LpSolution(x=np.zeros(n), y=np.zeros(m), objective=0.0, status=SolveStatus.INFEASIBLE, backend="highs")
    options = {"primal_feasibility_tolerance": opts.feas_tol, "dual_feasibility_tolerance": opts.opt_tol}
    if opts.max_iters:
        options["maxiter"] = opts.max_iters
    res = linprog(
        slp.c,
        A_eq=slp.a if m else None,
        b_eq=slp.b if m else None,
        bounds=(0, None),
        method="highs",
        options=options,
    )
    if res.status == 1:
        raise IterationLimitError(res.message)
    if res.status == 4:
        raise NumericalBreakdownError(res.message)
    if res.status in (2, 3):
        status = SolveStatus.INFEASIBLE if res.status == 2 else SolveStatus.UNBOUNDED
        return LpSolution(x=np.zeros(n), y=np.zeros(m), objective=0.0, status=status, backend="highs")
    x = np.maximum(np.asarray(res.x), 0.0)
    y = np.asarray(res.eqlin.marginals) if m else np.zeros(0)
    reduced = slp.c - slp.a.T @ y
    return LpSolution(
        x=x,
        y=y,
        objective=float(slp.c @ x),
        status=SolveStatus.OPTIMAL,
        iterations=int(getattr(res, "nit", 0)),
        primal_residual=float(np.max(np.abs(slp.a @ x - slp.b), initial=0.0)),
        dual_residual=float(max(0.0, -np.min(reduced, initial=0.0))),
        backend="highs",
    )


def solve(slp: StandardLp, opts: Optional[SolverOptions] = None) -> LpSolution:
    """Solve a standard-form LP.

    Args:
        slp: Problem from to_standard_form
        opts: Solver options (defaults from settings)

    Returns:
        LpSolution with status optimal, infeasible or unbounded. The
        objective excludes ``slp.objective_offset``.

    Raises:
        IterationLimitError: If the iteration budget runs out
        NumericalBreakdownError: If the basis cannot be factorized
    """
    opts = opts or SolverOptions.from_settings()
    started = time.perf_counter()
    if opts.backend == "highs":
        sol = _highs(slp, opts)
    else:
        sol = _simplex(slp, opts)
    logger.info(
        "[SOLVE] %s backend: %s after %d iterations (%d in phase 1), obj %.9g, %.2fs",
        sol.backend, sol.status.value, sol.iterations, sol.phase_one_iterations,
        sol.objective, time.perf_counter() - started,
    )
    return sol


def check_kkt(slp: StandardLp, sol: LpSolution) -> ResidualReport:
    """Evaluate primal feasibility, dual feasibility and complementarity of (x, y)."""
    x = np.asarray(sol.x, dtype=float)
    y = np.asarray(sol.y, dtype=float)
    a = sp.csr_matrix(slp.a)
    residual = a @ x - slp.b
    reduced = slp.c - a.T @ y
    return ResidualReport(
        primal_residual=float(np.max(np.abs(residual), initial=0.0)),
        min_x=float(np.min(x, initial=0.0)),
        min_reduced_cost=float(np.min(reduced, initial=0.0)),
        complementarity=float(np.max(np.abs(x * reduced), initial=0.0)),
        duality_gap=float(abs(slp.c @ x - slp.b @ y)),
    )
