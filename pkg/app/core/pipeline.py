"""Sizing pipeline: scenario -> LP -> scaled standard form -> solve -> result.

Pipeline flow:
    scenario.json -> [Validate] -> [Build LP] -> [Scale] -> [Standard form]
    -> [Simplex / HiGHS] -> [Unscale] -> [Extract + recompute costs]
"""

import logging
import time
from pathlib import Path
from typing import Optional, Union

import numpy as np

from app.config import get_settings
from app.core.formulation import SizingResult, SolverStats, build_lp, extract_solution
from app.core.lp import LpProblem, SolveStatus
from app.core.mps import write_mps
from app.core.scaling import scale_problem
from app.core.scenario import ScenarioConfig, ValidatedScenario, validate_scenario
from app.core.solver import LpSolution, SolverOptions, check_kkt, solve, to_standard_form

logger = logging.getLogger(__name__)

# Relative row violation above which a solve is reported as suspicious
ROW_VIOLATION_WARN = 1e-6


class SizingPipeline:
    """Runs one scenario end to end."""

    def __init__(
        self,
        options: Optional[SolverOptions] = None,
        scaling_passes: Optional[int] = None,
        verbose: bool = True,
    ):
        """Initialize pipeline.

        Args:
            options: Solver options (defaults from settings)
            scaling_passes: Equilibration passes (defaults from settings)
            verbose: Log stage messages at INFO instead of DEBUG
        """
        self.settings = get_settings()
        self.options = options or SolverOptions.from_settings(self.settings)
        self.scaling_passes = self.settings.SCALING_PASSES if scaling_passes is None else scaling_passes
        self.verbose = verbose

    def _log(self, message: str, *args) -> None:
        logger.log(logging.INFO if self.verbose else logging.DEBUG, message, *args)

    def validate(self, cfg: Union[ScenarioConfig, dict]) -> ValidatedScenario:
        s = validate_scenario(cfg)
        self._log("[LOAD] %s: T=%d, step %.3g h, alpha %.4g", s.name, s.horizon, s.step_hours, s.alpha)
        return s

    def solve_lp(self, lp: LpProblem) -> LpSolution:
        """Scale, convert and solve lp; the solution is in lp's own variables.

        Raises:
            IterationLimitError: If the solver runs out of iterations
            NumericalBreakdownError: If the basis becomes singular
        """
        scaled, record = scale_problem(lp, self.scaling_passes)
        slp = to_standard_form(scaled)
        sol = solve(slp, self.options)
        if sol.status != SolveStatus.OPTIMAL:
            return LpSolution(
                x=np.zeros(lp.num_vars),
                y=np.zeros(lp.num_eq + lp.num_ub),
                objective=0.0,
                status=sol.status,
                iterations=sol.iterations,
                phase_one_iterations=sol.phase_one_iterations,
                backend=sol.backend,
            )

        report = check_kkt(slp, sol)
        x = record.unscale_primal(slp.recover(sol.x))
        y_eq, y_ub = record.unscale_duals(*slp.recover_duals(sol.y))
        return LpSolution(
            x=x,
            y=np.concatenate([y_eq, y_ub]),
            objective=float(lp.objective @ x),
            status=sol.status,
            iterations=sol.iterations,
            phase_one_iterations=sol.phase_one_iterations,
            primal_residual=report.primal_residual,
            dual_residual=max(0.0, -report.min_reduced_cost),
            backend=sol.backend,
        )

    def run(self, s: ValidatedScenario, mps_path: Optional[Union[str, Path]] = None) -> SizingResult:
        """Build, solve and extract one validated scenario.

        Args:
            s: Validated scenario
            mps_path: Optional path for an MPS dump of the unscaled LP

        Returns:
            SizingResult (status infeasible/unbounded carries no dispatch)
        """
        started = time.perf_counter()
        lp = build_lp(s)
        if mps_path is not None:
            write_mps(lp, mps_path)

        sol = self.solve_lp(lp)
        optimal = sol.status == SolveStatus.OPTIMAL
        violation = max(lp.row_violations(sol.x)) if optimal else 0.0
        if violation > ROW_VIOLATION_WARN:
            logger.warning("[SOLVE] %s: largest relative row violation %.3g", s.name, violation)

        stats = SolverStats(
            backend=sol.backend,
            iterations=sol.iterations,
            phase_one_iterations=sol.phase_one_iterations,
            objective=sol.objective if optimal else None,
            primal_residual=sol.primal_residual,
            dual_residual=sol.dual_residual,
            max_row_violation=violation,
            elapsed_seconds=time.perf_counter() - started,
        )
        result = extract_solution(sol, s, lp, stats)
        self._log("[DONE] %s at alpha=%.4g: %s in %.2fs", s.name, s.alpha, result.status.value, stats.elapsed_seconds)
        return result

    def run_config(self, cfg: Union[ScenarioConfig, dict]) -> SizingResult:
        return self.run(self.validate(cfg))


def get_pipeline(options: Optional[SolverOptions] = None, verbose: bool = True) -> SizingPipeline:
    """Factory function to get pipeline instance.

    Args:
        options: Solver options (defaults from settings)
        verbose: Whether to log stage messages at INFO

    Returns:
        SizingPipeline instance
    """
    return SizingPipeline(options=options, verbose=verbose)
