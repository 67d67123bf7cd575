"""Command-line interface: validate, solve, sweep, report, fetch and synth.

Exit codes: 0 ok, 2 infeasible, 3 config or input error, 4 solver failure,
1 for I/O and network failures.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from app.config import configure_logging
from app.core.errors import (
    ConfigError,
    ConsistencyError,
    DomainError,
    IoError,
    NetworkError,
    ParseError,
    RangeError,
    SolverError,
    UnboundedDomainError,
    WeightError,
)
from app.core.lp import SolveStatus
from app.core.pipeline import get_pipeline
from app.core.scenario import ScenarioConfig, ValidatedScenario, validate_scenario
from app.core.solver import SolverOptions
from app.ingestion.loaders import read_results, read_scenario, resample_scenario
from app.ingestion.writers import write_results, write_table_csv, write_timeseries_csv
from app.reporting.buses import allocate_to_buses
from app.reporting.mix import aggregate_dispatch, capacity_energy_shares, estimate_emissions
from app.reporting.sweep import alpha_grid, normalize_costs, sweep_alpha

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INFEASIBLE = 2
EXIT_CONFIG = 3
EXIT_SOLVER = 4


def _load(path: str, resample: int = 1, alpha: Optional[float] = None) -> ValidatedScenario:
    cfg: ScenarioConfig = read_scenario(path)
    if resample > 1:
        cfg = resample_scenario(cfg, resample)
    if alpha is not None:
        cfg = cfg.model_copy(update={"alpha": alpha})
    return validate_scenario(cfg)


# ============== Subcommands ==============

def cmd_validate(args) -> int:
    s = _load(args.scenario, args.resample)
    cfg = s.config
    print(f"[OK] {s.name}: T={s.horizon}, step {s.step_hours:g} h, alpha {s.alpha:g}")
    print(
        f"   conventional={len(cfg.conventional)} renewables={len(cfg.renewables)} "
        f"hydro={len(cfg.hydro)} solar_thermal={len(cfg.solar_thermal)}"
    )
    return EXIT_OK


def cmd_solve(args) -> int:
    s = _load(args.scenario, args.resample, args.alpha)
    options = SolverOptions.from_settings(backend=args.backend, trace=args.trace or None)
    result = get_pipeline(options).run(s, mps_path=args.mps)
    out = Path(args.out)
    write_results(result, out)

    print(f"\n[SOLVE] {result.scenario} at alpha={result.alpha:g}: {result.status.value}")
    if result.status == SolveStatus.INFEASIBLE:
        return EXIT_INFEASIBLE
    if result.status == SolveStatus.UNBOUNDED:
        print("[ERROR] problem is unbounded", file=sys.stderr)
        return EXIT_SOLVER

    for name, mw in result.capacities.items():
        print(f"   {name}: {mw:.3f} MW")
    print(f"   total cost: {result.cost.total:.6g}")
    if result.achieved_share is not None:
        print(f"   renewable share: {result.achieved_share:.4f}")
    try:
        shares = capacity_energy_shares(result)
        print(f"   renewable capacity share {shares.capacity_share:.3f}, energy share {shares.energy_share:.3f}")
    except ZeroDivisionError:
        pass
    emissions = estimate_emissions(result)
    if emissions:
        print(f"   emissions: {sum(emissions.values()):.6g} t CO2-eq")
    for note in result.notes:
        print(f"   note: {note}")

    allocation = s.config.bus_allocation
    if allocation:
        write_table_csv(allocate_to_buses(result, allocation).to_frame(), out / "buses.csv")
    print(f"\n[DONE] results in {out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    alphas = alpha_grid(args.alpha_start, args.alpha_end, args.alpha_step, near_one=args.near_one)
    options = SolverOptions.from_settings(backend=args.backend)
    s = _load(args.scenario, args.resample)
    report = sweep_alpha(s, alphas, jobs=args.jobs, options=options)

    out = Path(args.out)
    if args.base:
        base = sweep_alpha(_load(args.base, args.resample), alphas, jobs=args.jobs, options=options)
        report = normalize_costs(report, base)
        write_table_csv(base.to_frame(), out / "base_sweep.csv")
    write_table_csv(report.to_frame(), out / "sweep.csv")

    for row in report.rows:
        cost = "-" if row.total_cost is None else f"{row.total_cost:.6g}"
        print(f"   alpha={row.alpha:<7g} {row.status:<10} cost={cost}")
    drops = report.cost_decreases()
    if drops:
        print(f"[WARN] optimal cost decreases at alpha {drops}", file=sys.stderr)
    print(f"\n[DONE] {len(report.rows)} points -> {out / 'sweep.csv'}")
    return EXIT_OK


def cmd_report(args) -> int:
    sizing, dispatch, demand = read_results(args.results)
    if dispatch is None:
        print(f"[ERROR] no dispatch in {args.results} (status {sizing.get('status')})", file=sys.stderr)
        return EXIT_INFEASIBLE
    table = aggregate_dispatch(dispatch, args.granularity, demand)
    path = write_table_csv(table, Path(args.results) / f"mix_{args.granularity}.csv")
    print(f"[DONE] {len(table)} {args.granularity} periods -> {path}")
    return EXIT_OK


def cmd_fetch(args) -> int:
    from app.ingestion.fetcher import fetch_resource

    ts = fetch_resource(args.lat, args.lon, args.year, args.technology, cache_dir=args.cache_dir)
    print(f"[FETCH] {len(ts)} values, mean {sum(ts.values) / max(len(ts), 1):.4f}")
    if args.out:
        write_timeseries_csv(ts, args.out)
        print(f"[DONE] -> {args.out}")
    return EXIT_OK


def cmd_synth(args) -> int:
    from app.ingestion.synthetic import write_synthetic

    paths = write_synthetic(args.out, seed=args.seed, hours=args.hours, alpha=args.alpha)
    for path in paths:
        print(f"   {path}")
    print(f"[DONE] {len(paths)} scenarios")
    return EXIT_OK


# ============== Parser ==============

class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the config-error code, not argparse's 2."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ressize", description="Renewable capacity sizing by linear programming")
    parser.add_argument("--log-level", default="", help="Logging level (default: LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="Check a scenario file")
    p.add_argument("scenario")
    p.add_argument("--resample", type=int, default=1, help="Average every N steps")
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("solve", help="Size one scenario")
    p.add_argument("scenario")
    p.add_argument("--out", required=True, help="Results directory")
    p.add_argument("--resample", type=int, default=1, help="Average every N steps")
    p.add_argument("--alpha", type=float, help="Override the scenario's alpha")
    p.add_argument("--backend", choices=["simplex", "highs"], help="LP backend (default: SOLVER_BACKEND)")
    p.add_argument("--mps", help="Also write the LP as free MPS")
    p.add_argument("--trace", action="store_true", help="Log every pivot at DEBUG")
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("sweep", help="Solve a scenario over a grid of alphas")
    p.add_argument("scenario")
    p.add_argument("--alpha-start", type=float, required=True)
    p.add_argument("--alpha-end", type=float, required=True)
    p.add_argument("--alpha-step", type=float, required=True)
    p.add_argument("--out", required=True, help="Output directory for sweep.csv")
    p.add_argument("--base", help="Base-case scenario for normalized costs")
    p.add_argument("--jobs", type=int, help="Worker processes (default: SWEEP_JOBS)")
    p.add_argument("--near-one", action="store_true", help="Add 0.99 and 0.999 to the grid")
    p.add_argument("--resample", type=int, default=1, help="Average every N steps")
    p.add_argument("--backend", choices=["simplex", "highs"], help="LP backend (default: SOLVER_BACKEND)")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("report", help="Aggregate a solved dispatch into a generation mix")
    p.add_argument("results", help="Results directory written by solve")
    p.add_argument("--granularity", choices=["hourly", "daily", "monthly"], default="daily")
    p.set_defaults(handler=cmd_report)

    p = sub.add_parser("fetch", help="Download a PV or wind capacity-factor series")
    p.add_argument("--lat", type=float, required=True)
    p.add_argument("--lon", type=float, required=True)
    p.add_argument("--year", type=int, required=True)
    p.add_argument("--technology", choices=["pv", "wind"], required=True)
    p.add_argument("--cache-dir", help="Cache directory (default: RESOURCE_CACHE_DIR)")
    p.add_argument("--out", help="Copy the series to this CSV")
    p.set_defaults(handler=cmd_fetch)

    p = sub.add_parser("synth", help="Write the synthetic-year scenarios")
    p.add_argument("--out", required=True, help="Output directory")
    p.add_argument("--seed", type=int, default=2019)
    p.add_argument("--hours", type=int, default=8760)
    p.add_argument("--alpha", type=float, default=0.5)
    p.set_defaults(handler=cmd_synth)
    return parser


def cli_main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand and map failures to exit codes."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # --help exits 0, usage errors EXIT_CONFIG
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except (ConfigError, ParseError, RangeError, WeightError, UnboundedDomainError, DomainError) as exc:
        print(f"[ERROR] {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, ConsistencyError) as exc:
        print(f"[ERROR] solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (IoError, NetworkError) as exc:
        print(f"[ERROR] {exc}", file=sys.stderr)
        return EXIT_FAILURE


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
