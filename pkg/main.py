#!/usr/bin/env python3
"""
main.py - Space Logistics Optimizer Main Entry Point

Builds and solves event-driven cislunar campaign MILPs, sweeps the cost versus
time Pareto front and validates flow plans against a campaign model.

Usage:
    python main.py solve --config CONFIG [--out DIR] [--threads N] [--gap G] [--time-limit S]
    python main.py sweep --config CONFIG [--grid GRID] [--out DIR] [--workers N]
    python main.py validate --plan PLAN --config CONFIG [--out DIR]

Example:
    python main.py solve --config fixtures/baseline.json --out ./output/baseline

Exit codes: 0 success, 1 configuration or schema error, 2 infeasible campaign
or plan, 3 solver limit reached before optimality.
"""

import argparse
import json
import os
import sys
import time
from dataclasses import replace

import config
from cache_config import clear_all_cache, get_cache_info
from cislunar import (
    CampaignConfig,
    CampaignError,
    ConfigError,
    assemble_campaign,
    extract_plan,
    load_registry,
    pareto_sweep,
    read_plan,
    validate_plan,
)
from milpcore import ModelError, write_lp
from netgraph import NetworkError, dump_network
from reporting import (
    format_audit_summary,
    generate_sweep_summary,
    write_audit_csv,
    write_pareto_csv,
    write_solve_outputs,
    write_sweep_report,
)
from simplexbb import GAP_LIMIT, INFEASIBLE, OPTIMAL, TIME_LIMIT, UNBOUNDED, solve_milp
from trajmodels import TrajectoryModelError
from utils.filesystem import ensure_directories_exist
from utils.logger import get_logger, setup_logging

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INFEASIBLE = 2
EXIT_LIMIT = 3

STATUS_EXIT_CODES = {
    OPTIMAL: EXIT_OK,
    INFEASIBLE: EXIT_INFEASIBLE,
    UNBOUNDED: EXIT_INFEASIBLE,
    GAP_LIMIT: EXIT_LIMIT,
    TIME_LIMIT: EXIT_LIMIT,
}

# Input problems that map to exit code 1
INPUT_ERRORS = (CampaignError, NetworkError, ModelError, TrajectoryModelError, OSError)

logger = get_logger(__name__)


def _add_solver_flags(parser):
    parser.add_argument('--threads', type=int, default=None,
                        help=f'Branch-and-bound worker threads (default: {config.SolverDefaults.THREADS})')
    parser.add_argument('--gap', type=float, default=None,
                        help=f'Relative optimality gap (default: {config.SolverDefaults.GAP})')
    parser.add_argument('--time-limit', type=float, default=None, metavar='SECONDS',
                        help='Wall-clock limit per solve')
    parser.add_argument('--node-limit', type=int, default=None,
                        help='Branch-and-bound node limit per solve')


def parse_arguments(argv=None):
    """
    Parse command line arguments.

    Returns:
        argparse.Namespace: Parsed command line arguments
    """
    parser = argparse.ArgumentParser(description='Event-driven space logistics optimizer')
    parser.add_argument('--log-level', type=str, default=None,
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                        help=f'Log level (default: {config.LOGLEVEL})')

    # Cache options
    parser.add_argument('--clear-cache', action='store_true',
                        help='Clear the solution cache before running')
    parser.add_argument('--no-cache', action='store_true',
                        help='Neither read nor write the solution cache')
    parser.add_argument('--cache-info', action='store_true',
                        help='Display information about the solution cache and exit')

    commands = parser.add_subparsers(dest='command')

    solve = commands.add_parser('solve', help='Build and solve one campaign')
    solve.add_argument('--config', required=True, help='Campaign config JSON')
    solve.add_argument('--out', default=config.OUTPUT_DIR, help='Output directory')
    solve.add_argument('--dump-network', default=None, metavar='PATH', help='Write the event network as JSON')
    solve.add_argument('--dump-model', default=None, metavar='PATH', help='Write the MILP in LP format')
    _add_solver_flags(solve)

    sweep = commands.add_parser('sweep', help='Solve a grid of (T_cargo, T_crew) bounds')
    sweep.add_argument('--config', required=True, help='Campaign config JSON')
    sweep.add_argument('--grid', default=None,
                       help='Grid JSON: {"t_cargo": [...], "t_crew": [...]} or {"points": [[t_cargo, t_crew], ...]}')
    sweep.add_argument('--out', default=config.OUTPUT_DIR, help='Output directory')
    sweep.add_argument('--workers', type=int, default=1, help='Grid points solved concurrently')
    _add_solver_flags(sweep)

    validate = commands.add_parser('validate', help='Audit a flow plan against a campaign model')
    validate.add_argument('--plan', required=True, help='Plan file (.json or .csv)')
    validate.add_argument('--config', required=True, help='Campaign config JSON')
    validate.add_argument('--out', default=None, help='Directory for audit.csv')
    validate.add_argument('--rows', type=int, default=10, help='Residual rows to print')

    return parser.parse_args(argv)


def load_campaign(args):
    """Campaign config with CLI solver flags applied over the JSON values."""
    campaign = CampaignConfig.load(args.config)
    overrides = {key: getattr(args, key, None) for key in ('threads', 'gap', 'time_limit', 'node_limit')}
    campaign = replace(campaign, solver=campaign.solver.merged(**overrides))
    campaign.validate()
    return campaign


def load_grid(path):
    """
    Read a sweep grid file.

    Raises:
        CampaignError: Malformed grid
    """
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot read grid {path}: {e}") from e
    try:
        if 'points' in data:
            grid = [(float(a), float(b)) for a, b in data['points']]
        else:
            grid = [(float(a), float(b)) for b in data['t_crew'] for a in data['t_cargo']]
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"Grid {path} must list t_cargo and t_crew values or points: {e}") from e
    if not grid:
        raise ConfigError(f"Grid {path} is empty")
    return grid


def cmd_solve(args):
    campaign = load_campaign(args)
    instance = assemble_campaign(campaign, load_registry(campaign))
    if args.dump_network:
        dump_network(instance.network, args.dump_network)
        logger.info(f"Network written to {args.dump_network}")
    if args.dump_model:
        write_lp(instance.model, args.dump_model)
        logger.info(f"Model written to {args.dump_model}")

    result = solve_milp(instance.model, campaign.solver.to_options(show_progress=sys.stderr.isatty()))
    plan = extract_plan(instance, result) if result.has_solution else None
    paths = write_solve_outputs(instance, result, args.out, plan)

    print(f"\nStatus: {result.status}")
    if result.has_solution:
        print(f"IMLEO: {result.objective:,.1f} kg (gap {result.gap:.2e}, {result.nodes} nodes)")
        print(f"T_cargo: {plan.t_cargo_days:g} d, T_crew: {plan.t_crew_days:g} d")
    for name, path in paths.items():
        print(f"  {name}: {path}")
    return STATUS_EXIT_CODES.get(result.status, EXIT_LIMIT)


def cmd_sweep(args):
    campaign = load_campaign(args)
    grid = load_grid(args.grid) if args.grid else None
    started = time.perf_counter()
    points = pareto_sweep(campaign, grid, load_registry(campaign), workers=args.workers,
                          use_cache=not args.no_cache, show_progress=sys.stderr.isatty())
    wall_time = time.perf_counter() - started

    os.makedirs(args.out, exist_ok=True)
    pareto_path = write_pareto_csv(points, os.path.join(args.out, 'pareto.csv'))
    report_path = write_sweep_report(points, os.path.join(args.out, 'sweep_report.json'), wall_time)
    summary_path = generate_sweep_summary(points, os.path.join(args.out, 'sweep_summary.md'))
    failed = [p for p in points if p.status == 'error']

    print(f"\nSwept {len(points)} points in {wall_time:.1f} s ({len(failed)} errors)")
    for path in (pareto_path, report_path, summary_path):
        print(f"  {path}")
    return EXIT_OK


def cmd_validate(args):
    campaign = CampaignConfig.load(args.config)
    plan = read_plan(args.plan)
    instance = assemble_campaign(campaign, load_registry(campaign))
    audit = validate_plan(plan, instance)
    print(format_audit_summary(audit, args.rows))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = write_audit_csv(audit, os.path.join(args.out, 'audit.csv'))
        print(f"\nResiduals written to {path}")
    return EXIT_OK if audit.passed else EXIT_INFEASIBLE


COMMANDS = {'solve': cmd_solve, 'sweep': cmd_sweep, 'validate': cmd_validate}


def main(argv=None):
    """
    Main function of the space logistics optimizer.

    Returns:
        int: Process exit code
    """
    args = parse_arguments(argv)

    # Setup logging - only here in main.py since this is the entry point
    setup_logging(args.log_level)
    ensure_directories_exist()

    if args.cache_info:
        cache_info = get_cache_info()
        print("\nCache Information:")
        print(f"Entries: {cache_info.get('count', 'N/A')}")
        if 'size_kb' in cache_info:
            print(f"Total size: {cache_info['size_kb']:.2f} KB")
        print(f"Directory: {cache_info['directory']}")
        print(f"Status: {cache_info['status']}")
        return EXIT_OK

    if args.clear_cache:
        num_deleted = clear_all_cache()
        logger.info(f"Cleared {num_deleted} cache entries")

    if args.command is None:
        if args.clear_cache:
            return EXIT_OK
        print("No command given; use solve, sweep or validate (see --help)")
        return EXIT_CONFIG

    logger.info(f"Running {args.command}")
    try:
        return COMMANDS[args.command](args)
    except INPUT_ERRORS as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
