"""
Command line interface.

    isac-drt front    --grid grid.csv
    isac-drt envelope --scenario scenario.json --resolution 400
    isac-drt plan     --scenario scenario.json --budgets 1 7 15 --out figures
    isac-drt simulate --scenario scenario.json --budget 3 --trials 100000
    isac-drt verify   [--inject-fault weights|atom]
    isac-drt fuzz     --cases 1000 --grid-size 200
    isac-drt rate     --scenario scenario.json --budget 1

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, Sequence

from isac_drt.comm.rate_eval import rate_records
from isac_drt.io import (
    ConfigFieldError,
    TableFormatError,
    format_table,
    load_comm_channel,
    load_scenario,
    read_design_grid,
    write_table,
)
from isac_drt.isac_drt import Config
from isac_drt.radar.covariance import optimal_covariance
from isac_drt.radar.detection import (
    DetectionCurve,
    curve_records,
    detection_grid,
    distribution_records,
    expected_detection,
    sensing_optimal_distribution,
)
from isac_drt.radar.monte_carlo import (
    SimConfig,
    estimate_mixture_pd,
    estimate_pd,
    estimate_pfa,
)
from isac_drt.radar.scenario import RadarScenario
from isac_drt.tradeoff.envelope import front_records, lower_convex_envelope
from isac_drt.tradeoff.front import DesignGrid, build_front
from isac_drt.tradeoff.lp_oracle import random_front_fuzz
from isac_drt.verification import FAULTS, SUITES, VerifySettings, run_verification

logger = logging.getLogger()

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

DEFAULT_SEED = 1
DEFAULT_RESOLUTION = 400
FAILURE_COLUMNS = ("suite", "check", "detail")

Rows = List[Dict[str, object]]


def _emit(
    rows: Sequence[Mapping[str, object]],
    args: argparse.Namespace,
    name: str,
    columns: Optional[Sequence[str]] = None,
) -> None:
    if args.out is None:
        sys.stdout.write(format_table(rows, args.format, columns))
        return
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = write_table(rows, out / f"{name}.{args.format}", args.format, columns)
    logger.info("Wrote %s rows to %s", len(rows), path)


def _default_p_max(curve: DetectionCurve, budgets: Sequence[float] = ()) -> float:
    return max([20.0, 2.0 * curve.p_t] + [1.1 * b for b in budgets])


def _input_grid(args: argparse.Namespace) -> DesignGrid:
    if args.grid is not None:
        return read_design_grid(args.grid)
    if args.scenario is None:
        raise ValueError("Either --grid or --scenario is required")
    curve = DetectionCurve.from_scenario(load_scenario(args.scenario))
    p_max = args.p_max if args.p_max is not None else _default_p_max(curve)
    return detection_grid(curve, p_max, args.resolution, extra_points=())


def cmd_front(args: argparse.Namespace) -> int:
    front = build_front(_input_grid(args))
    _emit(front_records(front, lower_convex_envelope(front)), args, "front")
    return EXIT_OK


def cmd_envelope(args: argparse.Namespace) -> int:
    front = build_front(_input_grid(args))
    rows = front_records(front, lower_convex_envelope(front))
    _emit([r for r in rows if r["is_contact"]], args, "envelope")
    return EXIT_OK


def cmd_plan(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    budgets = args.budgets if args.budgets else [scenario.power_budget]
    curve = DetectionCurve.from_scenario(scenario)

    plan: Rows = []
    distribution: Rows = []
    for budget in budgets:
        sized = scenario.with_budget(budget)
        mix = sensing_optimal_distribution(sized)
        plan.append(
            {
                "P": budget,
                "P_star": curve.p_star,
                "P_t": curve.p_t,
                "expected_pd": expected_detection(sized, mix),
                "deterministic_pd": curve.f(budget),
                "n_atoms": mix.n_atoms,
            }
        )
        distribution.extend(
            {"budget": budget, **row} for row in distribution_records(sized, mix)
        )

    p_max = args.p_max if args.p_max is not None else _default_p_max(curve, budgets)
    if args.out is None:
        args.out = "."
    _emit(plan, args, "plan")
    _emit(distribution, args, "distribution")
    _emit(curve_records(curve, p_max, args.resolution), args, "curve")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    seed = Config().random_seed
    scenario = load_scenario(args.scenario)
    budget = args.budget if args.budget is not None else scenario.power_budget
    sized = scenario.with_budget(budget)
    if args.hypothesis == "mixture":
        mix = sensing_optimal_distribution(sized)
        reports = [
            estimate_mixture_pd(sized, mix, args.trials, seed, args.batch_size)
        ]
    else:
        config = SimConfig(
            sized,
            optimal_covariance(sized, budget).matrix,
            args.trials,
            seed,
            args.batch_size,
        )
        reports = []
        if args.hypothesis in ("h0", "both"):
            reports.append(estimate_pfa(config))
        if args.hypothesis in ("h1", "both"):
            reports.append(estimate_pd(config))
    _emit([r.record() for r in reports], args, "simulate")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    seed = Config().random_seed
    scenario: Optional[RadarScenario] = None
    if args.scenario is not None:
        scenario = load_scenario(args.scenario)
    settings = VerifySettings(
        seed=seed,
        fuzz_cases=args.fuzz_cases,
        fuzz_grid_size=args.fuzz_grid_size,
        moment_trials=args.moment_trials,
        scenario=scenario,
        inject_fault=args.inject_fault,
    )
    failures = run_verification(settings, args.suites)
    _emit([f.record() for f in failures], args, "failures", FAILURE_COLUMNS)
    if failures:
        logger.warning("Verification found %s failures", len(failures))
        return EXIT_FAILURE
    return EXIT_OK


def cmd_fuzz(args: argparse.Namespace) -> int:
    seed = Config().random_seed
    report = random_front_fuzz(seed, args.cases, args.grid_size, args.collinear)
    _emit(report.records(), args, "fuzz")
    if report.n_fail:
        logger.warning("%s of %s fuzz cases failed", report.n_fail, report.n_cases)
        return EXIT_FAILURE
    return EXIT_OK


def cmd_rate(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    channel = load_comm_channel(args.channel if args.channel else args.scenario)
    budget = args.budget if args.budget is not None else scenario.power_budget
    mix = sensing_optimal_distribution(scenario.with_budget(budget))
    _emit(rate_records(channel, mix, args.snapshots), args, "rate")
    return EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace], int]] = {
    "front": cmd_front,
    "envelope": cmd_envelope,
    "plan": cmd_plan,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "fuzz": cmd_fuzz,
    "rate": cmd_rate,
}


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--seed", type=int, default=DEFAULT_SEED, help="master seed (default: 1)"
    )
    common.add_argument(
        "--out", default=None, help="output directory (default: stdout)"
    )
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument(
        "--tolerance",
        type=float,
        default=None,
        help="relative contact and KKT tolerance (default: 1e-9)",
    )
    common.add_argument("-v", "--verbose", action="count", default=0)
    return common


def _grid_flags(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--grid", help="design grid with design_id, cost, perf")
    source.add_argument("--scenario", help="radar scenario (JSON)")
    parser.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION)
    parser.add_argument("--p-max", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isac-drt",
        description="Sensing optimal randomized transmit strategies",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    common = _common_flags()

    front = commands.add_parser("front", parents=[common], help="sampled front")
    _grid_flags(front)
    envelope = commands.add_parser(
        "envelope", parents=[common], help="lower convex envelope"
    )
    _grid_flags(envelope)

    plan = commands.add_parser(
        "plan", parents=[common], help="sensing optimal distributions"
    )
    plan.add_argument("--scenario", required=True)
    plan.add_argument("--budgets", type=float, nargs="+", default=None)
    plan.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION)
    plan.add_argument("--p-max", type=float, default=None)

    simulate = commands.add_parser(
        "simulate", parents=[common], help="Monte Carlo detector"
    )
    simulate.add_argument("--scenario", required=True)
    simulate.add_argument("--budget", type=float, default=None)
    simulate.add_argument("--trials", type=int, default=100_000)
    simulate.add_argument(
        "--hypothesis", choices=("h0", "h1", "both", "mixture"), default="both"
    )
    simulate.add_argument("--batch-size", type=int, default=None)

    verify = commands.add_parser("verify", parents=[common], help="self checks")
    verify.add_argument("--suites", nargs="+", choices=tuple(SUITES), default=None)
    verify.add_argument("--inject-fault", choices=FAULTS, default=None)
    verify.add_argument("--scenario", default=None)
    verify.add_argument("--fuzz-cases", type=int, default=1000)
    verify.add_argument("--fuzz-grid-size", type=int, default=200)
    verify.add_argument("--moment-trials", type=int, default=100_000)

    fuzz = commands.add_parser(
        "fuzz", parents=[common], help="envelope mixture against the LP oracle"
    )
    fuzz.add_argument("--cases", type=int, default=1000)
    fuzz.add_argument("--grid-size", type=int, default=200)
    fuzz.add_argument("--collinear", action="store_true")

    rate = commands.add_parser(
        "rate", parents=[common], help="communication rate of the distribution"
    )
    rate.add_argument("--scenario", required=True)
    rate.add_argument(
        "--channel", default=None, help="document with comm_channel (default: scenario)"
    )
    rate.add_argument("--budget", type=float, default=None)
    rate.add_argument("--snapshots", type=int, default=1)
    return parser


def _configure(args: argparse.Namespace) -> None:
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )
    C = Config()
    C.set_seed(args.seed)
    if args.tolerance is not None:
        if not args.tolerance > 0:
            raise ValueError("Tolerance has to be positive")
        C.set_contact_tol(args.tolerance)
        C.set_kkt_tol(args.tolerance)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _configure(args)
        return COMMANDS[args.command](args)
    except (ConfigFieldError, TableFormatError, OSError, ValueError) as err:
        logger.error("%s", err)
        sys.stderr.write(f"isac-drt {args.command}: {err}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
