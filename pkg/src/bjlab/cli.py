"""Command line entry point: ``bjlab run``, ``bjlab fuzz`` and ``bjlab examples``."""

from __future__ import annotations

import argparse
import sys

from .errors import BJLabError, ScenarioError
from .fuzz import FuzzConfig, fuzz_equivalence
from .runner import Record, Report, fuzz_record, run_scenario, run_scenarios, _stamp
from .scenario import BUILTIN_SCENARIOS, builtin_scenario

EXIT_SCENARIO_ERROR = 2


def _add_common(p, *, tol=True):
    p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    if tol:
        p.add_argument("--tol", type=float, default=None, help="decision tolerance (overrides the file and BJLAB_TOL)")
    p.add_argument("--out", default=None, help="report path (JSON lines)")


def build_parser():
    parser = argparse.ArgumentParser(prog="bjlab", description="Birkhoff-James orthogonality experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario file")
    run.add_argument("scenario", help="scenario JSON file, or builtin:<name>")
    _add_common(run)
    run.add_argument("--trials", type=int, default=None, help="override params.trials")
    run.add_argument("--experiment", default=None, help="run a different experiment on the same data")

    fz = sub.add_parser("fuzz", help="characterization vs definition-oracle fuzzing")
    fz.add_argument("--trials", type=int, default=10_000, help="trials per outer exponent")
    _add_common(fz, tol=False)

    ex = sub.add_parser("examples", help="run every built-in scenario")
    _add_common(ex)
    return parser


def _cmd_run(args):
    overrides = {"seed": args.seed, "tol": args.tol, "trials": args.trials,
                 "experiment": args.experiment, "out": args.out}
    return run_scenario(args.scenario, overrides)


def _cmd_fuzz(args):
    cfg = FuzzConfig(trials=args.trials, seed=0 if args.seed is None else args.seed)
    result = fuzz_equivalence(cfg)
    rec = Record("fuzz", "fuzz_equivalence", cfg.seed, cfg.band)
    fuzz_record(result, rec)
    report = Report([rec], result.runtime, _stamp())
    report.write(args.out or "fuzz.report.jsonl")
    return report


def _cmd_examples(args):
    scenarios = [builtin_scenario(n).with_overrides(seed=args.seed, tolerance=args.tol) for n in BUILTIN_SCENARIOS]
    return run_scenarios(scenarios, args.out or "examples.report.jsonl")


COMMANDS = {"run": _cmd_run, "fuzz": _cmd_fuzz, "examples": _cmd_examples}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = COMMANDS[args.command](args)
    except ScenarioError as e:
        print(f"bjlab: scenario error: {e}", file=sys.stderr)
        return EXIT_SCENARIO_ERROR
    except BJLabError as e:
        print(f"bjlab: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_SCENARIO_ERROR
    except OSError as e:
        print(f"bjlab: {e}", file=sys.stderr)
        return EXIT_SCENARIO_ERROR
    print(report.human())
    if report.path is not None:
        print(f"report written to {report.path}")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
