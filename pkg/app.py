#!/usr/bin/env python3
"""declq - decentralized LQG synthesis under open-loop substitutability.

Subcommands:
    check     <scenario>                       substitutability report
    solve     <scenario> [--filter] [--controller I]
                                               gain / filter schedules
    simulate  <scenario> --profile P [--seed S] [--runs R] [--out trace.csv] [--jobs N]
                                               closed-loop traces
    compare   <scenario> [--seed S] [--runs R] [--out paired.csv] [--jobs N]
                                               centralized vs decentralized cost report
    generate  --dx --dc --w --n --seed --out   random substitutable scenario
    generate  --example NAME --out             built-in scenario

Usage:
    python app.py check scenarios/sum.json
    python app.py compare scenarios/sum.json --seed 7 --runs 500 --pretty
    python app.py generate --dx 3 --dc 4 --w 2 --n 3 --seed 7 --out gen.json

Output:
    stdout   the command's JSON document (or a human summary with --pretty)
    stderr   diagnostics and logs, one JSON object per line

Exit codes:
    0  success (including a "not substitutable" verdict from check)
    1  domain error (e.g. NotSubstitutableError, SingularInnovationError)
    2  usage, parse or validation error

Nothing is read from environment variables.
"""
import argparse
import json
import sys
from typing import Any, Dict, List, NoReturn, Optional, Sequence

from loguru import logger

from config.settings import settings
from model.errors import (
    LQGError,
    ModelValidationError,
    NotSubstitutableError,
    ScenarioParseError,
    Violation,
    ViolationKind,
)
from model.scenario import StrategyKind

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Bad command line detected after parsing."""


class JsonArgumentParser(argparse.ArgumentParser):
    """ArgumentParser whose errors are single-line JSON on stderr."""

    def error(self, message: str) -> NoReturn:
        _diagnose({"error": "UsageError", "message": message, "usage": self.format_usage().strip()})
        raise SystemExit(EXIT_USAGE)


# ================================================================
# Helpers
# ================================================================

def _diagnose(payload: Dict[str, Any]) -> None:
    sys.stderr.write(json.dumps(payload, default=str) + "\n")
    sys.stderr.flush()


def _emit(payload: Any) -> None:
    sys.stdout.write(json.dumps(payload, indent=2) + "\n")


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"{text} is not an unsigned 64-bit integer")
    return value


def _positive_u32(text: str) -> int:
    value = int(text)
    if not 1 <= value < 2**32:
        raise argparse.ArgumentTypeError(f"{text} is not a positive 32-bit integer")
    return value


def _matrices(arrays: Sequence[Any]) -> List[Any]:
    return [a.tolist() for a in arrays]


def configure_logging(verbose: bool) -> None:
    """Replace loguru's default sink with serialized JSON lines on stderr."""
    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if verbose else settings.log_level, serialize=True)


# ================================================================
# Commands
# ================================================================

def cmd_check(args: argparse.Namespace) -> int:
    from control.substitution import check_substitutable
    from model.scenario import load_scenario

    config = load_scenario(args.scenario)
    report = check_substitutable(config.model).to_report()

    if args.pretty:
        verdict = "substitutable" if report.substitutable else "NOT substitutable"
        print(f"Model is {verdict} (tolerance {report.tolerance:.3e})")
        for c in report.controllers:
            flag = "ok" if c.substitutable else "FAIL"
            print(f"  controller {c.index}: residual {c.residual:.3e}  [{flag}]")
    else:
        _emit(report.model_dump())
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    from model.scenario import load_scenario
    from model.system import FeedbackMode
    from strategies import Synthesis

    config = load_scenario(args.scenario)
    model = config.model
    if args.filter and model.mode is not FeedbackMode.OUTPUT:
        raise ModelValidationError([Violation(
            ViolationKind.MODE_MISMATCH, "C", "--filter needs an output-feedback scenario"
        )])
    if args.controller is not None and not 0 <= args.controller < model.n:
        raise UsageError(f"--controller {args.controller} out of range for n = {model.n}")

    synthesis = Synthesis.solve(model)
    gains = synthesis.gains
    payload: Dict[str, Any] = {
        "horizon": model.horizon,
        "mode": model.mode.value,
        "singular_steps": list(gains.singular_steps),
        "K": _matrices(gains.K),
        "P": _matrices(gains.P),
    }
    if args.filter:
        filt = synthesis.filter
        payload["filter"] = {
            "L": _matrices(filt.L),
            "Sigma": _matrices(filt.Sigma),
            "priors": _matrices(filt.priors),
        }
    if args.controller is not None:
        i = args.controller
        lam = synthesis.subs.lambdas[i]
        local = model.mode is FeedbackMode.STATE and model.state_partition is not None
        payload["controller"] = {
            "index": i,
            "substitutable": synthesis.subs.is_substitutable(i),
            "lambda": lam.tolist(),
            "gain_form": "Lambda K_k^i" if local else "Lambda K_k",
            "gains": [
                gains.substituted_gain(k, i, lam, local=local).tolist()
                for k in range(model.horizon)
            ],
        }

    if args.pretty:
        print(f"Solved T={model.horizon} ({model.mode.value}); "
              f"pseudo-inverse steps: {list(gains.singular_steps) or 'none'}")
        print(f"  value at first step: trace(P_0) = {float(gains.P[0].trace()):.6g}")
        if args.filter:
            print(f"  filter: trace(Sigma_0) = {float(synthesis.filter.Sigma[0].trace()):.6g}")
    else:
        _emit(payload)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    from model.scenario import load_scenario
    from sim.engine import simulate
    from sim.trace import default_summary_path, save_trace, summarize_traces
    from strategies import create_profile

    config = load_scenario(args.scenario)
    kind = args.profile or (config.profiles[0].value if config.profiles else None)
    if kind is None:
        raise UsageError("no --profile given and the scenario lists no profiles")
    seed = config.seed if args.seed is None else args.seed
    runs = config.num_runs if args.runs is None else args.runs

    profile = create_profile(kind, config.model)
    traces = simulate(config.model, profile, seed=seed, runs=runs, jobs=args.jobs)
    summary = summarize_traces(traces, profile=profile.kind.value, seed=seed)

    out = args.out or config.trace_path
    summary_path = None
    if out:
        summary_path = config.summary_path or default_summary_path(out)
        save_trace(traces, out, summary=summary, summary_path=summary_path)

    if args.pretty:
        print(f"{summary.profile}: {summary.runs} run(s), mean cost {summary.mean_cost:.6g}")
        if summary.max_estimate_residual is not None:
            print(f"  max estimate residual      {summary.max_estimate_residual:.3e}")
        if summary.max_superposition_residual is not None:
            print(f"  max superposition residual {summary.max_superposition_residual:.3e}")
        if out:
            print(f"  trace written to {out}, summary to {summary_path}")
    else:
        _emit(summary.model_dump())
    return EXIT_OK


def _print_cost_report(report: Any) -> None:
    def line(name: str, cost: Any) -> None:
        mc = cost.monte_carlo
        print(f"  {name:<18} exact {cost.exact:.6g}   MC {mc.mean:.6g} ± {mc.half_width:.3g}")

    print(f"Cost comparison ({report.mode}, seed {report.seed}, {report.runs} runs)")
    line(report.centralized.profile, report.centralized)
    if report.decentralized is not None:
        line(report.decentralized.profile, report.decentralized)
    if report.baseline is not None:
        line(report.baseline.profile, report.baseline)
    if report.substitutable:
        print(f"  pathwise max gap   {report.pathwise_max_gap:.3e}")
        print(f"  exact relative gap {report.exact_relative_gap:.3e}")
        print(f"  verdict            {'EQUAL' if report.verdict else 'MISMATCH'}")
    else:
        print(f"  not substitutable: controllers {report.failing_controllers}")


def cmd_compare(args: argparse.Namespace) -> int:
    from analysis.compare import compare, save_paired_costs
    from model.scenario import load_scenario

    config = load_scenario(args.scenario)
    seed = config.seed if args.seed is None else args.seed
    runs = config.num_runs if args.runs is None else args.runs
    if runs < 2:
        raise UsageError("compare needs --runs >= 2")

    try:
        report = compare(config.model, seed=seed, runs=runs, jobs=args.jobs)
    except NotSubstitutableError as e:
        if e.report is not None and args.pretty:
            _print_cost_report(e.report)
        elif e.report is not None:
            _emit(e.report.model_dump())
        raise

    if args.out:
        save_paired_costs(report, args.out)
    if args.pretty:
        _print_cost_report(report)
    else:
        _emit(report.model_dump())
    return EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    from control.generator import generate_substitutable
    from control.substitution import check_substitutable
    from model.scenario import ScenarioConfig, save_scenario

    if args.example:
        from config.examples import get_example

        model = get_example(args.example)
        seed = settings.default_seed if args.seed is None else args.seed
    else:
        missing = [flag for flag in ("dx", "dc", "w", "n", "seed") if getattr(args, flag) is None]
        if missing:
            raise UsageError(f"generate needs --{', --'.join(missing)} (or --example)")
        seed = args.seed
        try:
            model = generate_substitutable(
                args.dx, args.dc, args.w, args.n, seed=seed,
                horizon=args.horizon, obs_width=args.obs_width,
            )
        except ValueError as e:
            raise UsageError(f"generate: {e}") from e

    config = ScenarioConfig(model=model, seed=seed, num_runs=settings.default_runs)
    path = save_scenario(config, args.out)
    subs = check_substitutable(model)

    if args.pretty:
        print(f"Wrote {path}: n={model.n}, d_x={model.dx}, T={model.horizon}, "
              f"{model.mode.value}, substitutable={subs.substitutable}")
    else:
        _emit({
            "path": str(path),
            "n": model.n,
            "mode": model.mode.value,
            "horizon": model.horizon,
            "substitutable": subs.substitutable,
        })
    return EXIT_OK


# ================================================================
# Parser
# ================================================================

def build_parser() -> argparse.ArgumentParser:
    from config.examples import describe_examples, example_names

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", help="human-readable summary instead of JSON")
    common.add_argument("--verbose", action="store_true", help="debug-level logs on stderr")

    runs = argparse.ArgumentParser(add_help=False)
    runs.add_argument("--seed", type=_u64, default=None, help="noise seed (default: scenario's)")
    runs.add_argument("--runs", type=_positive_u32, default=None, help="Monte Carlo runs (default: scenario's)")
    runs.add_argument("--jobs", type=_positive_u32, default=1, help="worker threads (default: 1)")

    parser = JsonArgumentParser(
        prog="declq",
        description="Decentralized LQG synthesis under open-loop substitutability",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=JsonArgumentParser)

    p = sub.add_parser("check", parents=[common], help="substitutability report")
    p.add_argument("scenario", help="scenario JSON file")
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("solve", parents=[common], help="centralized gain and filter schedules")
    p.add_argument("scenario", help="scenario JSON file")
    p.add_argument("--filter", action="store_true", help="also emit the Kalman schedule")
    p.add_argument("--controller", type=int, default=None, help="emit Lambda^i K products for controller i")
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("simulate", parents=[common, runs], help="simulate a strategy profile")
    p.add_argument("scenario", help="scenario JSON file")
    p.add_argument("--profile", choices=StrategyKind.cli_choices(), default=None,
                   help="strategy profile (default: first in the scenario)")
    p.add_argument("--out", default=None, help="trace CSV path (default: scenario outputs.trace)")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("compare", parents=[common, runs], help="centralized vs decentralized costs")
    p.add_argument("scenario", help="scenario JSON file")
    p.add_argument("--out", default=None, help="CSV of per-run paired costs")
    p.set_defaults(handler=cmd_compare)

    p = sub.add_parser("generate", parents=[common], help="write a substitutable scenario")
    p.add_argument("--example", choices=example_names(), default=None,
                   help=f"built-in model ({describe_examples()})")
    p.add_argument("--dx", type=_positive_u32, default=None, help="state dimension")
    p.add_argument("--dc", type=_positive_u32, default=None, help="cost output dimension")
    p.add_argument("--w", type=_positive_u32, default=None, help="control width per controller")
    p.add_argument("--n", type=_positive_u32, default=None, help="number of controllers")
    p.add_argument("--seed", type=_u64, default=None, help="generator seed")
    p.add_argument("--horizon", type=_positive_u32, default=settings.default_horizon,
                   help=f"decision steps T (default: {settings.default_horizon})")
    p.add_argument("--obs-width", type=_positive_u32, default=None,
                   help="observation rows per controller (output feedback)")
    p.add_argument("--out", required=True, help="scenario file to write")
    p.set_defaults(handler=cmd_generate)

    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv``, run the subcommand and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (None, 0) else EXIT_USAGE

    configure_logging(args.verbose)
    try:
        return args.handler(args)
    except UsageError as e:
        _diagnose({"error": "UsageError", "message": str(e)})
        return EXIT_USAGE
    except (ScenarioParseError, ModelValidationError) as e:
        _diagnose(e.to_dict())
        return EXIT_USAGE
    except LQGError as e:
        _diagnose(e.to_dict())
        return EXIT_DOMAIN


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
