"""Command-line interface.

    blimpsim run <scenario> [--log out.csv] [--metrics out.json] [--seed N]
    blimpsim replay <scenario> <trace> [--log ...] [--metrics ...] [--seed N]
    blimpsim validate <scenario>
    blimpsim serve <scenario> [--port P] [--log ...] [--record trace.csv]

Exit codes: 0 success, 1 scenario failure (goal not reached or aborted run),
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from .environment import InvalidScenarioError
from .runner import SimulationAbort, load_trace, replay_commands, run
from .scenario import MODE_AUTOPILOT, ScenarioError, load_scenario

EXIT_OK = 0
EXIT_SCENARIO_FAILED = 1
EXIT_USAGE = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blimpsim", description="Blimp bicopter simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario headless")
    p_run.add_argument("scenario")
    p_run.add_argument("--log", help="write the trajectory CSV here")
    p_run.add_argument("--metrics", help="write run metrics JSON here")
    p_run.add_argument("--seed", type=int, help="override the scenario seed")

    p_replay = sub.add_parser("replay", help="replay a recorded command trace")
    p_replay.add_argument("scenario")
    p_replay.add_argument("trace")
    p_replay.add_argument("--log")
    p_replay.add_argument("--metrics")
    p_replay.add_argument("--seed", type=int)

    p_validate = sub.add_parser("validate", help="check a scenario file")
    p_validate.add_argument("scenario")

    p_serve = sub.add_parser("serve", help="serve the live teleop bridge")
    p_serve.add_argument("scenario")
    p_serve.add_argument("--port", type=int, default=8765)
    p_serve.add_argument("--log", help="write the trajectory CSV on shutdown")
    p_serve.add_argument("--record", help="write the received command trace on shutdown")
    return parser


def _load(args) -> object:
    config = load_scenario(args.scenario)
    seed = getattr(args, "seed", None)
    if seed is not None:
        if not 0 <= seed < 2**64:
            raise ScenarioError(f"--seed must be an unsigned 64-bit integer, got {seed}")
        config = replace(config, seed=seed, wind=replace(config.wind, seed=seed))
    return config


def _finish(args, config, log, metrics) -> int:
    if args.log:
        log.write_csv(args.log)
    if args.metrics:
        with open(args.metrics, "w") as fh:
            json.dump(metrics.to_dict(), fh, indent=2)
            fh.write("\n")
    summary = ", ".join(f"{k}={v}" for k, v in metrics.to_dict().items())
    print(f"{config.name}: {summary}")
    if config.mode == MODE_AUTOPILOT and not metrics.reached_goal:
        return EXIT_SCENARIO_FAILED
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed the usage message
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK

    try:
        if args.command == "validate":
            load_scenario(args.scenario)
            print(f"{args.scenario}: ok")
            return EXIT_OK

        config = _load(args)
        if args.command == "run":
            log, metrics = run(config)
            return _finish(args, config, log, metrics)
        if args.command == "replay":
            log, metrics = replay_commands(config, load_trace(args.trace))
            return _finish(args, config, log, metrics)
        if args.command == "serve":
            from .bridge import serve  # deferred: keeps headless paths socket-free

            serve(config, args.port, log_path=args.log, record_path=args.record)
            return EXIT_OK
    except (ScenarioError, InvalidScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SimulationAbort as exc:
        print(f"error: {exc}", file=sys.stderr)
        if getattr(args, "log", None):
            exc.log.write_csv(args.log)
        return EXIT_SCENARIO_FAILED
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


def entry():  # console-script shim
    sys.exit(main())


if __name__ == "__main__":
    entry()
