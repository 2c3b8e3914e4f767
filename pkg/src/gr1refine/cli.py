"""Command-line interface.

Subcommands: ``check`` (realizability verdict), ``counterstrategy`` (DOT or
JSON export), ``search`` (refinement search with JSON/CSV reports), and
``replay`` (scripted-trace replay printing the queue evolution).

Exit codes: 0 success / realizable; 2 parse, flag, or trace errors;
3 unrealizable (``check``); 4 variable cap exceeded; 5 ``counterstrategy``
on a realizable spec.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections import deque

from . import game, replay, search
from .formula import ParseError, parse_element, parse_spec

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_UNREALIZABLE = 3
EXIT_VAR_CAP = 4
EXIT_REALIZABLE = 5


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gr1refine",
        description="GR(1) realizability, counterstrategies, and assumptions refinement",
    )
    parser.add_argument(
        "--var-cap", type=_positive_int, default=None,
        help="explicit-state variable cap (default: $GR1_VAR_CAP or 16)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="decide realizability")
    p_check.add_argument("spec", help="spec file")
    p_check.add_argument("--json", action="store_true", help="emit {\"realizable\": bool}")

    p_cs = sub.add_parser("counterstrategy", help="export a counterstrategy")
    p_cs.add_argument("spec", help="spec file")
    p_cs.add_argument("--format", choices=("dot", "json"), default="dot")

    p_search = sub.add_parser("search", help="run the refinement search")
    p_search.add_argument("spec", help="spec file")
    p_search.add_argument("--mode", choices=[m.value for m in search.Mode],
                          default="minimal")
    p_search.add_argument("--max-expansions", type=_positive_int, default=100)
    p_search.add_argument("--timeout", type=float, default=None,
                          help="wall-clock limit in seconds")
    p_search.add_argument("--bias-width", type=_positive_int, default=5)
    p_search.add_argument("--bias", default="template",
                          help="'template' or 'scripted:<json file>'")
    p_search.add_argument("--json", dest="json_out", metavar="FILE",
                          help="write the result JSON here")
    p_search.add_argument("--csv", dest="csv_out", metavar="FILE",
                          help="write the statistics CSV here")
    p_search.add_argument("--no-timing", action="store_true",
                          help="omit wall-clock fields (golden-file testing)")
    p_search.add_argument("--threads", type=_positive_int, default=1,
                          help="worker cap for model-check cache warming")

    p_replay = sub.add_parser("replay", help="replay a scripted trace")
    p_replay.add_argument("trace", help="trace JSON file")
    p_replay.add_argument("--mode", choices=[m.value for m in search.Mode],
                          default=None, help="override the trace's mode")
    return parser


def _read_spec(path: str):
    try:
        with open(path, "r", encoding="ascii") as handle:
            return parse_spec(handle.read())
    except OSError as exc:
        raise ParseError(f"cannot read spec: {exc.strerror}", 0, 0) from exc


def _scripted_bias(path: str, spec):
    with open(path, "r", encoding="ascii") as handle:
        steps = json.load(handle)
    if not isinstance(steps, list) or not all(isinstance(s, list) for s in steps):
        raise replay.TraceError("scripted bias file must be a JSON list of string lists")
    variables = spec.variable_map()
    script = deque(
        [parse_element(text, variables, is_assumption=True) for text in step]
        for step in steps
    )

    def bias_fn(counterstrategy, current, spec_):
        return list(script.popleft()) if script else []

    return bias_fn


def cmd_check(args, var_cap: int) -> int:
    spec = _read_spec(args.spec)
    verdict = game.realizable(spec, var_cap)
    if args.json:
        print(json.dumps({"realizable": verdict}))
    else:
        print("realizable" if verdict else "unrealizable")
    return EXIT_OK if verdict else EXIT_UNREALIZABLE


def cmd_counterstrategy(args, var_cap: int) -> int:
    spec = _read_spec(args.spec)
    cs = game.compute_counterstrategy(spec, var_cap)
    print(cs.to_dot() if args.format == "dot" else cs.to_json())
    return EXIT_OK


def cmd_search(args, var_cap: int) -> int:
    spec = _read_spec(args.spec)
    cfg = search.SearchConfig(
        mode=search.Mode(args.mode),
        max_expansions=args.max_expansions,
        wall_clock_limit=args.timeout,
        bias_width=args.bias_width,
    )
    bias_fn = None
    if args.bias != "template":
        if not args.bias.startswith("scripted:"):
            raise replay.TraceError(
                f"unknown bias {args.bias!r}; use 'template' or 'scripted:<file>'"
            )
        bias_fn = _scripted_bias(args.bias.split(":", 1)[1], spec)
    result = search.refinement_search(
        spec, cfg, bias_fn, var_cap=var_cap, threads=args.threads
    )
    if args.json_out:
        with open(args.json_out, "w", encoding="ascii") as handle:
            handle.write(result.to_json(include_timing=not args.no_timing))
            handle.write("\n")
    if args.csv_out:
        with open(args.csv_out, "w", encoding="ascii", newline="") as handle:
            handle.write(search.emit_csv([(result.mode.value, result)]))
    print(f"{result.stats.sol} solution(s); terminated by {result.terminated_by}")
    for sol in result.solution_canonicals():
        print("  " + (" & ".join(sol) or "(empty refinement)"))
    return EXIT_OK


def cmd_replay(args, var_cap: int) -> int:
    trace = replay.load_trace(args.trace)
    mode = search.Mode(args.mode) if args.mode else None
    result = replay.run_replay(trace, mode)
    print(replay.format_report(result))
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    var_cap = args.var_cap
    if var_cap is None:
        try:
            var_cap = int(os.environ.get("GR1_VAR_CAP", game.DEFAULT_VAR_CAP))
        except ValueError:
            print("GR1_VAR_CAP is not an integer", file=sys.stderr)
            return EXIT_USAGE
    handlers = {
        "check": cmd_check,
        "counterstrategy": cmd_counterstrategy,
        "search": cmd_search,
        "replay": cmd_replay,
    }
    try:
        return handlers[args.command](args, var_cap)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except replay.TraceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except game.VarCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VAR_CAP
    except game.RealizableSpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REALIZABLE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
