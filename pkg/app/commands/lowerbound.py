from __future__ import annotations

import argparse

from app.commands.utils import EXIT_COUNTEREXAMPLE, EXIT_OK, UsageError, emit, emit_json, parse_range
from app.services.errors import SFunctionSpecError
from app.services.lowerbound import SFunctionSpec, flip_sensitivity, verify_fib_growth


def _completion(text: str | None) -> SFunctionSpec:
    if not text:
        return SFunctionSpec()
    pairs = {}
    for item in text.split(","):
        row, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--completion expects ROW=VALUE pairs, got {item!r}")
        pairs[row.strip()] = value.strip()
    return SFunctionSpec.from_text(pairs)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("lowerbound", help="Fibonacci copy-count check on the V_D family")
    parser.add_argument("--depth", default="1-20", help="D or LOW-HIGH (default 1-20)")
    parser.add_argument("--completion", help="free rows of s, e.g. 001=001,010=010,100=100")
    parser.add_argument("--json", action="store_true")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    low, high = parse_range(args.depth)
    if low < 1 or low > high:
        raise SFunctionSpecError(f"depth range {args.depth!r} must be positive and non-empty")
    spec = _completion(args.completion)
    rows = [verify_fib_growth(depth, spec) for depth in range(low, high + 1)]
    flips = flip_sensitivity(spec)
    ok = all(row.passed for row in rows)

    if args.json:
        emit_json(
            {
                "ok": ok,
                "flips": {f"x{k + 1}": [f"y{i + 1}" for i in v] for k, v in flips.items()},
                "rows": [
                    {
                        "depth": r.depth,
                        "fib": r.fib,
                        "chain_bound": r.chain_bound,
                        "propagated_bound": r.propagated_bound,
                        "measured_demand": r.measured_demand,
                        "static_volume": r.static_volume,
                        "passed": r.passed,
                    }
                    for r in rows
                ],
            }
        )
        return EXIT_OK if ok else EXIT_COUNTEREXAMPLE

    emit(f"{'D':>3} {'a_D':>8} {'propagated':>12} {'demand':>14} {'static_volume':>26} result")
    for r in rows:
        emit(
            f"{r.depth:>3} {r.fib:>8} {r.propagated_bound:>12} {r.measured_demand:>14} "
            f"{r.static_volume:>26} {'pass' if r.passed else 'FAIL'}"
        )
    for position, outputs in flips.items():
        emit(f"flip x{position + 1} from 111 changes: " + (" ".join(f"y{i + 1}" for i in outputs) or "-"))
    return EXIT_OK if ok else EXIT_COUNTEREXAMPLE
