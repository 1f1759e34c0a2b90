from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence

from pydantic import ValidationError

from app.commands import (
    register_compile,
    register_corpus,
    register_lowerbound,
    register_run,
    register_verify,
)
from app.commands.utils import EXIT_USAGE, UsageError
from app.core.config import get_settings
from app.core.logging import setup_logging
from app.services.errors import StepCrnError

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(
        prog=settings.app_name,
        description="Compile threshold circuits into step CRN programs, run and verify them.",
    )
    parser.add_argument("--log-level", default=settings.log_level)
    parser.add_argument(
        "--plain-logs", action="store_true", help="human-readable logs instead of JSON lines"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    register_compile(subparsers)
    register_run(subparsers)
    register_verify(subparsers)
    register_lowerbound(subparsers)
    register_corpus(subparsers)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    settings = get_settings()
    setup_logging(args.log_level.upper(), json_output=settings.log_json and not args.plain_logs)
    try:
        return args.handler(args)
    except OSError as exc:
        target = exc.filename if exc.filename is not None else ""
        sys.stderr.write(f"error: cannot open {target}: {exc.strerror or exc}\n")
    except (StepCrnError, UsageError, ValidationError) as exc:
        sys.stderr.write(f"error: {exc}\n")
    logger.debug("command failed", extra={"command": args.command})
    return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
