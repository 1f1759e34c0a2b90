from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Any

from app.services.utils import format_bits, parse_bits
from app.services.utils import parse_range as _parse_range

__all__ = ["format_bits", "parse_bits"]

EXIT_OK = 0
EXIT_COUNTEREXAMPLE = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Bad command-line arguments that argparse itself cannot catch."""


def parse_range(text: str) -> tuple[int, int]:
    try:
        return _parse_range(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def parse_seeds(text: str) -> list[int]:
    seeds: list[int] = []
    for part in filter(None, text.split(",")):
        low, high = parse_range(part)
        seeds.extend(range(low, high + 1))
    if not seeds:
        raise UsageError("no seeds given")
    return seeds


def read_text(path: str | Path) -> str:
    return Path(path).read_text(encoding="utf-8")


def emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def emit_json(payload: Any) -> None:
    emit(json.dumps(payload, indent=2, default=str))
