from __future__ import annotations

from app.services.errors import EncodingError


def parse_bits(raw: str) -> tuple[int, ...]:
    cleaned = raw.strip()
    if set(cleaned) - {"0", "1"}:
        raise EncodingError(f"input must be a string of 0/1 characters, got {raw!r}")
    return tuple(int(ch) for ch in cleaned)


def format_bits(bits: tuple[int, ...] | list[int] | None) -> str:
    if bits is None:
        return "-"
    return "".join(str(bit) for bit in bits)


def parse_range(raw: str) -> tuple[int, int]:
    """``3`` means [3, 3]; ``1-4`` means [1, 4]."""
    low, sep, high = raw.strip().partition("-")
    try:
        return (int(low), int(high)) if sep else (int(low), int(low))
    except ValueError as exc:
        raise ValueError(f"expected N or LOW-HIGH, got {raw!r}") from exc
