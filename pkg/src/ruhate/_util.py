"""Shared formatting and hashing helpers."""

from __future__ import annotations

import hashlib
from decimal import ROUND_HALF_UP, Decimal


def round_half_up(x: float, ndigits: int) -> float:
    """Round to `ndigits` decimals with ties going away from zero.

    Works on the shortest decimal repr of the float, so 0.7875 rounds to
    0.788 even though its binary image sits a hair below 0.7875.
    """
    q = Decimal(1).scaleb(-ndigits)
    return float(Decimal(repr(x)).quantize(q, rounding=ROUND_HALF_UP))


def fmt_fixed(x: float, ndigits: int) -> str:
    """Fixed-point string with half-up rounding, e.g. fmt_fixed(0.7875, 3) == '0.788'."""
    q = Decimal(1).scaleb(-ndigits)
    return str(Decimal(repr(x)).quantize(q, rounding=ROUND_HALF_UP))


def int_percent(part: int, whole: int) -> int:
    """Integer percentage with half-up rounding; 0 when whole == 0."""
    if whole == 0:
        return 0
    return int((Decimal(part) * 100 / Decimal(whole)).quantize(Decimal(1), rounding=ROUND_HALF_UP))


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()
