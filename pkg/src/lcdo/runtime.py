"""Process-level runtime knobs."""

from __future__ import annotations

import os

__all__ = ["worker_count"]


def worker_count() -> int:
    """Worker cap from LCDO_THREADS; defaults to the available cores."""
    raw = os.environ.get("LCDO_THREADS", "").strip()
    if raw:
        try:
            n = int(raw)
        except ValueError:
            raise ValueError(f"LCDO_THREADS must be an integer, got {raw!r}") from None
        if n < 1:
            raise ValueError(f"LCDO_THREADS must be >= 1, got {n}")
        return n
    return os.cpu_count() or 1
