"""Per-thread mpmath contexts.

The global ``mpmath.mp`` context carries mutable precision state, so every
thread gets its own context and callers change precision only through
``workprec`` blocks on it.
"""
import math
import threading

import mpmath

#: Extra bits on top of the cancellation estimate for every evaluation.
GUARD_BITS = 12

_local = threading.local()


def context() -> mpmath.ctx_mp.MPContext:
    ctx = getattr(_local, "ctx", None)
    if ctx is None:
        ctx = mpmath.MPContext()
        _local.ctx = ctx
    return ctx


def is_mp(value) -> bool:
    return hasattr(value, "context")


def bits_for(target_bits: int, cancel_log2: float) -> int:
    """Working precision delivering ``target_bits`` after ``cancel_log2`` bits are lost."""
    return int(target_bits + GUARD_BITS + max(0, math.ceil(cancel_log2)))
