"""q-shifted factorials, Pochhammer symbols and terminating hypergeometric sums.

All functions are written against plain arithmetic operators, so they accept
Python ``complex``/``float`` as well as ``mpmath`` numbers; the result has the
type that the arithmetic produces.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import DenominatorError, DomainError

#: Denominator factors with magnitude below this raise instead of overflowing.
DENOMINATOR_FLOOR = 1e-300


def qpochhammer(a, q, k: int):
    """Return ``(a; q)_k``, the product of ``1 - a q^j`` for ``j < k``."""
    if k < 0:
        raise DomainError(f"order k must be nonnegative, got {k}")
    result = 1
    qj = 1
    for _ in range(k):
        result = result * (1 - a * qj)
        qj = qj * q
    return result


def qpochhammer_inf(a, q, tol: float = 1e-16):
    """Truncated infinite product ``(a; q)_inf``.

    Multiplies factors ``1 - a q^k`` until ``|a| q^k < tol``. The neglected
    tail changes the product by a relative amount of order ``tol / (1 - q)``.
    """
    if not 0 < q < 1:
        raise DomainError(f"infinite q-product needs 0 < q < 1, got q={q}")
    if tol <= 0:
        raise DomainError("tol must be positive")
    result = 1
    term = a
    while abs(term) >= tol:
        result = result * (1 - term)
        term = term * q
    return result


def pochhammer(a, k: int):
    """Rising factorial ``(a)_k = a (a+1) ... (a+k-1)``."""
    if k < 0:
        raise DomainError(f"order k must be nonnegative, got {k}")
    result = 1
    for j in range(k):
        result = result * (a + j)
    return result


@dataclass(frozen=True)
class TerminatingSeriesSpec:
    """Terminating ``r+1 Phi r`` (``basis='q'``) or ``r+1 F r`` (``basis='ordinary'``).

    ``upper`` holds the numerator parameters *after* the terminating one,
    which is synthesised from ``n`` (``q^-n`` or ``-n``).
    """

    n: int
    upper: Sequence = field(default_factory=tuple)
    lower: Sequence = field(default_factory=tuple)
    z: object = 1
    basis: str = "q"
    q: object = None

    def __post_init__(self):
        if self.n < 0:
            raise DomainError(f"termination degree must be nonnegative, got {self.n}")
        if self.basis not in ("q", "ordinary"):
            raise DomainError(f"unknown basis {self.basis!r}")
        if self.basis == "q" and (self.q is None or not 0 < self.q < 1):
            raise DomainError(f"q-basis series needs 0 < q < 1, got q={self.q}")
        if len(self.upper) != len(self.lower):
            raise DomainError("upper and lower parameter lists must have equal length")


def terminating_series(spec: TerminatingSeriesSpec):
    """Sum the n+1 terms of a terminating series with a running term ratio.

    Term ``k+1`` is obtained from term ``k`` by multiplying with the ratio of
    consecutive factorials, so no full Pochhammer product is ever formed.
    """
    n, z = spec.n, spec.z
    term = 1
    total = 1
    if spec.basis == "q":
        q = spec.q
        qk = 1  # q**k
        for k in range(n):
            num = 1 - q ** (k - n)
            den = 1 - qk * q
            for pos, (u, b) in enumerate(zip(spec.upper, spec.lower)):
                num = num * (1 - u * qk)
                fac = 1 - b * qk
                if abs(fac) < DENOMINATOR_FLOOR:
                    raise DenominatorError(
                        f"lower parameter b{pos + 1}={b!r} makes a denominator vanish at k={k + 1}",
                        parameter=pos,
                        index=k + 1,
                    )
                den = den * fac
            term = term * num / den * z
            total = total + term
            qk = qk * q
    else:
        for k in range(n):
            num = k - n
            den = k + 1
            for pos, (u, b) in enumerate(zip(spec.upper, spec.lower)):
                num = num * (u + k)
                fac = b + k
                if abs(fac) < DENOMINATOR_FLOOR:
                    raise DenominatorError(
                        f"lower parameter b{pos + 1}={b!r} makes a denominator vanish at k={k + 1}",
                        parameter=pos,
                        index=k + 1,
                    )
                den = den * fac
            term = term * num / den * z
            total = total + term
    return total


def log2_abs(value) -> float:
    """``log2 |value|`` for floats, complexes and mpmath numbers; ``-inf`` at zero."""
    mag = abs(value)
    if mag == 0:
        return -math.inf
    if hasattr(mag, "context"):
        # mpmath magnitudes may lie outside the double range
        return float(mag.context.log(mag, 2))
    return math.log2(mag)
