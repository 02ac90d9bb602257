"""Zeros of the Askey-Wilson / Wilson polynomials inside the particle chamber.

Dense sign-change scan, bisection down to a bracket, then Newton polish with
a central-difference derivative. Polynomial values come from the prepared
mpmath evaluators in :mod:`polynomials`, so signs are reliable even where the
hypergeometric sum cancels heavily.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _precision
from .errors import ChamberError, ConvergenceError, ModeError, RootCountError
from .polynomials import RATIONAL, TRIGONOMETRIC, CouplingParams, normalize_mode, polynomial_for

HALF_PI = math.pi / 2


@dataclass(frozen=True)
class Configuration:
    """Strictly increasing positions inside the chamber of ``mode``.

    ``refined`` optionally carries the same positions as mpmath numbers at
    extended precision; it is ignored for equality.
    """

    mode: str
    positions: tuple
    refined: tuple | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "mode", normalize_mode(self.mode))
        pos = tuple(float(x) for x in self.positions)
        object.__setattr__(self, "positions", pos)
        if not pos:
            raise ChamberError("configuration needs at least one position")
        if not all(math.isfinite(x) for x in pos):
            raise ChamberError("positions must be finite")
        if pos[0] <= 0:
            raise ChamberError(f"positions must be > 0, got x1={pos[0]}")
        if self.mode == TRIGONOMETRIC and pos[-1] >= HALF_PI:
            raise ChamberError(f"positions must be < pi/2, got xn={pos[-1]}")
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise ChamberError("positions must be strictly increasing")
        if self.refined is not None and len(self.refined) != len(pos):
            raise ChamberError("refined positions must match positions in length")

    @property
    def n(self) -> int:
        return len(self.positions)

    def as_array(self) -> np.ndarray:
        return np.array(self.positions)


@dataclass(frozen=True)
class RootFindSettings:
    points_per_root: int = 64
    bisection_tol: float = 1e-8
    newton_tol: float = 1e-13
    max_newton_steps: int = 40
    refinements: int = 1

    def __post_init__(self):
        if self.points_per_root <= 0 or self.bisection_tol <= 0 or self.newton_tol <= 0:
            raise ValueError("root finding settings must be positive")
        if self.max_newton_steps <= 0 or self.refinements < 0:
            raise ValueError("root finding settings must be positive")
        if self.newton_tol > self.bisection_tol:
            raise ValueError("Newton tolerance must not exceed the bisection tolerance")


DEFAULT_SETTINGS = RootFindSettings()


class _Target:
    """``x -> p_n(x)`` (trig) or ``x -> p_n(x / g)`` (rational) at a fixed working precision."""

    def __init__(self, c: CouplingParams, n: int, upper: float):
        self.poly = polynomial_for(c, n)
        self.rational = c.mode == RATIONAL
        self.g = c.g
        radius = upper / c.g if self.rational else 0.0
        self.bits = self.poly.working_bits(radius, target_bits=64)
        self.ctx = _precision.context()

    def __call__(self, x) -> float:
        return float(self.mp(x))

    def mp(self, x):
        ctx = self.ctx
        with ctx.workprec(self.bits):
            z = ctx.mpf(x)
            if self.rational:
                z = z / ctx.mpf(self.g)
                return self.poly._nested(ctx, z * z, self.bits)
            return self.poly._nested(ctx, ctx.cos(2 * z), self.bits)


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def _scan(target: _Target, lo: float, hi: float, points: int):
    grid = np.linspace(lo, hi, points + 1)
    values = [target.mp(float(x)) for x in grid]
    brackets = []
    for i in range(points):
        s0, s1 = _sign(values[i]), _sign(values[i + 1])
        if s0 == 0 and 0 < i:
            brackets.append((float(grid[i]), float(grid[i])))
        elif s0 * s1 < 0:
            brackets.append((float(grid[i]), float(grid[i + 1])))
    return brackets, float(grid[1] - grid[0])


def _polish(target: _Target, lo: float, hi: float, width: float, s: RootFindSettings) -> float:
    if lo == hi:
        return lo
    f_lo = _sign(target.mp(lo))
    while hi - lo > s.bisection_tol:
        mid = 0.5 * (lo + hi)
        f_mid = _sign(target.mp(mid))
        if f_mid == 0:
            return mid
        if f_mid == f_lo:
            lo = mid
        else:
            hi = mid
    h = 1e-7 * width
    x = 0.5 * (lo + hi)
    for _ in range(s.max_newton_steps):
        fx = target.mp(x)
        sx = _sign(fx)
        if sx == 0:
            return x
        if sx == f_lo:
            lo = x
        else:
            hi = x
        deriv = (target.mp(x + h) - target.mp(x - h)) / (2 * h)
        step = float(fx / deriv) if deriv != 0 else math.inf
        new = x - step
        if not lo <= new <= hi:
            # Newton left its bracket: bisect instead
            new = 0.5 * (lo + hi)
            step = x - new
        if abs(step) <= s.newton_tol * abs(x) or new == x:
            return new
        x = new
    raise ConvergenceError(f"Newton polish did not converge near x={x}")


def _derivative(target: _Target, x: float, width: float) -> float:
    h = 1e-7 * width
    return float((target.mp(x + h) - target.mp(x - h)) / (2 * h))


def _finish(target, brackets, width, spacing, s, mode):
    zeros = [_polish(target, lo, hi, width, s) for lo, hi in brackets]
    zeros.sort()
    for z in zeros:
        slope = abs(_derivative(target, z, width))
        # a simple zero has |p'| h comparable to |p(z +- h)|; a double one has p' = 0
        local = max(abs(target(z - spacing)), abs(target(z + spacing)))
        if slope * spacing <= 1e-8 * local:
            raise RootCountError(f"zero at x={z} is not numerically simple")
        if abs(target(z)) > s.newton_tol * slope * max(abs(z), width * 1e-3):
            raise ConvergenceError(f"residual at zero x={z} above Newton tolerance")
    return Configuration(mode, tuple(zeros))


def find_zeros_trig(c: CouplingParams, n: int, s: RootFindSettings = DEFAULT_SETTINGS) -> Configuration:
    """The n zeros of the Askey-Wilson polynomial in (0, pi/2)."""
    if c.mode != TRIGONOMETRIC:
        raise ModeError("find_zeros_trig needs trigonometric couplings")
    if n < 1:
        raise ValueError("degree n must be at least 1")
    target = _Target(c, n, HALF_PI)
    points = s.points_per_root * n
    for _ in range(s.refinements + 1):
        brackets, spacing = _scan(target, 0.0, HALF_PI, points)
        if len(brackets) == n:
            return _finish(target, brackets, HALF_PI, spacing, s, TRIGONOMETRIC)
        points *= 2
    raise RootCountError(f"found {len(brackets)} sign changes, expected {n}")


def find_zeros_rational(c: CouplingParams, n: int, s: RootFindSettings = DEFAULT_SETTINGS) -> Configuration:
    """The n positive zeros of ``x -> p_n(x/g)`` for the rescaled Wilson polynomial."""
    if c.mode != RATIONAL:
        raise ModeError("find_zeros_rational needs rational couplings")
    if n < 1:
        raise ValueError("degree n must be at least 1")
    u0 = max(c.external) / c.g + n
    upper = c.g * u0
    limit = c.g * u0 * 2**10
    found = 0
    while upper <= limit:
        target = _Target(c, n, upper)
        points = s.points_per_root * n
        for _ in range(s.refinements + 1):
            brackets, spacing = _scan(target, 0.0, upper, points)
            found = len(brackets)
            if found > n:
                raise RootCountError(f"found {found} sign changes, expected {n}")
            if found == n:
                return _finish(target, brackets, upper, spacing, s, RATIONAL)
            points *= 2
        upper *= 2
    raise RootCountError(f"no window up to x={limit} holds {n} sign changes (last count {found})")


def find_zeros(c: CouplingParams, n: int, s: RootFindSettings = DEFAULT_SETTINGS) -> Configuration:
    if c.mode == TRIGONOMETRIC:
        return find_zeros_trig(c, n, s)
    return find_zeros_rational(c, n, s)


def refine_zeros(c: CouplingParams, config: Configuration, bits: int = 256) -> Configuration:
    """Newton-refine the zeros at ``bits`` of mpmath precision.

    Returns a copy of ``config`` whose ``refined`` field holds the zeros as
    mpmath numbers; ``positions`` are unchanged.
    """
    n = config.n
    poly = polynomial_for(c, n)
    ctx = _precision.context()
    rational = c.mode == RATIONAL
    upper = config.positions[-1] * 2
    work = bits + poly.working_bits(upper / c.g if rational else 0.0, 0)
    refined = []
    with ctx.workprec(work):
        g = ctx.mpf(c.g)

        def f(x):
            if rational:
                u = x / g
                return poly._nested(ctx, u * u, work)
            return poly._nested(ctx, ctx.cos(2 * x), work)

        h = ctx.ldexp(1, -bits // 3)
        for x0 in config.positions:
            x = ctx.mpf(x0)
            for _ in range(60):
                step = f(x) * 2 * h / (f(x + h) - f(x - h))
                x -= step
                if abs(step) <= ctx.ldexp(abs(x), -bits + 4):
                    break
            else:
                raise ConvergenceError(f"high-precision refinement stalled near x={x0}")
            refined.append(x)
    return Configuration(config.mode, config.positions, refined=tuple(refined))


def grid_scan_zeros(c: CouplingParams, n: int, points: int = 100_000, tol: float = 1e-13) -> list:
    """Brute-force oracle: exhaustive grid scan plus plain bisection, no Newton."""
    upper = HALF_PI if c.mode == TRIGONOMETRIC else c.g * (max(c.external) / c.g + n)
    while True:
        target = _Target(c, n, upper)
        grid = np.linspace(0.0, upper, points + 1)
        signs = [_sign(target.mp(float(x))) for x in grid]
        idx = [i for i in range(points) if signs[i] * signs[i + 1] < 0]
        if len(idx) >= n or c.mode == TRIGONOMETRIC:
            break
        upper *= 2
    zeros = []
    for i in idx:
        lo, hi = float(grid[i]), float(grid[i + 1])
        s_lo = signs[i]
        while hi - lo > tol * max(1.0, abs(hi)):
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            if _sign(target.mp(mid)) == s_lo:
                lo = mid
            else:
                hi = mid
        zeros.append(0.5 * (lo + hi))
    return zeros


def zero_residuals(c: CouplingParams, config: Configuration) -> list:
    """Newton-step size ``|p(z) / p'(z)|`` at each zero: an estimate of its position error."""
    upper = HALF_PI if c.mode == TRIGONOMETRIC else 2 * config.positions[-1]
    target = _Target(c, config.n, upper)
    out = []
    for z in config.positions:
        deriv = _derivative(target, z, upper)
        out.append(abs(float(target.mp(z)) / deriv) if deriv else math.inf)
    return out
