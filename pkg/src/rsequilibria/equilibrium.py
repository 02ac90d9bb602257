"""Potentials, Hamiltonian, Bethe-type system and the verification bundle.

Positions live in a :class:`~rsequilibria.roots.Configuration`. Indices ``j``
are zero-based throughout. The double-precision hot loops are in
:mod:`rsequilibria.kernels`; the Hamiltonian at refined zeros is evaluated
with the same formulas in mpmath.
"""
from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import _precision, kernels
from .errors import ChamberError, ConvergenceError, ModeError, RSError
from .polynomials import (
    RATIONAL,
    TRIGONOMETRIC,
    CouplingParams,
    aw_coefficient,
    aw_eval_factored,
    difference_residual,
    normalize_mode,
    polynomial_for,
    wilson_coefficient,
    wilson_eval_factored,
)
from .roots import HALF_PI, Configuration, find_zeros, refine_zeros

_MODE_CODE = {TRIGONOMETRIC: 0, RATIONAL: 1}


def _code(c: CouplingParams) -> int:
    return _MODE_CODE[c.mode]


def _as_config(c: CouplingParams, x) -> Configuration:
    if isinstance(x, Configuration):
        if x.mode != c.mode:
            raise ModeError(f"configuration mode {x.mode} does not match couplings mode {c.mode}")
        return x
    return Configuration(c.mode, tuple(x))


@dataclass(frozen=True)
class PhasePoint:
    """Momenta ``p`` and positions ``x`` of the n-particle system."""

    mode: str
    p: tuple
    x: Configuration

    def __post_init__(self):
        object.__setattr__(self, "mode", normalize_mode(self.mode))
        p = tuple(float(v) for v in self.p)
        object.__setattr__(self, "p", p)
        if not all(math.isfinite(v) for v in p):
            raise ValueError("momenta must be finite")
        if len(p) != self.x.n:
            raise ValueError(f"{len(p)} momenta for {self.x.n} positions")
        if self.x.mode != self.mode:
            raise ModeError("phase point and configuration modes differ")

    @classmethod
    def at_rest(cls, x: Configuration) -> "PhasePoint":
        return cls(x.mode, (0.0,) * x.n, x)


# --------------------------------------------------------------------------
# potentials and Hamiltonian


def potentials(c: CouplingParams, x, sign: int = 1) -> np.ndarray:
    """All ``V_j(sign * x)`` as a complex array, from the literal product."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    cfg = _as_config(c, x)
    return np.asarray(kernels.potentials_direct(_code(c), c.g, c.external, cfg.as_array(), sign), dtype=complex)


def potential_V(c: CouplingParams, x, j: int, sign: int = 1) -> complex:
    """``V_j(x)`` (``sign=1``) or ``V_j(-x)`` (``sign=-1``)."""
    cfg = _as_config(c, x)
    if not 0 <= j < cfg.n:
        raise IndexError(f"particle index {j} out of range for n={cfg.n}")
    return complex(potentials(c, cfg, sign)[j])


def potentials_polar(c: CouplingParams, x):
    """``(log|V_j|, arg V_j)`` arrays; the phase is the unwrapped arctangent sum."""
    cfg = _as_config(c, x)
    logs, phases = kernels.potentials_polar(_code(c), c.g, c.external, cfg.as_array())
    return np.asarray(logs, dtype=float), np.asarray(phases, dtype=float)


def hamiltonian(c: CouplingParams, pt: PhasePoint, precise: bool = False, bits: int = 256) -> float:
    """``sum_j cosh(p_j)|V_j| - Re V_j``, nonnegative by construction.

    With ``precise=True`` the sum is taken in mpmath at ``bits`` precision,
    using the refined positions of ``pt.x`` when present.
    """
    cfg = _as_config(c, pt.x)
    if not precise:
        return float(kernels.hamiltonian(_code(c), c.g, c.external, np.array(pt.p), cfg.as_array()))
    ctx = _precision.context()
    with ctx.workprec(bits):
        xs = list(cfg.refined) if cfg.refined is not None else [ctx.mpf(v) for v in cfg.positions]
        ps = [ctx.mpf(v) for v in pt.p]
        gs = [ctx.mpf(v) for v in c.external]
        value = kernels.reference.hamiltonian(_code(c), ctx.mpf(c.g), gs, ps, xs, m=ctx)
        return float(value)


@dataclass(frozen=True)
class BetheEvaluation:
    """``Im V_j`` (the residuals), ``Re V_j`` and the normalized residuals."""

    residuals: tuple
    real_parts: tuple
    normalized: tuple

    @property
    def max_normalized(self) -> float:
        return max(self.normalized)


def bethe_evaluation(c: CouplingParams, x) -> BetheEvaluation:
    values = potentials(c, x)
    return BetheEvaluation(
        residuals=tuple(float(v.imag) for v in values),
        real_parts=tuple(float(v.real) for v in values),
        normalized=tuple(float(abs(v.imag) / (1 + abs(v))) for v in values),
    )


def bethe_residual(c: CouplingParams, x) -> list:
    """``R_j = Im V_j(x)``; zero exactly when ``V_j(x) = V_j(-x)``."""
    return list(bethe_evaluation(c, x).residuals)


# --------------------------------------------------------------------------
# Newton solver for the Bethe-type system


def default_guess(c: CouplingParams, n: int) -> Configuration:
    if c.mode == TRIGONOMETRIC:
        return Configuration(c.mode, tuple(j * math.pi / (2 * (n + 1)) for j in range(1, n + 1)))
    span = c.g + max(c.external)
    return Configuration(c.mode, tuple(j * span / n for j in range(1, n + 1)))


def _admissible(mode: str, x: np.ndarray) -> bool:
    if not np.all(np.isfinite(x)) or x[0] <= 0 or np.any(np.diff(x) <= 0):
        return False
    return mode != TRIGONOMETRIC or x[-1] < HALF_PI


def _normalized_residual(logs, phases) -> float:
    mag = np.exp(np.minimum(logs, 700.0))
    return float(np.max(mag * np.abs(np.sin(phases)) / (1 + mag)))


def solve_bethe_newton(
    c: CouplingParams,
    n: int,
    x0: Configuration | None = None,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> Configuration:
    """Damped Newton iteration for ``arg V_j(x) = 0``.

    The unknowns are driven through the phases ``arg V_j``, which vanish
    exactly where ``Im V_j`` does (``Re V_j > 0`` on the chamber) but stay
    of order one however large ``|V_j|`` gets. Convergence is declared when
    ``max_j |Im V_j| / (1 + |V_j|) < tol``.
    """
    if n < 1:
        raise ValueError("degree n must be at least 1")
    x = (default_guess(c, n) if x0 is None else _as_config(c, x0)).as_array()
    if len(x) != n:
        raise ValueError(f"initial guess has {len(x)} positions, expected {n}")
    code = _code(c)

    def phases(v):
        logs, ph = kernels.potentials_polar(code, c.g, c.external, v)
        return np.asarray(logs), np.asarray(ph)

    logs, phi = phases(x)
    for _ in range(max_iter):
        if _normalized_residual(logs, phi) < tol:
            return Configuration(c.mode, tuple(np.sort(x)))
        width = HALF_PI if c.mode == TRIGONOMETRIC else x[-1]
        h = 1e-6 * width
        jac = np.empty((n, n))
        for k in range(n):
            e = np.zeros(n)
            e[k] = h
            jac[:, k] = (phases(x + e)[1] - phases(x - e)[1]) / (2 * h)
        try:
            step = np.linalg.solve(jac, -phi)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(jac, -phi, rcond=None)[0]
        norm = np.max(np.abs(phi))
        t = 1.0
        seen_admissible = False
        for _ in range(60):
            trial = x + t * step
            if _admissible(c.mode, trial):
                seen_admissible = True
                t_logs, t_phi = phases(trial)
                if np.max(np.abs(t_phi)) < norm:
                    x, logs, phi = trial, t_logs, t_phi
                    break
            t *= 0.5
        else:
            if not seen_admissible:
                raise ChamberError("no admissible Newton step inside the chamber")
            if _normalized_residual(logs, phi) < 1e3 * tol:
                # stagnated at the rounding floor, just above tol
                break
            raise ConvergenceError("Newton line search stalled before reaching tolerance")
    if _normalized_residual(logs, phi) < tol:
        return Configuration(c.mode, tuple(np.sort(x)))
    raise ConvergenceError(f"Bethe Newton solver did not reach tol={tol} in {max_iter} iterations")


# --------------------------------------------------------------------------
# Hamiltonian minimization oracle


def _to_positions(mode: str, y: np.ndarray) -> np.ndarray:
    if mode == TRIGONOMETRIC:
        # ordered logistic map: softmax over (0, y_1..y_n), cumulative sum scaled to pi/2
        z = np.concatenate(([0.0], y))
        w = np.exp(z - z.max())
        w /= w.sum()
        return HALF_PI * np.cumsum(w[1:])
    return np.cumsum(np.exp(y))


def _from_positions(mode: str, x: np.ndarray) -> np.ndarray:
    gaps = np.diff(np.concatenate(([0.0], x)))
    if mode == TRIGONOMETRIC:
        w0 = 1 - x[-1] / HALF_PI
        return np.log(gaps / HALF_PI) - math.log(w0)
    return np.log(gaps)


@dataclass(frozen=True)
class StartSummary:
    index: int
    value: float
    iterations: int
    positions: tuple
    momenta: tuple


@dataclass(frozen=True)
class OracleResult:
    point: PhasePoint
    value: float
    starts: tuple = field(default_factory=tuple)


def _initial_state(c: CouplingParams, n: int, rng: np.random.Generator):
    if c.mode == TRIGONOMETRIC:
        x = np.sort(rng.uniform(0.0, HALF_PI, n))
    else:
        x = np.sort(rng.uniform(0.0, 2 * (c.g + max(c.external) + n * c.g), n))
    while not _admissible(c.mode, x):  # measure-zero ties
        x = np.sort(rng.uniform(0.0, x[-1] + 1.0, n))
    p = rng.normal(0.0, 1.0, n)
    return np.concatenate((p, _from_positions(c.mode, x)))


def _run_start(c: CouplingParams, n: int, seq: np.random.SeedSequence, index: int, maxiter: int, xatol: float, passes: int):
    rng = np.random.default_rng(seq)
    code = _code(c)
    gs = c.external

    def objective(z):
        x = _to_positions(c.mode, z[n:])
        if not _admissible(c.mode, x):
            return math.inf
        return kernels.hamiltonian(code, c.g, gs, z[:n], x)

    z = _initial_state(c, n, rng)
    best = objective(z)
    iterations = 0
    for _ in range(passes):
        res = minimize(
            objective,
            z,
            method="Nelder-Mead",
            options={"maxiter": maxiter, "xatol": xatol, "fatol": math.inf, "adaptive": True},
        )
        iterations += int(res.nit)
        improved = res.fun < best
        if res.fun <= best:
            z, best = res.x, float(res.fun)
        if not improved:
            break
    x = _to_positions(c.mode, z[n:])
    return StartSummary(index, float(best), iterations, tuple(float(v) for v in x), tuple(float(v) for v in z[:n]))


def minimize_hamiltonian_oracle(
    c: CouplingParams,
    n: int,
    starts: int = 8,
    seed=0,
    maxiter: int = 2000,
    xatol: float = 1e-15,
    passes: int = 6,
    workers: int | None = None,
) -> OracleResult:
    """Multi-start Nelder-Mead minimization of ``H`` over momenta and positions.

    Positions are reached through an ordered reparameterization, so the
    search is unconstrained. Each start restarts the simplex from its own
    endpoint (up to ``passes`` times) while that still lowers ``H``. Per-start
    seeds are spawned from ``seed``; serial and threaded runs agree exactly.
    """
    if starts < 1:
        raise ValueError("starts must be at least 1")
    if n < 1:
        raise ValueError("degree n must be at least 1")
    seqs = np.random.SeedSequence(seed).spawn(starts)
    jobs = [(c, n, seqs[i], i, maxiter, xatol, passes) for i in range(starts)]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            summaries = list(pool.map(lambda args: _run_start(*args), jobs))
    else:
        summaries = [_run_start(*args) for args in jobs]
    best = min(summaries, key=lambda s: (s.value, s.index))
    cfg = Configuration(c.mode, best.positions)
    return OracleResult(PhasePoint(c.mode, best.momenta, cfg), best.value, tuple(summaries))


# --------------------------------------------------------------------------
# verification bundle


@dataclass(frozen=True)
class Tolerances:
    bethe: float = 1e-10
    hamiltonian: float = 1e-10
    diffeq: float = 1e-9
    factorization: float = 1e-9
    vanish: float = 1e-9

    def __post_init__(self):
        for name in ("bethe", "hamiltonian", "diffeq", "factorization", "vanish"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"tolerance {name} must be positive, got {value}")


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tolerance: float
    passed: bool
    error: str | None = None


@dataclass
class VerificationReport:
    mode: str
    couplings: dict
    n: int
    zeros: tuple = ()
    bethe_residuals: tuple = ()
    potentials: tuple = ()
    hamiltonian: float = math.nan
    diffeq_max: float = math.nan
    factorization_max: float = math.nan
    vanish_residuals: tuple = ()
    checks: dict = field(default_factory=dict)
    rescale_deviation: float | None = None

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(ch.passed for ch in self.checks.values())

    def failed_checks(self) -> list:
        return [name for name, ch in self.checks.items() if not ch.passed]


def _diffeq_points(c: CouplingParams, count: int = 20) -> list:
    if c.mode == TRIGONOMETRIC:
        return [(k + 0.5) / count * HALF_PI for k in range(count)]
    return [0.1 + (k + 0.5) / count * 9.9 for k in range(count)]


def max_difference_residual(c: CouplingParams, n: int, points=None) -> float:
    points = _diffeq_points(c) if points is None else points
    return max(difference_residual(c, n, x).residual for x in points)


def factorization_deviation(c: CouplingParams, zeros: Configuration, count: int = 50) -> float:
    """Max of ``|series - factored| / (1 + |series|)`` on ``count`` real sample points."""
    n = zeros.n
    poly = polynomial_for(c, n)
    worst = 0.0
    if c.mode == TRIGONOMETRIC:
        for k in range(count):
            x = (k + 0.5) / count * HALF_PI
            ref = complex(poly.evaluate_series(x))
            worst = max(worst, abs(ref - aw_eval_factored(zeros, x)) / (1 + abs(ref)))
    else:
        u_zeros = [v / c.g for v in zeros.positions]
        top = 1.25 * u_zeros[-1]
        for k in range(count):
            u = (k + 0.5) / count * top
            ref = complex(poly.evaluate_series(u))
            worst = max(worst, abs(ref - wilson_eval_factored(u_zeros, u)) / (1 + abs(ref)))
    return worst


def _shifted_product(c: CouplingParams, xs, xj: float, sign: int) -> complex:
    """``prod_k sin(x_k + x_j + s ig) sin(x_k - x_j - s ig)`` or its rational analog."""
    ig = sign * 1j * c.g
    value = complex(1.0)
    for xk in xs:
        if c.mode == TRIGONOMETRIC:
            value *= cmath.sin(xk + xj + ig) * cmath.sin(xk - xj - ig)
        else:
            value *= (xk + xj + ig) * (xk - xj - ig)
    return value


def vanish_residuals(c: CouplingParams, zeros: Configuration) -> list:
    """Relative size of ``W(x_j) P_+ + W(-x_j) P_-`` at each zero.

    ``P_+`` and ``P_-`` are the products of shifted sine (or linear) factors
    that the factored polynomial takes at ``x_j + ig`` and ``x_j - ig``.
    """
    weight = aw_coefficient if c.mode == TRIGONOMETRIC else wilson_coefficient
    xs = zeros.positions
    out = []
    for xj in xs:
        t1 = weight(c, complex(xj)) * _shifted_product(c, xs, xj, 1)
        t2 = weight(c, complex(-xj)) * _shifted_product(c, xs, xj, -1)
        out.append(abs(t1 + t2) / (abs(t1) + abs(t2)))
    return out


def _check(report: VerificationReport, name: str, tolerance: float, compute):
    try:
        value = float(compute())
        passed = math.isfinite(value) and value < tolerance
        report.checks[name] = CheckResult(name, value, tolerance, passed)
    except (RSError, ArithmeticError, ValueError) as exc:
        report.checks[name] = CheckResult(name, math.nan, tolerance, False, f"{type(exc).__name__}: {exc}")


def verify_configuration(
    c: CouplingParams, zeros: Configuration, tolerances: Tolerances = Tolerances(), diffeq: bool = True
) -> VerificationReport:
    """Run every equilibrium check on a given configuration.

    The Hamiltonian is evaluated in mpmath at ``zeros.refined`` when that is
    set, otherwise at the double positions themselves.
    """
    zeros = _as_config(c, zeros)
    n = zeros.n
    report = VerificationReport(c.mode, c.as_dict(), n, zeros=zeros.positions)

    def bethe():
        ev = bethe_evaluation(c, zeros)
        report.bethe_residuals = ev.normalized
        report.potentials = tuple(complex(v) for v in potentials(c, zeros))
        return ev.max_normalized

    def positivity():
        # passes when every Re V_j > 0; the value is -min_j Re V_j (< 0 on success)
        values = potentials(c, zeros)
        return -float(np.min(values.real))

    def ham():
        report.hamiltonian = hamiltonian(c, PhasePoint.at_rest(zeros), precise=True)
        return report.hamiltonian

    def diff():
        report.diffeq_max = max_difference_residual(c, n)
        return report.diffeq_max

    def fact():
        report.factorization_max = factorization_deviation(c, zeros)
        return report.factorization_max

    def vanish():
        report.vanish_residuals = tuple(vanish_residuals(c, zeros))
        return max(report.vanish_residuals)

    _check(report, "bethe", tolerances.bethe, bethe)
    _check(report, "positivity", 0.0, positivity)
    _check(report, "hamiltonian", tolerances.hamiltonian, ham)
    if diffeq:
        _check(report, "diffeq", tolerances.diffeq, diff)
    _check(report, "factorization", tolerances.factorization, fact)
    _check(report, "vanish", tolerances.vanish, vanish)
    return report


def verify_equilibrium(c: CouplingParams, n: int, tolerances: Tolerances = Tolerances(), diffeq: bool = True) -> VerificationReport:
    """Find the zeros for ``(c, n)`` and run :func:`verify_configuration` on them.

    A failure to locate the zeros is recorded as a failed ``zeros`` check.
    """
    try:
        zeros = refine_zeros(c, find_zeros(c, n))
    except RSError as exc:
        report = VerificationReport(c.mode, c.as_dict(), n)
        report.checks["zeros"] = CheckResult("zeros", math.nan, 0.0, False, f"{type(exc).__name__}: {exc}")
        return report
    return verify_configuration(c, zeros, tolerances, diffeq=diffeq)


def rescale_rational_check(c: CouplingParams, n: int) -> float:
    """``max_j |x_j(g, g_r) - g x_j(1, g_r/g)|``."""
    if c.mode != RATIONAL:
        raise ModeError("rescaling check needs rational couplings")
    direct = find_zeros(c, n).positions
    unit = c if c.g == 1.0 else CouplingParams(RATIONAL, 1.0, *(v / c.g for v in c.external))
    scaled = find_zeros(unit, n).positions
    return max(abs(a - c.g * b) for a, b in zip(direct, scaled))


__all__ = [
    "PhasePoint",
    "BetheEvaluation",
    "StartSummary",
    "OracleResult",
    "Tolerances",
    "CheckResult",
    "VerificationReport",
    "potentials",
    "potential_V",
    "potentials_polar",
    "hamiltonian",
    "bethe_evaluation",
    "bethe_residual",
    "default_guess",
    "solve_bethe_newton",
    "minimize_hamiltonian_oracle",
    "max_difference_residual",
    "factorization_deviation",
    "vanish_residuals",
    "verify_configuration",
    "verify_equilibrium",
    "rescale_rational_check",
]
