"""Command-line front end.

Subcommands ``zeros``, ``verify``, ``minimize`` and ``sweep``. Exit status is
0 on success (and, for ``verify``/``minimize``, when every check passes), 1 on
a computation or check failure, 2 on a usage error.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .equilibrium import (
    PhasePoint,
    Tolerances,
    bethe_evaluation,
    hamiltonian,
    minimize_hamiltonian_oracle,
    rescale_rational_check,
    verify_equilibrium,
)
from .errors import ParameterError, RSError
from .polynomials import RATIONAL, CouplingParams
from .roots import find_zeros, refine_zeros, zero_residuals
from .serialization import canonical_json, csv_text, write_atomic

SWEEP_AXES = ("g", "g1", "g2", "g3", "g4")
RESCALE_TOLERANCE = 1e-10
MINIMIZE_TOLERANCES = {"hamiltonian": 1e-8, "position_deviation": 1e-5, "momentum_max": 1e-5}


@dataclass
class RunConfig:
    command: str
    couplings: CouplingParams
    n: int
    fmt: str
    output: str | None = None
    options: dict = field(default_factory=dict)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(2)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", required=True, choices=("trig", "trigonometric", "rational"))
    p.add_argument("--n", type=int, required=True, help="number of particles (degree of the polynomial)")
    for name in ("g", "g1", "g2", "g3", "g4"):
        p.add_argument(f"--{name}", type=float, required=True)
    p.add_argument("--format", dest="fmt", choices=("json", "csv"), default=None)
    p.add_argument("--output", default=None, help="write here (atomically) instead of standard output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rsequilibria", description="Equilibria of the BC-type Ruijsenaars-Schneider systems.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("zeros", help="equilibrium positions from the polynomial zeros")
    _common(p)

    p = sub.add_parser("verify", help="run every equilibrium check")
    _common(p)
    defaults = Tolerances()
    p.add_argument("--tol-bethe", type=float, default=defaults.bethe)
    p.add_argument("--tol-hamiltonian", type=float, default=defaults.hamiltonian)
    p.add_argument("--tol-diffeq", type=float, default=defaults.diffeq)
    p.add_argument("--tol-factorization", type=float, default=defaults.factorization)
    p.add_argument("--tol-vanish", type=float, default=defaults.vanish)
    p.add_argument("--check-rescale", action="store_true", help="rational mode: compare with the rescaled g")
    p.add_argument("--rescale-g", type=float, default=2.0)

    p = sub.add_parser("minimize", help="multi-start Hamiltonian minimization oracle")
    _common(p)
    p.add_argument("--starts", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("sweep", help="zeros along a coupling range")
    _common(p)
    p.add_argument("--sweep-axis", required=True, choices=SWEEP_AXES)
    p.add_argument("--sweep-from", type=float, required=True)
    p.add_argument("--sweep-to", type=float, required=True)
    p.add_argument("--sweep-steps", type=int, required=True)
    p.add_argument(
        "--sweep-fixed-ratios",
        action="store_true",
        help="with --sweep-axis g: scale g1..g4 along with g, keeping g_r/g fixed",
    )
    return parser


def parse_config(argv=None) -> RunConfig:
    parser = build_parser()
    args = parser.parse_args(argv)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    if args.n < 1:
        sub.error("--n must be at least 1")
    try:
        c = CouplingParams(args.mode, args.g, args.g1, args.g2, args.g3, args.g4)
    except ParameterError as exc:
        sub.error(str(exc))
    options = {}
    if args.command == "verify":
        try:
            options["tolerances"] = Tolerances(
                bethe=args.tol_bethe,
                hamiltonian=args.tol_hamiltonian,
                diffeq=args.tol_diffeq,
                factorization=args.tol_factorization,
                vanish=args.tol_vanish,
            )
        except ValueError as exc:
            sub.error(str(exc))
        if args.check_rescale:
            if c.mode != RATIONAL:
                sub.error("--check-rescale needs --mode rational")
            if not (math.isfinite(args.rescale_g) and args.rescale_g > 0):
                sub.error("--rescale-g must be positive")
            options["rescale_g"] = args.rescale_g
    elif args.command == "minimize":
        if args.starts < 1:
            sub.error("--starts must be at least 1")
        if args.workers < 1:
            sub.error("--workers must be at least 1")
        options.update(starts=args.starts, seed=args.seed, workers=args.workers)
    elif args.command == "sweep":
        if args.sweep_steps < 2:
            sub.error("--sweep-steps must be at least 2")
        lo, hi = args.sweep_from, args.sweep_to
        if not (math.isfinite(lo) and math.isfinite(hi) and lo > 0 and hi > 0):
            sub.error("sweep range must consist of positive coupling values")
        if args.sweep_fixed_ratios and args.sweep_axis != "g":
            sub.error("--sweep-fixed-ratios needs --sweep-axis g")
        options.update(axis=args.sweep_axis, start=lo, stop=hi, steps=args.sweep_steps, fixed_ratios=args.sweep_fixed_ratios)
    fmt = args.fmt or ("csv" if args.command == "sweep" else "json")
    return RunConfig(args.command, c, args.n, fmt, args.output, options)


# --------------------------------------------------------------------------
# commands: each returns (exit code, emitted text)


def _base(cfg: RunConfig) -> dict:
    return {
        "command": cfg.command,
        "mode": cfg.couplings.mode,
        "couplings": cfg.couplings.as_dict(),
        "n": cfg.n,
        "version": __version__,
    }


def _coupling_row(cfg: RunConfig) -> list:
    c = cfg.couplings
    return [c.mode, cfg.n, c.g, c.g1, c.g2, c.g3, c.g4]


def _positions_header(prefix: str, n: int) -> list:
    return [f"{prefix}{k}" for k in range(1, n + 1)]


def cmd_zeros(cfg: RunConfig):
    zeros = find_zeros(cfg.couplings, cfg.n)
    residuals = zero_residuals(cfg.couplings, zeros)
    record = _base(cfg)
    record.update(zeros=list(zeros.positions), residual_max=max(residuals), residuals={"newton_step": residuals}, checks={})
    if cfg.fmt == "csv":
        header = ["mode", "n", "g", "g1", "g2", "g3", "g4", *_positions_header("x", cfg.n), "residual_max"]
        return 0, csv_text(header, [[*_coupling_row(cfg), *zeros.positions, max(residuals)]])
    return 0, canonical_json(record)


def _check_dict(ch) -> dict:
    return {"value": ch.value, "tolerance": ch.tolerance, "passed": ch.passed, "error": ch.error}


def cmd_verify(cfg: RunConfig):
    report = verify_equilibrium(cfg.couplings, cfg.n, cfg.options["tolerances"])
    checks = {name: _check_dict(ch) for name, ch in report.checks.items()}
    residuals = {
        "bethe": list(report.bethe_residuals),
        "potential_re": [v.real for v in report.potentials],
        "potential_im": [v.imag for v in report.potentials],
        "hamiltonian": report.hamiltonian,
        "diffeq_max": report.diffeq_max,
        "factorization_max": report.factorization_max,
        "vanish": list(report.vanish_residuals),
    }
    if "rescale_g" in cfg.options:
        scaled = cfg.couplings.with_values(g=cfg.options["rescale_g"])
        try:
            deviation = rescale_rational_check(scaled, cfg.n)
            residuals["rescale_deviation"] = deviation
            checks["rescale"] = {
                "value": deviation,
                "tolerance": RESCALE_TOLERANCE,
                "passed": deviation < RESCALE_TOLERANCE,
                "error": None,
                "g": scaled.g,
            }
        except RSError as exc:
            checks["rescale"] = {"value": math.nan, "tolerance": RESCALE_TOLERANCE, "passed": False, "error": str(exc), "g": scaled.g}
    passed = all(ch["passed"] for ch in checks.values())
    record = _base(cfg)
    record.update(zeros=list(report.zeros), residuals=residuals, checks=checks, passed=passed)
    if cfg.fmt == "csv":
        rows = [[name, ch["value"], ch["tolerance"], ch["passed"], ch["error"]] for name, ch in sorted(checks.items())]
        text = csv_text(["check", "value", "tolerance", "passed", "error"], rows)
    else:
        text = canonical_json(record)
    return (0 if passed else 1), text


def cmd_minimize(cfg: RunConfig):
    c, n = cfg.couplings, cfg.n
    result = minimize_hamiltonian_oracle(c, n, starts=cfg.options["starts"], seed=cfg.options["seed"], workers=cfg.options["workers"])
    zeros = find_zeros(c, n)
    deviation = float(np.max(np.abs(result.point.x.as_array() - zeros.as_array())))
    momentum = float(np.max(np.abs(result.point.p)))
    values = {"hamiltonian": result.value, "position_deviation": deviation, "momentum_max": momentum}
    checks = {
        name: {"value": values[name], "tolerance": tol, "passed": values[name] < tol, "error": None}
        for name, tol in MINIMIZE_TOLERANCES.items()
    }
    passed = all(ch["passed"] for ch in checks.values())
    record = _base(cfg)
    record.update(
        zeros=list(zeros.positions),
        residuals=values,
        checks=checks,
        passed=passed,
        minimizer={
            "value": result.value,
            "positions": list(result.point.x.positions),
            "momenta": list(result.point.p),
            "starts": [{"index": s.index, "value": s.value, "iterations": s.iterations} for s in result.starts],
            "seed": cfg.options["seed"],
        },
    )
    if cfg.fmt == "csv":
        header = ["start", "value", "iterations"]
        rows = [[s.index, s.value, s.iterations] for s in result.starts]
        text = csv_text(header, rows)
    else:
        text = canonical_json(record)
    return (0 if passed else 1), text


def sweep_header(n: int) -> list:
    return ["value", *_positions_header("x", n), "hamiltonian", "bethe_max", "error"]


def cmd_sweep(cfg: RunConfig):
    opts = cfg.options
    values = np.linspace(opts["start"], opts["stop"], opts["steps"])
    if opts["start"] > opts["stop"]:
        values = values[::-1]
    rows, failed = [], False
    for value in values:
        value = float(value)
        try:
            changes = {opts["axis"]: value}
            if opts["fixed_ratios"]:
                scale = value / cfg.couplings.g
                changes.update({f"g{r}": scale * v for r, v in enumerate(cfg.couplings.external, 1)})
            c = cfg.couplings.with_values(**changes)
            zeros = refine_zeros(c, find_zeros(c, cfg.n))
            h = hamiltonian(c, PhasePoint.at_rest(zeros), precise=True)
            bethe = bethe_evaluation(c, zeros).max_normalized
            rows.append([value, *zeros.positions, h, bethe, ""])
        except RSError as exc:
            failed = True
            rows.append([value, *([None] * cfg.n), None, None, f"{type(exc).__name__}: {exc}"])
    header = sweep_header(cfg.n)
    if cfg.fmt == "csv":
        text = csv_text(header, rows)
    else:
        record = _base(cfg)
        record.update(
            axis=opts["axis"],
            fixed_ratios=opts["fixed_ratios"],
            rows=[dict(zip(header, row)) for row in rows],
            zeros=[row[1 : cfg.n + 1] for row in rows],
            residuals={"bethe_max": [row[-2] for row in rows], "hamiltonian": [row[-3] for row in rows]},
            checks={},
        )
        text = canonical_json(record)
    return (1 if failed else 0), text


COMMANDS = {"zeros": cmd_zeros, "verify": cmd_verify, "minimize": cmd_minimize, "sweep": cmd_sweep}


def main(argv=None) -> int:
    cfg = parse_config(argv)
    try:
        code, text = COMMANDS[cfg.command](cfg)
    except RSError as exc:
        sys.stderr.write(f"rsequilibria {cfg.command}: {type(exc).__name__}: {exc}\n")
        return 1
    if cfg.output:
        write_atomic(cfg.output, text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
