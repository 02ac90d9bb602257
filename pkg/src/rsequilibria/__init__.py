"""Ground-state equilibria of the trigonometric and rational BC-type
Ruijsenaars-Schneider systems, located as zeros of Askey-Wilson and Wilson
polynomials and checked against the Hamiltonian and its Bethe-type system."""

__version__ = "0.1.0"

from .equilibrium import (  # noqa: E402
    OracleResult,
    PhasePoint,
    Tolerances,
    VerificationReport,
    bethe_residual,
    hamiltonian,
    minimize_hamiltonian_oracle,
    potential_V,
    rescale_rational_check,
    solve_bethe_newton,
    verify_configuration,
    verify_equilibrium,
)
from .errors import (  # noqa: E402
    ChamberError,
    ConvergenceError,
    DenominatorError,
    DomainError,
    ModeError,
    ParameterError,
    RootCountError,
    RSError,
)
from .kernels import BACKEND  # noqa: E402
from .polynomials import (  # noqa: E402
    AWParams,
    CouplingParams,
    WilsonParams,
    aw_eval,
    aw_eval_factored,
    difference_residual,
    wilson_eval,
    wilson_eval_factored,
)
from .roots import Configuration, RootFindSettings, find_zeros, find_zeros_rational, find_zeros_trig  # noqa: E402
