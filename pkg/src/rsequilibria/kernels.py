"""Backend selection for the potential and Hamiltonian kernels.

The compiled ``_ckernels`` extension is used when it was built; otherwise the
pure-Python ``_pykernels`` module serves the same functions. Setting the
environment variable ``RSEQUILIBRIA_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _pykernels

if os.environ.get("RSEQUILIBRIA_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
        BACKEND = "python"

potentials_polar = _impl.potentials_polar
potentials_direct = _impl.potentials_direct
hamiltonian = _impl.hamiltonian

#: Always available; also the extended-precision path (pass an mpmath context as ``m``).
reference = _pykernels
