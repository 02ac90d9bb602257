"""Compiled vs pure-Python kernel timings.

    python3 benchmarks/bench_kernels.py [--repeat 200]

Times the Hamiltonian and the polar potentials (the calls a Nelder-Mead run
makes thousands of times) for both backends, at a few particle numbers and in
both modes, and prints the speedup.
"""
import argparse
import timeit

import numpy as np

from rsequilibria import _pykernels

try:
    from rsequilibria import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def _case(mode, n, rng):
    g = rng.uniform(0.05, 5)
    gs = tuple(rng.uniform(0.05, 5, 4))
    top = np.pi / 2 if mode == 0 else 10.0
    x = np.sort(rng.uniform(0, top, n))
    p = rng.normal(size=n)
    return g, gs, x, p


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled kernels not built; run `pip install -e . --no-build-isolation` first")
        return
    rng = np.random.default_rng(0)
    print(f"{'mode':<9}{'n':>3}  {'kernel':<12}{'python us':>12}{'cython us':>12}{'speedup':>9}")
    for mode, label in ((0, "trig"), (1, "rational")):
        for n in (2, 5, 8):
            g, gs, x, p = _case(mode, n, rng)
            xl, pl = list(x), list(p)
            for name, py_call, c_call in (
                ("hamiltonian", lambda: _pykernels.hamiltonian(mode, g, gs, pl, xl), lambda: _ckernels.hamiltonian(mode, g, gs, p, x)),
                ("polar", lambda: _pykernels.potentials_polar(mode, g, gs, xl), lambda: _ckernels.potentials_polar(mode, g, gs, x)),
            ):
                t_py = min(timeit.repeat(py_call, number=args.repeat, repeat=3)) / args.repeat * 1e6
                t_c = min(timeit.repeat(c_call, number=args.repeat, repeat=3)) / args.repeat * 1e6
                print(f"{label:<9}{n:>3}  {name:<12}{t_py:>12.2f}{t_c:>12.2f}{t_py / t_c:>9.1f}")


if __name__ == "__main__":
    main()
