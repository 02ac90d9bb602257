"""Pure-Python potential and Hamiltonian kernels.

Fallback for the compiled ``_ckernels`` module, and the extended-precision
path: every function takes a math namespace ``m`` that is either the
``math`` module (doubles) or an mpmath context.

``mode`` is 0 for trigonometric and 1 for rational couplings; ``gs`` are the
four external couplings.

Every factor of ``V_j`` has positive real part on the chamber, so
``V_j = exp(L_j + i phi_j)`` with ``phi_j`` a plain sum of arctangents and no
branch ambiguity.

The rational external potential is taken as ``w(x) = -prod_r (x + i g_r) / x^2``.
With the bare product (no minus sign) every ``V_j`` at the Wilson zeros is
real and negative, so ``H(0, x)`` could not vanish there; the sign makes
``arg w = sum_r atan(g_r / x) - pi`` lie in ``(-pi, pi)``.
"""
import cmath
import math


def _v_polar(mode, g, y, m):
    if mode == 0:
        s = m.sin(y)
        sh = m.sinh(g)
        return 0.5 * m.log(1 + (sh / s) ** 2), m.atan(m.cos(y) / s * m.tanh(g))
    return 0.5 * m.log(1 + (g / y) ** 2), m.atan(g / y)


def _w_polar(mode, gs, x, m):
    logmag = 0
    phase = 0
    if mode == 0:
        s, c = m.sin(x), m.cos(x)
        for r, gr in enumerate(gs):
            sh, th = m.sinh(gr), m.tanh(gr)
            if r % 2 == 0:
                # sin(x + i g_r) / sin x
                logmag += 0.5 * m.log(1 + (sh / s) ** 2)
                phase += m.atan(c / s * th)
            else:
                # cos(x + i g_r) / cos x
                logmag += 0.5 * m.log(1 + (sh / c) ** 2)
                phase -= m.atan(s / c * th)
        return logmag, phase
    for gr in gs:
        logmag += 0.5 * m.log(x * x + gr * gr)
        phase += m.atan(gr / x)
    return logmag - 2 * m.log(x), phase - m.pi


def potentials_polar(mode, g, gs, x, m=math):
    """Lists ``(L_j, phi_j)`` with ``V_j(x) = exp(L_j + i phi_j)``."""
    n = len(x)
    logs, phases = [], []
    for j in range(n):
        lw, pw = _w_polar(mode, gs, x[j], m)
        for k in range(n):
            if k == j:
                continue
            for y in (x[j] + x[k], x[j] - x[k]):
                lv, pv = _v_polar(mode, g, y, m)
                lw += lv
                pw += pv
        logs.append(lw)
        phases.append(pw)
    return logs, phases


def _v_direct(mode, g, y):
    if mode == 0:
        return cmath.sin(y + 1j * g) / cmath.sin(y)
    return (y + 1j * g) / y


def _w_direct(mode, gs, x):
    g1, g2, g3, g4 = gs
    if mode == 0:
        num = cmath.sin(x + 1j * g1) * cmath.cos(x + 1j * g2) * cmath.sin(x + 1j * g3) * cmath.cos(x + 1j * g4)
        return num / (cmath.sin(x) ** 2 * cmath.cos(x) ** 2)
    return -(x + 1j * g1) * (x + 1j * g2) * (x + 1j * g3) * (x + 1j * g4) / (x * x)


def potentials_direct(mode, g, gs, x, sign=1):
    """``V_j(sign * x)`` from the literal product of ``w`` and ``v`` factors."""
    xs = [sign * xi for xi in x]
    out = []
    for j, xj in enumerate(xs):
        value = _w_direct(mode, gs, xj)
        for k, xk in enumerate(xs):
            if k != j:
                value *= _v_direct(mode, g, xj + xk) * _v_direct(mode, g, xj - xk)
        out.append(value)
    return out


def hamiltonian(mode, g, gs, p, x, m=math):
    """``sum_j |V_j| (cosh p_j - 1) + (|V_j| - Re V_j)`` in cancellation-free form."""
    logs, phases = potentials_polar(mode, g, gs, x, m)
    total = 0
    for lj, phj, pj in zip(logs, phases, p):
        total += 2 * m.exp(lj) * (m.sinh(pj / 2) ** 2 + m.sin(phj / 2) ** 2)
    return total
