# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled double-precision kernels; same contract as ``_pykernels``."""
from libc.math cimport M_PI, atan, cos, cosh, exp, log, sin, sinh, tanh

import math

import numpy as np


cdef inline void _v_polar(int mode, double g, double y, double* lm, double* ph) nogil:
    cdef double s
    if mode == 0:
        s = sin(y)
        lm[0] += 0.5 * log(1.0 + (sinh(g) / s) ** 2)
        ph[0] += atan(cos(y) / s * tanh(g))
    else:
        lm[0] += 0.5 * log(1.0 + (g / y) ** 2)
        ph[0] += atan(g / y)


cdef inline void _w_polar(int mode, double[4] gs, double x, double* lm, double* ph) nogil:
    cdef double s, c, gr
    cdef int r
    if mode == 0:
        s = sin(x)
        c = cos(x)
        for r in range(4):
            gr = gs[r]
            if r % 2 == 0:
                lm[0] += 0.5 * log(1.0 + (sinh(gr) / s) ** 2)
                ph[0] += atan(c / s * tanh(gr))
            else:
                lm[0] += 0.5 * log(1.0 + (sinh(gr) / c) ** 2)
                ph[0] -= atan(s / c * tanh(gr))
    else:
        for r in range(4):
            gr = gs[r]
            lm[0] += 0.5 * log(x * x + gr * gr)
            ph[0] += atan(gr / x)
        lm[0] -= 2.0 * log(x)
        ph[0] -= M_PI


cdef void _polar(int mode, double g, double[4] gs, double[:] x, double[:] logs, double[:] phases) nogil:
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t j, k
    cdef double lm, ph
    for j in range(n):
        lm = 0.0
        ph = 0.0
        _w_polar(mode, gs, x[j], &lm, &ph)
        for k in range(n):
            if k != j:
                _v_polar(mode, g, x[j] + x[k], &lm, &ph)
                _v_polar(mode, g, x[j] - x[k], &lm, &ph)
        logs[j] = lm
        phases[j] = ph


def potentials_polar(int mode, double g, gs, x, m=math):
    cdef double[4] cg
    cdef int r
    for r in range(4):
        cg[r] = gs[r]
    cdef double[:] xv = np.ascontiguousarray(x, dtype=np.float64)
    logs = np.empty(xv.shape[0])
    phases = np.empty(xv.shape[0])
    cdef double[:] lv = logs
    cdef double[:] pv = phases
    with nogil:
        _polar(mode, g, cg, xv, lv, pv)
    return logs, phases


cdef inline double complex _v_direct(int mode, double g, double y) nogil:
    cdef double complex z = y
    cdef double complex ig = 1j * g
    if mode == 0:
        return (sin(y) * cosh(g) + 1j * cos(y) * sinh(g)) / sin(y)
    return (z + ig) / z


cdef inline double complex _csin_shift(double x, double gr) nogil:
    # sin(x + i gr)
    return sin(x) * cosh(gr) + 1j * cos(x) * sinh(gr)


cdef inline double complex _ccos_shift(double x, double gr) nogil:
    # cos(x + i gr)
    return cos(x) * cosh(gr) - 1j * sin(x) * sinh(gr)


cdef inline double complex _w_direct(int mode, double[4] gs, double x) nogil:
    cdef double complex num
    cdef double s, c
    if mode == 0:
        s = sin(x)
        c = cos(x)
        num = _csin_shift(x, gs[0]) * _ccos_shift(x, gs[1]) * _csin_shift(x, gs[2]) * _ccos_shift(x, gs[3])
        return num / (s * s * c * c)
    num = (x + 1j * gs[0]) * (x + 1j * gs[1]) * (x + 1j * gs[2]) * (x + 1j * gs[3])
    return -num / (x * x)


def potentials_direct(int mode, double g, gs, x, int sign=1):
    cdef double[4] cg
    cdef int r
    for r in range(4):
        cg[r] = gs[r]
    cdef double[:] xv = np.ascontiguousarray(x, dtype=np.float64) * sign
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t j, k
    cdef double complex value
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[:] ov = out
    with nogil:
        for j in range(n):
            value = _w_direct(mode, cg, xv[j])
            for k in range(n):
                if k != j:
                    value = value * _v_direct(mode, g, xv[j] + xv[k]) * _v_direct(mode, g, xv[j] - xv[k])
            ov[j] = value
    return out


def hamiltonian(int mode, double g, gs, p, x, m=math):
    cdef double[4] cg
    cdef int r
    for r in range(4):
        cg[r] = gs[r]
    cdef double[:] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[:] pv = np.ascontiguousarray(p, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t j
    cdef double total = 0.0
    logs = np.empty(n)
    phases = np.empty(n)
    cdef double[:] lv = logs
    cdef double[:] phv = phases
    with nogil:
        _polar(mode, g, cg, xv, lv, phv)
        for j in range(n):
            total += 2.0 * exp(lv[j]) * (sinh(pv[j] / 2) ** 2 + sin(phv[j] / 2) ** 2)
    return total
