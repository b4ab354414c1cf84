# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled multiplication kernel for the universal Kitaev ring.

Same contract as ``kitaevlab._ringpy.mul_parts``.  Inputs whose coefficients
or exponent spans could overflow 64-bit accumulation are handed to the
pure-Python kernel, so results are always exact.
"""

from libc.stdint cimport int64_t
from libc.stdlib cimport calloc, free

from kitaevlab._ringpy import mul_parts as _py_mul_parts

DEF MAX_TERMS = 64
DEF MAX_COEFF = 16777216        # 2**24
DEF MAX_SPAN = 4096


cdef bint _load(tuple terms, int64_t* exps, int64_t* coeffs, int* n):
    cdef Py_ssize_t k, m = len(terms)
    cdef object e, c
    if m > MAX_TERMS:
        return False
    for k in range(m):
        e, c = terms[k]
        if not (-MAX_SPAN < e < MAX_SPAN) or not (-MAX_COEFF < c < MAX_COEFF):
            return False
        exps[k] = e
        coeffs[k] = c
    n[0] = <int>m
    return True


cdef int64_t _sum(int64_t* coeffs, int n):
    cdef int64_t s = 0
    cdef int k
    for k in range(n):
        s += coeffs[k]
    return s


cdef tuple _collect(int64_t* buf, int64_t lo, int64_t span):
    cdef list out = []
    cdef int64_t k
    for k in range(span):
        if buf[k] != 0 and k + lo != 0:
            out.append((k + lo, buf[k]))
    return tuple(out)


cdef int64_t _side(int64_t* ea, int64_t* ca_, int na, int64_t ka,
                   int64_t* eb, int64_t* cb_, int nb, int64_t kb,
                   int64_t* buf, int64_t lo):
    # Accumulates the pure part of one side into buf, returns its constant.
    cdef int p, q
    cdef int64_t e, const = 0
    for p in range(na):
        buf[ea[p] - lo] += ca_[p] * ka
    for q in range(nb):
        buf[eb[q] - lo] += cb_[q] * kb
    for p in range(na):
        for q in range(nb):
            e = ea[p] + eb[q]
            if e == 0:
                const += ca_[p] * cb_[q]
            else:
                buf[e - lo] += ca_[p] * cb_[q]
    return const


cdef void _range(int64_t* ea, int na, int64_t* eb, int nb,
                 int64_t* lo, int64_t* hi):
    cdef int k
    cdef int64_t amin = 0, amax = 0, bmin = 0, bmax = 0
    for k in range(na):
        if k == 0 or ea[k] < amin:
            amin = ea[k]
        if k == 0 or ea[k] > amax:
            amax = ea[k]
    for k in range(nb):
        if k == 0 or eb[k] < bmin:
            bmin = eb[k]
        if k == 0 or eb[k] > bmax:
            bmax = eb[k]
    lo[0] = min(amin, bmin, amin + bmin, 0)
    hi[0] = max(amax, bmax, amax + bmax, 0)


def mul_parts(ca, tuple au, tuple av, cb, tuple bu, tuple bv):
    cdef int64_t eau[MAX_TERMS]
    cdef int64_t cau[MAX_TERMS]
    cdef int64_t eav[MAX_TERMS]
    cdef int64_t cav[MAX_TERMS]
    cdef int64_t ebu[MAX_TERMS]
    cdef int64_t cbu[MAX_TERMS]
    cdef int64_t ebv[MAX_TERMS]
    cdef int64_t cbv[MAX_TERMS]
    cdef int nau = 0, nav = 0, nbu = 0, nbv = 0
    cdef int64_t a0, b0, sau, sav, sbu, sbv, const
    cdef int64_t ulo, uhi, vlo, vhi
    cdef int64_t* ubuf
    cdef int64_t* vbuf

    if not (-MAX_COEFF < ca < MAX_COEFF and -MAX_COEFF < cb < MAX_COEFF):
        return _py_mul_parts(ca, au, av, cb, bu, bv)
    if not (_load(au, eau, cau, &nau) and _load(av, eav, cav, &nav)
            and _load(bu, ebu, cbu, &nbu) and _load(bv, ebv, cbv, &nbv)):
        return _py_mul_parts(ca, au, av, cb, bu, bv)

    a0 = ca
    b0 = cb
    sau = _sum(cau, nau)
    sav = _sum(cav, nav)
    sbu = _sum(cbu, nbu)
    sbv = _sum(cbv, nbv)
    _range(eau, nau, ebu, nbu, &ulo, &uhi)
    _range(eav, nav, ebv, nbv, &vlo, &vhi)

    ubuf = <int64_t*>calloc(uhi - ulo + 1, sizeof(int64_t))
    vbuf = <int64_t*>calloc(vhi - vlo + 1, sizeof(int64_t))
    if ubuf == NULL or vbuf == NULL:
        free(ubuf)
        free(vbuf)
        raise MemoryError()
    try:
        const = a0 * b0 - sau * sbv - sbu * sav
        const += _side(eau, cau, nau, b0 + sbv, ebu, cbu, nbu, a0 + sav, ubuf, ulo)
        const += _side(eav, cav, nav, b0 + sbu, ebv, cbv, nbv, a0 + sau, vbuf, vlo)
        return (const, _collect(ubuf, ulo, uhi - ulo + 1),
                _collect(vbuf, vlo, vhi - vlo + 1))
    finally:
        free(ubuf)
        free(vbuf)
