# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled spherical Bessel kernel (scaled by exp(-|Im z|))."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt, exp, NAN

cnp.import_array()

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double cabs(double complex)
    double complex csin(double complex)
    double complex ccos(double complex)

cdef double _BIG = 1e250


cdef void _point(int nmax, double complex z, double complex[:] jrow,
                 double complex[:] yrow) noexcept nogil:
    cdef double s, az
    cdef double complex ep, em, sn, cs, iz, j0, j1, f, fp1, fm1, scale, e, h0, h1, ht
    cdef double sg
    cdef int n, m, i, ntop
    cdef double complex I = 1j
    if z.real == 0.0 and z.imag == 0.0:
        jrow[0] = 1.0
        for n in range(nmax + 1):
            yrow[n] = NAN
            if n > 0:
                jrow[n] = 0.0
        return
    s = fabs(z.imag)
    ep = cexp(I * z - s)
    em = cexp(-I * z - s)
    if s < 700.0:
        sn = csin(z) * exp(-s)
        cs = ccos(z) * exp(-s)
    else:
        sn = (ep - em) / (2.0 * I)
        cs = (ep + em) / 2.0
    iz = 1.0 / z
    j0 = sn * iz
    j1 = (sn * iz - cs) * iz

    # j_n: normalized downward recurrence (minimal solution, stable for all z)
    az = cabs(z)
    ntop = <int>(nmax + 16 + az + sqrt(40.0 * (nmax + az + 1.0)))
    fp1 = 0.0
    f = 1e-300
    for n in range(ntop, 0, -1):
        fm1 = (2 * n + 1) * iz * f - fp1
        fp1 = f
        f = fm1
        m = n - 1
        if m <= nmax:
            jrow[m] = f
        if cabs(f) > _BIG:
            f = f / _BIG
            fp1 = fp1 / _BIG
            for i in range(m, nmax + 1):
                jrow[i] = jrow[i] / _BIG
    if cabs(j0) >= cabs(j1):
        scale = j0 / jrow[0]
    else:
        scale = j1 / jrow[1]
    for n in range(nmax + 1):
        jrow[n] = jrow[n] * scale
    jrow[0] = j0

    # y_n = (h_n - j_n)/(s i) with the upward-growing Hankel function
    if z.imag >= 0:
        sg = 1.0
        e = ep
    else:
        sg = -1.0
        e = em
    h0 = -sg * I * e * iz
    h1 = -e * iz * (1.0 + sg * I * iz)
    yrow[0] = (h0 - jrow[0]) / (sg * I)
    yrow[1] = (h1 - jrow[1]) / (sg * I)
    for n in range(1, nmax):
        ht = (2 * n + 1) * iz * h1 - h0
        h0 = h1
        h1 = ht
        yrow[n + 1] = (h1 - jrow[n + 1]) / (sg * I)


def sph_jy_scaled(int nmax, z):
    """Scaled j_n, y_n for n = 0..nmax (nmax >= 1) at every point of z."""
    if nmax < 1:
        raise ValueError("kernel requires nmax >= 1")
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zz = np.ascontiguousarray(
        np.asarray(z, dtype=complex).ravel())
    cdef Py_ssize_t npts = zz.shape[0], k
    j = np.zeros((npts, nmax + 1), dtype=complex)
    y = np.zeros((npts, nmax + 1), dtype=complex)
    cdef double complex[:, :] jv = j
    cdef double complex[:, :] yv = y
    with nogil:
        for k in range(npts):
            _point(nmax, zz[k], jv[k], yv[k])
    return j, y
