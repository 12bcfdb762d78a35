"""Pure-Python spherical Bessel kernel (fallback for the compiled core).

All values are returned in *scaled* form, i.e. multiplied by
``exp(-|Im z|)``, so that large imaginary arguments do not overflow.
"""
import cmath
import math

import numpy as np

_BIG = 1e250


def _miller_start(nmax, az):
    return int(nmax + 16 + az + math.sqrt(40.0 * (nmax + az + 1.0)))


def _point(nmax, z, jrow, yrow):
    if z == 0:
        jrow[0] = 1.0
        for n in range(1, nmax + 1):
            jrow[n] = 0.0
            yrow[n] = complex("nan")
        yrow[0] = complex("nan")
        return
    s = abs(z.imag)
    ep = cmath.exp(1j * z - s)
    em = cmath.exp(-1j * z - s)
    if s < 700.0:
        w = math.exp(-s)
        sn = cmath.sin(z) * w
        cs = cmath.cos(z) * w
    else:
        sn = (ep - em) / 2j
        cs = (ep + em) / 2.0
    iz = 1.0 / z
    j0 = sn * iz
    j1 = (sn * iz - cs) * iz

    # j_n is the minimal solution of the recurrence: normalized downward
    # recurrence is stable for every complex z.
    az = abs(z)
    ntop = _miller_start(nmax, az)
    fp1 = 0.0j
    f = 1e-300 + 0.0j
    for n in range(ntop, 0, -1):
        fm1 = (2 * n + 1) * iz * f - fp1
        fp1, f = f, fm1
        m = n - 1
        if m <= nmax:
            jrow[m] = f
        if abs(f) > _BIG:
            f *= 1.0 / _BIG
            fp1 *= 1.0 / _BIG
            for i in range(m, nmax + 1):
                jrow[i] *= 1.0 / _BIG
    if abs(j0) >= abs(j1):
        scale = j0 / jrow[0]
    else:
        scale = j1 / jrow[1]
    for n in range(nmax + 1):
        jrow[n] *= scale
    jrow[0] = j0

    # y_n from the Hankel function that grows upward (kind 1 if Im z >= 0,
    # kind 2 otherwise), which keeps upward recurrence stable near the
    # imaginary axis: y_n = (h_n - j_n) / (s i).
    sg = 1.0 if z.imag >= 0 else -1.0
    e = ep if sg > 0 else em
    h0 = -sg * 1j * e * iz
    h1 = -e * iz * (1.0 + sg * 1j * iz)
    yrow[0] = (h0 - jrow[0]) / (sg * 1j)
    if nmax >= 1:
        yrow[1] = (h1 - jrow[1]) / (sg * 1j)
    for n in range(1, nmax):
        h0, h1 = h1, (2 * n + 1) * iz * h1 - h0
        yrow[n + 1] = (h1 - jrow[n + 1]) / (sg * 1j)


def sph_jy_scaled(nmax, z):
    """Scaled j_n, y_n for n = 0..nmax (nmax >= 1) at every point of z."""
    if nmax < 1:
        raise ValueError("kernel requires nmax >= 1")
    z = np.asarray(z, dtype=complex).ravel()
    j = np.zeros((z.size, nmax + 1), dtype=complex)
    y = np.zeros((z.size, nmax + 1), dtype=complex)
    for i in range(z.size):
        jrow = [0.0j] * (nmax + 1)
        yrow = [0.0j] * (nmax + 1)
        _point(nmax, complex(z[i]), jrow, yrow)
        j[i] = jrow
        y[i] = yrow
    return j, y
