"""Spherical Bessel, Hankel and Riccati-Bessel functions of complex argument.

The kernel evaluates ``j_n`` by upward recurrence where ``n <= |z|`` and by
a normalized downward (Miller) recurrence above that; ``y_n`` always uses
upward recurrence.  Values are computed internally in scaled form,
``f(z) * exp(-|Im z|)``, which the array interface exposes through
``scaled=True``.  This lets the interior field of a good conductor
(``|Im k_i r|`` in the hundreds) be normalized without overflow.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from ._kernels import BACKEND, sph_jy_scaled

__all__ = [
    "SQRT_I",
    "BesselEval",
    "SpecialFunctionDomainError",
    "SpecialFunctionRangeError",
    "sph_jy",
    "spherical_j",
    "spherical_y",
    "spherical_h",
    "riccati",
    "BACKEND",
]

SQRT_I = cmath.sqrt(1j)
VALIDATED_ABS_Z = 50.0
VALIDATED_ORDER = 30
# exp(709.78) is the largest finite double
MAX_ABS_IMAG = 700.0


class SpecialFunctionDomainError(ValueError):
    """Argument outside the domain of the function (e.g. y_n at z = 0)."""


class SpecialFunctionRangeError(OverflowError):
    """Unscaled result would overflow double precision."""


@dataclass(frozen=True)
class BesselEval:
    """Value and derivative of one function at one point.

    ``validated`` is False when ``|z| > 50`` or ``n > 30``; such results
    are computed the same way but fall outside the tested range.
    """

    order: int
    argument: complex
    value: complex
    derivative: complex
    validated: bool = True


def _validated(n, z):
    return abs(z) <= VALIDATED_ABS_Z and n <= VALIDATED_ORDER


def sph_jy(nmax, z, scaled=False):
    """Evaluate j_n, j_n', y_n, y_n' for n = 0..nmax.

    Parameters
    ----------
    nmax : int
        Highest order.
    z : array_like of complex
        Arguments.
    scaled : bool
        If True every output is multiplied by ``exp(-|Im z|)``.

    Returns
    -------
    j, jp, y, yp : ndarray
        Arrays of shape ``z.shape + (nmax + 1,)``.  ``y`` and ``yp`` are NaN
        at ``z = 0``.
    """
    if nmax < 0:
        raise ValueError("nmax must be non-negative")
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    zf = z.ravel()
    if not scaled and zf.size and np.max(np.abs(zf.imag)) > MAX_ABS_IMAG:
        raise SpecialFunctionRangeError(
            f"|Im z| = {np.max(np.abs(zf.imag)):.1f} overflows; use scaled=True")
    ntop = max(nmax, 1)
    j, y = sph_jy_scaled(ntop, zf)
    zero = zf == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        iz = np.where(zero, 0.0, 1.0 / np.where(zero, 1.0, zf))[:, None]
        nn = np.arange(1, ntop + 1)[None, :]
        jp = np.empty_like(j)
        yp = np.empty_like(y)
        jp[:, 0] = -j[:, 1]
        yp[:, 0] = -y[:, 1]
        jp[:, 1:] = j[:, :-1] - (nn + 1) * iz * j[:, 1:]
        yp[:, 1:] = y[:, :-1] - (nn + 1) * iz * y[:, 1:]
    if np.any(zero):
        jp[zero] = 0.0
        jp[zero, 1] = 1.0 / 3.0
        yp[zero] = np.nan
    if not scaled:
        f = np.exp(np.abs(zf.imag))[:, None]
        j, jp, y, yp = j * f, jp * f, y * f, yp * f
    out = []
    for a in (j, jp, y, yp):
        out.append(a[:, : nmax + 1].reshape(shape + (nmax + 1,)))
    return tuple(out)


def _check_order(n):
    if int(n) != n or n < 0:
        raise SpecialFunctionDomainError(f"order must be a non-negative integer, got {n}")
    return int(n)


def spherical_j(n, z) -> BesselEval:
    """Spherical Bessel function of the first kind and its derivative."""
    n = _check_order(n)
    z = complex(z)
    j, jp, _, _ = sph_jy(n, z)
    return BesselEval(n, z, complex(j[n]), complex(jp[n]), _validated(n, z))


def spherical_y(n, z) -> BesselEval:
    """Spherical Bessel function of the second kind and its derivative."""
    n = _check_order(n)
    z = complex(z)
    if z == 0:
        raise SpecialFunctionDomainError("y_n is singular at z = 0")
    _, _, y, yp = sph_jy(n, z)
    return BesselEval(n, z, complex(y[n]), complex(yp[n]), _validated(n, z))


def spherical_h(kind, n, z) -> BesselEval:
    """Spherical Hankel function h_n^(1) = j_n + i y_n or h_n^(2) = j_n - i y_n."""
    if kind not in (1, 2):
        raise ValueError("kind must be 1 or 2")
    n = _check_order(n)
    z = complex(z)
    if z == 0:
        raise SpecialFunctionDomainError("h_n is singular at z = 0")
    j, jp, y, yp = sph_jy(n, z)
    s = 1j if kind == 1 else -1j
    return BesselEval(n, z, complex(j[n] + s * y[n]), complex(jp[n] + s * yp[n]),
                      _validated(n, z))


def riccati(kind, n, z, hankel_kind=1) -> BesselEval:
    """Riccati-Bessel functions psi_n = z j_n, chi_n = -z y_n, xi_n = z h_n.

    ``kind`` is one of ``"psi"``, ``"chi"``, ``"xi"`` (Greek letters are
    accepted too).  The derivative is ``f + z f'`` of the underlying
    spherical function.
    """
    kind = {"ψ": "psi", "χ": "chi", "ξ": "xi"}.get(kind, kind)
    if kind == "psi":
        b = spherical_j(n, z)
        sign = 1.0
    elif kind == "chi":
        b = spherical_y(n, z)
        sign = -1.0
    elif kind == "xi":
        b = spherical_h(hankel_kind, n, z)
        sign = 1.0
    else:
        raise ValueError(f"unknown Riccati-Bessel kind {kind!r}")
    z = b.argument
    return BesselEval(b.order, z, sign * z * b.value,
                      sign * (b.value + z * b.derivative), b.validated)
