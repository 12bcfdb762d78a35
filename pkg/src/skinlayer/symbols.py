"""Symbols of the impedance operators D^{delta,k}, k = 0..3.

On a sphere of radius R the tangential vector spherical harmonics of
degree n diagonalize every surface operator involved.  With
``lam = n(n+1)/R^2``:

* gradient family: ``grad div -> -lam``, ``Rot rot -> 0``
* curl family:     ``grad div -> 0``,    ``Rot rot -> lam``

and ``H - C = 0``, ``C^2 - H^2 = 0``.  Each ``D^{delta,k}`` therefore
reduces to one complex number per (n, family).  The matrix forms
(:func:`impedance_matrix`, :func:`remainder_matrix`) act on the
three-component coordinates of a surface-symbol algebra and are used by
the boundary-layer trace identities.

The splitting parameter (1/2) and the Yosida constant (1) of the
third-order condition are fixed.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .specfun import SQRT_I

__all__ = [
    "GRADIENT",
    "CURL",
    "ModeIndex",
    "ImpedanceSymbol",
    "ScanResult",
    "skin_depth",
    "d_k",
    "d3_unregularized",
    "remainder_symbol",
    "d3_terms",
    "coercivity_scan",
    "impedance_matrix",
    "remainder_matrix",
    "scan_to_csv",
]

GRADIENT = "gradient"
CURL = "curl"
_FAMILIES = (GRADIENT, CURL)
_Q = math.sqrt(2) / 4  # sqrt(2)/4
_INV_2SQI = 1.0 / (2 * SQRT_I)  # (sqrt(2)/4)(1 - i)


@dataclass(frozen=True)
class ModeIndex:
    """Degree ``n`` and VSH family on a sphere of radius ``R``."""

    n: int
    family: str = GRADIENT
    R: float = 1.0

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"family must be one of {_FAMILIES}")
        if self.n < 1 or self.R <= 0:
            raise ValueError("need n >= 1 and R > 0")

    @property
    def lam(self) -> float:
        return self.n * (self.n + 1) / self.R**2

    @property
    def graddiv(self) -> float:
        return -self.lam if self.family == GRADIENT else 0.0

    @property
    def rotrot(self) -> float:
        return self.lam if self.family == CURL else 0.0


@dataclass(frozen=True)
class ImpedanceSymbol:
    k: int
    delta: float
    mode: ModeIndex | None
    value: complex
    tangential_matrix: np.ndarray | None = field(default=None, compare=False)


def skin_depth(omega, sigma):
    """``delta = 1 / sqrt(omega sigma)``."""
    if not (omega > 0 and sigma > 0):
        raise ValueError("skin_depth needs omega > 0 and sigma > 0")
    return 1.0 / math.sqrt(omega * sigma)


def _check_k(k):
    if k not in (0, 1, 2, 3):
        raise ValueError(f"impedance order k must be in 0..3, got {k}")


def _family_lambda(family, lam):
    """(grad div, Rot rot) eigenvalues for a family."""
    return (-lam, 0.0) if family == GRADIENT else (0.0, lam)


def d3_terms(delta, lam, family, eps_r=1.0, omega=1.0, c2_minus_h2=0.0):
    """The five terms of ``D^{delta,3}`` on one family (sphere: ``H - C = 0``).

    Returns ``(t1, t2, t3, t4, t5)`` where ``t1 = delta sqrt(i)/2``,
    ``t2 = delta^2 (H - C) = 0``, ``t3`` the ``delta^3/(2 sqrt(i))`` term,
    ``t4`` the real Yosida part and ``t5`` the imaginary Yosida part.
    """
    gd, rr = _family_lambda(family, lam)
    x2 = delta * delta
    t1 = delta * SQRT_I / 2
    t2 = 0.0j
    t3 = delta**3 * _INV_2SQI * (c2_minus_h2 + eps_r * omega**2)
    t4 = _Q * delta * (1.0 / (1 - x2 * gd) + x2 * rr / (1 + x2 * rr))
    t5 = 1j * _Q * delta * (1.0 / (1 + x2 * rr) - x2 * gd / (1 - x2 * gd))
    return t1, t2, t3, t4, t5


def _curvature_diag(curvature):
    """Eigenvalues of ``H - C`` on (tau1, tau2): ``((c2-c1)/2, (c1-c2)/2)``."""
    c1, c2 = curvature
    return np.array([(c2 - c1) / 2, (c1 - c2) / 2])


def d_k(k, delta, mode: ModeIndex, eps_r=1.0, omega=1.0, curvature=None) -> ImpedanceSymbol:
    """Scalar symbol of ``D^{delta,k}`` on one mode family.

    ``curvature=(c1, c2)`` selects the general-curvature restriction for
    ``k <= 2``: ``H - C`` is diagonal on the principal frame with entries
    ``((c2 - c1)/2, (c1 - c2)/2)``; the gradient family is mapped to
    ``tau1`` and the curl family to ``tau2``.  The full 2x2 restriction is
    returned in ``tangential_matrix``.  Without ``curvature`` the sphere
    of radius ``mode.R`` is assumed.
    """
    _check_k(k)
    if curvature is not None and k == 3:
        raise ValueError("general curvature is only supported for k <= 2")
    if k == 3:
        value = complex(sum(d3_terms(delta, mode.lam, mode.family, eps_r, omega)))
        return ImpedanceSymbol(k, delta, mode, value)
    diag = np.zeros(2, dtype=complex)
    if k >= 1:
        diag += delta * SQRT_I
    if k == 2 and curvature is not None:
        diag += delta**2 * _curvature_diag(curvature)
    idx = 0 if mode.family == GRADIENT else 1
    return ImpedanceSymbol(k, delta, mode, complex(diag[idx]), np.diag(diag))


def d3_unregularized(delta, mode: ModeIndex, eps_r=1.0, omega=1.0) -> ImpedanceSymbol:
    """``D_0^{delta,3} = delta sqrt(i) + delta^3/(2 sqrt(i)) (eps_r w^2 + grad div + Rot rot)`` (sphere)."""
    value = delta * SQRT_I + delta**3 * _INV_2SQI * (
        eps_r * omega**2 + mode.graddiv + mode.rotrot)
    return ImpedanceSymbol(3, delta, mode, complex(value))


def remainder_symbol(delta, mode: ModeIndex) -> complex:
    """Symbol of ``R^{delta,3} = (D^{delta,3} - D_0^{delta,3}) / delta^5``.

    ``(sqrt(2)/4)(1 - i) [ (1 - d^2 gd)^{-1} gd^2 - (1 + d^2 Rr)^{-1} Rr^2 ]``,
    i.e. ``+(sqrt(2)/4)(1-i) lam^2/(1 + d^2 lam)`` on the gradient family and
    the negative of that on the curl family.
    """
    gd, rr = mode.graddiv, mode.rotrot
    x2 = delta * delta
    return complex(_Q * (1 - 1j) * (gd * gd / (1 - x2 * gd) - rr * rr / (1 + x2 * rr)))


@dataclass
class ScanResult:
    k: int
    C1: float
    C2: float
    delta_k: float
    rows: list

    def __iter__(self):
        return iter((self.C1, self.C2, self.delta_k))


def coercivity_scan(k, delta_max, lambda_max, eps_r=1.0, omega=1.0, R=1.0,
                    n_lambda=240, n_delta=48, delta_min_ratio=1e-3) -> ScanResult:
    """Empirical continuity and coercivity constants of ``D^{delta,k}`` on the sphere.

    Scans ``lam`` on a log grid over ``[2/R^2, lambda_max]`` and ``delta`` on a
    log grid over ``[delta_min_ratio * delta_max, delta_max]``, both
    families.  ``C1 = sup |d_k| / delta``, ``C2 = inf Re d_k / delta`` and
    ``delta_k`` is the largest grid ``delta`` below which ``Re d_k > 0``
    everywhere on the grid (0 if it fails at the smallest ``delta``).
    """
    if k not in (1, 2, 3):
        raise ValueError("coercivity_scan needs k in 1..3")
    lams = np.geomspace(2.0 / R**2, lambda_max, n_lambda)
    deltas = np.geomspace(delta_min_ratio * delta_max, delta_max, n_delta)
    rows = []
    C1, C2 = 0.0, math.inf
    delta_k, ok = 0.0, True
    for d in deltas:
        row_min = math.inf
        for fam in _FAMILIES:
            if k == 3:
                vals = np.array([sum(d3_terms(d, lam, fam, eps_r, omega)) for lam in lams])
                scaled = vals / d
            else:
                # d_k = delta sqrt(i) on the sphere, so the scaled symbol is exact
                vals = np.full(lams.shape, d * SQRT_I)
                scaled = np.full(lams.shape, SQRT_I)
            C1 = max(C1, float(np.max(np.abs(scaled))))
            row_min = min(row_min, float(np.min(scaled.real)))
            rows.extend((k, float(d), float(lam), fam, float(v.real), float(v.imag))
                        for lam, v in zip(lams, vals))
        C2 = min(C2, row_min)
        if ok and row_min > 0:
            delta_k = float(d)
        else:
            ok = False
    return ScanResult(k, C1, C2, delta_k, rows)


def scan_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "delta", "lambda", "family", "re", "im"])
    for k, d, lam, fam, re, im in rows:
        w.writerow([k, f"{d:.12e}", f"{lam:.12e}", fam, f"{re:.16e}", f"{im:.16e}"])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# matrix forms on a surface-symbol algebra (3 coordinates, last one normal)

def _tangential_block(M):
    return np.asarray(M, dtype=complex)[:2, :2]


def impedance_matrix(k, delta, alg, regularized=True):
    """2x2 tangential matrix of ``D^{delta,k}`` on ``alg``.

    ``alg`` provides ``Hm``, ``Cm``, ``graddiv``, ``rotrot``, ``omega`` and
    ``eps_r``.  For ``k = 3`` the regularized operator is returned unless
    ``regularized=False`` (then ``D_0^{delta,3}``).
    """
    _check_k(k)
    I2 = np.eye(2, dtype=complex)
    H = _tangential_block(alg.Hm)
    C = _tangential_block(alg.Cm)
    gd = _tangential_block(alg.graddiv)
    rr = _tangential_block(alg.rotrot)
    ew2 = alg.eps_r * alg.omega**2
    if k == 0:
        return np.zeros((2, 2), dtype=complex)
    if k == 1:
        return delta * SQRT_I * I2
    if k == 2:
        return delta * SQRT_I * I2 + delta**2 * (H - C)
    d2 = delta * delta
    if not regularized:
        return (delta * SQRT_I * I2 + d2 * (H - C)
                + delta**3 * _INV_2SQI * (C @ C - H @ H + ew2 * I2 + gd + rr))
    A = np.linalg.inv(I2 - d2 * gd)
    B = np.linalg.inv(I2 + d2 * rr)
    return (delta * SQRT_I / 2 * I2 + d2 * (H - C)
            + delta**3 * _INV_2SQI * (C @ C - H @ H + ew2 * I2)
            + _Q * delta * (A + d2 * rr @ B)
            + 1j * _Q * delta * (B - d2 * gd @ A))


def remainder_matrix(delta, alg):
    """2x2 matrix of ``R^{delta,3}`` so that ``D^3 = D_0^3 + delta^5 R``."""
    I2 = np.eye(2, dtype=complex)
    gd = _tangential_block(alg.graddiv)
    rr = _tangential_block(alg.rotrot)
    d2 = delta * delta
    return _Q * (1 - 1j) * (np.linalg.inv(I2 - d2 * gd) @ gd @ gd
                            - np.linalg.inv(I2 + d2 * rr) @ rr @ rr)
