"""Exact algebra of boundary-layer profiles ``p(eta) * exp(-sqrt(i) * eta)``.

A profile is stored as the coefficients ``c_0, ..., c_m`` of the complex
polynomial ``p``.  The functions at module level act on coefficient arrays
whose *last* axis is the power of ``eta``; leading axes hold vector
components, so a three-component field is a ``(3, m + 1)`` array.
:class:`PolyExpProfile` and :class:`ProfileVector` are thin immutable
wrappers around those arrays.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .specfun import SQRT_I

__all__ = [
    "MAX_DEGREE",
    "ProfileDegreeError",
    "PolyExpProfile",
    "ProfileVector",
    "differentiate",
    "mul_by_eta",
    "evaluate",
    "l2_norm_halfline",
    "solve_layer_ode",
    "apply_ode_operator",
]

MAX_DEGREE = 64


class ProfileDegreeError(ValueError):
    """Raised when a profile would exceed :data:`MAX_DEGREE`."""


def _as_coeffs(c) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    if c.shape[-1] == 0:
        c = np.zeros(c.shape[:-1] + (1,), dtype=complex)
    if c.shape[-1] - 1 > MAX_DEGREE:
        raise ProfileDegreeError(
            f"profile degree {c.shape[-1] - 1} exceeds the cap of {MAX_DEGREE}")
    return c


def pad(c, m):
    """Zero-pad coefficients along the last axis to degree ``m``."""
    c = np.asarray(c, dtype=complex)
    extra = m + 1 - c.shape[-1]
    if extra <= 0:
        return c
    width = [(0, 0)] * (c.ndim - 1) + [(0, extra)]
    return np.pad(c, width)


def trim(c, tol=0.0):
    """Drop trailing coefficients that vanish in every component."""
    c = np.asarray(c, dtype=complex)
    flat = np.abs(c.reshape(-1, c.shape[-1])).max(axis=0)
    nz = np.nonzero(flat > tol)[0]
    m = nz[-1] if nz.size else 0
    return c[..., : m + 1]


def add(a, b):
    m = max(np.shape(a)[-1], np.shape(b)[-1]) - 1
    return pad(a, m) + pad(b, m)


def poly_derivative(c):
    c = np.asarray(c, dtype=complex)
    if c.shape[-1] == 1:
        return np.zeros_like(c)
    return c[..., 1:] * np.arange(1, c.shape[-1])


def poly_integral(c):
    """Antiderivative of the polynomial vanishing at ``eta = 0``."""
    c = np.asarray(c, dtype=complex)
    out = np.zeros(c.shape[:-1] + (c.shape[-1] + 1,), dtype=complex)
    out[..., 1:] = c / np.arange(1, c.shape[-1] + 1)
    return _as_coeffs(out)


def mul_by_eta(c):
    c = np.asarray(c, dtype=complex)
    out = np.zeros(c.shape[:-1] + (c.shape[-1] + 1,), dtype=complex)
    out[..., 1:] = c
    return _as_coeffs(out)


def differentiate(c):
    """d/deta of ``p e^{-sqrt(i) eta}``: coefficients of ``p' - sqrt(i) p``."""
    c = np.asarray(c, dtype=complex)
    return pad(poly_derivative(c), c.shape[-1] - 1) - SQRT_I * c


def evaluate(c, eta):
    """Value of the profile(s) at ``eta`` (scalar or array)."""
    c = np.asarray(c, dtype=complex)
    eta = np.asarray(eta, dtype=float)
    powers = eta[..., None] ** np.arange(c.shape[-1])
    p = np.tensordot(powers, c, axes=([-1], [-1]))
    # move eta axes to the back so components stay first
    if c.ndim > 1 and eta.ndim:
        p = np.moveaxis(p, tuple(range(eta.ndim)), tuple(range(-eta.ndim, 0)))
    return p * np.exp(-SQRT_I * eta)


def l2_norm_halfline(c, squared=True):
    """Integral of ``|p(eta)|^2 exp(-sqrt(2) eta)`` over ``(0, inf)``.

    Uses the moments ``int eta^k e^{-sqrt(2) eta} = k! / sqrt(2)^(k+1)``.
    By default the integral itself (the squared norm) is returned; pass
    ``squared=False`` for its square root.  For a vector the component
    integrals are summed.
    """
    c = np.asarray(c, dtype=complex).reshape(-1, np.shape(c)[-1])
    m = c.shape[-1]
    k = np.add.outer(np.arange(m), np.arange(m))
    moments = np.array([math.factorial(int(v)) / math.sqrt(2) ** (v + 1)
                        for v in k.ravel()]).reshape(k.shape)
    total = float(np.real(np.einsum("ij,aj,ai->", moments, np.conj(c), c)))
    total = max(total, 0.0)
    return total if squared else math.sqrt(total)


def apply_ode_operator(c):
    """Coefficients of ``(d^2/deta^2 - i)(p e^{-sqrt(i) eta})``, i.e. ``p'' - 2 sqrt(i) p'``."""
    c = np.asarray(c, dtype=complex)
    d1 = poly_derivative(c)
    d2 = poly_derivative(d1)
    m = max(c.shape[-1] - 2, 0)
    return pad(d2, m) - 2 * SQRT_I * pad(d1, m)[..., : m + 1]


def solve_layer_ode(source, u0=0.0):
    """L^2 solution of ``(d^2/deta^2 - i) u = s(eta) e^{-sqrt(i) eta}``, ``u(0) = u0``.

    Writing ``u = p e^{-sqrt(i) eta}`` gives ``q' - 2 sqrt(i) q = s`` for
    ``q = p'``, whose polynomial solution is
    ``q = -sum_k s^(k) / (2 sqrt(i))^(k+1)``; then ``p = u0 + int_0 q``.
    The result has degree ``deg(s) + 1``.

    Parameters
    ----------
    source : array_like
        Coefficients of ``s`` (last axis); leading axes are components.
    u0 : complex or array_like
        Boundary value(s) at ``eta = 0``, broadcast over components.
    """
    s = _as_coeffs(source)
    two_a = 2 * SQRT_I
    q = np.zeros_like(s)
    deriv = s
    fac = 1.0 / two_a
    for _ in range(s.shape[-1]):
        q = q - pad(deriv, s.shape[-1] - 1) * fac
        deriv = poly_derivative(deriv)
        fac /= two_a
    p = poly_integral(q)
    p[..., 0] = np.broadcast_to(np.asarray(u0, dtype=complex), p.shape[:-1])
    return p


class PolyExpProfile:
    """Scalar profile ``(sum_j c_j eta^j) exp(-sqrt(i) eta)``.

    Trailing zero coefficients are dropped, so the zero profile has the
    single coefficient ``0`` and degree ``-1``.
    """

    __slots__ = ("_c",)

    def __init__(self, coefficients: Sequence[complex] | np.ndarray = (0.0,)):
        c = _as_coeffs(coefficients)
        if c.ndim != 1:
            raise ValueError("PolyExpProfile takes a 1-D coefficient list; use ProfileVector")
        c = trim(c).copy()
        c.flags.writeable = False
        self._c = c

    @property
    def coefficients(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        if self._c.size == 1 and self._c[0] == 0:
            return -1
        return self._c.size - 1

    def is_zero(self) -> bool:
        return self.degree < 0

    def __add__(self, other):
        return PolyExpProfile(add(self._c, other._c))

    def __sub__(self, other):
        return PolyExpProfile(add(self._c, -other._c))

    def __neg__(self):
        return PolyExpProfile(-self._c)

    def scale(self, factor: complex):
        return PolyExpProfile(factor * self._c)

    __mul__ = scale
    __rmul__ = scale

    def mul_by_eta(self):
        return PolyExpProfile(mul_by_eta(self._c))

    def differentiate(self):
        return PolyExpProfile(differentiate(self._c))

    def evaluate(self, eta):
        return evaluate(self._c, eta)

    def l2_norm_halfline(self, squared=True):
        return l2_norm_halfline(self._c, squared)

    def apply_ode_operator(self):
        return PolyExpProfile(apply_ode_operator(self._c))

    def __eq__(self, other):
        if not isinstance(other, PolyExpProfile):
            return NotImplemented
        return self._c.shape == other._c.shape and bool(np.all(self._c == other._c))

    def __repr__(self):
        return f"PolyExpProfile({self._c.tolist()!r})"


def solve_layer_ode_profile(source: PolyExpProfile, u0: complex = 0.0) -> PolyExpProfile:
    """:func:`solve_layer_ode` on :class:`PolyExpProfile` objects."""
    return PolyExpProfile(solve_layer_ode(source.coefficients, u0))


class ProfileVector:
    """Fixed number of profile components sharing one coefficient array.

    ``coefficients`` has shape ``(d, m + 1)``; ``labels`` names the frame,
    e.g. ``("gradient", "curl", "normal")`` on a sphere mode or
    ``("tau1", "tau2", "n")`` for a principal frame.
    """

    __slots__ = ("_c", "labels")

    def __init__(self, coefficients, labels: Sequence[str] | None = None):
        c = _as_coeffs(coefficients)
        if c.ndim != 2:
            raise ValueError("ProfileVector needs a (d, m+1) coefficient array")
        if labels is not None and len(labels) != c.shape[0]:
            raise ValueError("label count does not match component count")
        c = trim(c).copy()
        c.flags.writeable = False
        self._c = c
        self.labels = tuple(labels) if labels is not None else None

    @classmethod
    def zeros(cls, d, labels=None):
        return cls(np.zeros((d, 1), dtype=complex), labels)

    @property
    def coefficients(self) -> np.ndarray:
        return self._c

    @property
    def dim(self) -> int:
        return self._c.shape[0]

    @property
    def degree(self) -> int:
        if not np.any(self._c):
            return -1
        return self._c.shape[1] - 1

    def component(self, i) -> PolyExpProfile:
        return PolyExpProfile(self._c[i])

    def __getitem__(self, i):
        return self.component(i)

    def __add__(self, other):
        return ProfileVector(add(self._c, other._c), self.labels)

    def __sub__(self, other):
        return ProfileVector(add(self._c, -other._c), self.labels)

    def scale(self, factor):
        return ProfileVector(factor * self._c, self.labels)

    def apply(self, matrix):
        """Left-multiply every eta-coefficient by a ``(d', d)`` matrix."""
        return ProfileVector(np.asarray(matrix) @ self._c, None)

    def mul_by_eta(self):
        return ProfileVector(mul_by_eta(self._c), self.labels)

    def differentiate(self):
        return ProfileVector(differentiate(self._c), self.labels)

    def evaluate(self, eta):
        return evaluate(self._c, eta)

    def l2_norm_halfline(self, squared=True):
        return l2_norm_halfline(self._c, squared)

    def __repr__(self):
        return f"ProfileVector(degree={self.degree}, labels={self.labels})"
