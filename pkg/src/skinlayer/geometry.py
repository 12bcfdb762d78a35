"""Differential geometry of a surface and its normal neighbourhood.

The unit normal ``n`` points *into* the obstacle, and the curvature tensor
is ``C = grad_Gamma n``; on a sphere of radius R this gives
``C = -(1/R) I_Gamma``.  Points near the surface are written
``x = x_Gamma + nu n`` with Jacobian ``J(nu) = det(I + nu C)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "CurvatureData",
    "SurfaceTensor",
    "IdentityReport",
    "GeometryDomainError",
    "ParametricSurface",
    "Plane",
    "Sphere",
    "Ellipsoid",
    "Torus",
    "LocalField",
    "jacobian",
    "nu_bar",
    "condnubar_check",
    "tensor_identities",
    "vector_identities",
    "curl_local",
    "fd_curl",
]

_E = np.eye(3)


class GeometryDomainError(ValueError):
    """Raised for points where the normal coordinate map degenerates."""


def _unit(v):
    return v / np.linalg.norm(v)


@dataclass(frozen=True)
class CurvatureData:
    """Principal curvatures and frame ``(tau1, tau2, n)`` at a surface point."""

    c1: float
    c2: float
    tau1: np.ndarray = field(default_factory=lambda: _E[0].copy())
    tau2: np.ndarray = field(default_factory=lambda: _E[1].copy())
    n: np.ndarray = field(default_factory=lambda: _E[2].copy())

    def __post_init__(self):
        frame = np.array([self.tau1, self.tau2, self.n], dtype=float)
        if np.max(np.abs(frame @ frame.T - _E)) > 1e-12:
            raise ValueError("(tau1, tau2, n) must be orthonormal")
        for name, v in zip(("tau1", "tau2", "n"), frame):
            object.__setattr__(self, name, v)

    @property
    def h(self) -> float:
        return 0.5 * (self.c1 + self.c2)

    @property
    def g(self) -> float:
        return self.c1 * self.c2

    @property
    def I_gamma(self) -> np.ndarray:
        return np.outer(self.tau1, self.tau1) + np.outer(self.tau2, self.tau2)

    @property
    def C(self) -> np.ndarray:
        return self.c1 * np.outer(self.tau1, self.tau1) + self.c2 * np.outer(self.tau2, self.tau2)

    @property
    def H(self) -> np.ndarray:
        return self.h * self.I_gamma

    @property
    def G(self) -> np.ndarray:
        return self.g * self.I_gamma

    @property
    def M(self) -> np.ndarray:
        # eigen-form of 2H - C: the two curvatures swap
        return self.c2 * np.outer(self.tau1, self.tau1) + self.c1 * np.outer(self.tau2, self.tau2)

    def R(self, nu) -> np.ndarray:
        """``R_nu = (I_Gamma + nu M) / J(nu)``, the tangential inverse of ``I + nu C``."""
        return (self.I_gamma + nu * self.M) / jacobian(nu, self)

    def J(self, nu) -> float:
        return jacobian(nu, self)


@dataclass(frozen=True)
class SurfaceTensor:
    """A 3x3 tensor attached to a surface point."""

    matrix: np.ndarray
    tangential: bool = True

    def check(self, n, tol=1e-14) -> bool:
        if not self.tangential:
            return True
        m = np.asarray(self.matrix)
        return bool(np.max(np.abs(m @ n)) <= tol * max(1.0, np.max(np.abs(m))))


def jacobian(nu, cd: CurvatureData):
    """``J(nu) = 1 + 2 nu h + nu^2 g``."""
    return 1.0 + 2.0 * nu * cd.h + nu * nu * cd.g


def nu_bar(cd: CurvatureData) -> float:
    """Default layer thickness ``0.5 / max(|c1|, |c2|)`` (infinite if flat)."""
    cmax = max(abs(cd.c1), abs(cd.c2))
    return math.inf if cmax == 0 else 0.5 / cmax


def condnubar_check(nu, cd: CurvatureData) -> bool:
    return bool(jacobian(nu, cd) > 0)


@dataclass
class IdentityReport:
    residuals: dict
    tol: float

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values()) if self.residuals else 0.0

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol


def _scale(*mats):
    return max(1.0, *(float(np.max(np.abs(m))) for m in mats))


def tensor_identities(cd: CurvatureData, nu=None, tol=1e-13) -> IdentityReport:
    """Check ``M = 2H - C``, ``MC = G``, ``J = det(I + nu C)`` and ``(I + nu C) R_nu = I_Gamma``.

    Residuals are relative to the largest entry involved.
    """
    if nu is None:
        nu = 0.5 * min(nu_bar(cd), 1.0)
    C, H, G, M, P = cd.C, cd.H, cd.G, cd.M, cd.I_gamma
    s = _scale(C, H, G)
    res = {
        "M=2H-C": float(np.max(np.abs(M - (2 * H - C)))) / s,
        "MC=G": float(np.max(np.abs(M @ C - G))) / (s * s),
        "J=det(I+nuC)": abs(jacobian(nu, cd) - np.linalg.det(_E + nu * C))
        / max(1.0, abs(jacobian(nu, cd))),
        "(I+nuC)R=I": float(np.max(np.abs((_E + nu * C) @ cd.R(nu) - P))),
        "Cn=0": float(np.max(np.abs(C @ cd.n))) / s,
    }
    return IdentityReport(res, tol)


def vector_identities(cd: CurvatureData, V, tol=1e-13) -> IdentityReport:
    """Pointwise curvature identities for a tangential vector ``V``.

    * ``(C(V x n)) x n - C V = -2 H V``
    * ``{C(((H - C) V) x n)} x n = (3 h C - C^2 - 2 H^2) V``
    * ``(C(V x n)) x n = (C - 2H) V``
    * ``{(3 H C - G)(V x n)} x n = (3 H C + G - 6 H^2) V``
    """
    V = np.asarray(V, dtype=complex)
    n = cd.n
    if abs(np.dot(V, n)) > 1e-12 * max(1.0, float(np.linalg.norm(V))):
        raise ValueError("vector_identities requires a tangential V")
    C, H, G = cd.C, cd.H, cd.G
    h = cd.h

    def x(w):
        return np.cross(w, n)

    lhs_rhs = {
        "(C(Vxn))xn-CV=-2HV": (x(C @ x(V)) - C @ V, -2 * H @ V),
        "{C((H-C)V xn)}xn": (x(C @ x((H - C) @ V)), (3 * h * C - C @ C - 2 * H @ H) @ V),
        "(C(Vxn))xn=(C-2H)V": (x(C @ x(V)), (C - 2 * H) @ V),
        "{(3HC-G)(Vxn)}xn": (x((3 * H @ C - G) @ x(V)), (3 * H @ C + G - 6 * H @ H) @ V),
    }
    s = _scale(C, H) ** 2 * max(1.0, float(np.max(np.abs(V))) if V.size else 1.0)
    res = {k: float(np.max(np.abs(a - b))) / s for k, (a, b) in lhs_rhs.items()}
    return IdentityReport(res, tol)


class ParametricSurface:
    """Chart ``(u, v) -> x`` with analytic first and second derivatives.

    Subclasses implement :meth:`derivatives` returning
    ``(x, x_u, x_v, x_uu, x_uv, x_vv)`` and set :attr:`orientation` so that
    ``orientation * (x_u x x_v)`` points into the enclosed body.
    """

    orientation = -1.0
    u_range = (0.0, 1.0)
    v_range = (0.0, 1.0)

    def derivatives(self, u, v):
        raise NotImplementedError

    def point(self, u, v):
        return self.derivatives(u, v)[0]

    def first_fundamental_form(self, u, v):
        _, xu, xv, *_ = self.derivatives(u, v)
        return np.array([[xu @ xu, xu @ xv], [xv @ xu, xv @ xv]])

    def normal(self, u, v):
        _, xu, xv, *_ = self.derivatives(u, v)
        return self.orientation * _unit(np.cross(xu, xv))

    def second_fundamental_form(self, u, v):
        """Coefficients ``x_ij . n`` with the inward normal."""
        _, _, _, xuu, xuv, xvv = self.derivatives(u, v)
        n = self.normal(u, v)
        return np.array([[xuu @ n, xuv @ n], [xuv @ n, xvv @ n]])

    def tangent_basis(self, u, v):
        _, xu, xv, *_ = self.derivatives(u, v)
        return np.column_stack([xu, xv])

    def surface_gradient_map(self, u, v):
        """3x2 matrix ``B (B^T B)^{-1}`` turning chart derivatives into surface gradients."""
        B = self.tangent_basis(u, v)
        gram = B.T @ B
        if abs(np.linalg.det(gram)) < 1e-14:
            raise GeometryDomainError(f"chart is not an immersion at ({u}, {v})")
        return B @ np.linalg.inv(gram)

    def normal_derivatives(self, u, v):
        _, xu, xv, xuu, xuv, xvv = self.derivatives(u, v)
        N = self.orientation * np.cross(xu, xv)
        Nu = self.orientation * (np.cross(xuu, xv) + np.cross(xu, xuv))
        Nv = self.orientation * (np.cross(xuv, xv) + np.cross(xu, xvv))
        nn = np.linalg.norm(N)
        n = N / nn
        nu_ = (Nu - n * (n @ Nu)) / nn
        nv_ = (Nv - n * (n @ Nv)) / nn
        return n, nu_, nv_

    def curvature_tensor(self, u, v):
        """Ambient 3x3 matrix of ``C = grad_Gamma n`` (symmetric, ``C n = 0``)."""
        n, nu_, nv_ = self.normal_derivatives(u, v)
        A = np.column_stack([nu_, nv_])
        C = A @ self.surface_gradient_map(u, v).T
        return 0.5 * (C + C.T)

    def curvature_data(self, u, v) -> CurvatureData:
        n = self.normal(u, v)
        C = self.curvature_tensor(u, v)
        w, vecs = np.linalg.eigh(C)
        # drop the eigenvector along n
        k = int(np.argmax(np.abs(vecs.T @ n)))
        keep = [i for i in range(3) if i != k]
        t1 = vecs[:, keep[0]]
        t1 = _unit(t1 - n * (n @ t1))
        t2 = np.cross(n, t1)
        c1 = float(t1 @ C @ t1)
        c2 = float(t2 @ C @ t2)
        return CurvatureData(c1, c2, t1, t2, n)

    def random_points(self, count, rng):
        u = rng.uniform(*self.u_range, count)
        v = rng.uniform(*self.v_range, count)
        return list(zip(u, v))


class Plane(ParametricSurface):
    """The plane z = 0 with normal -e_z (body in z < 0)."""

    orientation = -1.0
    u_range = (-1.0, 1.0)
    v_range = (-1.0, 1.0)

    def derivatives(self, u, v):
        z = np.zeros(3)
        return np.array([u, v, 0.0]), _E[0].copy(), _E[1].copy(), z, z, z


class Ellipsoid(ParametricSurface):
    """``(a sin t cos p, b sin t sin p, c cos t)`` with polar angle t, azimuth p."""

    u_range = (0.15, math.pi - 0.15)
    v_range = (0.0, 2 * math.pi)

    def __init__(self, a, b, c):
        self.a, self.b, self.c = float(a), float(b), float(c)

    def derivatives(self, t, p):
        a, b, c = self.a, self.b, self.c
        st, ct, sp, cp = math.sin(t), math.cos(t), math.sin(p), math.cos(p)
        x = np.array([a * st * cp, b * st * sp, c * ct])
        xt = np.array([a * ct * cp, b * ct * sp, -c * st])
        xp = np.array([-a * st * sp, b * st * cp, 0.0])
        xtt = np.array([-a * st * cp, -b * st * sp, -c * ct])
        xtp = np.array([-a * ct * sp, b * ct * cp, 0.0])
        xpp = np.array([-a * st * cp, -b * st * sp, 0.0])
        return x, xt, xp, xtt, xtp, xpp


class Sphere(Ellipsoid):
    def __init__(self, R=1.0):
        super().__init__(R, R, R)
        self.R = float(R)


class Torus(ParametricSurface):
    """``((R0 + r0 cos v) cos u, (R0 + r0 cos v) sin u, r0 sin v)``; body is the tube."""

    u_range = (0.0, 2 * math.pi)
    v_range = (0.0, 2 * math.pi)

    def __init__(self, R0=2.0, r0=0.5):
        if not R0 > r0 > 0:
            raise ValueError("torus needs R0 > r0 > 0")
        self.R0, self.r0 = float(R0), float(r0)

    def derivatives(self, u, v):
        R0, r0 = self.R0, self.r0
        su, cu, sv, cv = math.sin(u), math.cos(u), math.sin(v), math.cos(v)
        rho = R0 + r0 * cv
        x = np.array([rho * cu, rho * su, r0 * sv])
        xu = np.array([-rho * su, rho * cu, 0.0])
        xv = np.array([-r0 * sv * cu, -r0 * sv * su, r0 * cv])
        xuu = np.array([-rho * cu, -rho * su, 0.0])
        xuv = np.array([r0 * sv * su, -r0 * sv * cu, 0.0])
        xvv = np.array([-r0 * cv * cu, -r0 * cv * su, -r0 * sv])
        return x, xu, xv, xuu, xuv, xvv


@dataclass
class LocalField:
    """A vector field ``V_hat(u, v, nu) = V(x_Gamma(u, v) + nu n(u, v))``."""

    surface: ParametricSurface
    func: Callable[[float, float, float], np.ndarray]
    thickness: float | None = None

    @classmethod
    def from_cartesian(cls, surface, V, thickness=None):
        def f(u, v, nu):
            return np.asarray(V(surface.point(u, v) + nu * surface.normal(u, v)), dtype=complex)
        return cls(surface, f, thickness)

    def __call__(self, u, v, nu):
        return np.asarray(self.func(u, v, nu), dtype=complex)


def _richardson(f, x0, h):
    """Central difference with one Richardson step (error O(h^4))."""
    d1 = (f(x0 + h) - f(x0 - h)) / (2 * h)
    d2 = (f(x0 + h / 2) - f(x0 - h / 2)) / h
    return (4 * d2 - d1) / 3


def _surface_operators(surface, u, v, nu, Vhat, n, weight, h):
    """``rot^W(V x n)``-type pieces: returns ``(rot^W Vhat, Rot^W(Vhat . n))``.

    ``weight`` is the tangential matrix W (``I_Gamma`` or ``M``).  The normal
    is held at its value on the base point, matching the local-coordinate
    convention where surface operators act on ``Vhat(., nu)``.
    """
    Bmap = surface.surface_gradient_map(u, v)

    def W_of(a, b):
        return np.cross(Vhat(a, b, nu), surface.normal(a, b))

    def s_of(a, b):
        return Vhat(a, b, nu) @ surface.normal(a, b)

    dWu = _richardson(lambda a: W_of(a, v), u, h)
    dWv = _richardson(lambda b: W_of(u, b), v, h)
    grad_W = np.column_stack([dWu, dWv]) @ Bmap.T  # (i, j) = d_j W_i
    rot_w = np.sum(weight * grad_W)
    dsu = _richardson(lambda a: s_of(a, v), u, h)
    dsv = _richardson(lambda b: s_of(u, b), v, h)
    grad_s = Bmap @ np.array([dsu, dsv])
    Rot_w = np.cross(weight @ grad_s, n)
    return rot_w, Rot_w


def curl_local(field: LocalField, at, h=1e-5):
    """``curl V`` at ``x_Gamma(u, v) + nu n`` from the local-coordinate formula.

    ``J curl V = (C_Gamma + nu C^M_Gamma) V_hat - J d_nu(V_hat x n)`` with
    ``C_Gamma V = (rot V) n + Rot(V . n) - (C V) x n`` and the M-weighted
    variant using ``M grad_Gamma`` and ``G``.  Surface derivatives use
    chart differences with step ``h`` and Richardson extrapolation.
    """
    u, v, nu = at
    surface = field.surface
    cd = surface.curvature_data(u, v)
    J = jacobian(nu, cd)
    if J <= 0:
        raise GeometryDomainError(f"J(nu) = {J} <= 0 at nu = {nu}")
    n = cd.n
    Vh = field(u, v, nu)
    rot, Rot = _surface_operators(surface, u, v, nu, field, n, cd.I_gamma, h)
    rotM, RotM = _surface_operators(surface, u, v, nu, field, n, cd.M, h)
    CG = rot * n + Rot - np.cross(cd.C @ Vh, n)
    CGM = rotM * n + RotM - np.cross(cd.G @ Vh, n)
    dnu = _richardson(lambda s: np.cross(field(u, v, s), n), nu, h)
    return (CG + nu * CGM - J * dnu) / J


def fd_curl(V, x, h):
    """Cartesian central-difference curl of ``V`` at ``x``."""
    x = np.asarray(x, dtype=float)
    D = np.zeros((3, 3), dtype=complex)  # D[i, j] = d_j V_i
    for j in range(3):
        e = _E[j] * h
        D[:, j] = (np.asarray(V(x + e)) - np.asarray(V(x - e))) / (2 * h)
    return np.array([D[2, 1] - D[1, 2], D[0, 2] - D[2, 0], D[1, 0] - D[0, 1]])
