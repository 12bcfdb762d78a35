"""Boundary-layer profiles of the skin-effect expansion.

Inside the conductor, in the stretched normal variable ``eta = nu/delta``,
the profiles ``(E_hat^k, H^k)`` solve

    d_eta H^k x n + E_hat^k / omega       = sum_{l=1..4} A_H^(l)(E_hat^{k-l}, H^{k-l})
    -d_eta E_hat^k x n + i omega H^k      = sum_{l=1,2}  A_E^(l)(E_hat^{k-l}, H^{k-l})

with ``H^k_T(0)`` equal to the exterior trace ``H^k_{e,T}`` and decay as
``eta -> inf``.  The normalized electric field satisfies
``E_i^{k+1} = E_hat^k`` and ``E_i^0 = 0``.

Every profile is ``p(eta) exp(-sqrt(i) eta)`` with a vector polynomial
``p`` whose coefficients live in a finite "surface-symbol" space: three
coordinates (two tangential, one normal) on which each surface operator
acts as a 3x3 matrix (:class:`SurfaceSymbolAlgebra`).  Two instantiations
are provided: one vector spherical harmonic mode on a sphere, and a frozen
plane-wave symbol at a point of given principal curvatures.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import polyexp as pe
from .polyexp import ProfileVector
from .specfun import SQRT_I
from .symbols import impedance_matrix, remainder_matrix

__all__ = [
    "SurfaceSymbolAlgebra",
    "LayerState",
    "apply_AH",
    "apply_AE",
    "run_recursion",
    "run_unnormalized",
    "system_residual",
    "trace_Ek_cross_n",
    "phi_k",
    "trace_identity_residual",
]

_N = 2  # index of the normal coordinate
_T = slice(0, 2)


def _matrix(m):
    m = np.asarray(m, dtype=complex)
    if m.shape != (3, 3):
        raise ValueError(f"surface operator must be a 3x3 matrix, got shape {m.shape}")
    return m


@dataclass(frozen=True, eq=False)
class SurfaceSymbolAlgebra:
    """Surface operators as 3x3 matrices on (tangential, tangential, normal) coordinates.

    ``rot`` and ``rotM`` map the tangential block to the normal slot and
    ``Rot``, ``RotM`` map the normal slot to the tangential block, so that
    ``C_Gamma = rot + Rot - X C`` and ``C_Gamma^M = rotM + RotM - X G``.
    ``X`` is ``V -> V x n``.  ``Cm``, ``Mm``, ``Gm``, ``Hm`` are the curvature
    tensors, ``h`` and ``g`` the mean and Gauss curvature.
    """

    X: np.ndarray
    Cm: np.ndarray
    Mm: np.ndarray
    Gm: np.ndarray
    rot: np.ndarray
    Rot: np.ndarray
    rotM: np.ndarray
    RotM: np.ndarray
    graddiv: np.ndarray
    h: float
    g: float
    omega: float = 1.0
    eps_r: float = 1.0
    labels: tuple = ("t1", "t2", "n")
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("X", "Cm", "Mm", "Gm", "rot", "Rot", "rotM", "RotM", "graddiv"):
            object.__setattr__(self, name, _matrix(getattr(self, name)))
        if not self.omega > 0:
            raise ValueError("omega must be positive")

    @property
    def dimension(self) -> int:
        return 3

    @property
    def I_T(self) -> np.ndarray:
        return np.diag([1.0, 1.0, 0.0]).astype(complex)

    @property
    def Hm(self) -> np.ndarray:
        return self.h * self.I_T

    @property
    def rotrot(self) -> np.ndarray:
        return self.Rot @ self.rot

    @property
    def laplace(self) -> np.ndarray:
        """Vector Laplace-Beltrami ``grad div - Rot rot``."""
        return self.graddiv - self.rotrot

    @property
    def C_gamma(self) -> np.ndarray:
        return self.rot + self.Rot - self.X @ self.Cm

    @property
    def C_gamma_M(self) -> np.ndarray:
        return self.rotM + self.RotM - self.X @ self.Gm

    # ------------------------------------------------------------------
    @classmethod
    def sphere_mode(cls, n: int, R: float = 1.0, omega: float = 1.0, eps_r: float = 1.0):
        """Degree-``n`` VSH mode on a sphere of radius ``R`` (normal pointing inward).

        Coordinates ``(a, b, c)`` stand for ``a Psi + b Phi + c Y n`` with
        ``Psi = R grad_Gamma Y`` and ``Phi = Psi x n``.  Both principal
        curvatures are ``-1/R``.
        """
        if n < 1 or R <= 0:
            raise ValueError("need n >= 1 and R > 0")
        lam = n * (n + 1) / R**2
        c = -1.0 / R
        X = np.array([[0, -1, 0], [1, 0, 0], [0, 0, 0]], dtype=complex)
        curv = np.diag([c, c, 0.0])
        rot = np.zeros((3, 3), complex)
        rot[2, 1] = R * lam
        Rot = np.zeros((3, 3), complex)
        Rot[1, 2] = 1.0 / R
        gd = np.zeros((3, 3), complex)
        gd[0, 0] = -lam
        return cls(X, curv, curv, curv @ curv, rot, Rot, c * rot, c * Rot, gd,
                   h=c, g=c * c, omega=omega, eps_r=eps_r,
                   labels=("gradient", "curl", "normal"),
                   meta={"kind": "sphere", "n": n, "R": R, "lam": lam})

    @classmethod
    def plane_wave(cls, c1: float, c2: float, xi1: float, xi2: float,
                   omega: float = 1.0, eps_r: float = 1.0):
        """Frozen symbol at a point with principal curvatures ``(c1, c2)``.

        Surface derivatives act as ``grad -> i xi`` in the principal frame
        ``(tau1, tau2, n)`` (right-handed); derivatives of the curvature are
        neglected.
        """
        X = np.array([[0, 1, 0], [-1, 0, 0], [0, 0, 0]], dtype=complex)
        C = np.diag([c1, c2, 0.0])
        M = np.diag([c2, c1, 0.0])
        rot = np.zeros((3, 3), complex)
        rot[2, :2] = 1j * np.array([-xi2, xi1])
        Rot = np.zeros((3, 3), complex)
        Rot[:2, 2] = 1j * np.array([xi2, -xi1])
        rotM = np.zeros((3, 3), complex)
        rotM[2, :2] = 1j * np.array([-c1 * xi2, c2 * xi1])
        RotM = np.zeros((3, 3), complex)
        RotM[:2, 2] = 1j * np.array([c1 * xi2, -c2 * xi1])
        xi = np.array([xi1, xi2])
        gd = np.zeros((3, 3), complex)
        gd[:2, :2] = -np.outer(xi, xi)
        return cls(X, C, M, M @ C, rot, Rot, rotM, RotM, gd,
                   h=(c1 + c2) / 2, g=c1 * c2, omega=omega, eps_r=eps_r,
                   labels=("tau1", "tau2", "n"),
                   meta={"kind": "plane_wave", "c": (c1, c2), "xi": (xi1, xi2)})

    @classmethod
    def from_matrices(cls, **kwargs):
        """Build from arbitrary user-supplied matrices (see the field list)."""
        return cls(**kwargs)


def _coeffs(p):
    if isinstance(p, ProfileVector):
        c = p.coefficients
    else:
        c = np.asarray(p, dtype=complex)
    if c.ndim != 2 or c.shape[0] != 3:
        raise ValueError(f"profile must have 3 components, got shape {c.shape}")
    return c


def _mat(M, c):
    return np.einsum("ij,jk->ik", M, c)


def _eta(c, power=1):
    for _ in range(power):
        c = pe.mul_by_eta(c)
    return c


def _sum(*terms):
    out = terms[0]
    for t in terms[1:]:
        out = pe.add(out, t)
    return out


def apply_AH(ell: int, u, v, alg: SurfaceSymbolAlgebra) -> ProfileVector:
    """Right-hand side operator ``A_H^(ell)(u, v)`` for the magnetic equation."""
    u, v = _coeffs(u), _coeffs(v)
    w, ie = alg.omega, 1j * alg.eps_r * alg.omega
    if ell == 1:
        inner = _sum(_mat(alg.X, pe.differentiate(v)), u / w)
        out = _sum(_mat(alg.C_gamma, v), -2 * alg.h * _eta(inner))
    elif ell == 2:
        inner = _sum(_mat(alg.X, pe.differentiate(v)), u / w)
        out = _sum(-ie * u, _eta(_mat(alg.C_gamma_M, v)), -alg.g * _eta(inner, 2))
    elif ell == 3:
        out = -2 * alg.h * ie * _eta(u)
    elif ell == 4:
        out = -alg.g * ie * _eta(u, 2)
    else:
        raise ValueError("apply_AH needs ell in 1..4")
    return ProfileVector(out, alg.labels)


def apply_AE(ell: int, u, v, alg: SurfaceSymbolAlgebra) -> ProfileVector:
    """Right-hand side operator ``A_E^(ell)(u, v)`` for the electric equation."""
    u, v = _coeffs(u), _coeffs(v)
    inner = _sum(_mat(alg.X, pe.differentiate(u)), -1j * alg.omega * v)
    if ell == 1:
        out = _sum(-_mat(alg.C_gamma, u), 2 * alg.h * _eta(inner))
    elif ell == 2:
        out = _sum(-_eta(_mat(alg.C_gamma_M, u)), alg.g * _eta(inner, 2))
    else:
        raise ValueError("apply_AE needs ell in 1..2")
    return ProfileVector(out, alg.labels)


@dataclass(frozen=True)
class LayerState:
    """Profiles ``(E_hat^l, H^l)``, ``l = 0..order``, for one algebra and one set of traces."""

    alg: SurfaceSymbolAlgebra
    E_hat: tuple
    H: tuple
    traces: tuple

    @property
    def order(self) -> int:
        return len(self.H) - 1

    def E_i(self, ell: int) -> ProfileVector:
        """Un-normalized interior electric profile: ``E_i^0 = 0``, ``E_i^l = E_hat^{l-1}``."""
        if ell == 0:
            return ProfileVector.zeros(3, self.alg.labels)
        if not 1 <= ell <= self.order + 1:
            raise ValueError(f"E_i^{ell} needs a state of order >= {ell - 1}")
        return self.E_hat[ell - 1]


def _rhs(alg, E_hat, H, k):
    zero = np.zeros((3, 1), complex)

    def get(seq, j):
        return seq[j].coefficients if j >= 0 else zero

    F = _sum(zero, *[apply_AH(l, get(E_hat, k - l), get(H, k - l), alg).coefficients
                     for l in range(1, 5) if k - l >= 0])
    G = _sum(zero, *[apply_AE(l, get(E_hat, k - l), get(H, k - l), alg).coefficients
                     for l in range(1, 3) if k - l >= 0])
    return F, G


def _chop(c):
    """Drop trailing coefficients that are round-off relative to the profile scale."""
    scale = np.max(np.abs(c))
    return pe.trim(c, tol=64 * np.finfo(float).eps * scale)


def _solve_order(alg, F, G, trace):
    """Solve one order of the layer system for given right-hand sides."""
    w = alg.omega
    src = _sum(-_mat(alg.X, pe.differentiate(F)), -G / w)
    m = src.shape[-1] - 1
    H = np.zeros((3, m + 2), complex)
    H[_T] = pe.solve_layer_ode(src[_T], trace[_T])
    H[_N] = pe.pad(G[_N] / (1j * w), m + 1)
    E = w * _sum(F, -_mat(alg.X, pe.differentiate(H)))
    return _chop(E), _chop(H)


def _as_traces(boundary_traces, k):
    tr = [np.asarray(t, dtype=complex).reshape(-1) for t in boundary_traces]
    if len(tr) < k + 1:
        raise ValueError(f"need {k + 1} boundary traces, got {len(tr)}")
    out = []
    for t in tr[: k + 1]:
        if t.size == 2:
            t = np.append(t, 0.0)
        if t.size != 3:
            raise ValueError("each trace must have 2 tangential (or 3) coordinates")
        out.append(np.array([t[0], t[1], 0.0], dtype=complex))
    return tuple(out)


def run_recursion(alg: SurfaceSymbolAlgebra, boundary_traces, k: int) -> LayerState:
    """Solve the layer system for orders ``0..k``.

    Parameters
    ----------
    alg : SurfaceSymbolAlgebra
    boundary_traces : sequence of array_like
        ``H^l_{e,T}`` in algebra coordinates for ``l = 0..k`` (the normal
        coordinate, if given, is ignored).
    k : int
        Highest order computed.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    traces = _as_traces(boundary_traces, k)
    E_hat, H = [], []
    for j in range(k + 1):
        F, G = _rhs(alg, E_hat, H, j)
        E, Hj = _solve_order(alg, F, G, traces[j])
        E_hat.append(ProfileVector(E, alg.labels))
        H.append(ProfileVector(Hj, alg.labels))
    return LayerState(alg, tuple(E_hat), tuple(H), traces)


def run_unnormalized(alg: SurfaceSymbolAlgebra, boundary_traces, k: int):
    """Expand the un-normalized interior fields ``(E_i^m, H_i^m)`` directly.

    The Maxwell system in local coordinates, multiplied by the Jacobian
    ``J = 1 + 2 h nu + g nu^2``, is collected power by power in ``delta``
    (``sigma_hat = i eps_r omega + 1/(omega delta^2)``):

    * ``delta^{m-2}`` of ``J sigma_hat E - (C_Gamma + nu C_Gamma^M) H + (J/delta) d_eta(H x n)``
    * ``delta^{m-1}`` of ``i omega J H + (C_Gamma + nu C_Gamma^M) E - (J/delta) d_eta(E x n)``

    and solved for ``(E^m, H^{m-1})``.  Returns ``(E, H)`` lists with
    ``E[0..k+1]`` and ``H[0..k]``.
    """
    traces = _as_traces(boundary_traces, k)
    w, ie = alg.omega, 1j * alg.eps_r * alg.omega
    h, g = alg.h, alg.g
    zero = np.zeros((3, 1), complex)
    E, H = [], []

    def at(seq, j):
        return seq[j] if j >= 0 else zero

    def jexp(seq, j):
        # coefficient of delta^j in J * sum delta^l seq[l]
        return _sum(at(seq, j), 2 * h * _eta(at(seq, j - 1)), g * _eta(at(seq, j - 2), 2))

    def dx(c):
        return _mat(alg.X, pe.differentiate(c))

    for m in range(k + 2):
        # first equation: E^m/w + d(H^{m-1}) x n = F, everything else known
        FA = _sum(zero,
                  -2 * h * _eta(at(E, m - 1)) / w, -g * _eta(at(E, m - 2), 2) / w,
                  -ie * jexp(E, m - 2),
                  _mat(alg.C_gamma, at(H, m - 2)), _eta(_mat(alg.C_gamma_M, at(H, m - 3))),
                  -2 * h * _eta(dx(at(H, m - 2))), -g * _eta(dx(at(H, m - 3)), 2))
        # second equation: -d(E^m) x n + i w H^{m-1} = G
        GB = _sum(zero,
                  -2j * w * h * _eta(at(H, m - 2)), -1j * w * g * _eta(at(H, m - 3), 2),
                  -_mat(alg.C_gamma, at(E, m - 1)), -_eta(_mat(alg.C_gamma_M, at(E, m - 2))),
                  2 * h * _eta(dx(at(E, m - 1))), g * _eta(dx(at(E, m - 2)), 2))
        if m == 0:
            # H^{-1} = 0: the leading balance forces E^0 = w * FA = 0
            E.append(w * FA)
            continue
        Em, Hm1 = _solve_order(alg, FA, GB, traces[m - 1])
        E.append(Em)
        H.append(Hm1)
    wrap = lambda seq: tuple(ProfileVector(c, alg.labels) for c in seq)  # noqa: E731
    return wrap(E), wrap(H)


def system_residual(state: LayerState, k: int) -> float:
    """Max coefficient residual of both order-``k`` equations and of the trace condition."""
    alg = state.alg
    F, G = _rhs(alg, list(state.E_hat), list(state.H), k)
    E, H = state.E_hat[k].coefficients, state.H[k].coefficients
    r1 = _sum(_mat(alg.X, pe.differentiate(H)), E / alg.omega, -F)
    r2 = _sum(-_mat(alg.X, pe.differentiate(E)), 1j * alg.omega * H, -G)
    r3 = H[_T, 0] - state.traces[k][_T]
    return float(max(np.max(np.abs(r1)), np.max(np.abs(r2)), np.max(np.abs(r3))))


def trace_Ek_cross_n(state: LayerState, ell: int) -> np.ndarray:
    """``E_i^ell x n`` at ``eta = 0`` in algebra coordinates."""
    if ell == 0:
        return np.zeros(3, complex)
    if not 1 <= ell <= state.order + 1:
        raise ValueError(f"trace of order {ell} needs a state of order >= {ell - 1}")
    return state.alg.X @ state.E_hat[ell - 1].coefficients[:, 0]


def _embed(M2):
    out = np.zeros((3, 3), complex)
    out[_T, _T] = M2
    return out


def phi_k(traces, delta: float, k: int, alg: SurfaceSymbolAlgebra, remainder: bool = True):
    """Right-hand side ``phi_k`` of the trace identity

        E_{e,k} x n + omega D^{delta,k} (H_{e,k})_T = delta^{k+1} phi_k

    where ``E_{e,k}``, ``H_{e,k}`` are the truncated exterior expansions.
    ``traces`` holds ``H^l_{e,T}`` for ``l = 0..k``.  For ``k = 3`` the
    remainder of the regularized operator is included unless
    ``remainder=False`` (identity for the un-regularized operator).
    """
    if k not in (0, 1, 2, 3):
        raise ValueError("phi_k needs k in 0..3")
    tr = _as_traces(traces, k)
    w = alg.omega
    HC = alg.Hm - alg.Cm
    if k == 0:
        return np.zeros(3, complex)
    if k == 1:
        return SQRT_I * w * tr[1]
    if k == 2:
        return w * (SQRT_I * tr[2] + HC @ (tr[1] + delta * tr[2]))
    K = (alg.Cm @ alg.Cm - alg.Hm @ alg.Hm + alg.eps_r * w**2 * alg.I_T
         + alg.graddiv + alg.rotrot) / (2 * SQRT_I)
    out = w * (SQRT_I * tr[3] + HC @ (tr[2] + delta * tr[3])
               + K @ (tr[1] + delta * tr[2] + delta**2 * tr[3]))
    if remainder:
        Htil = sum(delta**l * tr[l] for l in range(4))
        out = out + delta * w * _embed(remainder_matrix(delta, alg)) @ Htil
    return out


def trace_identity_residual(E_cross_n, H_T, traces, delta, k, alg, regularized=True):
    """Relative residual of ``E x n + omega D H_T - delta^{k+1} phi_k``.

    The residual is scaled by ``max(|E x n|, omega |H_T|)``.

    ``E_cross_n`` and ``H_T`` are the truncated exterior sums at the
    boundary, in algebra coordinates.
    """
    D = _embed(impedance_matrix(k, delta, alg, regularized=regularized))
    E_cross_n = np.asarray(E_cross_n, complex)
    H_T = np.asarray(H_T, complex)
    lhs = E_cross_n + alg.omega * D @ H_T
    rhs = delta ** (k + 1) * phi_k(traces, delta, k, alg, remainder=regularized)
    scale = max(np.max(np.abs(E_cross_n)), alg.omega * np.max(np.abs(H_T)), 1e-300)
    return float(np.max(np.abs(lhs - rhs)) / scale)
