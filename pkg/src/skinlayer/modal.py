"""Concentric-sphere scattering problem, solved mode by mode.

A conducting ball ``r < R`` (skin depth ``delta``, relative permittivity
``eps_r``) sits inside vacuum up to ``r = R_out`` where the absorbing
condition ``E_T - H x r_hat = g`` is imposed.  With ``e^{i omega t}``
time dependence the fields satisfy ``i omega H + curl E = 0`` everywhere
and ``sigma_hat E - curl H = 0`` with ``sigma_hat = i omega`` outside and
``sigma_hat = i eps_r omega + 1/(omega delta^2)`` inside, so the interior
wavenumber is ``k_i^2 = eps_r omega^2 - i/delta^2`` (``Im k_i < 0``).

Each field is written on the vector spherical harmonics of one degree
``n`` (``Y = Y_n^0``, ``Psi = r grad Y``, ``Phi = r_hat x Psi``) through a
radial potential ``u``:

* TE: ``E = u Phi``; ``H = (i/omega) curl E``
* TM: ``H = u Phi``; ``E = curl H / sigma_hat``

with ``u`` a combination of ``z_n(k r)``, ``z in {j, y}``.  The TE mode
has ``H_T`` in the gradient family and the TM mode in the curl family.
"""
from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .blprofiles import SurfaceSymbolAlgebra, run_recursion, trace_Ek_cross_n
from .specfun import sph_jy
from .symbols import CURL, GRADIENT, ModeIndex, d_k

__all__ = [
    "TE",
    "TM",
    "ProblemConfig",
    "ModalSolution",
    "RateReport",
    "ModalSolveError",
    "solve_exact",
    "solve_gibc",
    "solve_pec",
    "expansion_terms",
    "truncated_expansion",
    "boundary_traces",
    "impedance_value",
    "hcurl_norm",
    "hcurl_error",
    "interior_norms",
    "total_norms",
    "maxwell_residual",
    "field_cartesian",
    "rate_study",
    "interior_decay",
    "stability_study",
    "fit_slope",
]

TE = "TE"
TM = "TM"
SCHEMA_VERSION = 1
_COND_WARN = 1e12


class ModalSolveError(RuntimeError):
    """A modal linear system could not be solved."""


@dataclass(frozen=True)
class ProblemConfig:
    """Geometry and material data of the concentric-sphere problem."""

    R: float = 1.0
    R_out: float = 2.0
    omega: float = 1.0
    eps_r: float = 1.0
    delta: float = 0.1

    def __post_init__(self):
        if not 0 < self.R < self.R_out:
            raise ValueError("need 0 < R < R_out")
        if not (self.delta > 0 and self.omega > 0 and self.eps_r > 0):
            raise ValueError("delta, omega and eps_r must be positive")

    @property
    def k_i(self) -> complex:
        k = np.sqrt(complex(self.eps_r * self.omega**2, -1.0 / self.delta**2))
        return complex(k if k.imag < 0 else -k)

    @property
    def sigma_i(self) -> complex:
        return complex(1j * self.eps_r * self.omega + 1.0 / (self.omega * self.delta**2))

    @property
    def sigma_e(self) -> complex:
        return 1j * self.omega

    def with_delta(self, delta):
        return ProblemConfig(self.R, self.R_out, self.omega, self.eps_r, delta)


def _family(pol):
    if pol == TE:
        return GRADIENT
    if pol == TM:
        return CURL
    raise ValueError(f"polarization must be 'TE' or 'TM', got {pol!r}")


@dataclass
class ModalSolution:
    """Exterior coefficients (``alpha`` on ``j_n(omega r)``, ``beta`` on ``y_n(omega r)``).

    ``gamma`` multiplies the interior potential ``j_n(k_i r) / j_n(k_i R)``
    and is ``None`` for exterior-only solutions.
    """

    config: ProblemConfig
    n: int
    polarization: str
    alpha: complex
    beta: complex
    gamma: complex | None = None
    kind: str = "exact"
    cond: float = 1.0
    warning: str | None = None

    @property
    def mode(self) -> ModeIndex:
        return ModeIndex(self.n, _family(self.polarization), self.config.R)

    def combine(self, other, a=1.0, b=1.0, kind="combination"):
        """Exterior linear combination ``a self + b other``."""
        _check_same(self, other)
        return ModalSolution(self.config, self.n, self.polarization,
                             a * self.alpha + b * other.alpha, a * self.beta + b * other.beta,
                             None, kind)


def _check_same(a, b):
    if (a.n, a.polarization) != (b.n, b.polarization):
        raise ValueError("solutions belong to different modes")
    ca, cb = a.config, b.config
    if (ca.R, ca.R_out, ca.omega) != (cb.R, cb.R_out, cb.omega):
        raise ValueError("solutions belong to different exterior domains")


# ---------------------------------------------------------------------------
# radial building blocks

def _ext_basis(n, omega, r):
    """``(z, (r z)'/r)`` for ``z = j_n(omega r), y_n(omega r)``; arrays of shape ``(2,) + r.shape``."""
    r = np.asarray(r, dtype=float)
    j, jp, y, yp = sph_jy(n, omega * r)
    z = np.stack([j[..., n], y[..., n]]).real
    dz = np.stack([jp[..., n], yp[..., n]]).real
    return z, z / r + omega * dz


def _int_basis(n, k, R, r):
    """Interior potential ``j_n(k r)/j_n(k R)`` and ``(r u)'/r``, computed from scaled values."""
    r = np.asarray(r, dtype=float)
    jR, jpR, _, _ = sph_jy(n, np.array([k * R]), scaled=True)
    j, jp, _, _ = sph_jy(n, k * r, scaled=True)
    fac = np.exp(-abs(k.imag) * (R - r)) / jR[0, n]
    u = j[..., n] * fac
    du = k * jp[..., n] * fac
    return u, u / r + du


def _pot_ext(sol, r):
    z, dz = _ext_basis(sol.n, sol.config.omega, r)
    return sol.alpha * z[0] + sol.beta * z[1], sol.alpha * dz[0] + sol.beta * dz[1]


def _pot_int(sol, r):
    u, du = _int_basis(sol.n, sol.config.k_i, sol.config.R, r)
    return sol.gamma * u, sol.gamma * du


def _components(pol, n, omega, sigma, r, u, du):
    """Modal components ``(E_r, E_T, curlE_r, curlE_T, H_r, H_T)``.

    ``E_T``/``H_T`` are coefficients of ``Phi`` or ``Psi`` as appropriate,
    ``*_r`` of ``Y r_hat``.
    """
    L = n * (n + 1)
    if pol == TE:
        E_r, E_T = 0 * u, u
        cE_r, cE_T = -(L / r) * u, -du
    else:
        E_r, E_T = -(L / r) * u / sigma, -du / sigma
        cE_r, cE_T = 0 * u, -1j * omega * u
    H_r, H_T = (1j / omega) * cE_r, (1j / omega) * cE_T
    return E_r, E_T, cE_r, cE_T, H_r, H_T


def _density(pol, n, omega, sigma, r, u, du):
    """Angular-integrated ``|E|^2`` and ``|curl E|^2`` densities at radius ``r``."""
    L = n * (n + 1)
    E_r, E_T, cE_r, cE_T, _, _ = _components(pol, n, omega, sigma, r, u, du)
    l2 = L * np.abs(E_T) ** 2 + np.abs(E_r) ** 2
    curl2 = L * np.abs(cE_T) ** 2 + np.abs(cE_r) ** 2
    return l2, curl2


def _gauss(a, b, m):
    x, w = np.polynomial.legendre.leggauss(m)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


# ---------------------------------------------------------------------------
# solves

def _solve(A, rhs, context):
    try:
        x = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise ModalSolveError(f"singular modal system for {context}") from exc
    cond = float(np.linalg.cond(A))
    if not np.all(np.isfinite(x)):
        raise ModalSolveError(f"non-finite modal solution for {context}")
    warn = None
    if cond > _COND_WARN:
        warn = f"near-resonance: condition number {cond:.3e} for {context}"
    return x, cond, warn


def _outer_row(pol, cfg, n):
    """Coefficients of ``E_T - H x r_hat`` at ``R_out`` on ``(j, y)``."""
    z, dz = _ext_basis(n, cfg.omega, np.array([cfg.R_out]))
    z, dz = z[:, 0], dz[:, 0]
    if pol == TE:
        # E = u Phi, H_T = -(i/omega)(ru)'/r Psi, -H x r_hat = H_Psi Phi
        return z - (1j / cfg.omega) * dz
    # H = u Phi, -H x r_hat = -u Psi, E_Psi = -(ru)'/(r sigma_e)
    return -dz / cfg.sigma_e - z


def _inner_values(pol, cfg, n):
    """``(E_T, H_T)`` coefficient rows at ``r = R`` on the exterior ``(j, y)`` basis."""
    z, dz = _ext_basis(n, cfg.omega, np.array([cfg.R]))
    z, dz = z[:, 0], dz[:, 0]
    _, E_T, _, _, _, H_T = _components(pol, n, cfg.omega, cfg.sigma_e, cfg.R, z, dz)
    return E_T, H_T


def solve_exact(config: ProblemConfig, n: int, polarization: str, g: complex = 1.0,
                swap_rows: bool = False) -> ModalSolution:
    """Transmission problem for one mode: unknowns ``(gamma, alpha, beta)``.

    Rows: continuity of the tangential E and H coefficients at ``r = R``
    and the absorbing condition at ``R_out``.  ``swap_rows`` exchanges the
    two continuity rows (the solution must not change).
    """
    pol, cfg = polarization, config
    _family(pol)
    ui, dui = _int_basis(n, cfg.k_i, cfg.R, np.array([cfg.R]))
    _, Ei, _, _, _, Hi = _components(pol, n, cfg.omega, cfg.sigma_i, cfg.R, ui, dui)
    Ee, He = _inner_values(pol, cfg, n)
    A = np.zeros((3, 3), complex)
    A[0] = [Ei[0], -Ee[0], -Ee[1]]
    A[1] = [Hi[0], -He[0], -He[1]]
    A[2, 1:] = _outer_row(pol, cfg, n)
    if swap_rows:
        A[[0, 1]] = A[[1, 0]]
    x, cond, warn = _solve(A, np.array([0, 0, g], complex), f"n={n}, {pol}, delta={cfg.delta}")
    if warn:
        warnings.warn(warn, RuntimeWarning, stacklevel=2)
    return ModalSolution(cfg, n, pol, x[1], x[2], x[0], "exact", cond, warn)


def _solve_exterior(cfg, n, pol, inner_row, inner_rhs, g, kind):
    A = np.array([inner_row, _outer_row(pol, cfg, n)], dtype=complex)
    x, cond, warn = _solve(A, np.array([inner_rhs, g], complex),
                           f"n={n}, {pol}, delta={cfg.delta}, {kind}")
    return ModalSolution(cfg, n, pol, x[0], x[1], None, kind, cond, warn)


def impedance_value(config, n, polarization, k) -> complex:
    """Scalar ``d_k`` acting on ``H_T`` of this mode."""
    mode = ModeIndex(n, _family(polarization), config.R)
    return d_k(k, config.delta, mode, config.eps_r, config.omega).value


def solve_gibc(config: ProblemConfig, n: int, polarization: str, k: int,
               g: complex = 1.0) -> ModalSolution:
    """Exterior problem with ``E x n + omega D^{delta,k} H_T = 0`` at ``r = R`` (``n`` inward).

    With the inward normal, ``E x n`` has coordinates ``(-E_Phi, E_Psi)``
    on ``(Psi, Phi)``, so the condition reads ``E_T = omega d H_T`` for TE
    and ``E_T + omega d H_T = 0`` for TM.
    """
    d = impedance_value(config, n, polarization, k)
    E_T, H_T = _inner_values(polarization, config, n)
    s = -1.0 if polarization == TE else 1.0
    return _solve_exterior(config, n, polarization, s * E_T + config.omega * d * H_T, 0.0, g,
                           f"gibc{k}")


def solve_pec(config: ProblemConfig, n: int, polarization: str, g: complex = 1.0):
    """Perfect conductor: ``E_T = 0`` at ``r = R``."""
    E_T, _ = _inner_values(polarization, config, n)
    return _solve_exterior(config, n, polarization, E_T, 0.0, g, "pec")


def _cross_n_coordinate(pol, E_T):
    """``E x n`` on ``(Psi, Phi)`` restricted to the mode's family coordinate."""
    return -E_T if pol == TE else E_T


def expansion_terms(config: ProblemConfig, n: int, polarization: str, k: int,
                    g: complex = 1.0):
    """Exterior terms ``E_e^l``, ``l = 0..k``, of the skin-depth expansion.

    Order 0 is the perfect conductor with data ``g``; order ``l >= 1`` has
    zero outer data and inner data ``E_e^l x n = E_i^l x n (eta = 0)`` from
    the boundary-layer recursion driven by the traces ``H^m_{e,T}``,
    ``m < l``.  Returns ``(terms, traces_H, traces_Exn)`` where the traces
    are 3-vectors in the sphere-mode algebra coordinates.
    """
    if not 0 <= k <= 3:
        raise ValueError("expansion order must be in 0..3")
    pol = polarization
    idx = 0 if pol == TE else 1
    alg = SurfaceSymbolAlgebra.sphere_mode(n, config.R, config.omega, config.eps_r)
    E_T, H_T = _inner_values(pol, config, n)
    terms, trH, trE = [], [], []
    for ell in range(k + 1):
        if ell == 0:
            sol = _solve_exterior(config, n, pol, E_T, 0.0, g, "term0")
            tr_e = np.zeros(3, complex)
        else:
            st = run_recursion(alg, trH, ell - 1)
            tr_e = trace_Ek_cross_n(st, ell)
            sol = _solve_exterior(config, n, pol, _cross_n_coordinate(pol, E_T),
                                  tr_e[idx], 0.0, f"term{ell}")
        h = np.zeros(3, complex)
        h[idx] = sol.alpha * H_T[0] + sol.beta * H_T[1]
        terms.append(sol)
        trH.append(h)
        trE.append(tr_e)
    return terms, trH, trE


def boundary_traces(sol: ModalSolution):
    """``(E x n, H_T)`` at ``r = R`` in sphere-mode algebra coordinates (exterior side)."""
    E_T, H_T = _inner_values(sol.polarization, sol.config, sol.n)
    idx = 0 if sol.polarization == TE else 1
    e = np.zeros(3, complex)
    h = np.zeros(3, complex)
    e[idx] = _cross_n_coordinate(sol.polarization, sol.alpha * E_T[0] + sol.beta * E_T[1])
    h[idx] = sol.alpha * H_T[0] + sol.beta * H_T[1]
    return e, h


def truncated_expansion(config, n, polarization, k, g=1.0) -> ModalSolution:
    """``sum_{l <= k} delta^l E_e^l`` as an exterior modal solution."""
    terms, _, _ = expansion_terms(config, n, polarization, k, g)
    a = sum(config.delta**l * t.alpha for l, t in enumerate(terms))
    b = sum(config.delta**l * t.beta for l, t in enumerate(terms))
    return ModalSolution(config, n, polarization, a, b, None, f"expansion{k}")


# ---------------------------------------------------------------------------
# norms

def hcurl_norm(sol: ModalSolution, nodes: int = 64, squared: bool = False) -> float:
    """``||E||_{H(curl)}`` over ``R < r < R_out`` (Gauss-Legendre in ``r``)."""
    cfg = sol.config
    r, w = _gauss(cfg.R, cfg.R_out, nodes)
    u, du = _pot_ext(sol, r)
    l2, c2 = _density(sol.polarization, sol.n, cfg.omega, cfg.sigma_e, r, u, du)
    total = float(np.sum(w * r * r * (l2 + c2)))
    return total if squared else math.sqrt(total)


def hcurl_error(a: ModalSolution, b: ModalSolution, nodes: int = 64) -> float:
    """``||E_a - E_b||_{H(curl, Omega_e)}`` for two exterior solutions of one mode."""
    return hcurl_norm(a.combine(b, 1.0, -1.0), nodes)


def _interior_rule(cfg, panels=24, per_panel=16):
    """Composite Gauss rule on ``(0, R)`` graded towards the skin layer."""
    R, d = cfg.R, cfg.delta
    a = max(0.0, R - 40 * d)
    edges = R - (R - a) * np.linspace(1, 0, panels + 1) ** 2
    rs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        x, w = _gauss(lo, hi, per_panel)
        rs.append(x)
        ws.append(w)
    if a > 0:
        x, w = _gauss(0.0, a, 32)
        rs.append(x)
        ws.append(w)
    return np.concatenate(rs), np.concatenate(ws)


def interior_norms(sol: ModalSolution):
    """``(||E||^2_{L2(Omega_i)}, ||curl E||^2_{L2(Omega_i)})`` of an exact solution."""
    if sol.gamma is None:
        raise ValueError("interior norms need an exact (transmission) solution")
    cfg = sol.config
    r, w = _interior_rule(cfg)
    u, du = _pot_int(sol, r)
    l2, c2 = _density(sol.polarization, sol.n, cfg.omega, cfg.sigma_i, r, u, du)
    return float(np.sum(w * r * r * l2)), float(np.sum(w * r * r * c2))


def total_norms(sol: ModalSolution):
    """``(||E||_{H(curl, Omega)}, ||E||_{L2(Omega_i)})`` over the whole domain."""
    il2, ic2 = interior_norms(sol)
    return math.sqrt(il2 + ic2 + hcurl_norm(sol, squared=True)), math.sqrt(il2)


# ---------------------------------------------------------------------------
# checks

def _fd(f, r, h):
    """Fourth-order central difference."""
    return (-f(r + 2 * h) + 8 * f(r + h) - 8 * f(r - h) + f(r - 2 * h)) / (12 * h)


def maxwell_residual(sol: ModalSolution, points: int = 50) -> float:
    """Relative residual of ``i omega H + curl E = 0`` and ``sigma E - curl H = 0``.

    Radial derivatives of ``r E_T`` and ``r H_T`` are taken by finite
    differences of the reconstructed components, independently of the
    closed-form Bessel derivatives used to build ``H``.  Interface and
    outer-condition residuals are included.
    """
    cfg, pol, n = sol.config, sol.polarization, sol.n
    L = n * (n + 1)
    regions = [(np.linspace(cfg.R + 0.02, cfg.R_out - 0.02, points), _pot_ext, cfg.sigma_e, 1e-3)]
    if sol.gamma is not None:
        depth = min(0.5 * cfg.R, 10 * cfg.delta)
        regions.append((np.linspace(cfg.R - depth, cfg.R - 0.02 * cfg.delta, points),
                        _pot_int, cfg.sigma_i, 2e-3 * cfg.delta))
    worst = 0.0
    for r, pot, sigma, h in regions:
        def comp(rr, i):
            u, du = pot(sol, rr)
            return _components(pol, n, cfg.omega, sigma, rr, u, du)[i]

        E_r, E_T, _, _, H_r, H_T = (comp(r, i) for i in range(6))
        drE = _fd(lambda rr: rr * comp(rr, 1), r, h) / r
        drH = _fd(lambda rr: rr * comp(rr, 5), r, h) / r
        if pol == TE:
            # E = E_T Phi: curl E = -(L/r) E_T Y r_hat - (rE_T)'/r Psi
            # H = H_r Y r_hat + H_T Psi: curl H = ((rH_T)'/r - H_r/r) Phi
            res1 = [1j * cfg.omega * H_r - (L / r) * E_T, 1j * cfg.omega * H_T - drE]
            res2 = [sigma * E_T - (drH - H_r / r)]
            scale = np.max(np.abs(np.concatenate([E_T, H_T, H_r])))
        else:
            # H = H_T Phi, E = E_r Y r_hat + E_T Psi
            res1 = [1j * cfg.omega * H_T + (drE - E_r / r)]
            res2 = [sigma * E_r + (L / r) * H_T, sigma * E_T + drH]
            scale = np.max(np.abs(np.concatenate([sigma * E_T, H_T])))
        for res in res1 + res2:
            worst = max(worst, float(np.max(np.abs(res)) / scale))
    if sol.gamma is not None:
        ui, dui = _pot_int(sol, np.array([cfg.R]))
        ue, due = _pot_ext(sol, np.array([cfg.R]))
        ci = _components(pol, n, cfg.omega, cfg.sigma_i, cfg.R, ui, dui)
        ce = _components(pol, n, cfg.omega, cfg.sigma_e, cfg.R, ue, due)
        for i in (1, 5):
            scale = max(abs(ci[i][0]), abs(ce[i][0]), 1e-300)
            worst = max(worst, abs(ci[i][0] - ce[i][0]) / max(scale, abs(ce[5][0])))
    return worst


def field_cartesian(sol: ModalSolution, x):
    """Cartesian ``(E, H)`` at points ``x`` (shape ``(..., 3)``) for ``Y = Y_n^0``."""
    x = np.asarray(x, dtype=float)
    cfg, n = sol.config, sol.n
    r = np.linalg.norm(x, axis=-1)
    ct = x[..., 2] / r
    st = np.sqrt(np.maximum(0.0, 1 - ct * ct))
    phi = np.arctan2(x[..., 1], x[..., 0])
    norm = math.sqrt((2 * n + 1) / (4 * math.pi))
    cn = np.zeros(n + 1)
    cn[n] = 1
    Y = norm * np.polynomial.legendre.legval(ct, cn)
    dY = -norm * st * np.polynomial.legendre.legval(ct, np.polynomial.legendre.legder(cn))
    rhat = x / r[..., None]
    that = np.stack([ct * np.cos(phi), ct * np.sin(phi), -st], axis=-1)
    phat = np.stack([-np.sin(phi), np.cos(phi), 0 * phi], axis=-1)
    inside = r < cfg.R
    E = np.zeros(x.shape, complex)
    H = np.zeros(x.shape, complex)
    for mask, pot, sigma in ((inside, _pot_int, cfg.sigma_i), (~inside, _pot_ext, cfg.sigma_e)):
        if not np.any(mask):
            continue
        rr = r[mask]
        u, du = pot(sol, rr)
        E_r, E_T, _, _, H_r, H_T = _components(sol.polarization, n, cfg.omega, sigma, rr, u, du)
        Psi = dY[mask][:, None] * that[mask]
        Phi = dY[mask][:, None] * phat[mask]
        radial = Y[mask][:, None] * rhat[mask]
        if sol.polarization == TE:
            E[mask] = E_T[:, None] * Phi
            H[mask] = H_r[:, None] * radial + H_T[:, None] * Psi
        else:
            E[mask] = E_r[:, None] * radial + E_T[:, None] * Psi
            H[mask] = H_T[:, None] * Phi
    return E, H


def fit_slope(deltas, errors) -> float:
    """Least-squares slope of ``log(error)`` against ``log(delta)``."""
    return float(np.polyfit(np.log(deltas), np.log(errors), 1)[0])


@dataclass
class RateReport:
    """Convergence of one order ``k`` over a decreasing list of ``delta``."""

    k: int
    kind: str
    deltas: list
    errors: list
    slope: float
    modes: list
    polarizations: list
    conditions: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "delta", "error", "modes", "polarization"])
        modes = " ".join(str(m) for m in self.modes)
        pols = " ".join(self.polarizations)
        for d, e in zip(self.deltas, self.errors):
            w.writerow([self.k, f"{d:.6e}", f"{e:.16e}", modes, pols])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def rate_study(config: ProblemConfig, k: int, deltas, modes=(1, 2, 3),
               polarizations=(TE, TM), kind: str = "gibc") -> RateReport:
    """Errors summed over modes (``sqrt`` of summed squares) and fitted slope.

    ``kind="gibc"`` compares the exact exterior field with the order-``k``
    GIBC solution; ``kind="expansion"`` with the truncated expansion.
    """
    deltas = [float(d) for d in deltas]
    if len(deltas) < 4 or any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ValueError("rate_study needs >= 4 strictly decreasing delta values")
    if kind not in ("gibc", "expansion"):
        raise ValueError("kind must be 'gibc' or 'expansion'")
    errors, conds = [], {}
    for d in deltas:
        cfg = config.with_delta(d)
        total = 0.0
        for n in sorted(modes):
            for pol in sorted(polarizations):
                try:
                    ex = solve_exact(cfg, n, pol)
                    approx = (solve_gibc(cfg, n, pol, k) if kind == "gibc"
                              else truncated_expansion(cfg, n, pol, k))
                except ModalSolveError as exc:
                    raise ModalSolveError(f"{exc} (k={k})") from exc
                total += hcurl_error(ex, approx) ** 2
                conds[f"n={n},{pol},delta={d:g}"] = max(ex.cond, approx.cond)
        errors.append(math.sqrt(total))
    return RateReport(k, kind, deltas, errors, fit_slope(deltas, errors),
                      sorted(modes), sorted(polarizations), conds)


def interior_decay(config: ProblemConfig, n: int = 1, polarization: str = TE,
                   depth: float = 0.1, points: int = 41):
    """Fitted decay rate of ``|H_T(r)|`` over ``0 <= R - r <= depth``.

    Returns ``(rate, expected)`` with ``expected = 1/(sqrt(2) delta)``.
    """
    sol = solve_exact(config, n, polarization)
    cfg = config
    r = cfg.R - np.linspace(0.0, min(depth, cfg.R * 0.99), points)
    u, du = _pot_int(sol, r)
    H_T = _components(polarization, n, cfg.omega, cfg.sigma_i, r, u, du)[5]
    slope = np.polyfit(cfg.R - r, np.log(np.abs(H_T)), 1)[0]
    return float(-slope), 1.0 / (math.sqrt(2) * cfg.delta)


def stability_study(config: ProblemConfig, deltas, modes=(1, 2, 3), polarizations=(TE, TM)):
    """``||E||_{H(curl,Omega)}`` and ``||E||_{L2(Omega_i)}/delta`` for unit data on each mode.

    Norms are summed over modes in the squared sense.
    """
    rows = []
    for d in deltas:
        cfg = config.with_delta(float(d))
        hc2 = l2 = 0.0
        for n in modes:
            for pol in polarizations:
                a, b = total_norms(solve_exact(cfg, n, pol))
                hc2 += a * a
                l2 += b * b
        rows.append((float(d), math.sqrt(hc2), math.sqrt(l2) / d))
    return rows
