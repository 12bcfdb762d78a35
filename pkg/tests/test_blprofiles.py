import cmath
import pathlib

import numpy as np
import pytest
from numpy.testing import assert_allclose

from oracles import GOLDEN_CASE
from skinlayer import polyexp as pe
from skinlayer.blprofiles import (
    SurfaceSymbolAlgebra,
    apply_AE,
    apply_AH,
    phi_k,
    run_recursion,
    run_unnormalized,
    system_residual,
    trace_Ek_cross_n,
    trace_identity_residual,
)
from skinlayer.polyexp import ProfileVector

SQI = cmath.sqrt(1j)
GOLDEN = pathlib.Path(__file__).parents[1] / "src" / "skinlayer" / "data" / "golden"


def read_golden(name):
    comps, cur = [], None
    for line in (GOLDEN / f"{name}.txt").read_text().splitlines():
        if line.startswith("#") or not line.strip():
            continue
        if line.startswith("[component"):
            cur = []
            comps.append(cur)
            continue
        re, im = map(float, line.split())
        cur.append(complex(re, im))
    return comps


def _golden_state():
    c = GOLDEN_CASE
    alg = SurfaceSymbolAlgebra.plane_wave(c["c1"], c["c2"], c["xi1"], c["xi2"],
                                          omega=c["omega"], eps_r=c["eps_r"])
    return alg, run_recursion(alg, c["traces"], 2)


def _coef(profile, comps):
    c = profile.coefficients if hasattr(profile, "coefficients") else profile
    return [list(c[i]) for i in comps]


def _assert_table(actual, expected):
    assert len(actual) == len(expected)
    for a, e in zip(actual, expected):
        m = max(len(a), len(e))
        a = np.pad(np.asarray(a, complex), (0, m - len(a)))
        e = np.pad(np.asarray(e, complex), (0, m - len(e)))
        assert_allclose(a, e, rtol=0, atol=1e-12)


def test_golden_displays():
    alg, st = _golden_state()
    X = alg.X
    tang = (0, 1)
    _assert_table(_coef(st.E_hat[0], tang), read_golden("sol_k0_E"))
    _assert_table(_coef(st.H[0], tang), read_golden("sol_k0_H"))
    _assert_table([list(st.E_hat[1].coefficients[2]), list(st.H[1].coefficients[2])],
                  read_golden("solnorm_k1"))
    _assert_table(_coef(st.H[1], tang), read_golden("HT_k1"))
    _assert_table(_coef(X @ st.E_hat[1].coefficients, tang), read_golden("ET_k1"))
    _assert_table(_coef(st.H[2], tang), read_golden("HT_k2"))
    _assert_table(_coef(X @ st.E_hat[2].coefficients, tang), read_golden("ET_k2"))
    for ell in (1, 2, 3):
        tr = trace_Ek_cross_n(st, ell)
        _assert_table([[tr[0]], [tr[1]]], read_golden(f"traceET_k{ell}"))
        assert tr[2] == 0


def test_apply_operators_trivial_and_hand_assembled():
    alg = SurfaceSymbolAlgebra.sphere_mode(1, R=2.0)
    v = ProfileVector([[1.0, 0.5], [0.0, 2j], [0.0, 0.0]])
    zero = ProfileVector.zeros(3)
    assert apply_AH(3, zero, v, alg).degree == -1
    assert apply_AE(1, zero, zero, alg).degree == -1
    flat = SurfaceSymbolAlgebra.plane_wave(0.0, 0.0, 0.0, 0.0)
    assert apply_AH(1, v, v, flat).degree == -1
    assert apply_AE(1, v, v, flat).degree == -1
    # A_H^(1)(E_hat^0, H^0) for H^0 = Psi: only -X C H^0 = (0, 1/R, 0) survives
    st = run_recursion(alg, [[1.0, 0.0]], 0)
    out = apply_AH(1, st.E_hat[0], st.H[0], alg).coefficients
    assert_allclose(pe.trim(out, 1e-15), [[0.0], [0.5], [0.0]], atol=1e-15)
    # A_E^(1)(E_hat^0, H^0) for H^0 = Phi, n = 2: -C_Gamma E_hat^0 = (sqrt(i) omega / R) Phi
    alg = SurfaceSymbolAlgebra.sphere_mode(2, R=1.5, omega=0.8)
    st = run_recursion(alg, [[0.0, 1.0]], 0)
    out = apply_AE(1, st.E_hat[0], st.H[0], alg).coefficients
    assert_allclose(pe.trim(out, 1e-15), [[0.0], [SQI * 0.8 / 1.5], [0.0]], atol=1e-15)
    with pytest.raises(ValueError):
        apply_AH(5, v, v, alg)
    with pytest.raises(ValueError):
        apply_AE(3, v, v, alg)
    with pytest.raises(ValueError):
        apply_AH(1, np.zeros((2, 1)), v, alg)


def test_order_zero_and_zero_traces():
    alg = SurfaceSymbolAlgebra.sphere_mode(3, R=1.0, omega=2.0)
    st = run_recursion(alg, [[0.3 - 0.1j, 0.7j]], 0)
    H0 = np.array([0.3 - 0.1j, 0.7j, 0.0])
    assert_allclose(st.E_hat[0].coefficients[:, 0], SQI * 2.0 * alg.X @ H0, atol=1e-15)
    assert_allclose(st.H[0].coefficients[:, 0], H0)
    st = run_recursion(alg, np.zeros((4, 2)), 3)
    assert all(p.degree == -1 for p in st.E_hat + st.H)
    assert st.E_i(0).degree == -1


def test_sphere_traces():
    R, w, eps = 1.0, 1.0, 1.0
    alg = SurfaceSymbolAlgebra.sphere_mode(1, R=R, omega=w, eps_r=eps)
    # l = 1 with a unit gradient-family H^0: E x n = -sqrt(i) omega Psi
    st = run_recursion(alg, [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]], 2)
    assert_allclose(trace_Ek_cross_n(st, 1), [-SQI * w, 0, 0], atol=1e-15)
    # l = 2 on the sphere: only -sqrt(i) omega H^1
    st2 = run_recursion(alg, [[1.0, 0.0], [0.4, 0.0]], 1)
    assert_allclose(trace_Ek_cross_n(st2, 2), [-SQI * w * 0.4, 0, 0], atol=1e-15)
    # l = 3: -(1/(2 sqrt(i)))(eps w^2 - lambda_1) H^0 - sqrt(i) w H^2, lambda_1 = 2
    st3 = run_recursion(alg, [[1.0, 0.0], [0.0, 0.0], [0.25, 0.0]], 2)
    ref = w * (-(eps * w**2 - 2.0) / (2 * SQI) - SQI * 0.25)
    assert_allclose(trace_Ek_cross_n(st3, 3), [ref, 0, 0], atol=1e-14)
    with pytest.raises(ValueError):
        trace_Ek_cross_n(st3, 4)


def _random_algs(rng):
    yield SurfaceSymbolAlgebra.sphere_mode(2, R=1.3, omega=0.9, eps_r=1.5)
    for _ in range(3):
        c1, c2, x1, x2 = rng.normal(size=4)
        yield SurfaceSymbolAlgebra.plane_wave(c1, c2, x1, x2, omega=rng.uniform(0.5, 2),
                                              eps_r=rng.uniform(1, 3))


def test_degree_law_and_residuals():
    rng = np.random.default_rng(3)
    for alg in _random_algs(rng):
        tr = rng.normal(size=(7, 2)) + 1j * rng.normal(size=(7, 2))
        st = run_recursion(alg, tr, 6)
        for k in range(7):
            assert st.E_hat[k].degree <= k
            assert st.H[k].degree <= k
            scale = max(1.0, np.max(np.abs(st.E_hat[k].coefficients)))
            assert system_residual(st, k) <= 1e-13 * scale


def test_unnormalized_system():
    # independent expansion of the un-scaled fields: E_i^0 = 0 and E_i^{k+1} = E_hat^k
    rng = np.random.default_rng(4)
    for alg in _random_algs(rng):
        tr = rng.normal(size=(6, 2)) + 1j * rng.normal(size=(6, 2))
        st = run_recursion(alg, tr, 5)
        E, H = run_unnormalized(alg, tr, 5)
        assert not np.any(E[0].coefficients)
        for k in range(6):
            scale = np.max(np.abs(st.E_hat[k].coefficients))
            assert_allclose(pe.add(E[k + 1].coefficients, -st.E_hat[k].coefficients), 0,
                            atol=1e-13 * scale)
            assert_allclose(pe.add(H[k].coefficients, -st.H[k].coefficients), 0,
                            atol=1e-13 * scale)
            assert_allclose(st.E_i(k + 1).coefficients, st.E_hat[k].coefficients)


def test_phi_examples():
    alg = SurfaceSymbolAlgebra.sphere_mode(1, omega=1.7)
    tr = [[0.0, 0.0], [1.0, 0.0], [0.3, 0.2j]]
    assert not np.any(phi_k(tr[:1], 0.1, 0, alg))
    assert_allclose(phi_k(tr[:2], 0.1, 1, alg), [SQI * 1.7, 0, 0])
    assert_allclose(phi_k(tr, 0.1, 2, alg), SQI * 1.7 * np.array([0.3, 0.2j, 0]), atol=1e-15)


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_trace_identity_general_curvature(k):
    # E_{e,k} x n + omega D^k H_{e,k,T} = delta^{k+1} phi_k with the recursion traces
    rng = np.random.default_rng(10 + k)
    for alg in _random_algs(rng):
        tr = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
        st = run_recursion(alg, tr, max(k - 1, 0))
        for delta in (0.1, 0.05):
            Exn = sum(delta**l * trace_Ek_cross_n(st, l) for l in range(k + 1))
            HT = sum(delta**l * np.append(tr[l], 0) for l in range(k + 1))
            assert trace_identity_residual(Exn, HT, tr[: k + 1], delta, k, alg) <= 1e-12
            if k == 3:
                assert trace_identity_residual(Exn, HT, tr[:4], delta, 3, alg,
                                               regularized=False) <= 1e-12


def test_spectral_vector_identity():
    # n x Rot(rot(V x n)) = -grad div V, with n x W = -W x n
    rng = np.random.default_rng(5)
    for alg in _random_algs(rng):
        lhs = -alg.X @ alg.Rot @ alg.rot @ alg.X
        assert_allclose(lhs[:2, :2], -alg.graddiv[:2, :2], atol=1e-14)
        # -grad div and Rot rot are positive semidefinite
        for M in (-alg.graddiv, alg.rotrot):
            assert np.min(np.linalg.eigvalsh(0.5 * (M + M.conj().T))) >= -1e-14


def test_sphere_mode_spectrum():
    alg = SurfaceSymbolAlgebra.sphere_mode(3, R=2.0)
    lam = 12 / 4.0
    assert_allclose(np.diag(alg.graddiv), [-lam, 0, 0])
    assert_allclose(np.diag(alg.rotrot), [0, lam, 0])
    assert_allclose(np.diag(alg.Cm), [-0.5, -0.5, 0])
    with pytest.raises(ValueError):
        SurfaceSymbolAlgebra.sphere_mode(0)
    with pytest.raises(ValueError):
        SurfaceSymbolAlgebra.from_matrices(**{**alg.__dict__, "Cm": np.eye(2)})
