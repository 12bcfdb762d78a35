import cmath
import csv
import io
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from skinlayer.blprofiles import SurfaceSymbolAlgebra
from skinlayer.symbols import (
    CURL,
    GRADIENT,
    ModeIndex,
    coercivity_scan,
    d3_terms,
    d3_unregularized,
    d_k,
    impedance_matrix,
    remainder_matrix,
    remainder_symbol,
    scan_to_csv,
    skin_depth,
)

SQI = cmath.sqrt(1j)


def test_skin_depth():
    assert_allclose(skin_depth(1.0, 100.0), 0.1, rtol=1e-15)
    assert skin_depth(4.0, 0.25) == 1.0
    assert_allclose(skin_depth(2 * math.pi * 1e9, 5.8e7), 1.656517655494113e-09, rtol=1e-14)
    for bad in [(0.0, 1.0), (1.0, -2.0)]:
        with pytest.raises(ValueError):
            skin_depth(*bad)


def test_low_order_symbols():
    m = ModeIndex(1, GRADIENT)
    assert d_k(0, 0.1, m).value == 0
    assert_allclose(d_k(1, 0.1, m).value, 0.0707106781 + 0.0707106781j, rtol=1e-9)
    for R in (0.5, 1.0, 3.0):
        mode = ModeIndex(2, CURL, R)
        assert d_k(2, 0.07, mode).value == d_k(1, 0.07, mode).value
    # general curvature restriction of H - C: ((c2 - c1)/2, (c1 - c2)/2)
    s = d_k(2, 0.1, ModeIndex(1, CURL), curvature=(0.0, 1.0))
    assert_allclose(np.diag(s.tangential_matrix), 0.1 * SQI + 0.01 * np.array([0.5, -0.5]))
    assert_allclose(s.value, 0.1 * SQI - 0.005)
    with pytest.raises(ValueError):
        d_k(4, 0.1, m)
    with pytest.raises(ValueError):
        d_k(3, 0.1, m, curvature=(1.0, 2.0))
    with pytest.raises(ValueError):
        ModeIndex(0)


def test_d3_assembled_value():
    # five displayed terms, assembled by hand for delta = 0.1, lambda = 2, gradient family
    d, lam = 0.1, 2.0
    t1 = d * (1 + 1j) / math.sqrt(2) / 2
    t3 = d**3 / (2 * (1 + 1j) / math.sqrt(2)) * 1.0
    t4 = math.sqrt(2) / 4 * d / (1 + d * d * lam)
    t5 = 1j * math.sqrt(2) / 4 * d * (1 + d * d * lam / (1 + d * d * lam))
    ref = t1 + t3 + t4 + t5
    assert_allclose(d_k(3, d, ModeIndex(1, GRADIENT)).value, ref, rtol=1e-14)
    assert_allclose(ref, 0.07037098956690828 + 0.07105036667040124j, rtol=1e-14)


def test_d3_unregularized_examples():
    d = 0.1
    assert_allclose(d3_unregularized(d, ModeIndex(1, CURL)).value,
                    d * SQI + d**3 / (2 * SQI) * 3, rtol=1e-15)
    assert_allclose(d3_unregularized(d, ModeIndex(1, GRADIENT)).value,
                    d * SQI + d**3 / (2 * SQI) * (-1), rtol=1e-15)
    for k in (1, 2, 3):
        assert_allclose(d_k(k, 1e-7, ModeIndex(3, CURL)).value / 1e-7, SQI, rtol=1e-10)
    assert_allclose(d3_unregularized(1e-7, ModeIndex(3)).value / 1e-7, SQI, rtol=1e-10)


def test_remainder_consistency_and_bound():
    rng = np.random.default_rng(0)
    for _ in range(20):
        d = rng.uniform(0.01, 0.5)
        n = int(rng.integers(1, 40))
        for fam in (GRADIENT, CURL):
            m = ModeIndex(n, fam, rng.uniform(0.5, 2.0))
            diff = d_k(3, d, m).value - d3_unregularized(d, m).value
            assert_allclose(diff / d**5, remainder_symbol(d, m), rtol=1e-8)
    # sign: +(1 - i) on gradient, -(1 - i) on curl
    lam = 2.0
    ref = math.sqrt(2) / 4 * (1 - 1j) * lam**2 / (1 + 0.01 * lam)
    assert_allclose(remainder_symbol(0.1, ModeIndex(1, GRADIENT)), ref)
    assert_allclose(remainder_symbol(0.1, ModeIndex(1, CURL)), -ref)
    # weighted bound on a lambda scan
    worst = 0.0
    for d in np.linspace(0.01, 1.0, 25):
        for n in np.unique(np.geomspace(1, 3000, 200).astype(int)):
            for fam in (GRADIENT, CURL):
                m = ModeIndex(int(n), fam)
                worst = max(worst, abs(remainder_symbol(d, m)) / (1 + m.lam) ** 2)
    assert worst <= 1.0


def test_term_signs_and_yosida_contractions():
    for d in np.linspace(0.005, 0.3, 30):
        for lam in np.geomspace(2, 1e6, 60):
            for fam in (GRADIENT, CURL):
                terms = d3_terms(d, lam, fam)
                assert all(t.real >= -1e-18 for t in map(complex, terms))
            x = d * d * lam
            assert abs(1 / (1 + x)) <= 1 and abs(x / (1 + x)) <= 1


def test_coercivity_scans():
    C1, C2, dk = coercivity_scan(1, 0.3, 1e4)
    assert_allclose([C1, C2], [1.0, math.sqrt(2) / 2], rtol=1e-14)
    assert dk == pytest.approx(0.3)
    res = coercivity_scan(2, 0.3, 1e4)
    assert_allclose([res.C1, res.C2], [C1, C2], rtol=1e-14)
    C1, C2, dk = coercivity_scan(3, 0.3, 1e6)
    assert C2 >= math.sqrt(2) / 4
    assert 1.0 < C1 <= 1.2
    assert dk == pytest.approx(0.3)
    with pytest.raises(ValueError):
        coercivity_scan(0, 0.3, 1e4)


def test_scan_csv():
    res = coercivity_scan(3, 0.2, 1e3, n_lambda=200, n_delta=3)
    text = scan_to_csv(res.rows)
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["k", "delta", "lambda", "family", "re", "im"]
    assert len(rows) == 1 + 3 * 2 * 200
    assert scan_to_csv(res.rows) == text


def test_matrix_forms_match_sphere_scalars():
    d = 0.08
    for n in (1, 4):
        alg = SurfaceSymbolAlgebra.sphere_mode(n, R=1.3, omega=1.2, eps_r=2.0)
        for k in (1, 2, 3):
            D = impedance_matrix(k, d, alg)
            for i, fam in enumerate((GRADIENT, CURL)):
                ref = d_k(k, d, ModeIndex(n, fam, 1.3), eps_r=2.0, omega=1.2).value
                assert_allclose(D[i, i], ref, rtol=1e-14)
            assert D[0, 1] == 0 and D[1, 0] == 0
        D0 = impedance_matrix(3, d, alg, regularized=False)
        assert_allclose(impedance_matrix(3, d, alg) - D0, d**5 * remainder_matrix(d, alg),
                        atol=1e-15)
    # general frozen point: the matrix split D^3 = D_0^3 + delta^5 R also holds
    alg = SurfaceSymbolAlgebra.plane_wave(0.6, -1.1, 2.0, -0.7, omega=0.9)
    diff = impedance_matrix(3, d, alg) - impedance_matrix(3, d, alg, regularized=False)
    assert_allclose(diff, d**5 * remainder_matrix(d, alg), atol=1e-15)
