import numpy as np
import pytest

import oracles
from smoothap import multfn
from smoothap.characters import enumerate_characters
from smoothap.errors import OracleError, RangeError
from smoothap.multfn import (check_class_c, dirichlet_inverse, evaluate,
                             from_prime_powers, get_support, get_values,
                             lambda_f, restrict_smooth, values_array)
from smoothap.sieve import psi


def convolution(fv, gv, N):
    conv = np.zeros(N + 1, dtype=np.complex128)
    for d in range(1, N + 1):
        conv[d::d] += fv[d] * gv[1 : N // d + 1]
    return conv


def test_evaluate_basics(table_1e4):
    f = multfn.one()
    for n in (1, 2, 64, 9999):
        assert evaluate(f, n, table_1e4) == 1
    ind5 = multfn.smooth_indicator(5)
    assert evaluate(ind5, 12, table_1e4) == 1
    assert evaluate(ind5, 14, table_1e4) == 0  # 7 > 5
    fi = from_prime_powers("i-at-2", {(2, 1): 1j, (3, 1): 1.0, (5, 1): 1.0, (7, 1): 1.0})
    assert evaluate(fi, 8, table_1e4) == 1j**3 == -1j


def test_evaluate_errors(table_1e4):
    partial = from_prime_powers("partial", {(3, 1): 1.0})
    with pytest.raises(OracleError) as err:
        evaluate(partial, 8, table_1e4)
    assert "p=2" in str(err.value)
    with pytest.raises(RangeError):
        evaluate(multfn.one(), 10**5, table_1e4)


def test_values_array_matches_evaluate(table_1e4):
    for f in (multfn.one(), multfn.smooth_indicator(7), multfn.moebius_smooth(20),
              multfn.random_unit_circle(3)):
        fv = values_array(f, table_1e4, 2000)
        assert fv[0] == 0 and fv[1] == 1
        for n in (2, 3, 4, 30, 64, 97, 500, 1998, 1999, 2000):
            assert fv[n] == pytest.approx(evaluate(f, n, table_1e4), abs=1e-12)


def test_get_support_is_nonzero_positions(table_1e4):
    f = multfn.moebius_smooth(10)
    ns, vs = get_support(f, table_1e4, 500)
    fv = get_values(f, table_1e4, 500)
    assert list(ns) == [n for n in range(501) if fv[n] != 0]
    assert np.all(fv[ns] == vs)


def test_smooth_indicator_sums_to_psi(table_1e4):
    f = multfn.smooth_indicator(7)
    fv = get_values(f, table_1e4, 3000)
    assert int(fv.real.sum()) == psi(table_1e4, 3000, 7)


def test_lambda_von_mangoldt():
    lam = lambda_f(multfn.one(), 100)
    assert lam.coefficient(8) == (2, 1.0)  # log 2, exactly
    assert lam.coefficient(6) is None
    for n in (2, 3, 4, 9, 25, 27, 32, 49, 64, 81):
        p, c = lam.coefficient(n)
        assert c == 1.0  # Lambda_f = Lambda as exact multiples of log p
    assert lam.value(12) == 0


def test_lambda_completely_multiplicative_closed_form():
    f = multfn.random_unit_circle(11)
    lam = lambda_f(f, 10**4)
    for p in (2, 3, 5, 7, 11, 13, 97):
        fp = f.at(p, 1)
        pe, k = p, 1
        while pe <= 10**4:
            pcoef, c = lam.coefficient(pe)
            assert pcoef == p
            assert abs(c - fp**k) <= 1e-12
            pe *= p
            k += 1


def test_lambda_indicator_of_one():
    f = multfn.MultFnSpec("delta1", lambda p, k: 0.0)  # f = indicator of n = 1
    lam = lambda_f(f, 100)
    assert all(abs(c) == 0 for _, c in lam.coeffs.values())


def test_class_c_examples():
    cert = check_class_c(multfn.one(), 1000)
    assert cert.max_ratio == 1.0 and cert.valid
    cert = check_class_c(multfn.random_unit_circle(5), 1000)
    assert cert.valid
    bad = from_prime_powers("bad", {(2, 1): 1.0, (2, 2): 5.0, (3, 1): 0.0,
                                    (5, 1): 0.0, (7, 1): 0.0})
    # Lambda_f(4) = (2*5 - 1) log 2 = 9 log 2, so the ratio at n = 4 is 9
    lam = lambda_f(bad, 4)
    assert lam.coefficient(4) == (2, 9.0)
    cert = check_class_c(bad, 4)
    assert cert.max_ratio == pytest.approx(9.0)
    assert not cert.valid


def test_inverse_is_moebius_for_one(table_1e4):
    g = dirichlet_inverse(multfn.one(), 100)
    assert evaluate(g, 6, table_1e4) == 1
    assert evaluate(g, 4, table_1e4) == 0
    for n in (2, 3, 5, 30, 64, 97):
        mu = 0 if any(e > 1 for _, e in oracles.trial_division_factor(n)) else \
            (-1) ** len(oracles.trial_division_factor(n))
        assert evaluate(g, n, table_1e4) == mu


def test_inverse_completely_multiplicative(table_1e4):
    f = multfn.random_unit_circle(17)
    g = dirichlet_inverse(f, 10**4)
    for p in (2, 3, 13):
        assert g.at(p, 1) == pytest.approx(-f.at(p, 1))
        assert g.at(p, 2) == pytest.approx(0.0, abs=1e-14)
    fv = get_values(f, table_1e4, 10**4)
    gv = get_values(g, table_1e4, 10**4)
    conv = convolution(fv, gv, 10**4)
    assert conv[1] == pytest.approx(1.0)
    assert float(np.max(np.abs(conv[2:]))) <= 1e-10


def test_class_c_closed_under_inversion():
    for seed in range(5):
        f = multfn.random_unit_circle(100 + seed)
        g = dirichlet_inverse(f, 2000)
        assert check_class_c(f, 2000).valid
        assert check_class_c(g, 2000).valid


def test_certified_f_is_one_bounded(table_1e4):
    f = multfn.random_unit_circle(23)
    assert check_class_c(f, 10**4).valid
    fv = get_values(f, table_1e4, 10**4)
    assert float(np.max(np.abs(fv))) <= 1 + 1e-9


def test_restrict_smooth(table_1e4):
    f = restrict_smooth(multfn.one(), 5)
    assert evaluate(f, 7, table_1e4) == 0
    full = multfn.one()
    for n in range(1, 200):
        if int(table_1e4.lpf[n]) <= 5:
            assert evaluate(f, n, table_1e4) == evaluate(full, n, table_1e4)
    fv = get_values(f, table_1e4, 2500)
    assert int(fv.real.sum()) == psi(table_1e4, 2500, 5)


def test_character_twist_self_correlation(table_1e4):
    psi7 = [c for c in enumerate_characters(7) if c.primitive][0]
    f = multfn.character_twist(psi7, 50)
    for n in (3, 10, 48):
        expect = psi7.cvalue(n) if int(table_1e4.lpf[n]) <= 50 else 0
        assert evaluate(f, n, table_1e4) == pytest.approx(expect)


def test_fingerprint_distinguishes_functions():
    a = multfn.smooth_indicator(5)
    b = multfn.smooth_indicator(7)
    c = multfn.random_unit_circle(1)
    d = multfn.random_unit_circle(2)
    assert len({a.fingerprint(), b.fingerprint(), c.fingerprint(), d.fingerprint()}) == 4
    assert a.fingerprint() == multfn.smooth_indicator(5).fingerprint()
