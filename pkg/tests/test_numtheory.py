import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fareystat import numtheory as nt


def test_vector_gcd_examples():
    assert nt.vector_gcd((0, 0, 1)) == 1
    assert nt.vector_gcd((4, 6)) == 2
    assert nt.vector_gcd((-3, 9, 6)) == 3


def test_vector_gcd_zero_vector():
    with pytest.raises(ValueError, match="undefined gcd"):
        nt.vector_gcd((0, 0))


def test_table_examples():
    t = nt.build_table(12)
    assert t.totient[12] == 4
    assert t.mobius[12] == 0
    assert nt.build_table(6, 2).jordan[6] == 24


def test_table_against_naive():
    t = nt.build_table(300)
    for q in range(1, 301):
        assert t.totient[q] == sum(1 for p in range(q) if math.gcd(p, q) == 1)
        f = _factor(q)
        mu = 0 if any(e > 1 for e in f.values()) else (-1) ** len(f)
        assert t.mobius[q] == mu


def _factor(q):
    out, d = {}, 2
    while d * d <= q:
        while q % d == 0:
            out[d] = out.get(d, 0) + 1
            q //= d
        d += 1
    if q > 1:
        out[q] = out.get(q, 0) + 1
    return out


def test_divisor_sum_of_totient():
    N = 10_000
    phi = nt.build_table(N).totient
    acc = np.zeros(N + 1, dtype=np.int64)
    for d in range(1, N + 1):
        acc[d::d] += phi[d]
    assert np.array_equal(acc[1:], np.arange(1, N + 1))


def test_jordan_against_brute_force():
    # count p in [0,q)^n with gcd(p, q) = 1 by classifying each coordinate by gcd(p_i, q)
    tables = {n: nt.build_table(1000, n).jordan for n in (1, 2, 3)}
    for q in range(1, 1001):
        g = np.gcd(np.arange(q), q)
        divs, cnt = np.unique(g, return_counts=True)
        g2 = np.gcd.outer(divs, divs)
        w2 = np.outer(cnt, cnt)
        assert tables[1][q] == cnt[divs == 1].sum()
        assert tables[2][q] == w2[g2 == 1].sum()
        g3 = np.gcd(g2[:, :, None], divs[None, None, :])
        w3 = w2[:, :, None] * cnt[None, None, :]
        assert tables[3][q] == w3[g3 == 1].sum()


def test_jordan_overflow_falls_back_to_python_ints():
    t = nt.build_table(30, 14)
    assert t.jordan[30] == _jordan_formula(30, 14)


def _jordan_formula(q, n):
    out = Fraction(q) ** n
    for p in _factor(q):
        out *= 1 - Fraction(1, p ** n)
    return int(out)


def test_mod_inverse_examples():
    for q in (2, 3, 10, 97):
        assert nt.mod_inverse(1, q) == 1
    assert nt.mod_inverse(3, 7) == 5
    with pytest.raises(ValueError, match="not invertible"):
        nt.mod_inverse(2, 4)


def test_mod_inverse_involution():
    for q in range(2, 501):
        for p in range(q):
            if math.gcd(p, q) == 1:
                assert nt.mod_inverse(nt.mod_inverse(p, q), q) == p % q


def test_unit_inverses_match_pow():
    for q in (1, 2, 12, 97, 360):
        p, pbar = nt.unit_inverses(q)
        for a, b in zip(p.tolist(), pbar.tolist()):
            assert (a * b) % q == 1 % q


def test_kloosterman_examples():
    assert nt.kloosterman(0, 0, 12) == pytest.approx(4, abs=1e-12)
    assert nt.kloosterman(1, 1, 2) == pytest.approx(1, abs=1e-12)
    assert nt.kloosterman(1, 1, 3) == pytest.approx(-1, abs=1e-12)
    assert nt.kloosterman(5, -3, 1) == 1


def _kloosterman_naive(m1, m2, q):
    s = 0j
    for p in range(q):
        if math.gcd(p, q) == 1:
            pb = pow(p, -1, q) if q > 1 else 0
            s += complex(mpmath.expjpi(2 * mpmath.mpf(m1 * p + m2 * pb) / q))
    return s


@settings(max_examples=60, deadline=None)
@given(st.integers(-20, 20), st.integers(-20, 20), st.integers(1, 150))
def test_kloosterman_symmetric_and_real(m1, m2, q):
    k = nt.kloosterman(m1, m2, q)
    assert k == pytest.approx(nt.kloosterman(m2, m1, q), abs=1e-9)
    ref = _kloosterman_naive(m1, m2, q)
    phi = nt.build_table(q).totient[q]
    assert abs(ref.imag) < 1e-9 * phi
    assert k == pytest.approx(ref.real, abs=1e-9)


def test_weil_bound():
    for p in nt.primes_upto(200).tolist():
        assert abs(nt.kloosterman(1, 1, p)) <= 2 * math.sqrt(p)


def test_kloosterman_zeta_partial():
    z = nt.kloosterman_zeta_partial(0, 0, 1.5, 200)
    phi = nt.build_table(200).totient
    assert z.value == pytest.approx(math.fsum(phi[q] * q ** -3.0 for q in range(1, 201)), rel=1e-14)
    assert nt.kloosterman_zeta_partial(1, 1, 1.5, 1).value == 1.0
    a = nt.kloosterman_zeta_partial(1, 1, 1.5, 100)
    b = nt.kloosterman_zeta_partial(1, 1, 1.5, 400)
    assert abs(b.value - a.value) <= a.tail_bound


@pytest.mark.parametrize("s,expected", [(2, math.pi ** 2 / 6), (4, math.pi ** 4 / 90),
                                        (3, 1.2020569031595942)])
def test_zeta_examples(s, expected):
    assert nt.zeta_real(s) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("s", [1.001, 1.01, 1.5, 2.5, 3.0, 7.3, 20.0, 59.0, 61.0, 150.0])
def test_zeta_against_mpmath(s):
    assert nt.zeta_real(s) == pytest.approx(float(mpmath.zeta(s)), rel=1e-12)


def test_zeta3_by_direct_summation():
    # partial sum plus the integral bounds on the tail bracket zeta(3)
    N = 10 ** 5
    head = math.fsum(k ** -3.0 for k in range(1, N + 1))
    lower = head + 1 / (2 * (N + 1) ** 2)
    upper = head + 1 / (2 * N ** 2)
    assert lower - 1e-15 <= nt.zeta_real(3) <= upper + 1e-15


def test_zeta_domain():
    with pytest.raises(ValueError, match="outside implemented domain"):
        nt.zeta_real(1.0)


def test_totient_zeta_identity_examples():
    r = nt.totient_zeta_identity_check(1.5, 10 ** 5, tolerance=1e-4)
    assert r.passed and r.reference == pytest.approx(1.3684328, abs=1e-7)
    assert nt.totient_zeta_identity_check(2.0, 10 ** 4, tolerance=1e-6).passed
    one = nt.totient_zeta_identity_check(3.0, 1)
    assert one.computed == 1.0
    # default tolerance is the rigorous tail bound
    assert nt.totient_zeta_identity_check(1.7, 2000).passed
