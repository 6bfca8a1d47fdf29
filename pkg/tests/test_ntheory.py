import pytest
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from pnsieve.ntheory import (
    Factorization, big_w, cyclotomic_eval, divisors_of, euler_phi,
    factor_group_order, factorize, first_primes, hints_for, is_prime,
    mobius, omega, parse_hint_file, squarefree_bound_const, theta,
    verify_omega_threshold,
)
from conftest import hints_file


def test_is_prime_small():
    assert [n for n in range(40) if is_prime(n)] == [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]


def test_is_prime_carmichael():
    # Fermat pseudoprimes to many bases; must still come back composite
    for n in (561, 1105, 1729, 41041, 825265):
        assert not is_prime(n)


def test_is_prime_large():
    assert is_prime(2 ** 127 - 1)
    assert not is_prime((2 ** 127 - 1) * (2 ** 61 - 1))


def test_first_primes():
    ps = first_primes(2828)
    assert len(ps) == 2828
    assert ps[-1] == 25673


@given(st.integers(min_value=2, max_value=10 ** 9))
@settings(max_examples=60, deadline=None)
def test_factorize_reassembles(n):
    f = factorize(n)
    assert f.value == n
    prod = f.cofactor
    for p, e in f.factors:
        assert is_prime(p)
        prod *= p ** e
    assert prod == n


def test_factorize_known():
    assert factorize(360).factors == ((2, 3), (3, 2), (5, 1))
    assert factorize(1).factors == ()
    assert factorize(2 ** 31 - 1).factors == ((2147483647, 1),)


def test_factorization_validates():
    with pytest.raises(ValueError):
        Factorization(12, ((4, 1), (3, 1)))        # 4 is not prime
    with pytest.raises(ValueError):
        Factorization(12, ((2, 1), (3, 1)))        # does not reassemble
    with pytest.raises(ValueError):
        Factorization(12, ((3, 1), (2, 2)))        # not increasing
    with pytest.raises(ValueError):
        Factorization(12, ((2, 2),), complete=True, cofactor=3)


def test_restrict_and_divisors():
    f = factorize(360)
    assert f.restrict(12).factors == ((2, 2), (3, 1))
    with pytest.raises(ValueError):
        f.restrict(7)
    assert f.squarefree_divisors() == [1, 2, 3, 5, 6, 10, 15, 30]
    assert f.radical() == 30
    assert divisors_of(60) == [1, 2, 3, 4, 5, 6, 10, 12, 15, 20, 30, 60]


def test_incomplete_factorization():
    # 2^.. * two large primes with a tiny budget: the composite must be
    # reported as a cofactor, never passed off as factored
    n = (2 ** 89 - 1) * (2 ** 107 - 1) * 8
    f = factorize(n, budget=10)
    assert f.value == n
    if not f.complete:
        assert f.cofactor > 1
        with pytest.raises(ValueError):
            f.radical()


def test_arithmetic_functions():
    assert mobius(factorize(1)) == 1
    assert mobius(factorize(30)) == -1
    assert mobius(factorize(12)) == 0
    assert euler_phi(factorize(1)) == 1
    assert euler_phi(factorize(36)) == 12
    assert omega(factorize(360)) == 3
    assert big_w(factorize(360)) == 8
    assert theta(factorize(12)) == Fraction(1, 3)
    assert theta(factorize(242)) == Fraction(5, 11)


@given(st.integers(min_value=1, max_value=5000))
@settings(max_examples=40, deadline=None)
def test_theta_equals_phi_over_n(n):
    f = factorize(n)
    assert theta(f) == Fraction(euler_phi(f), n)


def test_cyclotomic_product():
    # prod over d | n of Phi_d(x) = x^n - 1
    for n in (1, 2, 6, 12, 30):
        for x in (2, 7, 10):
            prod = 1
            for d in divisors_of(n):
                prod *= cyclotomic_eval(d, x)
            assert prod == x ** n - 1
    assert cyclotomic_eval(1, 7) == 6
    assert cyclotomic_eval(2, 7) == 8
    assert cyclotomic_eval(4, 7) == 50


def test_factor_group_order():
    f = factor_group_order(7, 1, 6)
    assert f.complete and f.value == 7 ** 6 - 1
    assert f.as_dict() == {2: 4, 3: 2, 19: 1, 43: 1}


def test_hint_file_roundtrip():
    hints, problems = parse_hint_file(hints_file())
    assert problems == []
    fs = hints_for(hints, 7, 1, 11)
    assert fs, "hint file must cover (7^1, 11)"
    f = factor_group_order(7, 1, 11, hints=fs)
    assert f.complete
    assert f.as_dict() == {2: 1, 3: 1, 1123: 1, 293459: 1}


def test_bogus_hints_rejected():
    # 10 does not divide and 9 is composite: both must land in
    # rejected_hints, and the result must still be correct
    f = factorize(360, hints=[10, 9, 5])
    assert f.value == 360 and f.complete
    assert set(f.rejected_hints) == {10, 9}
    assert f.as_dict() == {2: 3, 3: 2, 5: 1}


def test_squarefree_bound_const_is_upper_bound():
    # W(m) < C(r) * m^(1/r) on the worst cases: primorials
    for r in (Fraction(17, 2), Fraction(9), Fraction(21, 2)):
        C = squarefree_bound_const(r)
        for count in (1, 5, 10, 15):
            m = 1
            for p in first_primes(count):
                m *= p
            assert 2 ** count < C * m ** (1 / float(r))


def test_squarefree_bound_const_monotone():
    # more admissible primes below 2^r, and each factor 2/p^(1/r) grows
    assert squarefree_bound_const(9) < squarefree_bound_const(10)


def test_omega_threshold_report():
    rep = verify_omega_threshold()
    assert all(rep.values()), rep
