from fractions import Fraction

import pytest

from pnsieve import gfq as _g
from pnsieve.cyclofactor import (
    L_part, coset_profile, decompose_over_factors, degree_split,
    explicit_factors, fq_is_irreducible, pi_ratio,
)
from pnsieve.gfq import GFq


def test_coset_profile_knowns():
    assert coset_profile(7, 11).degree_profile == (1, 10)
    assert coset_profile(7, 6).degree_profile == (1,) * 6
    assert coset_profile(7, 7).degree_profile == (1,)    # x^7-1 = (x-1)^7
    prof = coset_profile(7, 12)
    assert sum(prof.degree_profile) == prof.n_prime
    assert prof.multiplicity == 1
    prof14 = coset_profile(7, 14)
    assert prof14.n_prime == 2 and prof14.multiplicity == 7


def test_coset_profile_rejects():
    with pytest.raises(ValueError):
        coset_profile(6, 5)           # not a prime power
    with pytest.raises(ValueError):
        coset_profile(7, 0)


def test_L_part_and_w():
    prof = coset_profile(7, 12)
    degs, wl = L_part(prof)
    assert wl == prof.w_xn1 // 2
    assert sorted(degs + (1,)) == list(prof.degree_profile)


def test_pi_ratio_scaling():
    # n * pi(q, n) = n' * pi(q, n') by construction
    for q, n in ((7, 14), (7, 21), (3, 15), (49, 28)):
        prof = coset_profile(q, n)
        assert (n * pi_ratio(q, n)
                == prof.n_prime * pi_ratio(q, prof.n_prime))
    assert pi_ratio(7, 7) == Fraction(0)


def test_fq_is_irreducible_degree_one():
    # regression: x^(q^d) mod f must be compared against x reduced mod f,
    # which matters exactly when deg f = 1
    F7 = GFq(7, 1)
    for c in range(7):
        assert fq_is_irreducible(F7, [F7.from_int(c), F7.one])
    F49 = GFq(7, 2)
    assert fq_is_irreducible(F49, [F49.from_coeffs([3, 1]), F49.one])


def test_fq_is_irreducible_knowns():
    F7 = GFq(7, 1)
    x2p1 = [F7.from_int(1), F7.zero, F7.one]
    assert fq_is_irreducible(F7, x2p1)               # -1 not a square mod 7
    x2m2 = [F7.from_int(-2), F7.zero, F7.one]
    assert not fq_is_irreducible(F7, x2m2)           # 3^2 = 2 mod 7
    # over F_49 every quadratic over F_7 splits
    F49 = GFq(7, 2)
    lift = [F49.from_coeffs([1]), F49.zero, F49.one]
    assert not fq_is_irreducible(F49, lift)


@pytest.mark.parametrize("q,n", [(7, 6), (7, 16), (7, 12), (3, 5), (9, 5),
                                 (49, 8)])
def test_explicit_factors(q, n):
    prof = coset_profile(q, n)
    factors = explicit_factors(q, n)
    assert tuple(sorted(len(f) - 1 for f in factors)) == prof.degree_profile
    import pnsieve.cyclofactor as cf
    p, k = cf._characteristic(q)
    F = GFq(p, k)
    for f in factors:
        assert f[-1] == F.one
        assert fq_is_irreducible(F, f)


def test_explicit_factors_deterministic():
    a = explicit_factors(7, 12)
    b = explicit_factors(7, 12)
    assert a == b


def test_degree_split_literals():
    F = GFq(7, 1)
    assert degree_split(F, _g.parse_poly("x^2+x+6", 7), 16) == ((2,), False)
    degs, has1 = degree_split(F, _g.parse_poly("x^6+6", 7), 36)
    assert degs == (1,) * 6 and has1
    with pytest.raises(ValueError):
        degree_split(F, _g.parse_poly("x+2", 7), 16)   # not a divisor
    with pytest.raises(ValueError):
        degree_split(F, _g.parse_poly("2x+1", 7), 16)  # not monic


def test_degree_split_matches_explicit():
    # same degree multiset as the explicit factorization, for full x^n-1
    for q, n in ((7, 12), (7, 16), (3, 8)):
        prof = coset_profile(q, n)
        F = GFq(*__import__("pnsieve.cyclofactor",
                            fromlist=["_characteristic"])._characteristic(q))
        xn1 = _g.poly_xn_minus_1(F, prof.n_prime)
        degs, has1 = degree_split(F, xn1, n)
        assert has1
        assert tuple(sorted(degs)) == prof.degree_profile


def test_decompose_over_factors():
    F = GFq(7, 1)
    factors = explicit_factors(7, 12)
    # x^12 - 1 itself is the product of all distinct factors
    ok, used = decompose_over_factors(F, _g.poly_xn_minus_1(F, 12), factors)
    assert ok and len(used) == len(factors)
    ok, _used = decompose_over_factors(F, _g.parse_poly("x+5", 7), factors)
    assert ok                           # x+5 = x-2, and 2^12 = 1 mod 7
    ok, _used = decompose_over_factors(F, _g.parse_poly("x^2+1", 7), factors)
    assert ok                           # order-4 roots divide x^12-1
    ok, _used = decompose_over_factors(F, _g.parse_poly("x^2+x+3", 7),
                                       factors)
    assert not ok
