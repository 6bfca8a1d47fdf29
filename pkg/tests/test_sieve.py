from fractions import Fraction

import pytest

from pnsieve.cyclofactor import L_part, coset_profile
from pnsieve.ntheory import (big_w, factor_group_order, hints_for)
from pnsieve.sieve import (
    ModifiedPartition, SieveChoice, VERDICT_FAILS, VERDICT_HOLDS,
    VERDICT_INAPPLICABLE, _compare_halfpower, asymptotic_n_threshold,
    check_basic, check_modified_sieve, check_prime_sieve,
    enumerate_modified_partitions, prime_sieve_quantities, search_choice,
    search_modified,
)
from pnsieve.ntheory import Factorization


def group_fact(hints7, k, n):
    return factor_group_order(7, k, n, hints=hints_for(hints7, 7, k, n))


def w_values(fact, profile):
    degs, w_l = L_part(profile)
    return big_w(fact), w_l, profile.w_xn1


def all_sieved_choice(fact, profile):
    degs, _w = L_part(profile)
    return SieveChoice(
        kept_l=Factorization(1, ()), kept_g=(), kept_gp=(),
        sieved_primes=tuple(fact.primes()),
        sieved_g=tuple(sorted(degs)),
        sieved_gp=tuple(sorted(profile.degree_profile)))


def nothing_sieved_choice(fact, profile):
    degs, _w = L_part(profile)
    kept_l = Factorization(fact.radical(),
                           tuple((p, 1) for p in fact.primes()))
    return SieveChoice(kept_l=kept_l, kept_g=tuple(sorted(degs)),
                       kept_gp=tuple(sorted(profile.degree_profile)),
                       sieved_primes=(), sieved_g=(), sieved_gp=())


def test_exact_halfpower_comparison():
    # equality must not count as a strict inequality: 9^(1/2) vs 3
    assert not _compare_halfpower(9, 1, Fraction(3))
    assert _compare_halfpower(9, 1, Fraction(29999, 10000))
    # and a case where floats would waffle: q^(n/2) vs its own rounding
    q, e = 7, 31
    exact_sq = Fraction(q) ** e
    close = Fraction(float(exact_sq ** Fraction(1, 2)))
    assert _compare_halfpower(q, e, close) == (Fraction(q) ** e > close ** 2)


def test_check_basic_knowns(hints7):
    # (7, 11): basic fails; (7, 41): basic holds
    for n, expected in ((11, VERDICT_FAILS), (41, VERDICT_HOLDS)):
        fact = group_fact(hints7, 1, n)
        prof = coset_profile(7, n)
        rep = check_basic(7, n, 2, *w_values(fact, prof))
        assert rep.verdict == expected, n
    lo, hi = check_basic(7, 11, 2, *w_values(group_fact(hints7, 1, 11),
                                             coset_profile(7, 11))).margin
    assert lo <= hi < 0


def test_check_basic_indeterminate():
    rep = check_basic(7, 11, 2, None, 2, 4)
    assert rep.verdict == "indeterminate"
    with pytest.raises(ValueError):
        check_basic(7, 4, 2, 4, 2, 4)


def test_prime_sieve_quantities_manual():
    choice = SieveChoice(
        kept_l=Factorization(6, ((2, 1), (3, 1))), kept_g=(1,),
        kept_gp=(1, 1), sieved_primes=(19, 43), sieved_g=(2, 2),
        sieved_gp=(3,))
    S, M = prime_sieve_quantities(choice, 7)
    expect_S = 1 - Fraction(2, 19) - Fraction(2, 43) \
        - 2 * Fraction(1, 49) - Fraction(1, 343)
    assert S == expect_S
    assert M == Fraction(2 * 2 + 2 + 1 - 1) / S + 2
    assert (choice.w_l, choice.w_g, choice.w_gp) == (4, 2, 4)


def test_prime_sieve_inapplicable_when_s_negative():
    choice = SieveChoice(kept_l=Factorization(1, ()), kept_g=(), kept_gp=(),
                         sieved_primes=(2, 3, 5), sieved_g=(), sieved_gp=())
    S, M = prime_sieve_quantities(choice, 7)
    assert S < 0 and M is None
    rep = check_prime_sieve(choice, 7, 11, 2)
    assert rep.verdict == VERDICT_INAPPLICABLE


def test_search_choice_7_11(hints7):
    fact = group_fact(hints7, 1, 11)
    prof = coset_profile(7, 11)
    choice = search_choice(7, 11, 2, prof, fact)
    assert choice is not None
    rep = check_prime_sieve(choice, 7, 11, 2)
    assert rep.holds
    assert rep.S > 0 and rep.M > 0
    # the sieve genuinely did something: basic fails on this pair
    assert not check_basic(7, 11, 2, *w_values(fact, prof)).holds


def test_search_choice_none_for_7_6(hints7):
    fact = group_fact(hints7, 1, 6)
    prof = coset_profile(7, 6)
    assert search_choice(7, 6, 2, prof, fact) is None


def test_modified_partition_gammas():
    part = ModifiedPartition(
        kept_primes=(2,), mid_primes=(3,), tail_primes=(19, 43),
        kept_g=(), mid_g=(1,), tail_g=(2,),
        kept_gp=(1,), mid_gp=(), tail_gp=(3,))
    g1, g2, g3 = part.gammas(7)
    assert g1 == Fraction(1, 19) + Fraction(1, 43)
    assert g2 == Fraction(1, 343)
    assert g3 == Fraction(1, 49)
    assert (part.r, part.v, part.s, part.w, part.t, part.u) \
        == (1, 2, 1, 1, 0, 1)


# the (7, 18) membership certificate: a three-way partition the
# two-way search cannot reach (it needs the tail prime 117307)
PART_7_18 = ModifiedPartition(
    kept_primes=(2, 3), mid_primes=(19, 37, 43, 1063),
    tail_primes=(117307,),
    kept_g=(1,), mid_g=(1, 1, 1, 1, 3, 3, 3, 3), tail_g=(),
    kept_gp=(1, 1, 1, 1, 1, 1), mid_gp=(3, 3, 3, 3), tail_gp=())


def test_modified_sieve_certifies_7_18(hints7):
    fact = group_fact(hints7, 1, 18)
    assert sorted(fact.primes()) == sorted(
        PART_7_18.kept_primes + PART_7_18.mid_primes
        + PART_7_18.tail_primes)
    prof = coset_profile(7, 18)
    assert prof.degree_profile == (1,) * 6 + (3,) * 4
    rep = check_modified_sieve(PART_7_18, 7, 18, 2)
    assert rep.holds
    assert Fraction("0.197") < rep.S < Fraction("0.198")
    lo, hi = rep.margin
    assert 0 < lo <= hi < 0.01   # certifies with a sliver of room


def test_search_modified_finds_7_18(hints7):
    fact = group_fact(hints7, 1, 18)
    prof = coset_profile(7, 18)
    found = search_modified(7, 18, 2, prof, fact)
    assert found is not None
    part, rep = found
    assert rep.holds
    assert check_modified_sieve(part, 7, 18, 2).holds
    # the two-way search really cannot certify this pair
    assert search_choice(7, 18, 2, prof, fact) is None


def test_search_modified_none_for_49_8(hints7):
    fact = group_fact(hints7, 2, 8)
    prof = coset_profile(49, 8)
    assert search_modified(49, 8, 2, prof, fact) is None


def test_modified_positivity_hypothesis():
    part = ModifiedPartition(
        kept_primes=(), mid_primes=(2, 3), tail_primes=(),
        kept_g=(), mid_g=(), tail_g=(),
        kept_gp=(), mid_gp=(), tail_gp=())
    rep = check_modified_sieve(part, 7, 11, 2)
    assert rep.verdict == VERDICT_INAPPLICABLE
    assert any("positivity" in note for note in rep.notes)


def degenerate_pairs(hints7):
    for k, n in ((1, 11), (1, 13), (1, 20), (1, 23), (2, 9), (2, 11)):
        yield k, n, group_fact(hints7, k, n), coset_profile(7 ** k, n)


def test_modified_with_no_tails_reduces_to_prime_sieve(hints7):
    """Empty tails collapse the three-way criterion onto the two-way
    one: same exact inequality, so same verdict and same margin."""
    checked = 0
    for k, n, fact, prof in degenerate_pairs(hints7):
        q = 7 ** k
        primes = fact.primes()
        degs, _w = L_part(prof)
        degs = sorted(degs)
        xdegs = sorted(prof.degree_profile)
        for cut in (0, 1, len(primes) // 2, len(primes)):
            cut = min(cut, len(primes))
            kept_pr, mid_pr = primes[:cut], primes[cut:]
            for gcut in (0, len(degs) // 2):
                part = ModifiedPartition(
                    kept_primes=tuple(kept_pr), mid_primes=tuple(mid_pr),
                    tail_primes=(),
                    kept_g=tuple(degs[:gcut]), mid_g=tuple(degs[gcut:]),
                    tail_g=(),
                    kept_gp=tuple(xdegs[:gcut]), mid_gp=tuple(xdegs[gcut:]),
                    tail_gp=())
                choice = SieveChoice(
                    kept_l=Factorization(
                        _prod(kept_pr), tuple((p, 1) for p in kept_pr)),
                    kept_g=tuple(degs[:gcut]), kept_gp=tuple(xdegs[:gcut]),
                    sieved_primes=tuple(mid_pr),
                    sieved_g=tuple(degs[gcut:]),
                    sieved_gp=tuple(xdegs[gcut:]))
                m_rep = check_modified_sieve(part, q, n, 2)
                p_rep = check_prime_sieve(choice, q, n, 2)
                if p_rep.verdict == VERDICT_INAPPLICABLE:
                    assert m_rep.verdict == VERDICT_INAPPLICABLE
                else:
                    assert m_rep.verdict == p_rep.verdict, (k, n, cut, gcut)
                    assert m_rep.margin == p_rep.margin, (k, n, cut, gcut)
                checked += 1
    assert checked >= 20


def test_prime_sieve_with_nothing_sieved_reduces_to_basic(hints7):
    """An empty sieved set gives S = 1, M = 1 and the basic criterion."""
    checked = 0
    for k, n, fact, prof in degenerate_pairs(hints7):
        q = 7 ** k
        choice = nothing_sieved_choice(fact, prof)
        S, M = prime_sieve_quantities(choice, q)
        assert (S, M) == (1, 1)
        p_rep = check_prime_sieve(choice, q, n, 2)
        b_rep = check_basic(q, n, 2, *w_values(fact, prof))
        assert p_rep.verdict == b_rep.verdict
        assert p_rep.margin == b_rep.margin
        checked += 1
    assert checked >= 6


def _prod(xs):
    out = 1
    for x in xs:
        out *= x
    return out


def test_enumerate_modified_bounded(hints7):
    fact = group_fact(hints7, 1, 11)
    prof = coset_profile(7, 11)
    parts = list(enumerate_modified_partitions(7, 11, prof, fact,
                                               max_prefix=2, max_tail=1))
    assert parts
    seen = set()
    for part in parts:
        assert sorted(part.kept_primes + part.mid_primes
                      + part.tail_primes) == sorted(fact.primes())
        seen.add(part)
    assert len(seen) == len(parts)   # no duplicates


def test_asymptotic_threshold_monotone_in_k():
    n3 = asymptotic_n_threshold(3, Fraction(17, 2))
    n10 = asymptotic_n_threshold(10, Fraction(19, 2))
    assert n3 is not None and n10 is not None
    assert n10 < n3   # larger fields certify sooner
