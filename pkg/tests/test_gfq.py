"""Prime-power subfield arithmetic and the shared polynomial helpers."""

import pytest
from hypothesis import given, settings, strategies as st

from pnsieve.gfq import (
    GFq, canonical_irreducible, format_elem, format_poly, fp_gcd,
    fp_is_irreducible, parse_elem, parse_poly, poly_divmod, poly_gcd,
    poly_mod, poly_mul, poly_pow_mod, poly_trim, poly_xn_minus_1,
)

F9 = GFq(3, 2)
F49 = GFq(7, 2)


def elems(F):
    return list(F.elements())


def test_element_count_and_identity():
    assert len(elems(F9)) == 9
    assert F9.from_int(1) == F9.one
    assert F9.add(F9.one, F9.neg(F9.one)) == F9.zero


@given(st.integers(0, 8), st.integers(0, 8), st.integers(0, 8))
@settings(max_examples=80, deadline=None)
def test_f9_ring_axioms(i, j, k):
    es = elems(F9)
    a, b, c = es[i], es[j], es[k]
    assert F9.add(a, b) == F9.add(b, a)
    assert F9.mul(a, b) == F9.mul(b, a)
    assert F9.mul(a, F9.add(b, c)) == F9.add(F9.mul(a, b), F9.mul(a, c))
    assert F9.mul(F9.mul(a, b), c) == F9.mul(a, F9.mul(b, c))


def test_inverses():
    for F in (F9, F49):
        for a in elems(F):
            if F.is_zero(a):
                with pytest.raises(ZeroDivisionError):
                    F.inv(a)
            else:
                assert F.mul(a, F.inv(a)) == F.one


def test_pow_matches_repeated_mul():
    a = F49.from_coeffs([3, 1])
    acc = F49.one
    for e in range(12):
        assert F49.pow(a, e) == acc
        acc = F49.mul(acc, a)


def test_unit_group_order():
    # Lagrange: a^(q-1) = 1 for every nonzero a
    for F in (F9, F49):
        for a in elems(F):
            if not F.is_zero(a):
                assert F.pow(a, F.q - 1) == F.one


def test_trace_to_prime():
    # trace is F_p-linear and onto
    seen = set()
    for a in elems(F9):
        seen.add(F9.trace_to_prime(a))
        for b in elems(F9):
            s = F9.add(a, b)
            assert (F9.trace_to_prime(s)
                    == (F9.trace_to_prime(a) + F9.trace_to_prime(b)) % 3)
    assert seen == {0, 1, 2}


def test_fp_is_irreducible_known():
    assert fp_is_irreducible([1, 0, 1], 3)        # x^2+1, -1 not a square
    assert not fp_is_irreducible([1, 0, 1], 5)    # 2^2 = -1 mod 5
    assert not fp_is_irreducible([5, 0, 1], 7)    # x^2+5 = (x-3)(x+3)
    assert fp_is_irreducible([3, 1], 7)           # linear
    assert not fp_is_irreducible([1, 2, 1], 3)    # (x+1)^2


def test_canonical_irreducible():
    for p, d in ((3, 5), (7, 5), (7, 6), (3, 10)):
        f = canonical_irreducible(p, d)
        assert len(f) == d + 1 and f[-1] == 1
        assert fp_is_irreducible(f, p)
        assert canonical_irreducible(p, d) == f  # deterministic


@given(st.lists(st.integers(0, 6), min_size=1, max_size=6),
       st.lists(st.integers(0, 6), min_size=2, max_size=5))
@settings(max_examples=60, deadline=None)
def test_poly_divmod_invariant(acoeffs, bcoeffs):
    F = GFq(7, 1)
    a = poly_trim(F, [F.from_int(c) for c in acoeffs])
    b = poly_trim(F, [F.from_int(c) for c in bcoeffs])
    if not b:
        return
    q, r = poly_divmod(F, a, b)
    assert len(r) < len(b)
    back = [x for x in poly_mul(F, q, b)]
    from pnsieve.gfq import poly_add
    assert poly_trim(F, poly_add(F, back, r)) == a


def test_poly_gcd_and_powmod():
    F = GFq(7, 1)
    one = [F.one]
    xn1 = poly_xn_minus_1(F, 6)
    # x^6-1 = prod (x - c) over F_7^*
    g = poly_gcd(F, xn1, [F.neg(F.from_int(3)), F.one])
    assert g == [F.neg(F.from_int(3)), F.one] or len(g) == 2
    # Fermat: x^7 = x mod any irreducible of degree 1
    f = [F.from_int(4), F.one]
    assert poly_mod(F, poly_pow_mod(F, [F.zero, F.one], 7, f),
                    f) == poly_mod(F, [F.zero, F.one], f)
    assert poly_gcd(F, xn1, one) == one


def test_parse_poly_literals():
    assert parse_poly("x^3+x^2+5x+5", 7) == [5, 5, 1, 1]
    assert parse_poly("x^2+x+6", 7) == [6, 1, 1]
    assert parse_poly("(x^6+6)/(x+6)", 7) == [1, 1, 1, 1, 1, 1]
    assert parse_poly("x-1", 7) == [6, 1]
    assert parse_poly("2", 7) == [2]
    with pytest.raises(ValueError):
        parse_poly("(x^6+6)/(x^2+1)", 7)   # order-4 roots: does not divide
    with pytest.raises(ValueError):
        parse_poly("x^+2", 7)


def test_format_poly_roundtrip():
    for text in ("x^3+x^2+5x+5", "x^24+6", "x+1", "3x^2+2", "1"):
        coeffs = parse_poly(text, 7)
        assert parse_poly(format_poly(coeffs), 7) == coeffs


def test_elem_literals():
    assert list(parse_elem("[2,0,1]")) == [2, 0, 1]
    assert format_elem((2, 0, 1)) == "[2,0,1]"
    assert list(parse_elem(format_elem([0, 4]))) == [0, 4]
    with pytest.raises(ValueError):
        parse_elem("2,0,1")


def test_fp_gcd():
    # gcd((x^2-1), (x-1)) = x-1 up to scaling, over F_5
    g = fp_gcd([4, 0, 1], [4, 1], 5)
    assert g[-1] == 1 and len(g) == 2
