"""Factorization structure of x^n - 1 over F_q, without factoring.

Write n = n' * p^i with p the characteristic and gcd(n', p) = 1.  The
distinct monic irreducible factors of x^n - 1 over F_q correspond one to
one with the q-cyclotomic cosets mod n', and a factor's degree is its
coset's size.  Everything the sieve criteria need (degree profiles,
W(x^n - 1), the part L avoiding x - 1, the small-factor ratio pi) comes
straight from the cosets; actual coefficient arithmetic is only done by
explicit_factors, at desk scale, for table verification and the additive
freeness tests.
"""

from dataclasses import dataclass
from fractions import Fraction

from . import gfq as _g
from .gfq import GFq
from .ffield import build_field, element_order
from .ntheory import factorize


def _characteristic(q):
    f = factorize(q).require_complete()
    if len(f.factors) != 1:
        raise ValueError("%d is not a prime power" % q)
    p, k = f.factors[0]
    return p, k


@dataclass(frozen=True)
class CosetProfile:
    q: int
    n: int
    n_prime: int
    multiplicity: int
    cosets: tuple          # tuple of tuples of residues mod n_prime
    degree_profile: tuple  # sorted multiset of coset sizes
    e_order: int

    @property
    def num_factors(self):
        return len(self.cosets)

    @property
    def w_xn1(self):
        """W(x^n - 1) = 2^(number of distinct irreducible factors)."""
        return 1 << len(self.cosets)

    @property
    def small_factor_count(self):
        """Number of irreducible factors of degree strictly below e."""
        return sum(1 for c in self.cosets if len(c) < self.e_order)


def coset_profile(q, n):
    """Cyclotomic-coset profile of x^n - 1 over F_q.

    >>> coset_profile(7, 11).degree_profile
    (1, 10)
    >>> coset_profile(7, 6).degree_profile
    (1, 1, 1, 1, 1, 1)
    >>> coset_profile(7, 7).degree_profile
    (1,)
    """
    if n < 1:
        raise ValueError("n must be positive")
    p, _k = _characteristic(q)
    n_prime, mult = n, 1
    while n_prime % p == 0:
        n_prime //= p
        mult *= p

    if n_prime == 1:
        e = 1
    else:
        qr = q % n_prime
        e, cur = 1, qr
        while cur != 1:
            cur = cur * qr % n_prime
            e += 1
            if e > n_prime:
                raise ValueError("gcd(q, n') != 1, order undefined")

    qr = q % n_prime if n_prime > 1 else 0
    seen = [False] * n_prime
    cosets = []
    for a in range(n_prime):
        if seen[a]:
            continue
        orbit = []
        x = a
        while not seen[x]:
            seen[x] = True
            orbit.append(x)
            x = x * qr % n_prime
        cosets.append(tuple(sorted(orbit)))
    cosets.sort(key=lambda c: c[0])
    degs = tuple(sorted(len(c) for c in cosets))
    return CosetProfile(q=q, n=n, n_prime=n_prime, multiplicity=mult,
                        cosets=tuple(cosets), degree_profile=degs, e_order=e)


def L_part(profile):
    """Degrees and W-value of L, the largest divisor of x^n - 1 that
    x - 1 does not divide: every distinct factor except x - 1.

    Returns (degree multiset, W(L)); W(L) = W(x^n - 1) / 2 always.
    """
    degs = list(profile.degree_profile)
    degs.remove(1)  # the coset of 0 contributes the factor x - 1
    return tuple(degs), 1 << (len(profile.cosets) - 1)


def pi_ratio(q, n):
    """Exact ratio (# irreducible factors of x^n - 1 of degree < e) / n.

    The count comes from the coset profile mod n', so the identity
    n * pi(q, n) = n' * pi(q, n') holds by construction.  For n' = 1 the
    order e is vacuous and the defined value is 0.
    """
    prof = coset_profile(q, n)
    if prof.n_prime == 1:
        return Fraction(0, 1)
    return Fraction(prof.small_factor_count, n)


def fq_is_irreducible(F, f):
    """Rabin irreducibility over an arbitrary GFq field object."""
    f = _g.poly_trim(F, list(f))
    d = len(f) - 1
    if d < 1:
        return False
    x = [F.zero, F.one]
    if _g.poly_trim(F, _g.poly_mod(F, _g.poly_sub(
            F, _g.poly_pow_mod(F, x, F.q ** d, f), x), f)):
        return False
    dd, prime_divs, t = d, [], 2
    while t * t <= dd:
        if dd % t == 0:
            prime_divs.append(t)
            while dd % t == 0:
                dd //= t
        t += 1
    if dd > 1:
        prime_divs.append(dd)
    for t in prime_divs:
        h = _g.poly_sub(F, _g.poly_pow_mod(F, x, F.q ** (d // t), f), x)
        if len(_g.poly_gcd(F, h, f)) != 1:
            return False
    return True


def explicit_factors(q, n, limit=10 ** 7):
    """The distinct monic irreducible factors of x^n - 1 over F_q, as
    polynomials with GFq-tuple coefficients, computed inside the
    splitting field F_{q^e}.

    The n'-th primitive root of unity is pinned deterministically: among
    the powers g^(j(q^e-1)/n') of the first enumerated generator g with
    gcd(j, n') = 1, take the one with lexicographically smallest
    coefficient vector.  Factors are returned sorted by (degree,
    coefficients); multiplying them all, each to the multiplicity p^i,
    reconstructs x^n - 1 (checked).
    """
    p, k = _characteristic(q)
    prof = coset_profile(q, n)
    F = GFq(p, k)
    if prof.n_prime == 1:
        factors = [[F.neg(F.one), F.one]]
    else:
        e = prof.e_order
        if p ** (k * e) > limit:
            raise ValueError("splitting field F_%d^%d exceeds size limit"
                             % (q, e))
        sctx = build_field(p, k, e)
        order = sctx.Q - 1
        gen = next(el for el in sctx.elements()
                   if not sctx.is_zero(el) and element_order(sctx, el) == order)
        step = order // prof.n_prime
        base = sctx.pow(gen, step)
        beta = None
        cur = sctx.one
        for j in range(1, prof.n_prime + 1):
            cur = sctx.mul(cur, base)
            if _gcd(j, prof.n_prime) == 1 and (beta is None
                                               or cur.coeffs < beta.coeffs):
                beta = cur
        factors = []
        for coset in prof.cosets:
            poly = [sctx.one]
            for j in coset:
                root = sctx.pow(beta, j)
                poly = _g.poly_mul(sctx, poly, [sctx.neg(root), sctx.one])
            factors.append([sctx.to_subfield(c) for c in poly])
        factors.sort(key=lambda f: (len(f), f))

    # reconstruction: product of factors, each to multiplicity p^i, is x^n-1
    recon = [F.one]
    for f in factors:
        for _ in range(prof.multiplicity):
            recon = _g.poly_mul(F, recon, f)
    if recon != _g.poly_xn_minus_1(F, n):
        raise AssertionError("factor reconstruction of x^%d-1 failed" % n)
    return factors


def degree_split(F, literal, n):
    """Degree multiset of a monic squarefree divisor of x^n - 1 over F_q,
    without explicit factorization.

    Walk the divisors d of n' in increasing order; gcd with x^d - 1 peels
    off exactly the factors whose roots have multiplicative order d (any
    smaller order was peeled at an earlier divisor), and every such
    irreducible factor has degree ord_d(q).  Only F_q[x] gcds at degree
    <= n are involved, so this stays cheap even when the splitting field
    is astronomically large.

    Returns (degrees, has_x_minus_1).  Raises ValueError when the literal
    is not monic or not a squarefree divisor of x^n - 1.

    >>> F = GFq(7, 1)
    >>> degree_split(F, [6, 1, 1], 16)      # x^2+x+6 | x^16-1 over F_7
    ((2,), False)
    >>> degree_split(F, [6, 0, 0, 0, 0, 0, 1], 36)   # x^6-1
    ((1, 1, 1, 1, 1, 1), True)
    """
    poly = _g.poly_trim(F, [F.from_int(c) if isinstance(c, int) else c
                            for c in literal])
    if not poly or poly[-1] != F.one:
        raise ValueError("literal must be monic")
    if len(poly) == 1:
        return (), False

    prof = coset_profile(F.q, n)
    np_ = prof.n_prime
    divisors = sorted(d for d in range(1, np_ + 1) if np_ % d == 0)
    degrees = []
    has_x_minus_1 = False
    rem_poly = poly
    for d in divisors:
        part = _g.poly_gcd(F, rem_poly, _g.poly_xn_minus_1(F, d))
        deg = len(part) - 1
        if deg == 0:
            continue
        if d == 1:
            e = 1
            has_x_minus_1 = True
        else:
            e, cur = 1, F.q % d
            while cur != 1:
                cur = cur * (F.q % d) % d
                e += 1
        if deg % e:
            raise ValueError("degree-%d part at order %d is not a "
                             "multiple of ord_%d(q) = %d" % (deg, d, d, e))
        degrees.extend([e] * (deg // e))
        quo, rr = _g.poly_divmod(F, rem_poly, part)
        if rr:
            raise AssertionError("gcd division left a remainder")
        rem_poly = quo
    if len(rem_poly) != 1 or rem_poly[0] != F.one:
        raise ValueError("literal is not a squarefree divisor of x^%d-1" % n)
    return tuple(sorted(degrees)), has_x_minus_1


def decompose_over_factors(F, literal, factors):
    """Express a monic polynomial (int or GFq-tuple coefficients) as a
    product of distinct members of `factors`, by repeated exact division.

    Returns (ok, used_indices).  ok is True when the quotient reduces to
    the constant 1, i.e. the literal is exactly a product of distinct
    listed factors.  Table polynomials are products of irreducible
    factors of x^n - 1, so this is the containment check they need.
    """
    poly = [F.from_int(c) if isinstance(c, int) else c for c in literal]
    used = []
    for idx, f in enumerate(factors):
        quo, rem = _g.poly_divmod(F, poly, f)
        if not rem and quo:
            poly = quo
            used.append(idx)
    ok = len(poly) == 1 and poly[0] == F.one
    return ok, used


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


if __name__ == "__main__":  # pragma: no cover
    import doctest
    doctest.testmod()
