"""Arbitrary-precision integer number theory.

Everything downstream (field construction, sieve criteria, the campaign)
leans on this module: exact factorizations that are allowed to be
incomplete, the multiplicative functions phi / mu / omega / W / theta,
piecewise evaluation of x^d - 1 in cyclotomic pieces, and the two
explicit bounds on the number of square-free divisors that power the
asymptotic arguments.

Factoring strategy: trial division by every prime below 10^6, then
Brent-cycle Pollard walks with a deterministic seed, recursing on
composite split parts.  Primality is a deterministic strong-pseudoprime
battery below the published 13-base threshold and a Baillie-PSW style
strong + Lucas combination above it.  Incomplete factorizations are a
result state, not an error: the unfactored part is carried in
``cofactor`` and operations that need completeness refuse them loudly.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpz

TRIAL_BOUND = 10 ** 6

# Default iteration allowance shared by all Brent walks inside one
# factorize() call.  Desk-scale pieces (everything needed by the golden
# tables, given the shipped hint file) fall out well under this.
DEFAULT_BUDGET = 400_000

# Strong-pseudoprime tests with these bases are a proven primality test
# below this limit (first 13 prime bases).
_SPRP_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_SPRP_LIMIT = 3317044064679887385961981

_small_primes = None


def small_primes():
    """Primes below TRIAL_BOUND, sieved once and cached."""
    global _small_primes
    if _small_primes is None:
        sieve = bytearray([1]) * TRIAL_BOUND
        sieve[0] = sieve[1] = 0
        for i in range(2, int(TRIAL_BOUND ** 0.5) + 1):
            if sieve[i]:
                sieve[i * i::i] = bytearray(len(sieve[i * i::i]))
        _small_primes = [i for i in range(TRIAL_BOUND) if sieve[i]]
    return _small_primes


def first_primes(count):
    """The first `count` primes (count may exceed the trial sieve)."""
    primes = small_primes()
    if count <= len(primes):
        return primes[:count]
    out = list(primes)
    candidate = mpz(primes[-1])
    while len(out) < count:
        candidate = gmpy2.next_prime(candidate)
        out.append(int(candidate))
    return out


def is_prime(n):
    """Deterministic below the 13-base SPRP threshold, BPSW above it.

    >>> is_prime(2801)
    True
    >>> is_prime(25673)
    True
    >>> is_prime(1)
    False
    """
    n = int(n)
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        if n % p == 0:
            return n == p
    z = mpz(n)
    if n < _SPRP_LIMIT:
        return all(gmpy2.is_strong_prp(z, b) for b in _SPRP_BASES)
    return gmpy2.is_strong_prp(z, 2) and gmpy2.is_strong_selfridge_prp(z)


@dataclass(frozen=True)
class Factorization:
    """Prime-power decomposition of a positive integer.

    factors is a tuple of (prime, exponent) with primes strictly
    increasing.  When `complete` is False the residual composite sits in
    `cofactor` (1 otherwise) and the reassembly invariant
    value == cofactor * prod(p^e) still holds.  rejected_hints records
    supplied hints that failed the division or primality check; they are
    reported, never silently used.
    """

    value: int
    factors: tuple
    complete: bool = True
    cofactor: int = 1
    rejected_hints: tuple = ()

    def __post_init__(self):
        if self.value < 1:
            raise ValueError("value must be a positive integer")
        prod = self.cofactor
        last = 1
        for p, e in self.factors:
            if p <= last:
                raise ValueError("primes must be strictly increasing")
            if e < 1:
                raise ValueError("exponents must be >= 1")
            if not is_prime(p):
                raise ValueError("listed factor %d is not prime" % p)
            last = p
            prod *= p ** e
        if prod != self.value:
            raise ValueError("factors and cofactor do not reassemble value")
        if self.complete and self.cofactor != 1:
            raise ValueError("complete factorization cannot carry a cofactor")

    def as_dict(self):
        return dict(self.factors)

    def primes(self):
        return [p for p, _ in self.factors]

    def radical(self):
        """Product of the distinct listed primes (requires completeness)."""
        self.require_complete()
        out = 1
        for p, _ in self.factors:
            out *= p
        return out

    def require_complete(self):
        if not self.complete:
            raise ValueError(
                "operation needs a complete factorization; %d has unfactored "
                "cofactor %d" % (self.value, self.cofactor))
        return self

    def restrict(self, divisor):
        """Factorization of `divisor`, which must divide value and factor
        entirely over the listed primes."""
        if divisor < 1 or self.value % divisor:
            raise ValueError("%d does not divide %d" % (divisor, self.value))
        rem = divisor
        fac = []
        for p, _ in self.factors:
            e = 0
            while rem % p == 0:
                rem //= p
                e += 1
            if e:
                fac.append((p, e))
        if rem != 1:
            raise ValueError("divisor %d has a prime outside the listed "
                             "factors" % divisor)
        return Factorization(divisor, tuple(fac))

    def squarefree_divisors(self):
        """All square-free divisors, ascending (requires completeness)."""
        self.require_complete()
        divs = [1]
        for p, _ in self.factors:
            divs += [d * p for d in divs]
        return sorted(divs)


def _brent_rho(n, budget, attempt):
    """One Brent-cycle walk on n with deterministically derived params.

    Returns (factor_or_None, iterations_spent).
    """
    # Parameters depend only on (n, attempt) so runs are reproducible.
    seed = gmpy2.mpz(n) ^ (0x9E3779B97F4A7C15 * (attempt + 1))
    y = mpz(2) + int(seed % (n - 3))
    c = mpz(1) + int((seed >> 64) % (n - 1))
    m = 128
    g, r, q = mpz(1), 1, mpz(1)
    spent = 0
    x = y
    ys = y
    while g == 1 and spent < budget:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            spent += min(m, r - k)
            g = gmpy2.gcd(q, n)
            k += m
        r *= 2
    if g == n:
        # Backtrack one step at a time (bounded by the same budget).
        g = mpz(1)
        while g == 1 and spent < budget:
            ys = (ys * ys + c) % n
            g = gmpy2.gcd(abs(x - ys), n)
            spent += 1
    if 1 < g < n:
        return int(g), spent
    return None, spent


def factorize(n, hints=None, budget=DEFAULT_BUDGET):
    """Factor a positive integer as far as the budget allows.

    hints: optional iterable of claimed prime factors.  Each is verified
    by division and a primality test before use; failures are recorded
    in rejected_hints.  budget bounds the total Brent-walk iterations.

    >>> factorize(16806).as_dict()
    {2: 1, 3: 1, 2801: 1}
    >>> factorize(1).factors
    ()
    """
    n = int(n)
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    found = {}
    rejected = []
    rem = mpz(n)

    def strip(p):
        nonlocal rem
        e = 0
        while rem % p == 0:
            rem //= p
            e += 1
        if e:
            found[int(p)] = found.get(int(p), 0) + e

    if hints:
        for h in dict.fromkeys(int(h) for h in hints):
            if h < 2 or rem % h != 0 or not is_prime(h):
                rejected.append(h)
                continue
            strip(h)

    if rem > 1:
        for p in small_primes():
            if p * p > rem:
                break
            strip(p)
    if rem > 1 and rem < TRIAL_BOUND * TRIAL_BOUND:
        # below the trial-division horizon squared: rem is prime
        strip(rem)

    # Randomized-walk stage on whatever is left.
    stack = [rem] if rem > 1 else []
    left = budget
    leftovers = mpz(1)
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            found[int(m)] = found.get(int(m), 0) + 1
            continue
        if gmpy2.is_power(m):
            root, k = _perfect_power(m)
            stack.extend([root] * k)
            continue
        f = None
        attempt = 0
        while f is None and left > 0 and attempt < 32:
            f, spent = _brent_rho(m, min(left, DEFAULT_BUDGET), attempt)
            left -= spent
            attempt += 1
        if f is None:
            leftovers *= m
        else:
            stack.append(mpz(f))
            stack.append(m // f)

    factors = tuple(sorted(found.items()))
    complete = leftovers == 1
    return Factorization(n, factors, complete=complete,
                         cofactor=int(leftovers),
                         rejected_hints=tuple(rejected))


def _perfect_power(m):
    """(root, k) with root**k == m, k maximal prime-taken greedily."""
    for k in range(2, m.bit_length() + 1):
        ok, root = _iroot_exact(m, k)
        if ok:
            return root, k
    return m, 1


def _iroot_exact(m, k):
    root, exact = gmpy2.iroot(m, k)
    return bool(exact), mpz(root)


def mobius(f):
    """Mobius function from a complete factorization.

    >>> mobius(factorize(6))
    1
    >>> mobius(factorize(12))
    0
    """
    f.require_complete()
    if any(e >= 2 for _, e in f.factors):
        return 0
    return -1 if len(f.factors) % 2 else 1


def euler_phi(f):
    f.require_complete()
    out = 1
    for p, e in f.factors:
        out *= (p - 1) * p ** (e - 1)
    return out


def omega(f):
    f.require_complete()
    return len(f.factors)


def big_w(f):
    """W(n) = 2^omega(n), the number of square-free divisors."""
    return 2 ** omega(f)


def theta(f):
    """phi(n)/n as an exact reduced fraction."""
    f.require_complete()
    out = Fraction(1)
    for p, _ in f.factors:
        out *= Fraction(p - 1, p)
    return out


# -- cyclotomic pieces -------------------------------------------------

def _mobius_int(d):
    if d == 1:
        return 1
    return mobius(factorize(d))


def divisors_of(n):
    f = factorize(n)
    f.require_complete()
    divs = [1]
    for p, e in f.factors:
        divs = [d * p ** i for d in divs for i in range(e + 1)]
    return sorted(divs)


def cyclotomic_eval(d, x):
    """Value of the d-th cyclotomic polynomial at the integer x >= 2,
    computed exactly as the Mobius product over (x^e - 1) terms.

    >>> cyclotomic_eval(1, 7)
    6
    >>> cyclotomic_eval(6, 7)
    43
    """
    if d < 1 or x < 2:
        raise ValueError("need d >= 1 and x >= 2")
    num = mpz(1)
    den = mpz(1)
    x = mpz(x)
    for e in divisors_of(d):
        mu = _mobius_int(d // e)
        if mu == 1:
            num *= x ** e - 1
        elif mu == -1:
            den *= x ** e - 1
    q, r = gmpy2.t_divmod(num, den)
    assert r == 0
    return int(q)


def merge_factorizations(value, pieces):
    """Combine factorizations of pairwise coprime-ish pieces of `value`.

    Exponents of shared primes add up.  Completeness propagates: the
    result is complete iff every piece was.
    """
    found = {}
    cofactor = mpz(1)
    rejected = []
    for f in pieces:
        for p, e in f.factors:
            found[p] = found.get(p, 0) + e
        cofactor *= f.cofactor
        rejected.extend(f.rejected_hints)
    return Factorization(value, tuple(sorted(found.items())),
                         complete=cofactor == 1, cofactor=int(cofactor),
                         rejected_hints=tuple(dict.fromkeys(rejected)))


def factor_group_order(p, k, n, hints=None, budget=DEFAULT_BUDGET):
    """Factorization of p^(k*n) - 1, assembled piecewise from the values
    of the d-th cyclotomic polynomials at p over all d | k*n.

    Hints apply to any piece they divide.  Incompleteness of any piece
    propagates to the merged result.
    """
    if p < 3 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    pieces = []
    for d in divisors_of(k * n):
        piece = cyclotomic_eval(d, p)
        piece_hints = [h for h in (hints or []) if h and piece % int(h) == 0]
        pieces.append(factorize(piece, hints=piece_hints, budget=budget))
    return merge_factorizations(p ** (k * n) - 1, pieces)


# -- hint files --------------------------------------------------------

def parse_hint_file(path):
    """Read a factor-hint file.

    Format: one entry per line, `p^k n : f1,f2,...` claiming the listed
    integers are prime factors of p^(k*n)-1.  `#` starts a comment.
    Returns (hints, problems) where hints maps (p, k, n) -> [factors]
    and problems is a list of (line_number, reason) for skipped lines.
    """
    hints = {}
    problems = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                head, tail = line.split(":", 1)
                base, nstr = head.split()
                if "^" in base:
                    pstr, kstr = base.split("^")
                else:
                    pstr, kstr = base, "1"
                key = (int(pstr), int(kstr), int(nstr))
                factors = [int(tok) for tok in tail.replace(",", " ").split()]
                if not factors:
                    raise ValueError("no factors listed")
            except ValueError as exc:
                problems.append((lineno, str(exc)))
                continue
            hints.setdefault(key, []).extend(factors)
    return hints, problems


def hints_for(hints, p, k, n):
    """All hinted factors applicable to p^(k*n)-1: any entry whose own
    (p, k', n') divides the requested extension contributes, since
    p^d - 1 | p^(kn) - 1 whenever d | kn."""
    out = []
    if not hints:
        return out
    for (hp, hk, hn), factors in hints.items():
        if hp == p and (k * n) % (hk * hn) == 0:
            out.extend(factors)
    return list(dict.fromkeys(out))


# -- explicit W(m) bounds ---------------------------------------------

def squarefree_bound_const(r, first=None, prec=256):
    """Upper bound on the worst-case constant C(r) with W(m) < C * m^(1/r).

    C(r) is the product of 2 / p^(1/r) over the primes p that may divide
    m; the worst case takes every prime below 2^r (the terms with
    p >= 2^r are < 1).  Computed with outward-rounded interval
    arithmetic so the returned float is a true upper bound.

    first: optionally restrict the product to the first `first` primes
    instead of all primes below 2^r.
    """
    import mpmath
    r = Fraction(r) if not isinstance(r, Fraction) else r
    if r <= 0:
        raise ValueError("r must be positive")
    iv = mpmath.iv
    old = iv.prec
    iv.prec = prec
    try:
        inv_r = iv.mpf(r.denominator) / iv.mpf(r.numerator)
        if first is not None:
            primes = first_primes(first)
        else:
            # primes strictly below 2^r
            limit_bits = Fraction(r)
            primes = []
            for p in small_primes():
                # p < 2^r  <=>  r*log2(p) ... compare exactly: p^den < 2^num
                if mpz(p) ** limit_bits.denominator < mpz(2) ** limit_bits.numerator:
                    primes.append(p)
                else:
                    break
        prod = iv.mpf(1)
        for p in primes:
            prod *= iv.mpf(2) / (iv.mpf(p) ** inv_r)
        return float(mpmath.mpf(prod.b))  # upper endpoint
    finally:
        iv.prec = old


def verify_omega_threshold():
    """Recompute the constants behind the square-free bound
    W(M) < M^(1/13) for any M with at least 2828 distinct prime factors.

    Every comparison is done on exact integers; the report carries the
    booleans and the quantities themselves (as log10 floats for
    display).  Mismatches are reported, not asserted.
    """
    primes = first_primes(2829)
    head, extra = primes[:2828], primes[2828]
    primorial = mpz(1)
    for p in head:
        primorial *= p

    # product of the first 2828 primes surpasses 2.24e11067
    prim_ok = primorial > mpz(224) * mpz(10) ** 11065
    # the 2828th prime
    last_ok = head[-1] == 25673
    # M1^(1/13) > 2.16e851  <=>  M1 > (2.16e851)^13 for the minimal M1
    root_ok = primorial > (mpz(216) * mpz(10) ** 849) ** 13
    # W(M1) = 2^2828 < 2.06e851
    w_ok = mpz(2) ** 2828 < mpz(206) * mpz(10) ** 849
    # the next prime has p^(1/13) > 2, i.e. p > 2^13
    next_ok = extra == 25679 and mpz(extra) ** 1 > mpz(2) ** 13

    return {
        "primorial_log10": float(gmpy2.log10(primorial)),
        "primorial_exceeds_2.24e11067": bool(prim_ok),
        "prime_2828": int(head[-1]),
        "prime_2828_is_25673": bool(last_ok),
        "thirteenth_root_exceeds_2.16e851": bool(root_ok),
        "w_value_log10": float(2828 * math.log10(2)),
        "w_below_2.06e851": bool(w_ok),
        "next_prime": int(extra),
        "next_prime_thirteenth_root_exceeds_2": bool(next_ok),
        "ok": bool(prim_ok and last_ok and root_ok and w_ok and next_ok),
    }


if __name__ == "__main__":  # pragma: no cover
    import doctest
    doctest.testmod()
