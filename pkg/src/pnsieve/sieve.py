"""Exact checkers for the three sufficient-condition inequalities.

Three criteria certify that every admissible rational function of total
degree m admits a primitive normal pair with the prescribed trace and
subtrace over F_{q^n}:

* basic          -- q^(n/2-2) > 2m W(q^n-1)^2 W(L) W(x^n-1)
* prime_sieve    -- q^(n/2-2) > 2m W(l)^2 W(g) W(g') M with the sieve
                    quantities S and M from a kept/sieved split
* modified_sieve -- the three-way-partition refinement with tail terms
                    gamma_1..gamma_3

Every verdict is produced by exact rational arithmetic: both sides are
squared (or the inequality is rearranged so the only irrational factor
is sqrt(q^n), then squared with the sign analysed), so no verdict ever
depends on rounding.  Margins are reported as float log10 intervals for
human consumption only.

Failure of a criterion certifies nothing; "fails" verdicts mean only
that this sufficient condition did not apply.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .ntheory import Factorization, squarefree_bound_const

VERDICT_HOLDS = "holds"
VERDICT_FAILS = "fails"
VERDICT_INDETERMINATE = "indeterminate"
VERDICT_INAPPLICABLE = "inapplicable"

#: cap on the number of keep-prefix sizes enumerated by search_choice
SEARCH_PREFIX_CAP = 64


@dataclass(frozen=True)
class SieveChoice:
    """A kept/sieved split for the prime-sieve criterion.

    kept_l is the factorization of l (a squarefree divisor of q^n-1);
    kept_g / kept_gp are degree multisets of the kept irreducible
    factors of L and of x^n-1.  The sieved lists hold what was removed:
    primes, and factor degrees.
    """
    kept_l: Factorization
    kept_g: tuple
    kept_gp: tuple
    sieved_primes: tuple
    sieved_g: tuple
    sieved_gp: tuple

    @property
    def r(self):
        return len(self.sieved_primes)

    @property
    def s(self):
        return len(self.sieved_g)

    @property
    def t(self):
        return len(self.sieved_gp)

    @property
    def w_l(self):
        return 1 << len(self.kept_l.factors)

    @property
    def w_g(self):
        return 1 << len(self.kept_g)

    @property
    def w_gp(self):
        return 1 << len(self.kept_gp)


@dataclass(frozen=True)
class SieveReport:
    criterion: str
    verdict: str
    S: object = None        # Fraction or None
    M: object = None        # Fraction or None
    margin: tuple = None    # (lo, hi) of log10(LHS) - log10(RHS)
    notes: tuple = ()

    @property
    def holds(self):
        return self.verdict == VERDICT_HOLDS


@dataclass(frozen=True)
class ModifiedPartition:
    """Three-way splits for the modified sieve.

    Multiplicative: rad(q^n-1) = (kept primes) * (mid primes p_1..p_r)
    * (tail primes t_1..t_v).  Additive, by degree multisets: rad(L) =
    kept_g * mid_g (s terms) * tail_g (w terms); rad(x^n-1) = kept_gp *
    mid_gp (t terms) * tail_gp (u terms).
    """
    kept_primes: tuple
    mid_primes: tuple
    tail_primes: tuple
    kept_g: tuple
    mid_g: tuple
    tail_g: tuple
    kept_gp: tuple
    mid_gp: tuple
    tail_gp: tuple

    @property
    def r(self):
        return len(self.mid_primes)

    @property
    def v(self):
        return len(self.tail_primes)

    @property
    def s(self):
        return len(self.mid_g)

    @property
    def w(self):
        return len(self.tail_g)

    @property
    def t(self):
        return len(self.mid_gp)

    @property
    def u(self):
        return len(self.tail_gp)

    def gammas(self, q):
        """(gamma_1, gamma_2, gamma_3): tail sums 1/t_i, 1/q^deg over the
        tail of x^n-1, and 1/q^deg over the tail of L."""
        g1 = sum((Fraction(1, p) for p in self.tail_primes), Fraction(0))
        g2 = sum((Fraction(1, q ** d) for d in self.tail_gp), Fraction(0))
        g3 = sum((Fraction(1, q ** d) for d in self.tail_g), Fraction(0))
        return g1, g2, g3


def _log10_interval(lhs_log10, rhs_log10):
    """Outward-rounded float interval for lhs_log10 - rhs_log10, both
    mpmath.iv values."""
    diff = lhs_log10 - rhs_log10
    return (float(mpmath.mpf(diff.a)), float(mpmath.mpf(diff.b)))


def _half_power_margin(q, n_half_exponent, rhs_fraction):
    """log10(q^(n_half_exponent/2)) - log10(rhs) as a float interval."""
    iv = mpmath.iv
    old = iv.prec
    iv.prec = 80
    try:
        lhs = iv.mpf(n_half_exponent) / 2 * iv.log(iv.mpf(q)) / iv.log(iv.mpf(10))
        if rhs_fraction <= 0:
            return (float("inf"), float("inf"))
        rhs = (iv.log(iv.mpf(rhs_fraction.numerator))
               - iv.log(iv.mpf(rhs_fraction.denominator))) / iv.log(iv.mpf(10))
        return _log10_interval(lhs, rhs)
    finally:
        iv.prec = old


def _compare_halfpower(q, n4_exponent, rhs):
    """Exact verdict of q^(n4_exponent/2) > rhs for rational rhs > 0:
    square both sides."""
    if rhs <= 0:
        return True
    return Fraction(q) ** n4_exponent > rhs * rhs


def check_basic(q, n, m, W_qn, W_L, W_xn):
    """Basic criterion: q^(n/2-2) > 2m W(q^n-1)^2 W(L) W(x^n-1).

    Any W passed as None (factorization incomplete) yields an
    indeterminate verdict, never "fails".
    """
    if n < 5:
        raise ValueError("criteria require n >= 5")
    if any(w is None for w in (W_qn, W_L, W_xn)):
        return SieveReport(criterion="basic", verdict=VERDICT_INDETERMINATE,
                           notes=("W-value unavailable: factorization incomplete",))
    rhs = Fraction(2 * m * W_qn * W_qn * W_L * W_xn)
    holds = _compare_halfpower(q, n - 4, rhs)
    return SieveReport(
        criterion="basic",
        verdict=VERDICT_HOLDS if holds else VERDICT_FAILS,
        margin=_half_power_margin(q, n - 4, rhs))


def prime_sieve_quantities(choice, q):
    """Exact (S, M) for a sieve choice.  S <= 0 makes the criterion
    inapplicable; M is then None."""
    S = Fraction(1)
    for p in choice.sieved_primes:
        S -= Fraction(2, p)
    for d in choice.sieved_g:
        S -= Fraction(1, q ** d)
    for d in choice.sieved_gp:
        S -= Fraction(1, q ** d)
    if S <= 0:
        return S, None
    M = Fraction(2 * choice.r + choice.s + choice.t - 1, 1) / S + 2
    return S, M


def check_prime_sieve(choice, q, n, m):
    """Sieve criterion: q^(n/2-2) > 2m W(l)^2 W(g) W(g') M."""
    if n < 5:
        raise ValueError("criteria require n >= 5")
    S, M = prime_sieve_quantities(choice, q)
    if M is None:
        return SieveReport(criterion="prime_sieve", verdict=VERDICT_INAPPLICABLE,
                           S=S, notes=("S <= 0: sieve inequality inapplicable",))
    rhs = 2 * m * choice.w_l ** 2 * choice.w_g * choice.w_gp * M
    holds = _compare_halfpower(q, n - 4, rhs)
    return SieveReport(
        criterion="prime_sieve",
        verdict=VERDICT_HOLDS if holds else VERDICT_FAILS,
        S=S, M=M, margin=_half_power_margin(q, n - 4, rhs))


def _l_part_degrees(profile):
    degs = list(profile.degree_profile)
    degs.remove(1)
    return degs


def search_choice(q, n, m, profile, group_fact):
    """Bounded deterministic search for a certifying sieve choice.

    Primes of q^n-1 ascending; keep-prefix sizes 0..min(#primes, 63).
    Factors of L and of x^n-1 ordered by degree; kept sets are all
    factors with degree <= a threshold, thresholds ranging over 0 and
    each distinct degree.  Among certifying choices the one with the
    smallest exact RHS wins, ties broken by (prefix, threshold,
    threshold).  Returns None when nothing certifies.
    """
    group_fact = group_fact.require_complete()
    primes = [p for p, _ in group_fact.factors]
    l_degs = sorted(_l_part_degrees(profile))
    x_degs = sorted(profile.degree_profile)

    best = None
    best_key = None
    prefix_sizes = range(0, min(len(primes), SEARCH_PREFIX_CAP - 1) + 1)
    g_thresholds = [0] + sorted(set(l_degs))
    gp_thresholds = [0] + sorted(set(x_degs))
    for i in prefix_sizes:
        kept_pr = primes[:i]
        sieved_pr = tuple(primes[i:])
        kept_l = Factorization(
            value=_prod(kept_pr), factors=tuple((p, 1) for p in kept_pr))
        for dg in g_thresholds:
            kept_g = tuple(d for d in l_degs if d <= dg)
            sieved_g = tuple(d for d in l_degs if d > dg)
            for dgp in gp_thresholds:
                kept_gp = tuple(d for d in x_degs if d <= dgp)
                sieved_gp = tuple(d for d in x_degs if d > dgp)
                choice = SieveChoice(kept_l=kept_l, kept_g=kept_g,
                                     kept_gp=kept_gp,
                                     sieved_primes=sieved_pr,
                                     sieved_g=sieved_g, sieved_gp=sieved_gp)
                S, M = prime_sieve_quantities(choice, q)
                if M is None:
                    continue
                rhs = 2 * m * choice.w_l ** 2 * choice.w_g * choice.w_gp * M
                if not _compare_halfpower(q, n - 4, rhs):
                    continue
                key = (rhs, i, dg, dgp)
                if best_key is None or key < best_key:
                    best, best_key = choice, key
    return best


def _prod(xs):
    out = 1
    for x in xs:
        out *= x
    return out


def check_modified_sieve(partition, q, n, m, corrected=False):
    """Modified sieve criterion over a three-way partition.

    The displayed inequality is evaluated as printed.  The printed
    denominator applies the lowercase density functional to the kept
    part of x^n-1, which is only defined for integer arguments; the one
    computable reading uses the polynomial density (the same functional
    as in the positivity hypothesis), so the printed and corrected forms
    coincide -- both verdicts are reported.

    The only irrational factor, q^(n/2), is isolated on one side and
    both sides are squared with sign analysis, so the verdict is exact.
    """
    if n < 5:
        raise ValueError("criteria require n >= 5")
    g1, g2, g3 = partition.gammas(q)
    r, s, t = partition.r, partition.s, partition.t
    v, w, u = partition.v, partition.w, partition.u

    S = Fraction(1)
    for p in partition.mid_primes:
        S -= Fraction(2, p)
    for d in partition.mid_g:
        S -= Fraction(1, q ** d)
    for d in partition.mid_gp:
        S -= Fraction(1, q ** d)

    theta_k = _prod_frac(Fraction(p - 1, p) for p in partition.kept_primes)
    Theta_g = _prod_frac(Fraction(q ** d - 1, q ** d) for d in partition.kept_g)
    Theta_gp = _prod_frac(Fraction(q ** d - 1, q ** d) for d in partition.kept_gp)
    W_k = 1 << len(partition.kept_primes)
    W_g = 1 << len(partition.kept_g)
    W_gp = 1 << len(partition.kept_gp)

    delta = S * theta_k ** 2 * Theta_g * Theta_gp - (2 * g1 + g2 + g3)
    notes = ("denominator's lowercase density on the kept part of x^n-1 "
             "read as the polynomial density; printed and corrected "
             "variants coincide",
             "tail-term pairing of the (m+1)(...) group kept as printed")
    if delta <= 0:
        return SieveReport(criterion="modified_sieve",
                           verdict=VERDICT_INAPPLICABLE, S=S,
                           notes=notes + ("positivity hypothesis fails",))

    A = (theta_k ** 2 * Theta_g * Theta_gp * W_k ** 2 * W_g * W_gp
         * (2 * r + s + t + 2 * S - 1))
    B = (Fraction(v) - g1 + 2 * u - 2 * g2) / 2 \
        + (Fraction(3 * v) - g1 + w + u) / (2 * m)
    Cterm = (m + 1) * (Fraction(v) + g1 + w + g2) + (u - g2)

    # q^(n/2-2) > 2m (A+B)/delta + Cterm/(delta q^(n/2))
    # <=>  delta q^(n-2) - Cterm > 2m (A+B) q^(n/2)
    L0 = delta * Fraction(q) ** (n - 2) - Cterm
    c = 2 * m * (A + B)
    if c >= 0:
        holds = L0 > 0 and L0 * L0 > c * c * Fraction(q) ** n
    else:
        holds = L0 >= 0 or L0 * L0 < c * c * Fraction(q) ** n

    rhs_for_margin = 2 * m * (A + B) / delta  # dominant part, for display
    margin = _half_power_margin(q, n - 4, rhs_for_margin) \
        if rhs_for_margin > 0 else (float("inf"), float("inf"))
    verdict = VERDICT_HOLDS if holds else VERDICT_FAILS
    if corrected:
        notes = notes + ("corrected-variant verdict: " + verdict,)
    return SieveReport(criterion="modified_sieve", verdict=verdict,
                       S=S, margin=margin, notes=notes)


def _prod_frac(fracs):
    out = Fraction(1)
    for f in fracs:
        out *= f
    return out


def enumerate_modified_partitions(q, n, profile, group_fact,
                                  max_prefix=8, max_tail=4):
    """Deterministic bounded generator of three-way partitions: kept
    parts are ascending-prime / ascending-degree prefixes, tails are
    descending suffixes, bounded in size."""
    group_fact = group_fact.require_complete()
    primes = [p for p, _ in group_fact.factors]
    l_degs = sorted(_l_part_degrees(profile))
    x_degs = sorted(profile.degree_profile)
    np_, ng, ngp = len(primes), len(l_degs), len(x_degs)
    for i in range(0, min(np_, max_prefix) + 1):
        for vtail in range(0, min(np_ - i, max_tail) + 1):
            for jg in range(0, min(ng, max_prefix) + 1):
                for wtail in range(0, min(ng - jg, max_tail) + 1):
                    for jgp in range(0, min(ngp, max_prefix) + 1):
                        for utail in range(0, min(ngp - jgp, max_tail) + 1):
                            yield ModifiedPartition(
                                kept_primes=tuple(primes[:i]),
                                mid_primes=tuple(primes[i:np_ - vtail]),
                                tail_primes=tuple(primes[np_ - vtail:]),
                                kept_g=tuple(l_degs[:jg]),
                                mid_g=tuple(l_degs[jg:ng - wtail]),
                                tail_g=tuple(l_degs[ng - wtail:]),
                                kept_gp=tuple(x_degs[:jgp]),
                                mid_gp=tuple(x_degs[jgp:ngp - utail]),
                                tail_gp=tuple(x_degs[ngp - utail:]))


def search_modified(q, n, m, profile, group_fact, corrected=False,
                    max_prefix=8, max_tail=4):
    """First certifying modified partition in deterministic order, or
    None when the bounded enumeration certifies nothing."""
    for part in enumerate_modified_partitions(q, n, profile, group_fact,
                                              max_prefix=max_prefix,
                                              max_tail=max_tail):
        rep = check_modified_sieve(part, q, n, m, corrected=corrected)
        if rep.holds:
            return part, rep
    return None


def asymptotic_n_threshold(k, r, m=2, base=7, cap=2000, window=50):
    """Smallest n >= 5 such that the squarefree-bound criterion
    q^(n/2-2) > 2m C(r)^2 q^(2n/r) 2^(2n-1), q = base^k, holds at n and
    at every n up to n + window.  None when no such n <= cap exists.
    """
    r = Fraction(r)
    C = Fraction(squarefree_bound_const(r))
    rhs_const = 2 * m * C * C

    def holds(n):
        e = Fraction(n, 2) - 2 - Fraction(2 * n, 1) / r
        rhs = rhs_const * Fraction(2) ** (2 * n - 1)
        return Fraction(base ** k) ** e.numerator > rhs ** e.denominator

    run = 0  # consecutive holds ending at the last checked n
    for n in range(5, cap + window + 2):
        if holds(n):
            run += 1
            if run >= window + 1:
                return n - window
        else:
            run = 0
    return None
