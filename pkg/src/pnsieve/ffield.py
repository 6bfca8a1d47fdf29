"""Extension fields F_{p^{kn}} with a distinguished subfield F_q, q = p^k.

A FieldCtx bundles everything the rest of the engine needs to compute in
the big field: the canonical modulus (lex-smallest monic irreducible of
degree kn over F_p), the embedding of the canonical F_q model from
:mod:`pnsieve.gfq` (via q_embed, a deterministically chosen root of the
degree-k canonical polynomial inside the big field), the factorization
of the unit group order, and scalar arithmetic on FFElem values.

Everything here is scalar reference code; batch kernels over numpy
arrays live in :mod:`pnsieve._kernels` and are tied against these
routines in the tests.

Only odd characteristic is supported: the subtrace identity divides by
2, and the deterministic root splitting used for q_embed raises to the
power (Q-1)/2.
"""

import numpy as np

from . import gfq as _g
from .gfq import GFq
from .ntheory import factor_group_order, is_prime


class FFElem:
    """Element of a FieldCtx: little-endian coefficient tuple mod p."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx, coeffs):
        self.ctx = ctx
        self.coeffs = coeffs

    def __add__(self, other):
        return self.ctx.add(self, other)

    def __sub__(self, other):
        return self.ctx.sub(self, other)

    def __neg__(self):
        return self.ctx.neg(self)

    def __mul__(self, other):
        return self.ctx.mul(self, other)

    def __truediv__(self, other):
        return self.ctx.mul(self, self.ctx.inv(other))

    def __pow__(self, e):
        return self.ctx.pow(self, e)

    def __eq__(self, other):
        return isinstance(other, FFElem) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return _g.format_elem(self.coeffs)


class FieldCtx:
    """Computation context for F_{p^{kn}} over the subfield F_{p^k}."""

    def __init__(self, p, k, n, hints=None, limit=None):
        if p == 2 or not is_prime(p):
            raise ValueError("characteristic must be an odd prime, got %r" % (p,))
        if k < 1 or n < 1:
            raise ValueError("need k >= 1 and n >= 1")
        if limit is not None and p ** (k * n) > limit:
            raise ValueError("size limit exceeded: p^(k*n) = %d > %d"
                             % (p ** (k * n), limit))
        self.p = p
        self.k = k
        self.n = n
        self.q = p ** k
        self.D = k * n
        self.Q = p ** self.D
        self.modulus = _g.canonical_irreducible(p, self.D)
        self.gfq = GFq(p, k)
        self.group_order_fact = factor_group_order(p, k, n, hints=hints)
        self.zero = FFElem(self, (0,) * self.D)
        self.one = FFElem(self, ((1,) + (0,) * (self.D - 1)))
        self._frob_cache = {}
        self.q_embed = self._find_q_embed()
        self._embed_pows = [self.one]
        for _ in range(1, k):
            self._embed_pows.append(self.mul(self._embed_pows[-1], self.q_embed))
        self._subfield_solver = self._build_subfield_solver()

    # -- construction helpers ------------------------------------------

    def from_coeffs(self, coeffs):
        coeffs = list(coeffs)
        if len(coeffs) > self.D:
            raise ValueError("coefficient vector longer than field degree")
        coeffs = coeffs + [0] * (self.D - len(coeffs))
        return FFElem(self, tuple(c % self.p for c in coeffs))

    def from_int(self, c):
        return self.from_coeffs([c])

    def parse(self, text):
        return self.from_coeffs(_g.parse_elem(text))

    def elements(self):
        """All Q elements, constant coefficient varying fastest."""
        for idx in range(self.Q):
            t = idx
            vec = []
            for _ in range(self.D):
                vec.append(t % self.p)
                t //= self.p
            yield FFElem(self, tuple(vec))

    # -- field protocol (shared with GFq / generic poly helpers) -------

    def add(self, a, b):
        return FFElem(self, tuple((x + y) % self.p
                                  for x, y in zip(a.coeffs, b.coeffs)))

    def sub(self, a, b):
        return FFElem(self, tuple((x - y) % self.p
                                  for x, y in zip(a.coeffs, b.coeffs)))

    def neg(self, a):
        return FFElem(self, tuple((-x) % self.p for x in a.coeffs))

    def mul(self, a, b):
        prod = _g.fp_mul(list(a.coeffs), list(b.coeffs), self.p)
        rem = _g.fp_divmod(prod, self.modulus, self.p)[1]
        rem = rem + [0] * (self.D - len(rem))
        return FFElem(self, tuple(rem))

    def is_zero(self, a):
        return all(x == 0 for x in a.coeffs)

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError("inverse of zero")
        return self.pow(a, self.Q - 2)

    def pow(self, a, e):
        e = int(e)
        if e < 0:
            return self.pow(self.inv(a), -e)
        result = self.one
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    # -- Frobenius, traces, subtrace -----------------------------------

    def frobenius_q(self, a, power=1):
        """a^(q^power), via the cached F_p-linear Frobenius matrix."""
        M = self.frobenius_matrix(power)
        vec = (M @ np.array(a.coeffs, dtype=np.int64)) % self.p
        return FFElem(self, tuple(int(v) for v in vec))

    def frobenius_matrix(self, power=1):
        """D x D int64 matrix M with (M @ coeffs) % p = coeffs of a^(q^power)."""
        power = power % self.n
        if power not in self._frob_cache:
            cols = []
            for j in range(self.D):
                mono = self.from_coeffs([0] * j + [1])
                img = self.pow(mono, self.q ** power)
                cols.append(img.coeffs)
            self._frob_cache[power] = np.array(cols, dtype=np.int64).T
        return self._frob_cache[power]

    def mul_matrix(self, a):
        """D x D matrix of multiplication by a, acting on coefficient vectors."""
        cols = []
        for j in range(self.D):
            mono = self.from_coeffs([0] * j + [1])
            cols.append(self.mul(a, mono).coeffs)
        return np.array(cols, dtype=np.int64).T

    def conjugates(self, a):
        """[a, a^q, a^(q^2), ..., a^(q^(n-1))]."""
        out = [a]
        cur = a
        for _ in range(self.n - 1):
            cur = self.frobenius_q(cur)
            out.append(cur)
        return out

    def abs_trace(self, a):
        """Absolute trace down to F_p, as an int in [0, p)."""
        acc = a
        cur = a
        for _ in range(self.D - 1):
            cur = self.pow(cur, self.p)
            acc = self.add(acc, cur)
        assert all(c == 0 for c in acc.coeffs[1:]), "absolute trace not in F_p"
        return acc.coeffs[0]

    # -- subfield transport --------------------------------------------

    def _find_q_embed(self):
        """Deterministic root in the big field of the canonical degree-k
        irreducible over F_p: split to linear factors with gcds against
        (y+a)^((Q-1)/2) - 1 over a fixed low-lex sequence of a, then take
        the lex-smallest root."""
        mk = _g.canonical_irreducible(self.p, self.k)
        f = [self.from_int(c) for c in mk]
        roots = self._split_to_roots(f)
        return min(roots, key=lambda e: e.coeffs)

    def _lex_sequence(self):
        # ascending lex order on coefficient tuples: c0 most significant
        for idx in range(self.Q):
            vec = []
            t = idx
            for pos in range(self.D - 1, -1, -1):
                vec.append(t // self.p ** pos)
                t %= self.p ** pos
            yield self.from_coeffs(vec)

    def _split_to_roots(self, f):
        f = _g.poly_monic(self, _g.poly_trim(self, list(f)))
        if len(f) == 2:
            return [self.neg(f[0])]
        half = (self.Q - 1) // 2
        for a in self._lex_sequence():
            h = _g.poly_pow_mod(self, [a, self.one], half, f)
            h = _g.poly_sub(self, h, [self.one])
            g = _g.poly_gcd(self, h, f)
            if 0 < len(g) - 1 < len(f) - 1:
                other = _g.poly_divmod(self, f, g)[0]
                return self._split_to_roots(g) + self._split_to_roots(other)
        raise AssertionError("splitting sequence exhausted without a factor")

    def _build_subfield_solver(self):
        # Pick k independent columns of the k x D matrix whose rows are
        # the coefficient vectors of q_embed^i; invert that square block.
        B = [list(e.coeffs) for e in self._embed_pows]
        pivots = []
        rref = [row[:] for row in B]
        r = 0
        for col in range(self.D):
            piv = next((i for i in range(r, self.k) if rref[i][col] % self.p), None)
            if piv is None:
                continue
            rref[r], rref[piv] = rref[piv], rref[r]
            inv = pow(rref[r][col], -1, self.p)
            rref[r] = [v * inv % self.p for v in rref[r]]
            for i in range(self.k):
                if i != r and rref[i][col]:
                    c = rref[i][col]
                    rref[i] = [(a - c * b) % self.p for a, b in zip(rref[i], rref[r])]
            pivots.append(col)
            r += 1
            if r == self.k:
                break
        assert r == self.k, "embedding powers are dependent"
        block = [[B[i][j] for j in pivots] for i in range(self.k)]
        return pivots, _fp_mat_inv(block, self.p)

    def from_subfield(self, tup):
        """Embed a GFq tuple (or plain int) into the big field."""
        if isinstance(tup, int):
            return self.from_int(tup)
        acc = self.zero
        for c, pw in zip(tup, self._embed_pows):
            if c % self.p:
                acc = self.add(acc, FFElem(self, tuple(c * x % self.p
                                                       for x in pw.coeffs)))
        return acc

    def to_subfield(self, a):
        """Express a (which must lie in the embedded F_q) as a GFq tuple."""
        pivots, inv_block = self._subfield_solver
        w = [a.coeffs[j] for j in pivots]
        c = tuple(sum(w[j] * inv_block[j][i] for j in range(self.k)) % self.p
                  for i in range(self.k))
        if self.from_subfield(c) != a:
            raise ValueError("%r is not in the embedded subfield" % (a,))
        return c

    def in_subfield(self, a):
        return self.frobenius_q(a) == a


def build_field(p, k, n, hints=None, limit=None):
    """Construct the computation context for F_{p^{kn}} / F_{p^k}."""
    return FieldCtx(p, k, n, hints=hints, limit=limit)


def _fp_mat_inv(mat, p):
    k = len(mat)
    aug = [list(row) + [int(i == j) for j in range(k)] for i, row in enumerate(mat)]
    for col in range(k):
        piv = next(i for i in range(col, k) if aug[i][col] % p)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = pow(aug[col][col], -1, p)
        aug[col] = [v * inv % p for v in aug[col]]
        for i in range(k):
            if i != col and aug[i][col]:
                c = aug[i][col]
                aug[i] = [(a - c * b) % p for a, b in zip(aug[i], aug[col])]
    return [row[k:] for row in aug]


# -- traces and subtrace ------------------------------------------------

def rel_trace(ctx, a):
    """Trace from F_{q^n} down to F_q, returned as a GFq tuple."""
    conj = ctx.conjugates(a)
    acc = conj[0]
    for c in conj[1:]:
        acc = ctx.add(acc, c)
    return ctx.to_subfield(acc)


def subtrace_direct(ctx, a):
    """Sum of a^(q^i + q^j) over 0 <= i < j < n, as a GFq tuple."""
    conj = ctx.conjugates(a)
    acc = ctx.zero
    for i in range(ctx.n):
        for j in range(i + 1, ctx.n):
            acc = ctx.add(acc, ctx.mul(conj[i], conj[j]))
    return ctx.to_subfield(acc)


def subtrace_identity(ctx, a):
    """Same value via (Tr(a)^2 - Tr(a^2)) / 2 computed in F_q."""
    if ctx.p == 2:
        raise ValueError("subtrace identity needs odd characteristic")
    F = ctx.gfq
    t = rel_trace(ctx, a)
    t2 = rel_trace(ctx, ctx.mul(a, a))
    inv2 = pow(2, -1, ctx.p)
    return F.mul_int(F.sub(F.mul(t, t), t2), inv2)


def minimal_poly(ctx, a):
    """Monic minimal polynomial of a over F_q, as a list of GFq tuples."""
    conj = [a]
    cur = ctx.frobenius_q(a)
    while cur != a:
        conj.append(cur)
        cur = ctx.frobenius_q(cur)
    poly = [ctx.one]
    for c in conj:
        poly = _g.poly_mul(ctx, poly, [ctx.neg(c), ctx.one])
    return [ctx.to_subfield(coef) for coef in poly]


def char_poly(ctx, a):
    """Degree-n characteristic polynomial of a over F_q (minpoly to the
    power n/deg), as GFq tuples.  Its x^(n-2) coefficient equals the
    subtrace."""
    mp = minimal_poly(ctx, a)
    d = len(mp) - 1
    reps = ctx.n // d
    F = ctx.gfq
    out = [F.one]
    for _ in range(reps):
        out = _g.poly_mul(F, out, mp)
    return out


# -- multiplicative structure -------------------------------------------

def element_order(ctx, a):
    """Exact multiplicative order; needs the unit group order fully
    factored."""
    if ctx.is_zero(a):
        raise ValueError("zero has no multiplicative order")
    fact = ctx.group_order_fact.require_complete()
    o = fact.value
    for prime, mult in fact.factors:
        for _ in range(mult):
            if o % prime == 0 and ctx.pow(a, o // prime) == ctx.one:
                o //= prime
            else:
                break
    return o


def is_l_free(ctx, a, l):
    """True when a is l-free: no prime divisor d of l has a a d-th power.

    Equivalent test: a^((Q-1)/d) != 1 for every prime d | l.
    """
    if ctx.is_zero(a):
        return False
    l = int(l)
    if l == 0 or (ctx.Q - 1) % l:
        raise ValueError("l must be a positive divisor of the group order")
    d = 2
    rest = l
    primes = []
    while d * d <= rest:
        if rest % d == 0:
            primes.append(d)
            while rest % d == 0:
                rest //= d
        d += 1
    if rest > 1:
        primes.append(rest)
    for d in primes:
        if ctx.pow(a, (ctx.Q - 1) // d) == ctx.one:
            return False
    return True


# -- additive (q-polynomial) structure ----------------------------------

def poly_action(ctx, f, a):
    """Apply the q-polynomial of f: (sum f_i x^i) o a = sum f_i a^(q^i).

    Coefficients f_i may be GFq tuples or plain ints.
    """
    acc = ctx.zero
    cur = a
    for i, c in enumerate(f):
        if i:
            cur = ctx.frobenius_q(cur)
        hat = ctx.from_subfield(c)
        if not ctx.is_zero(hat):
            acc = ctx.add(acc, ctx.mul(hat, cur))
    return acc


def is_g_free(ctx, a, g_factors):
    """True when a is g-free, g given by its distinct irreducible factors
    over F_q (lists of GFq tuples): for each factor h, the q-polynomial
    (x^n - 1)/h must not annihilate a."""
    F = ctx.gfq
    xn1 = _g.poly_xn_minus_1(F, ctx.n)
    for h in g_factors:
        quo, rem = _g.poly_divmod(F, xn1, h)
        if rem:
            raise ValueError("factor %r does not divide x^n - 1" % (h,))
        if ctx.is_zero(poly_action(ctx, quo, a)):
            return False
    return True


def is_normal(ctx, a):
    """Normality via the gcd criterion: a is normal over F_q iff
    gcd(x^n - 1, sum_i a^(q^i) x^i) = 1 in F_{q^n}[x]."""
    conj = ctx.conjugates(a)
    L = _g.poly_trim(ctx, list(conj))
    xn1 = _g.poly_xn_minus_1(ctx, ctx.n)
    return len(_g.poly_gcd(ctx, xn1, L)) == 1


def is_normal_via_factors(ctx, a, xn1_factors):
    """Normality as (x^n - 1)-freeness, given the distinct irreducible
    factors of x^n - 1 over F_q.  Cross-check route for is_normal.

    When p | n the factors repeat in x^n - 1; only one copy of each is
    removed per test, which is the correct criterion either way.
    """
    F = ctx.gfq
    xn1 = _g.poly_xn_minus_1(F, ctx.n)
    for h in xn1_factors:
        quo, rem = _g.poly_divmod(F, xn1, h)
        if rem:
            raise ValueError("factor %r does not divide x^n - 1" % (h,))
        if ctx.is_zero(poly_action(ctx, quo, a)):
            return False
    return True


# -- rational function evaluation ----------------------------------------

def eval_rational(ctx, num, den, a):
    """Evaluate (num/den)(a) with F_q coefficients; None marks a pole."""
    num_e = [ctx.from_subfield(c) for c in num]
    den_e = [ctx.from_subfield(c) for c in den]
    dval = _g.poly_eval(ctx, den_e, a)
    if ctx.is_zero(dval):
        return None
    nval = _g.poly_eval(ctx, num_e, a)
    return ctx.mul(nval, ctx.inv(dval))
