"""Brute-force ground truth on desk-scale fields.

Everything here recomputes the quantities the sieve bounds only
estimate: exhaustive counts of prescribed-subtrace pairs, witness
elements, the full nested character-sum formula for the count, the
characteristic-function identities behind it, Weil-type bound checks on
randomized instances, and the sieve decomposition inequality with
literal integer counts.

Multiplicative characters are realized through a full discrete-log
table (feasible at or below the cap of 10^6 elements), additive
characters through the absolute-trace phase table; both live in
CharacterTables.  The count and the formula are computed by genuinely
different routes - index arithmetic on one side, complex character sums
on the other - and FORMULA_TOL is the single knob that says how close
they must land.
"""

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import numpy as np

from . import _kernels as K
from . import gfq as _g
from .cyclofactor import coset_profile, explicit_factors, fq_is_irreducible
from .ffield import (FFElem, build_field, element_order, is_g_free,
                     is_l_free, is_normal, rel_trace, subtrace_direct,
                     subtrace_identity)
from .ntheory import factorize

ORACLE_CAP = 10 ** 6

# The one tolerance pair every formula-vs-count comparison goes through:
# real-part agreement and residual imaginary part.  Sums of ~10^6
# unit-modulus terms with compensated accumulation stay orders of
# magnitude below these.
FORMULA_TOL = 1e-4
IMAG_TOL = 1e-6

WITNESS_SCHEMA = "pnsieve.witness/1"


class OracleCapError(ValueError):
    """Field larger than the exhaustive-computation cap."""


def elem_index(ctx, e):
    """Pack an element's coefficient vector into its table index."""
    idx = 0
    for c in reversed(e.coeffs):
        idx = idx * ctx.p + c
    return idx


def elem_from_index(ctx, idx):
    vec = []
    for _ in range(ctx.D):
        vec.append(idx % ctx.p)
        idx //= ctx.p
    return FFElem(ctx, tuple(vec))


def fq_index(F, t):
    idx = 0
    for c in reversed(t):
        idx = idx * F.p + c
    return idx


class _BigFieldView:
    """Field-protocol adapter that reports the *extension* size as q, so
    the generic irreducibility test runs over F_{q^n} instead of F_q."""

    def __init__(self, ctx):
        self._ctx = ctx
        self.q = ctx.Q
        self.zero = ctx.zero
        self.one = ctx.one

    def __getattr__(self, name):
        return getattr(self._ctx, name)


# -- rational maps ---------------------------------------------------------

class RationalMap:
    """f = num/den with coefficients in the big field.

    The shape contract mirrors the admissible-map set of the existence
    problem: num and den coprime, each irreducible over the big field or
    a nonzero constant, degree pair (m1, m2) with degree sum m.
    """

    def __init__(self, ctx, num, den, label=None):
        self.ctx = ctx
        self.num = _g.poly_trim(ctx, list(num))
        self.den = _g.poly_trim(ctx, list(den))
        if not self.num or not self.den:
            raise ValueError("num and den must both be nonzero")
        self.m1 = len(self.num) - 1
        self.m2 = len(self.den) - 1
        self.m = self.m1 + self.m2
        self.label = label or self._format()
        self._tables = None

    @classmethod
    def from_int_coeffs(cls, ctx, num, den, label=None):
        return cls(ctx, [ctx.from_int(c) for c in num],
                   [ctx.from_int(c) for c in den], label=label)

    @classmethod
    def from_subfield_coeffs(cls, ctx, num, den, label=None):
        return cls(ctx, [ctx.from_subfield(c) for c in num],
                   [ctx.from_subfield(c) for c in den], label=label)

    def _format(self):
        def side(coeffs):
            ints = []
            for e in coeffs:
                if any(e.coeffs[1:]):
                    return "[" + ",".join(repr(c) for c in coeffs) + "]"
                ints.append(e.coeffs[0])
            return _g.format_poly(ints)
        top, bot = side(self.num), side(self.den)
        return top if bot == "1" else "(%s)/(%s)" % (top, bot)

    def shape_problems(self):
        """Contract violations as human-readable strings (empty = ok)."""
        ctx = self.ctx
        view = _BigFieldView(ctx)
        out = []
        if len(_g.poly_gcd(ctx, self.num, self.den)) != 1:
            out.append("num and den share a factor")
        for name, poly in (("num", self.num), ("den", self.den)):
            if len(poly) - 1 >= 1 and not fq_is_irreducible(view, poly):
                out.append("%s of degree %d is reducible over the big field"
                           % (name, len(poly) - 1))
        return out

    def value_tables(self, tabs):
        """(num_idx, den_idx, val_idx) over every element index.

        val_idx is 0 wherever num or den vanishes; callers mask those
        positions out as part of the excluded set.
        """
        if self._tables is None:
            nv = tabs.poly_value_table(self.num)
            dv = tabs.poly_value_table(self.den)
            ok = (nv != 0) & (dv != 0)
            val = np.zeros(tabs.Q, dtype=np.int64)
            diff = (tabs.dlog[nv[ok]] - tabs.dlog[dv[ok]]) % tabs.N
            val[ok] = tabs.pow_idx[diff]
            self._tables = (nv, dv, val)
        return self._tables

    def eval(self, e):
        """Scalar evaluation; None at a pole."""
        dval = _g.poly_eval(self.ctx, self.den, e)
        if self.ctx.is_zero(dval):
            return None
        nval = _g.poly_eval(self.ctx, self.num, e)
        return self.ctx.mul(nval, self.ctx.inv(dval))

    def json_dict(self):
        return {"num": [list(c.coeffs) for c in self.num],
                "den": [list(c.coeffs) for c in self.den],
                "label": self.label}

    def __repr__(self):
        return "RationalMap(%s)" % self.label


def standard_maps(ctx):
    """The representative maps used by the cross-checks, one per degree
    split (m1, m2) with m1 + m2 <= 2: x, 1/x, (x^2+c)/1, x/(x+c), and
    1/(x^2+c).  c is the first constant in element-index order making
    x^2+c irreducible over the big field (prime-field constants come
    first in that order); for x/(x+c) any nonzero c works and 1 is used.
    """
    c = _smallest_irreducible_shift(ctx)
    one = ctx.one
    quad = [c, ctx.zero, one]
    return [
        RationalMap(ctx, [ctx.zero, one], [one], label="x"),
        RationalMap(ctx, [one], [ctx.zero, one], label="1/x"),
        RationalMap(ctx, quad, [one]),
        RationalMap(ctx, [ctx.zero, one], [one, one], label="x/(x+1)"),
        RationalMap(ctx, [one], quad),
    ]


def _smallest_irreducible_shift(ctx):
    view = _BigFieldView(ctx)
    for c in ctx.elements():
        if ctx.is_zero(c):
            continue
        if fq_is_irreducible(view, [c, ctx.zero, ctx.one]):
            return c
    raise AssertionError("some monic quadratic x^2+c must be irreducible")


# -- character tables ------------------------------------------------------

class CharacterTables:
    """Discrete logs, additive phases, and derived whole-field tables.

    Built once per field and then read-only; the batch kernels in
    :mod:`pnsieve._kernels` fill the big arrays.  The generator is the
    first element, in ascending index order, whose multiplicative order
    is Q-1.
    """

    def __init__(self, ctx, cap=ORACLE_CAP):
        if ctx.Q > cap:
            raise OracleCapError("field has %d elements, above the "
                                 "exhaustive cap %d" % (ctx.Q, cap))
        self.ctx = ctx
        self.p = ctx.p
        self.Q = ctx.Q
        self.N = ctx.Q - 1
        self.fact = ctx.group_order_fact.require_complete()
        self.generator = self._find_generator()
        self.pow_idx, self.dlog = K.power_and_dlog(
            ctx.mul_matrix(self.generator), ctx.p, self.N)

        D = ctx.D
        enc1 = np.ones(1, dtype=np.int64)
        tr_row = np.array([[ctx.abs_trace(ctx.from_coeffs([0] * i + [1]))
                            for i in range(D)]], dtype=np.int64)
        self.phase = K.linear_index_table(tr_row, ctx.p, D, enc1)
        self.proots = np.exp(2j * np.pi * np.arange(ctx.p) / ctx.p)
        self.nroots = np.exp(2j * np.pi * np.arange(self.N) / self.N)

        # relative trace to the distinguished subfield, as packed F_q
        # indices (same little-endian convention as GFq.elements())
        rel_rows = np.array(
            [rel_trace(ctx, ctx.from_coeffs([0] * i + [1]))
             for i in range(D)], dtype=np.int64).T
        self.rel1 = K.linear_index_table(
            rel_rows, ctx.p, D, K.encode_weights(ctx.p, ctx.k))
        two_j = (2 * np.arange(self.N, dtype=np.int64)) % self.N
        self.sq_idx = np.zeros(self.Q, dtype=np.int64)
        self.sq_idx[self.pow_idx] = self.pow_idx[two_j]

        self._build_small_field()
        self._mult_grid_cache = {}
        self._add_table_cache = {}
        self._gfree_cache = {}
        self._sigma_orders = None
        self._mulc_cache = {}

    # .. construction helpers ..............................................

    def _find_generator(self):
        for e in self.ctx.elements():
            if not self.ctx.is_zero(e) and \
                    element_order(self.ctx, e) == self.N:
                return e
        raise AssertionError("no generator found")

    def _build_small_field(self):
        F = self.ctx.gfq
        q = F.q
        els = list(F.elements())
        self.fq_elems = els
        self.fq_phase = np.array([F.trace_to_prime(t) for t in els],
                                 dtype=np.int64)
        self.fq_add = np.empty((q, q), dtype=np.int64)
        self.fq_sub = np.empty((q, q), dtype=np.int64)
        self.fq_mul = np.empty((q, q), dtype=np.int64)
        for i, ai in enumerate(els):
            for j, bj in enumerate(els):
                self.fq_add[i, j] = fq_index(F, F.add(ai, bj))
                self.fq_sub[i, j] = fq_index(F, F.sub(ai, bj))
                self.fq_mul[i, j] = fq_index(F, F.mul(ai, bj))
        inv2 = fq_index(F, F.from_int(pow(2, -1, F.p)))
        t2 = self.rel1[self.sq_idx]
        # subtrace over the whole field via (Tr^2 - Tr(eps^2)) / 2
        self.subtrace_idx = self.fq_mul[
            inv2, self.fq_sub[self.fq_mul[self.rel1, self.rel1], t2]]

    def fq_coerce(self, v):
        """F_q value (int or GFq tuple) -> packed index."""
        F = self.ctx.gfq
        if isinstance(v, int):
            v = F.from_int(v)
        return fq_index(F, tuple(v))

    # .. multiplicative side ...............................................

    def char_exponents(self, d):
        """Exponents e with chi(gamma^j) = nroots[(e*j) % N] running over
        the phi(d) characters of exact order d."""
        if self.N % d:
            raise ValueError("character order %d does not divide %d"
                             % (d, self.N))
        step = self.N // d
        return [step * c for c in range(1, d + 1) if gcd(c, d) == 1]

    def mult_sum_grid(self, l):
        """sum_{d|l} mu(d)/phi(d) sum_{chi_d} chi_d(gamma^j) over the
        whole dlog grid j = 0..N-1.  Multiplying by theta(l) gives the
        l-free characteristic function on nonzero elements."""
        l = int(l)
        if l not in self._mult_grid_cache:
            fact_l = self.fact.restrict(l)
            exps, weights = [], []
            for dd in fact_l.squarefree_divisors():
                w = Fraction(_mobius_sq(dd), _phi_small(dd))
                for e in self.char_exponents(dd):
                    exps.append(e)
                    weights.append(complex(w))
            grid = K.char_table(np.arange(self.N, dtype=np.int64),
                                np.array(exps, dtype=np.int64),
                                np.array(weights, dtype=np.complex128),
                                self.N, self.nroots)
            self._mult_grid_cache[l] = grid
        return self._mult_grid_cache[l]

    def lfree_mask_grid(self, l):
        """Boolean over the dlog grid: gamma^j is l-free iff j is coprime
        to the radical of l."""
        rad = self.fact.restrict(int(l)).radical()
        return np.gcd(np.arange(self.N, dtype=np.int64), rad) == 1

    # .. additive side ......................................................

    def sigma_orders(self):
        """(divisors, order_pos): every monic divisor of x^n - 1 sorted by
        degree, and for each element index the position of its minimal
        annihilating divisor under the Frobenius module action."""
        if self._sigma_orders is None:
            ctx = self.ctx
            F = ctx.gfq
            prof = coset_profile(ctx.q, ctx.n)
            irred = explicit_factors(ctx.q, ctx.n)
            mult = prof.multiplicity
            divisors = [[F.one]]
            for f in irred:
                grown = []
                for d in divisors:
                    cur = d
                    grown.append(cur)
                    for _ in range(mult):
                        cur = _g.poly_mul(F, cur, f)
                        grown.append(cur)
                divisors = grown
            divisors.sort(key=lambda d: (len(d), d))
            orders = np.full(self.Q, -1, dtype=np.int64)
            weights = K.encode_weights(ctx.p, ctx.D)
            for pos, dpoly in enumerate(divisors):
                if len(dpoly) == 1:
                    orders[0] = pos      # only zero is annihilated by 1
                    continue
                img = K.linear_index_table(
                    self._action_matrix(dpoly), ctx.p, ctx.D, weights)
                hit = (img == 0) & (orders < 0)
                orders[hit] = pos
            assert (orders >= 0).all(), "some element had no annihilator"
            self._sigma_orders = (divisors, orders)
        return self._sigma_orders

    def _action_matrix(self, fpoly):
        """Matrix of the module action of an F_q polynomial on the field,
        acting on little-endian coefficient vectors."""
        ctx = self.ctx
        A = np.zeros((ctx.D, ctx.D), dtype=np.int64)
        for i, c in enumerate(fpoly):
            hat = ctx.from_subfield(c)
            if ctx.is_zero(hat):
                continue
            A = (A + ctx.mul_matrix(hat) @ ctx.frobenius_matrix(i)) % ctx.p
        return A

    def add_sum_table(self, factors):
        """sum_{h | g, h squarefree monic} mu_q(h)/Phi_q(h) sum_{lambda_h}
        lambda_h(eps) over every element index; g is given by its
        distinct irreducible factors.  Characters of exact order h are
        the lambda_y whose annihilator under the adjoint action is the
        reciprocal of h; multiplying by Theta(g) gives the g-free
        characteristic function.
        """
        key = tuple(tuple(tuple(c) for c in f) for f in factors)
        if key in self._add_table_cache:
            return self._add_table_cache[key]
        ctx = self.ctx
        F = ctx.gfq
        divisors, orders = self.sigma_orders()
        div_pos = {tuple(tuple(c) for c in d): i
                   for i, d in enumerate(divisors)}
        # lambda-hat_0 along the dlog grid; each exact-order class
        # contributes sum_{y in Y} s[(dlog y + j) mod N], a circular
        # correlation, done in O(N log N) by FFT instead of |Y| passes
        s_fft = np.fft.fft(self.proots[self.phase[self.pow_idx]])
        acc_nz = np.zeros(self.N, dtype=np.complex128)
        acc_zero = 0j
        for subset in _subsets(list(factors)):
            h = [F.one]
            for f in subset:
                h = _g.poly_mul(F, h, f)
            w = complex(Fraction((-1) ** len(subset), _phi_poly(F, subset)))
            hstar = _reciprocal(F, h)
            pos = div_pos[tuple(tuple(c) for c in hstar)]
            ys = np.nonzero(orders == pos)[0]
            has_zero = len(ys) and ys[0] == 0
            ys_nz = ys[1:] if has_zero else ys
            ind = np.zeros(self.N, dtype=np.complex128)
            ind[self.dlog[ys_nz]] = 1.0
            ind_rev = np.roll(ind[::-1], 1)
            part_nz = np.fft.ifft(np.fft.fft(ind_rev) * s_fft)
            if has_zero:
                part_nz = part_nz + 1.0
            acc_nz += w * part_nz
            acc_zero += w * (len(ys_nz) + (1 if has_zero else 0))
        acc = np.zeros(self.Q, dtype=np.complex128)
        acc[0] = acc_zero
        acc[self.pow_idx] = acc_nz
        self._add_table_cache[key] = acc
        return acc

    def gfree_mask(self, factors):
        """Boolean over element indices: eps is g-free (g given by its
        distinct irreducible factors) iff no cofactor (x^n-1)/h
        annihilates it."""
        key = tuple(tuple(tuple(c) for c in f) for f in factors)
        if key not in self._gfree_cache:
            ctx = self.ctx
            F = ctx.gfq
            xn1 = _g.poly_xn_minus_1(F, ctx.n)
            mask = np.ones(self.Q, dtype=bool)
            weights = K.encode_weights(ctx.p, ctx.D)
            for h in factors:
                quo, rem = _g.poly_divmod(F, xn1, list(h))
                if rem:
                    raise ValueError("factor does not divide x^n - 1")
                img = K.linear_index_table(
                    self._action_matrix(quo), ctx.p, ctx.D, weights)
                mask &= img != 0
            self._gfree_cache[key] = mask
        return self._gfree_cache[key]

    # .. value tables ........................................................

    def mulc_table(self, c_elem):
        """Element index -> index of c*element, tabulated."""
        key = c_elem.coeffs
        if key not in self._mulc_cache:
            self._mulc_cache[key] = K.linear_index_table(
                self.ctx.mul_matrix(c_elem), self.ctx.p, self.ctx.D,
                K.encode_weights(self.ctx.p, self.ctx.D))
        return self._mulc_cache[key]

    def poly_value_table(self, coeffs):
        """Indices of sum_i c_i eps^i over every element index."""
        ctx = self.ctx
        w = K.encode_weights(ctx.p, ctx.D)
        total_digits = np.zeros((ctx.D, self.Q), dtype=np.int64)
        idx_all = np.arange(self.Q, dtype=np.int64)
        for i, c in enumerate(coeffs):
            if ctx.is_zero(c):
                continue
            if i == 0:
                term = np.full(self.Q, elem_index(ctx, c), dtype=np.int64)
            else:
                powed = np.zeros(self.Q, dtype=np.int64)
                j = (i * np.arange(self.N, dtype=np.int64)) % self.N
                powed[self.pow_idx] = self.pow_idx[j]
                term = self.mulc_table(c)[powed]
            total_digits += (term[None, :] // w[:, None]) % ctx.p
        return w @ (total_digits % ctx.p)

    def trace_phase_sums(self, a_idx, b_idx, j_grid):
        """T(eps) = sum_{t,u in F_q} lambda0(-bt+au) lambdahat0(t eps + u
        eps^2) on the dlog grid, via the literal double loop over (t, u)
        and the relative-trace compatibility of the canonical additive
        characters."""
        r1 = self.rel1[self.pow_idx[j_grid]]
        r2 = self.rel1[self.sq_idx[self.pow_idx[j_grid]]]
        q = self.ctx.q
        acc = np.zeros(len(j_grid), dtype=np.complex128)
        for t in range(q):
            bt = self.fq_mul[b_idx, t]
            for u in range(q):
                au = self.fq_mul[a_idx, u]
                w = self.proots[self.fq_phase[self.fq_sub[au, bt]]]
                inner = self.fq_add[self.fq_mul[t, r1], self.fq_mul[u, r2]]
                acc += w * self.proots[self.fq_phase[inner]]
        return acc


def get_tables(ctx, cap=ORACLE_CAP):
    """Per-field CharacterTables, cached on the context object."""
    tabs = getattr(ctx, "_oracle_tables", None)
    if tabs is None:
        tabs = CharacterTables(ctx, cap=cap)
        ctx._oracle_tables = tabs
    return tabs


def _subsets(items):
    out = [[]]
    for it in items:
        out += [s + [it] for s in out]
    return out


def _reciprocal(F, h):
    rev = list(reversed(h))
    lead_inv = F.inv(rev[-1])
    return [F.mul(c, lead_inv) for c in rev]


def _phi_poly(F, factors):
    out = 1
    for f in factors:
        out *= F.q ** (len(f) - 1) - 1
    return out


def _mobius_sq(d):
    if d == 1:
        return 1
    return (-1) ** len(factorize(d).factors)


def _phi_small(d):
    out = 1
    for p, e in factorize(d).factors:
        out *= (p - 1) * p ** (e - 1)
    return out


def theta_frac(l, fact):
    return _theta_from(fact.restrict(int(l)))


def _theta_from(fact_l):
    out = Fraction(1)
    for p, _ in fact_l.factors:
        out *= Fraction(p - 1, p)
    return out


def bigtheta_frac(q, factors):
    """Phi_q(g)/q^deg(g) for squarefree g given by distinct irreducible
    factors."""
    out = Fraction(1)
    for f in factors:
        d = len(f) - 1
        out *= Fraction(q ** d - 1, q ** d)
    return out


def xn1_factor_lists(ctx):
    """(all distinct irreducible factors of x^n - 1, those without root
    1).  The second list generates the largest divisor coprime to x-1,
    which is the normality target that remains once the trace is pinned
    to a nonzero value."""
    F = ctx.gfq
    facs = explicit_factors(ctx.q, ctx.n)
    x_minus_1 = [F.neg(F.one), F.one]
    lpart = [f for f in facs if f != x_minus_1]
    return facs, lpart


# -- witnesses -------------------------------------------------------------

@dataclass
class WitnessRecord:
    """A counted element with everything recomputable from it."""

    eps: FFElem
    primitive: bool
    normal: bool
    f_primitive: bool
    f_normal: bool
    trace_val: tuple
    trace_sq_val: tuple
    subtrace_val: tuple
    f: RationalMap

    def json_dict(self):
        ctx = self.eps.ctx
        return {
            "schema": WITNESS_SCHEMA,
            "field": {"p": ctx.p, "k": ctx.k, "n": ctx.n,
                      "modulus": list(ctx.modulus)},
            "element": list(self.eps.coeffs),
            "flags": {"primitive": self.primitive, "normal": self.normal,
                      "f_primitive": self.f_primitive,
                      "f_normal": self.f_normal},
            "trace": list(self.trace_val),
            "trace_sq": list(self.trace_sq_val),
            "subtrace": list(self.subtrace_val),
            "f": self.f.json_dict(),
        }

    def to_json(self):
        return json.dumps(self.json_dict(), sort_keys=True)


def witness_record(ctx, eps, f):
    """Recompute every flag and value for eps through the scalar
    reference routines (independent of the index tables)."""
    N = ctx.Q - 1
    fval = f.eval(eps)
    t = rel_trace(ctx, eps)
    t2 = rel_trace(ctx, ctx.mul(eps, eps))
    sub = subtrace_identity(ctx, eps)
    assert sub == subtrace_direct(ctx, eps)
    return WitnessRecord(
        eps=eps,
        primitive=element_order(ctx, eps) == N,
        normal=is_normal(ctx, eps),
        f_primitive=(fval is not None and not ctx.is_zero(fval)
                     and element_order(ctx, fval) == N),
        f_normal=(fval is not None and is_normal(ctx, fval)),
        trace_val=t, trace_sq_val=t2, subtrace_val=sub, f=f)


# -- exhaustive counting ---------------------------------------------------

@dataclass
class CountResult:
    count: int
    witnesses: list
    mode: str
    params: dict = field(default_factory=dict)


def count_pairs(ctx, f, a, b, l1, l2, g1=None, g2=None, tables=None,
                relaxed=False, jobs=1, with_witnesses=True,
                max_witnesses=None, cap=ORACLE_CAP):
    """Exhaustive count of eps with eps l1-free and g1-free, f(eps)
    l2-free and g2-free, Tr(eps) = b and Tr(eps^2) = -a.

    The domain excludes 0 and every zero of num or den of f (the
    excluded set, whose size is at most 1 + deg num + deg den).  g1 and
    g2 are lists of distinct monic irreducible factors over F_q (None
    or [] meaning no condition).  In the default strict mode a must be
    b^2 with b nonzero, and the subtrace identity then forces
    STr(eps) = a for every counted element - asserted, not assumed.
    With relaxed=True any (a, b) pair is counted and no subtrace claim
    is made; the result is labeled accordingly.

    Element ranges are partitioned across jobs threads; counts merge by
    addition and witnesses by dlog order, so the result is deterministic
    for any jobs value.  The first witness is always the one with the
    smallest discrete log.
    """
    tabs = tables if tables is not None else get_tables(ctx, cap=cap)
    F = ctx.gfq
    a_idx = tabs.fq_coerce(a)
    b_idx = tabs.fq_coerce(b)
    if not relaxed:
        if a_idx == 0 or b_idx == 0:
            raise ValueError("strict mode needs a, b nonzero; use "
                             "relaxed=True to drop the constraint")
        if tabs.fq_mul[b_idx, b_idx] != a_idx:
            raise ValueError("strict mode needs a = b^2; use relaxed=True "
                             "to count an unlinked (a, b) pair")
    problems = f.shape_problems()
    if problems:
        raise ValueError("map violates the shape contract: " +
                         "; ".join(problems))
    for l in (l1, l2):
        if int(l) < 1 or tabs.N % int(l):
            raise ValueError("l = %r must divide the unit group order" % (l,))

    nega_idx = tabs.fq_coerce(F.neg(tabs.fq_elems[a_idx]))
    nv, dv, fv = f.value_tables(tabs)
    gm1 = tabs.gfree_mask(list(g1)) if g1 else None
    gm2 = tabs.gfree_mask(list(g2)) if g2 else None
    rad1 = tabs.fact.restrict(int(l1)).radical()
    rad2 = tabs.fact.restrict(int(l2)).radical()

    def scan(lo, hi):
        j = np.arange(lo, hi, dtype=np.int64)
        eps = tabs.pow_idx[j]
        mask = (nv[eps] != 0) & (dv[eps] != 0)
        mask &= np.gcd(j, rad1) == 1
        if gm1 is not None:
            mask &= gm1[eps]
        mask &= tabs.rel1[eps] == b_idx
        mask &= tabs.rel1[tabs.sq_idx[eps]] == nega_idx
        vals = fv[eps]
        ok = mask & (vals != 0)
        sub = np.zeros(len(j), dtype=bool)
        sub[ok] = np.gcd(tabs.dlog[vals[ok]], rad2) == 1
        if gm2 is not None:
            sub[ok] &= gm2[vals[ok]]
        mask &= sub
        return j[mask]

    jobs = max(1, int(jobs))
    bounds = np.linspace(0, tabs.N, jobs + 1, dtype=np.int64)
    if jobs == 1:
        hits = [scan(0, tabs.N)]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            hits = list(pool.map(lambda ab: scan(*ab),
                                 zip(bounds[:-1], bounds[1:])))
    hit_j = np.concatenate(hits)
    eps_idx = tabs.pow_idx[hit_j]

    mode = "relaxed" if relaxed else "strict"
    if not relaxed and len(eps_idx):
        st = tabs.subtrace_idx[eps_idx]
        bad = np.nonzero(st != a_idx)[0]
        assert len(bad) == 0, (
            "subtrace identity violated at element index %d"
            % int(eps_idx[bad[0]]))

    witnesses = []
    if with_witnesses:
        keep = eps_idx if max_witnesses is None else eps_idx[:max_witnesses]
        witnesses = [witness_record(ctx, elem_from_index(ctx, int(i)), f)
                     for i in keep]
    params = {"a": list(tabs.fq_elems[a_idx]), "b": list(tabs.fq_elems[b_idx]),
              "l1": int(l1), "l2": int(l2), "f": f.label,
              "g1": len(g1 or ()), "g2": len(g2 or ())}
    return CountResult(count=int(len(eps_idx)), witnesses=witnesses,
                       mode=mode, params=params)


def find_pair_witness(ctx, f, a, b, tables=None, jobs=1, cap=ORACLE_CAP):
    """First (by dlog) primitive normal eps with f(eps) primitive normal,
    Tr(eps) = b, Tr(eps^2) = -a; None when the count is zero."""
    tabs = tables if tables is not None else get_tables(ctx, cap=cap)
    facs, lpart = xn1_factor_lists(ctx)
    res = count_pairs(ctx, f, a, b, tabs.N, tabs.N, g1=lpart, g2=facs,
                      tables=tabs, jobs=jobs, with_witnesses=True,
                      max_witnesses=1)
    return res.witnesses[0] if res.witnesses else None


# -- the character-sum formula --------------------------------------------

def eval_count_formula(ctx, f, a, b, l1, l2, g1=None, g2=None, tables=None,
                       cap=ORACLE_CAP):
    """The count as a nested character sum, evaluated numerically.

    Outer sums run over divisors d1 | l1, d2 | l2 and monic squarefree
    h1 | g1, h2 | g2 with Moebius-over-totient weights; inner sums over
    the characters of exact order d (via the discrete-log table) and
    exact F_q-order h (via annihilator classes), and over t, u in F_q
    with weight lambda0(-bt + au).  The grand total is scaled by
    theta(l1) theta(l2) Theta(g1) Theta(g2) / q^2 and returned as a
    complex number whose real part must match count_pairs to within
    FORMULA_TOL (and whose imaginary part stays below IMAG_TOL).

    Accumulation is double precision and compensated: the per-character
    kernels carry Kahan error terms and the final reduction goes through
    math.fsum on the real and imaginary parts separately.
    """
    tabs = tables if tables is not None else get_tables(ctx, cap=cap)
    a_idx = tabs.fq_coerce(a)
    b_idx = tabs.fq_coerce(b)
    g1 = list(g1) if g1 else []
    g2 = list(g2) if g2 else []

    j_grid = np.arange(tabs.N, dtype=np.int64)
    A1 = tabs.mult_sum_grid(int(l1))
    A2 = tabs.mult_sum_grid(int(l2))
    B1 = tabs.add_sum_table(g1)[tabs.pow_idx]
    B2_tab = tabs.add_sum_table(g2)
    T = tabs.trace_phase_sums(a_idx, b_idx, j_grid)

    nv, dv, fv = f.value_tables(tabs)
    eps = tabs.pow_idx[j_grid]
    domain = (nv[eps] != 0) & (dv[eps] != 0)
    vals = fv[eps]

    prod = np.zeros(tabs.N, dtype=np.complex128)
    vd = vals[domain]
    prod[domain] = (A1[j_grid[domain]] * A2[tabs.dlog[vd]]
                    * B1[domain] * B2_tab[vd] * T[domain])
    scale = (theta_frac(l1, tabs.fact) * theta_frac(l2, tabs.fact)
             * bigtheta_frac(ctx.q, g1) * bigtheta_frac(ctx.q, g2)
             / ctx.q ** 2)
    total = complex(math.fsum(prod.real), math.fsum(prod.imag))
    return complex(scale) * total


def formula_vs_count(ctx, f, a, b, l1, l2, g1=None, g2=None, tables=None):
    """(count, formula, ok) with ok per the module tolerances."""
    res = count_pairs(ctx, f, a, b, l1, l2, g1=g1, g2=g2, tables=tables,
                      with_witnesses=False)
    val = eval_count_formula(ctx, f, a, b, l1, l2, g1=g1, g2=g2,
                             tables=tables)
    ok = (abs(val.real - res.count) < FORMULA_TOL
          and abs(val.imag) < IMAG_TOL)
    return res.count, val, ok


# -- characteristic-function checks -----------------------------------------

@dataclass
class CharFnReport:
    binary_ok: bool
    lfree_agree: bool
    gfree_agree: bool
    trace_agree: bool
    rho_total: int
    rho_expected: int
    kappa_total: int
    kappa_expected: int
    tau_total: int
    tau_expected: int

    @property
    def ok(self):
        return (self.binary_ok and self.lfree_agree and self.gfree_agree
                and self.trace_agree
                and self.rho_total == self.rho_expected
                and self.kappa_total == self.kappa_expected
                and self.tau_total == self.tau_expected)


def char_fn_checks(ctx, l, g_factors, a, tables=None, cap=ORACLE_CAP,
                   sample_limit=4096):
    """Tie the three characteristic functions to their predicates.

    rho_l is evaluated on every nonzero element (its domain) and
    compared with is_l_free; kappa_g and tau_a on every element against
    is_g_free and the relative trace.  All values must be 0/1 within
    IMAG_TOL and the totals must hit theta(l)(q^n - 1), Theta(g) q^n and
    q^(n-1) exactly.  The scalar-predicate agreement loops cover the
    whole field up to sample_limit elements and an evenly spaced sample
    beyond that (the 0/1 and total checks always see everything).
    """
    tabs = tables if tables is not None else get_tables(ctx, cap=cap)
    g_factors = list(g_factors) if g_factors else []
    a_idx = tabs.fq_coerce(a)

    theta_l = theta_frac(l, tabs.fact)
    rho = complex(theta_l) * tabs.mult_sum_grid(int(l))
    kappa = complex(bigtheta_frac(ctx.q, g_factors)) \
        * tabs.add_sum_table(g_factors)
    tau = np.zeros(tabs.Q, dtype=np.complex128)
    q = ctx.q
    for t in range(q):
        w = tabs.proots[(-tabs.fq_phase[tabs.fq_mul[t, a_idx]]) % ctx.p]
        tau += w * tabs.proots[tabs.fq_phase[tabs.fq_mul[t, tabs.rel1]]]
    tau /= q

    binary_ok = True
    for arr in (rho, kappa, tau):
        r = arr.real
        binary_ok &= bool((np.abs(arr.imag) < IMAG_TOL).all())
        binary_ok &= bool((np.minimum(np.abs(r), np.abs(r - 1))
                           < IMAG_TOL).all())

    rho_round = np.round(rho.real).astype(np.int64)
    kappa_round = np.round(kappa.real).astype(np.int64)
    tau_round = np.round(tau.real).astype(np.int64)

    def spread(count):
        if count <= sample_limit:
            return range(count)
        return np.unique(np.linspace(0, count - 1, sample_limit,
                                     dtype=np.int64))

    lfree_agree = all(
        rho_round[j] == int(is_l_free(
            ctx, elem_from_index(ctx, int(tabs.pow_idx[j])), int(l)))
        for j in spread(tabs.N))
    gfree_agree = all(
        kappa_round[i] == int(is_g_free(
            ctx, elem_from_index(ctx, int(i)), g_factors))
        for i in spread(tabs.Q))
    trace_agree = bool((tau_round == (tabs.rel1 == a_idx)).all())

    rho_total = int(rho_round.sum())  # grid already runs over nonzero only
    kappa_total = int(kappa_round.sum())
    tau_total = int(tau_round.sum())
    exp_rho = theta_l * tabs.N
    assert exp_rho.denominator == 1
    exp_kappa = bigtheta_frac(ctx.q, g_factors) * tabs.Q
    assert exp_kappa.denominator == 1
    return CharFnReport(
        binary_ok=bool(binary_ok), lfree_agree=lfree_agree,
        gfree_agree=gfree_agree, trace_agree=trace_agree,
        rho_total=rho_total, rho_expected=int(exp_rho),
        kappa_total=kappa_total, kappa_expected=int(exp_kappa),
        tau_total=tau_total, tau_expected=ctx.Q // ctx.p ** ctx.k)


# -- Weil-type bound checks -------------------------------------------------

@dataclass
class WeilInstance:
    kind: str
    detail: dict
    lhs: float
    bound: float
    skipped: bool = False
    reason: str = ""

    @property
    def ok(self):
        return self.skipped or self.lhs <= self.bound + 1e-9


@dataclass
class WeilReport:
    instances: list

    @property
    def violations(self):
        return [w for w in self.instances if not w.ok]

    @property
    def skipped(self):
        return [w for w in self.instances if w.skipped]

    @property
    def ok(self):
        return not self.violations


def _random_poly(rng, ctx, max_deg):
    deg = int(rng.integers(0, max_deg + 1))
    coeffs = [ctx.from_int(int(rng.integers(0, ctx.p)))
              for _ in range(deg)] + [ctx.from_int(1)]
    return coeffs


def _distinct_factor_degrees(ctx, tabs, poly):
    """Degrees of the distinct irreducible factors over the big field,
    found by root extraction plus a squarefree split (enough for the
    degree <= 2 instances the generator produces)."""
    poly = _g.poly_trim(ctx, list(poly))
    deg = len(poly) - 1
    vals = tabs.poly_value_table(poly)
    root_idx = np.nonzero(vals == 0)[0]
    out = [1] * len(root_idx)
    total_mult = 0
    for i in root_idx:
        e = elem_from_index(ctx, int(i))
        mult, cur = 1, [ctx.mul(c, ctx.from_int(j))
                        for j, c in enumerate(poly)][1:]
        while cur and ctx.is_zero(_g.poly_eval(ctx, cur, e)):
            mult += 1
            cur = [ctx.mul(c, ctx.from_int(j))
                   for j, c in enumerate(cur)][1:]
        total_mult += mult
    rem = deg - total_mult
    if rem:
        assert rem % 2 == 0, "leftover factor of odd degree with no root"
        out += [2] * (rem // 2)
    return out


def weil_checks(ctx, trials=200, seed=20250814, tables=None, cap=ORACLE_CAP,
                min_admissible=None):
    """Randomized instances of the three bounds the main estimate leans
    on: pure multiplicative character sums over rational arguments,
    mixed multiplicative/additive sums, and additive sums of polynomial
    arguments.  Inadmissible draws (argument a perfect character-order
    power; additive argument expressible as h^p - h + c) are skipped
    with the reason logged, never silently dropped.  Any violation is an
    implementation bug and carries full instance data.

    min_admissible, when given, keeps drawing extra rounds until at
    least that many evaluated (non-skipped) instances exist.
    """
    report = _weil_round(ctx, trials, seed, tables, cap)
    rounds = 1
    while min_admissible is not None and \
            len(report.instances) - len(report.skipped) < min_admissible:
        more = _weil_round(ctx, trials, seed + rounds, tables, cap)
        report = WeilReport(instances=report.instances + more.instances)
        rounds += 1
        if rounds > 50:
            raise RuntimeError("admissible instance generation stalled")
    return report


def _weil_round(ctx, trials, seed, tables, cap):
    tabs = tables if tables is not None else get_tables(ctx, cap=cap)
    rng = np.random.default_rng(seed)
    sqQ = math.sqrt(ctx.Q)
    out = []
    per_kind = trials // 3 or 1

    # multiplicative character over a rational argument
    for _ in range(per_kind):
        num = _squarefree_poly(rng, ctx, tabs)
        den = _squarefree_poly(rng, ctx, tabs)
        while len(_g.poly_gcd(ctx, num, den)) != 1:
            den = _squarefree_poly(rng, ctx, tabs)
        e = int(rng.integers(1, tabs.N))
        d = tabs.N // gcd(e, tabs.N)
        detail = {"num": _fmt_poly(num), "den": _fmt_poly(den),
                  "char_exponent": e, "char_order": d}
        if d == 1:
            out.append(WeilInstance("mult", detail, 0.0, 0.0, skipped=True,
                                    reason="trivial character: argument is "
                                           "always a d-th power"))
            continue
        if len(num) == 1 and len(den) == 1:
            out.append(WeilInstance("mult", detail, 0.0, 0.0, skipped=True,
                                    reason="constant argument is a d-th "
                                           "power times a constant"))
            continue
        nv = tabs.poly_value_table(num)
        dv = tabs.poly_value_table(den)
        ok = dv != 0
        vals = np.zeros(tabs.Q, dtype=np.int64)
        vals[ok] = tabs.pow_idx[(tabs.dlog[nv[ok].clip(min=1)]
                                 - tabs.dlog[dv[ok]]) % tabs.N]
        vals[ok & (nv == 0)] = 0
        nz = ok & (vals != 0)
        s = tabs.nroots[(e * tabs.dlog[vals[nz]]) % tabs.N]
        lhs = abs(complex(math.fsum(s.real), math.fsum(s.imag)))
        degs = (_distinct_factor_degrees(ctx, tabs, num)
                + _distinct_factor_degrees(ctx, tabs, den))
        bound = (sum(degs) - 1) * sqQ
        out.append(WeilInstance("mult", detail, lhs, bound))

    # mixed multiplicative x additive
    for _ in range(per_kind):
        num = _squarefree_poly(rng, ctx, tabs)
        den = _squarefree_poly(rng, ctx, tabs)
        while len(_g.poly_gcd(ctx, num, den)) != 1:
            den = _squarefree_poly(rng, ctx, tabs)
        gpoly = _random_poly(rng, ctx, 2)
        gdeg = len(gpoly) - 1
        e = int(rng.integers(1, tabs.N))
        d = tabs.N // gcd(e, tabs.N)
        detail = {"num": _fmt_poly(num), "den": _fmt_poly(den),
                  "g": _fmt_poly(gpoly), "char_exponent": e, "char_order": d}
        if d == 1:
            out.append(WeilInstance("mixed", detail, 0.0, 0.0, skipped=True,
                                    reason="trivial multiplicative "
                                           "character"))
            continue
        if len(num) == 1 and len(den) == 1:
            out.append(WeilInstance("mixed", detail, 0.0, 0.0, skipped=True,
                                    reason="constant argument is an r-th "
                                           "power times a constant"))
            continue
        if gdeg < 1 or gdeg % ctx.p == 0:
            out.append(WeilInstance("mixed", detail, 0.0, 0.0, skipped=True,
                                    reason="additive argument could be "
                                           "h^p - h + c"))
            continue
        nv = tabs.poly_value_table(num)
        dv = tabs.poly_value_table(den)
        gv = tabs.poly_value_table(gpoly)
        ok = dv != 0
        vals = np.zeros(tabs.Q, dtype=np.int64)
        vals[ok] = tabs.pow_idx[(tabs.dlog[nv[ok].clip(min=1)]
                                 - tabs.dlog[dv[ok]]) % tabs.N]
        vals[ok & (nv == 0)] = 0
        nz = ok & (vals != 0)
        s = (tabs.nroots[(e * tabs.dlog[vals[nz]]) % tabs.N]
             * tabs.proots[tabs.phase[gv[nz]]])
        lhs = abs(complex(math.fsum(s.real), math.fsum(s.imag)))
        l_count = sum(_distinct_factor_degrees(ctx, tabs, num)
                      + _distinct_factor_degrees(ctx, tabs, den))
        lprime = 1                       # polynomial g: only the infinite pole
        ldouble = 0                      # finite poles of f never meet it
        bound = (gdeg + l_count + lprime - ldouble - 2) * sqQ
        out.append(WeilInstance("mixed", detail, lhs, bound))

    # additive character of a polynomial argument over the whole field
    for _ in range(trials - 2 * per_kind):
        fpoly = _random_poly(rng, ctx, min(4, ctx.p - 1))
        deg = len(fpoly) - 1
        detail = {"f": _fmt_poly(fpoly), "deg": deg}
        if deg < 1 or gcd(deg, ctx.Q) != 1:
            out.append(WeilInstance("additive", detail, 0.0, 0.0,
                                    skipped=True,
                                    reason="degree shares a factor with "
                                           "the field characteristic"))
            continue
        fv = tabs.poly_value_table(fpoly)
        s = tabs.proots[tabs.phase[fv]]
        lhs = abs(complex(math.fsum(s.real), math.fsum(s.imag)))
        bound = (deg - 1) * sqQ
        out.append(WeilInstance("additive", detail, lhs, bound))

    return WeilReport(instances=out)


def _squarefree_poly(rng, ctx, tabs):
    while True:
        poly = _random_poly(rng, ctx, 2)
        if len(poly) == 1:
            return poly
        der = [ctx.mul(c, ctx.from_int(i))
               for i, c in enumerate(poly)][1:]
        if len(_g.poly_gcd(ctx, poly, der)) == 1:
            return poly


def _fmt_poly(coeffs):
    if all(not any(c.coeffs[1:]) for c in coeffs):
        return _g.format_poly([c.coeffs[0] for c in coeffs])
    return "[" + ",".join(repr(c) for c in coeffs) + "]"


def gauss_sum_example(p=7):
    """|sum_eps lambda(eps^2)| over F_p: the classical absolute value
    sqrt(p), sitting exactly on the additive bound with degree 2."""
    ctx = build_field(p, 1, 1)
    tabs = get_tables(ctx)
    fv = tabs.poly_value_table([ctx.zero, ctx.zero, ctx.one])
    s = tabs.proots[tabs.phase[fv]]
    return abs(complex(math.fsum(s.real), math.fsum(s.imag)))


# -- decomposition inequality -----------------------------------------------

@dataclass
class DecompositionReport:
    lhs: int
    rhs: int
    terms: dict
    sieve_count: int

    @property
    def holds(self):
        return self.lhs >= self.rhs

    @property
    def slack(self):
        return self.lhs - self.rhs


def verify_decomposition(ctx, f, a, b, k, P, g, G, gp, Gp, tables=None,
                         cap=ORACLE_CAP):
    """The sieve's count decomposition, asserted with literal integers.

    With P = p_1 ... p_r (distinct primes away from k), G = product of s
    irreducible factors away from g, and G' = product of t factors away
    from g', brute-force counts must satisfy

        C(kP, kP, gG, g'G') >= sum_i C(p_i k, k, g, g')
                             + sum_i C(k, p_i k, g, g')
                             + sum_j C(k, k, g_j g, g')
                             + sum_j C(k, k, g, g'_j g')
                             - (2r + s + t - 1) C(k, k, g, g').
    """
    tabs = tables if tables is not None else get_tables(ctx, cap=cap)
    g = list(g or [])
    G = list(G or [])
    gp = list(gp or [])
    Gp = list(Gp or [])
    P_primes = [pr for pr, _ in factorize(int(P)).factors] if P > 1 else []
    if gcd(int(k), int(P)) != 1:
        raise ValueError("k and P must be coprime")

    def C(l1, l2, g1, g2):
        return count_pairs(ctx, f, a, b, l1, l2, g1=g1, g2=g2, tables=tabs,
                           with_witnesses=False).count

    lhs = C(k * P, k * P, g + G, gp + Gp)
    base = C(k, k, g, gp)
    r, s, t = len(P_primes), len(G), len(Gp)
    terms = {"lhs": lhs, "base": base, "r": r, "s": s, "t": t,
             "prime_terms": [], "g_terms": [], "gp_terms": []}
    rhs = -(2 * r + s + t - 1) * base
    for pr in P_primes:
        c1 = C(pr * k, k, g, gp)
        c2 = C(k, pr * k, g, gp)
        terms["prime_terms"].append((pr, c1, c2))
        rhs += c1 + c2
    for gj in G:
        cj = C(k, k, g + [gj], gp)
        terms["g_terms"].append((_fmt_gfq_poly(ctx.gfq, gj), cj))
        rhs += cj
    for gj in Gp:
        cj = C(k, k, g, gp + [gj])
        terms["gp_terms"].append((_fmt_gfq_poly(ctx.gfq, gj), cj))
        rhs += cj
    return DecompositionReport(lhs=lhs, rhs=rhs, terms=terms,
                               sieve_count=base)


def _fmt_gfq_poly(F, poly):
    if all(not any(c[1:]) for c in poly):
        return _g.format_poly([c[0] for c in poly])
    return repr(poly)


def main_estimate_floor(ctx, f, l1, l2, g1, g2, m=None):
    """The proved lower bound on the count, with the excluded-set size
    plugged in literally:

        G * (q^n - |Z1| q^2 - q(q-1) q^(n/2) - 2m q^(n/2+2)(W4 - 1))

    where G = theta(l1) theta(l2) Theta(g1) Theta(g2) / q^2 and W4 is
    the product of the four squarefree-divisor counts.  count_pairs is
    always >= this number; on desk-scale fields the bound is usually
    far below zero, which is exactly why the sieves exist.
    """
    tabs = get_tables(ctx)
    q, n = ctx.q, ctx.n
    m = m if m is not None else f.m
    nv = tabs.poly_value_table(f.num)
    dv = tabs.poly_value_table(f.den)
    z1 = int((nv == 0).sum()) + int((dv == 0).sum()) + 1
    W4 = (2 ** len(tabs.fact.restrict(int(l1)).factors)
          * 2 ** len(tabs.fact.restrict(int(l2)).factors)
          * 2 ** len(g1 or ()) * 2 ** len(g2 or ()))
    G = (theta_frac(l1, tabs.fact) * theta_frac(l2, tabs.fact)
         * bigtheta_frac(q, list(g1 or [])) * bigtheta_frac(q, list(g2 or []))
         / q ** 2)
    main = (ctx.Q - z1 * q ** 2 - q * (q - 1) * q ** (n / 2)
            - 2 * m * q ** (n / 2 + 2) * (W4 - 1))
    return float(G) * main
