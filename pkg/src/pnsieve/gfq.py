"""Small-field arithmetic and dense polynomial helpers.

Two things live here.  First, a compact model of F_{p^k} ("the subfield
F_q") with elements as little-endian coefficient tuples over F_p, built
on the canonical modulus: the lexicographically smallest monic
irreducible of the right degree, comparing coefficient vectors from the
constant term up.  Second, generic dense polynomial routines (mul,
divmod, gcd, powmod, evaluation) over any coefficient field exposing
zero/one/add/sub/mul/inv, so the same code serves F_p, F_q and the big
extension fields.

Polynomial literals in reports and table files use the human form
``x^3+x^2+5x+5`` (coefficients reduced mod p); element literals are
little-endian ``[c0,c1,...]``.
"""

import re


# -- F_p polynomial basics (coefficients are ints) ---------------------

def fp_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def fp_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return fp_trim(out)


def fp_divmod(a, b, p):
    a = list(a)
    db, da = len(b) - 1, len(a) - 1
    if db < 0:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = pow(b[-1], -1, p)
    quo = [0] * max(da - db + 1, 0)
    while len(a) - 1 >= db and a:
        shift = len(a) - 1 - db
        factor = a[-1] * inv_lead % p
        if factor:
            quo[shift] = factor
            for i, bi in enumerate(b):
                a[shift + i] = (a[shift + i] - factor * bi) % p
        a.pop()
        fp_trim(a)
    return fp_trim(quo), a


def fp_powmod(base, e, mod, p):
    result = [1]
    base = fp_divmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = fp_divmod(fp_mul(result, base, p), mod, p)[1]
        base = fp_divmod(fp_mul(base, base, p), mod, p)[1]
        e >>= 1
    return result


def fp_gcd(a, b, p):
    a, b = list(a), list(b)
    while b:
        a, b = b, fp_divmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def fp_is_irreducible(f, p):
    """Rabin test: f (monic, degree d >= 1) is irreducible over F_p."""
    d = len(f) - 1
    if d < 1:
        return False
    if f[0] == 0 and d > 1:
        return False
    x = [0, 1]
    # x^(p^d) == x mod f (reduce both sides: for d = 1, x itself is not)
    xp = fp_powmod(x, p ** d, f, p)
    diff = [((xp[i] if i < len(xp) else 0) - (x[i] if i < len(x) else 0)) % p
            for i in range(max(len(xp), len(x)))]
    if fp_trim(fp_divmod(diff, f, p)[1]):
        return False
    dd = d
    prime_divs = set()
    t = 2
    while t * t <= dd:
        if dd % t == 0:
            prime_divs.add(t)
            while dd % t == 0:
                dd //= t
        t += 1
    if dd > 1:
        prime_divs.add(dd)
    for t in prime_divs:
        xe = fp_powmod(x, p ** (d // t), f, p)
        diff = fp_trim([(xe[i] if i < len(xe) else 0) - (x[i] if i < len(x) else 0)
                        for i in range(max(len(xe), len(x)))])
        diff = [c % p for c in diff]
        if fp_gcd(diff, f, p) != [1]:
            return False
    return True


def canonical_irreducible(p, degree):
    """Lexicographically smallest monic irreducible of given degree over
    F_p, comparing coefficient vectors low-degree-first.

    >>> canonical_irreducible(3, 1)
    [0, 1]
    >>> canonical_irreducible(7, 2)
    [1, 0, 1]
    """
    if degree == 1:
        return [0, 1]  # x is irreducible; (0,) is the lex-smallest tail
    # c0 = 0 means x divides f, so the scan starts where c0 becomes 1
    for idx in range(p ** (degree - 1), p ** degree):
        # c0 is the most significant digit in the lex comparison
        coeffs = []
        t = idx
        for pos in range(degree - 1, -1, -1):
            coeffs.append(t // p ** pos)
            t %= p ** pos
        f = coeffs + [1]
        if fp_is_irreducible(f, p):
            return f
    raise AssertionError("unreachable: irreducibles exist for every degree")


# -- F_q = F_{p^k} as coefficient tuples -------------------------------

class GFq:
    """The field with p^k elements; elements are little-endian length-k
    tuples of residues mod p, multiplied modulo the canonical modulus."""

    def __init__(self, p, k):
        self.p = p
        self.k = k
        self.q = p ** k
        self.modulus = canonical_irreducible(p, k)
        self.zero = (0,) * k
        self.one = self.from_int(1)

    def from_int(self, c):
        return ((c % self.p,) + (0,) * (self.k - 1))

    def from_coeffs(self, coeffs):
        coeffs = list(coeffs) + [0] * (self.k - len(coeffs))
        return tuple(c % self.p for c in coeffs[:self.k])

    def elements(self):
        """All q elements in lex order (constant coefficient last in the
        counting, i.e. plain base-p little-endian enumeration)."""
        for idx in range(self.q):
            t = idx
            vec = []
            for _ in range(self.k):
                vec.append(t % self.p)
                t //= self.p
            yield tuple(vec)

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % self.p for x in a)

    def mul(self, a, b):
        prod = fp_mul(list(a), list(b), self.p)
        rem = fp_divmod(prod, self.modulus, self.p)[1]
        return self.from_coeffs(rem)

    def mul_int(self, a, c):
        return tuple(x * c % self.p for x in a)

    def is_zero(self, a):
        return all(x == 0 for x in a)

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError("inverse of zero in GF(%d)" % self.q)
        return self.pow(a, self.q - 2)

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

    def trace_to_prime(self, a):
        """Tr_{q/p}(a) as an integer in [0, p)."""
        acc = self.zero
        cur = a
        for _ in range(self.k):
            acc = self.add(acc, cur)
            cur = self.pow(cur, self.p)
        assert all(x == 0 for x in acc[1:]), "trace landed outside F_p"
        return acc[0]


# -- generic dense polynomials over a field object ---------------------
#
# A "field object" F provides: zero, one, add, sub, mul, inv, is_zero.
# Polynomials are plain lists of coefficients, low degree first, with no
# trailing zeros (the zero polynomial is []).

def poly_trim(F, a):
    while a and F.is_zero(a[-1]):
        a.pop()
    return a


def poly_add(F, a, b):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else F.zero
        y = b[i] if i < len(b) else F.zero
        out.append(F.add(x, y))
    return poly_trim(F, out)


def poly_sub(F, a, b):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else F.zero
        y = b[i] if i < len(b) else F.zero
        out.append(F.sub(x, y))
    return poly_trim(F, out)


def poly_mul(F, a, b):
    if not a or not b:
        return []
    out = [F.zero] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if F.is_zero(ai):
            continue
        for j, bj in enumerate(b):
            out[i + j] = F.add(out[i + j], F.mul(ai, bj))
    return poly_trim(F, out)


def poly_divmod(F, a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    db = len(b) - 1
    inv_lead = F.inv(b[-1])
    quo = [F.zero] * max(len(a) - db, 0)
    while len(a) - 1 >= db and a:
        shift = len(a) - 1 - db
        factor = F.mul(a[-1], inv_lead)
        if not F.is_zero(factor):
            quo[shift] = factor
            for i, bi in enumerate(b):
                a[shift + i] = F.sub(a[shift + i], F.mul(factor, bi))
        a.pop()
        poly_trim(F, a)
    return poly_trim(F, quo), a


def poly_mod(F, a, b):
    return poly_divmod(F, a, b)[1]


def poly_monic(F, a):
    if not a:
        return a
    inv = F.inv(a[-1])
    return [F.mul(c, inv) for c in a]


def poly_gcd(F, a, b):
    a, b = list(a), list(b)
    while b:
        a, b = b, poly_mod(F, a, b)
    return poly_monic(F, a)


def poly_pow_mod(F, base, e, mod):
    result = [F.one]
    base = poly_mod(F, list(base), mod)
    e = int(e)
    while e:
        if e & 1:
            result = poly_mod(F, poly_mul(F, result, base), mod)
        base = poly_mod(F, poly_mul(F, base, base), mod)
        e >>= 1
    return result


def poly_eval(F, a, x):
    acc = F.zero
    for c in reversed(a):
        acc = F.add(F.mul(acc, x), c)
    return acc


def poly_eq(F, a, b):
    if len(a) != len(b):
        return False
    return all(F.is_zero(F.sub(x, y)) for x, y in zip(a, b))


def poly_xn_minus_1(F, n):
    out = [F.zero] * (n + 1)
    out[0] = F.sub(F.zero, F.one)
    out[n] = F.one
    return out


# -- literals ----------------------------------------------------------

_TERM_RE = re.compile(r"^([0-9]*)(x(?:\^([0-9]+))?)?$")


def parse_poly(text, p):
    """Parse a human-form polynomial with integer coefficients, e.g.
    ``x^3+x^2+5x+5`` or ``(x^24+6)/(x+6)``, into a coefficient list over
    F_p (low degree first).  A quotient form must divide exactly.

    >>> parse_poly("x^2+x+6", 7)
    [6, 1, 1]
    >>> parse_poly("(x^6+6)/(x+6)", 7)
    [1, 1, 1, 1, 1, 1]
    """
    text = text.strip().replace(" ", "")
    if "/" in text:
        num_s, den_s = text.split("/", 1)
        num = parse_poly(num_s.strip("()"), p)
        den = parse_poly(den_s.strip("()"), p)
        quo, rem = fp_divmod(num, den, p)
        if rem:
            raise ValueError("quotient literal %r does not divide exactly" % text)
        return quo
    text = text.strip("()")
    if not text:
        raise ValueError("empty polynomial literal")
    # normalize minus signs into +- so we can split on +
    text = text.replace("-", "+-")
    out = {}
    for term in text.split("+"):
        if not term:
            continue
        sign = 1
        if term.startswith("-"):
            sign = -1
            term = term[1:]
        m = _TERM_RE.match(term)
        if not m:
            raise ValueError("bad term %r in polynomial literal" % term)
        cstr, xpart, estr = m.groups()
        coef = int(cstr) if cstr else 1
        if xpart:
            exp = int(estr) if estr else 1
        else:
            if cstr == "":
                raise ValueError("bad term %r in polynomial literal" % term)
            exp = 0
        out[exp] = (out.get(exp, 0) + sign * coef) % p
    deg = max(out) if out else 0
    coeffs = [(out.get(i, 0)) % p for i in range(deg + 1)]
    return fp_trim(coeffs)


def format_poly(coeffs, var="x"):
    """Render an F_p coefficient list in the human form used by reports.

    >>> format_poly([6, 1, 1])
    'x^2+x+6'
    >>> format_poly([1])
    '1'
    """
    coeffs = list(coeffs)
    if not coeffs:
        return "0"
    parts = []
    for e in range(len(coeffs) - 1, -1, -1):
        c = coeffs[e]
        if not c:
            continue
        if e == 0:
            parts.append(str(c))
        elif e == 1:
            parts.append(("%s" if c == 1 else "%d%s") % ((var,) if c == 1 else (c, var)))
        else:
            head = "" if c == 1 else str(c)
            parts.append("%s%s^%d" % (head, var, e))
    return "+".join(parts) if parts else "0"


def format_elem(coeffs):
    """Little-endian element literal ``[c0,c1,...]``."""
    return "[" + ",".join(str(int(c)) for c in coeffs) + "]"


def parse_elem(text):
    body = text.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise ValueError("element literal must look like [c0,c1,...]")
    inner = body[1:-1].strip()
    if not inner:
        return ()
    return tuple(int(tok) for tok in inner.split(","))


if __name__ == "__main__":  # pragma: no cover
    import doctest
    doctest.testmod()
