"""Golden-table verification.

Four shipped tables are re-derived row by row: the asymptotic threshold
table (n_k per q = 7^k), the omega-window table for n in {6, 7}, and the
two certifying-choice tables (l, g, g') for the prime sieve.  A separate
report re-computes the whole large-omega constant chain those windows
hang off.

Printed decimal table entries are compared at printed precision (within
one unit in the last printed digit); direction checks (S exceeds, bound
stays below) are carried alongside.  One window's M entry is a truncated
rather than rounded-up value and is reported as such, never patched.
"""

import re
from collections import Counter
from dataclasses import dataclass, replace
from decimal import Decimal
from fractions import Fraction
from importlib import resources
from itertools import product as _iproduct

from .cyclofactor import coset_profile, degree_split
from .gfq import GFq, parse_poly
from .ntheory import (Factorization, factor_group_order, first_primes,
                      hints_for, squarefree_bound_const)
from .sieve import (ModifiedPartition, SieveChoice, asymptotic_n_threshold,
                    check_modified_sieve, check_prime_sieve,
                    prime_sieve_quantities)


def _data(name):
    return (resources.files("pnsieve") / "data" / name).read_text()


def _rows(text):
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            yield [part.strip() for part in line.split("|")]


# -- table loading -----------------------------------------------------

@dataclass(frozen=True)
class ThresholdRow:
    r: Fraction
    k_printed: str
    ks: tuple
    n_k: int


@dataclass(frozen=True)
class WindowRow:
    a: int
    b: int
    wl_exp: int
    s_printed: str
    m_printed: str
    bound_printed: str


@dataclass(frozen=True)
class ChoiceRow:
    sr: int
    k: int
    n: int
    l: int
    g: str
    gp: str

    @property
    def q(self):
        return 7 ** self.k


def load_table1():
    """Threshold rows.  Each printed k-set resolves to the consecutive
    range [min, max]; together the sixteen rows tile k = 3..72, which is
    asserted here."""
    rows = []
    for r_str, kset, nk in _rows(_data("table1.txt")):
        nums = [int(tok) for tok in re.findall(r"\d+", kset)]
        ks = tuple(range(min(nums), max(nums) + 1))
        rows.append(ThresholdRow(r=Fraction(r_str), k_printed=kset,
                                 ks=ks, n_k=int(nk)))
    covered = sorted(k for row in rows for k in row.ks)
    if covered != list(range(3, 73)):
        raise ValueError("threshold rows do not tile k = 3..72")
    return rows


def load_table2():
    return [WindowRow(int(a), int(b), int(wl), s, m, bound)
            for a, b, wl, s, m, bound in _rows(_data("table2.txt"))]


def _load_choices(name):
    return [ChoiceRow(int(sr), int(k), int(n), int(l), g, gp)
            for sr, k, n, l, g, gp in _rows(_data(name))]


def load_table3():
    return _load_choices("table3.txt")


def load_table4():
    return _load_choices("table4.txt")


# -- printed-precision comparison --------------------------------------

def printed_ulp(printed):
    """One unit in the last printed digit, as an exact Fraction."""
    return Fraction(10) ** Decimal(printed).as_tuple().exponent


def agrees_printed(exact, printed):
    return abs(exact - Fraction(Decimal(printed))) <= printed_ulp(printed)


# -- threshold table ----------------------------------------------------

@dataclass(frozen=True)
class RowReport:
    table: int
    row_id: str
    passed: bool
    notes: tuple = ()
    detail: object = None


def _e14_holds(k, r, n, m=2, base=7):
    C = Fraction(squarefree_bound_const(r))
    e = Fraction(n, 2) - 2 - Fraction(2 * n, 1) / Fraction(r)
    rhs = 2 * m * C * C * Fraction(2) ** (2 * n - 1)
    return Fraction(base ** k) ** e.numerator > rhs ** e.denominator


def check_table1(window=50):
    """Verify every threshold row: the claim (criterion holds from the
    printed n_k on, for every k in the set) and minimality of n_k.

    A row whose printed n_k is larger than the computed minimum still
    makes a true claim; it passes with a "not minimal" note.  A printed
    n_k below the computed minimum would be an actual mismatch.
    """
    reports = []
    for row in load_table1():
        computed = {k: asymptotic_n_threshold(k, row.r, m=2, base=7,
                                              cap=row.n_k + 100,
                                              window=window)
                    for k in row.ks}
        group = max(computed.values()) if None not in computed.values() else None
        claim = group is not None and group <= row.n_k
        notes = []
        if group is None:
            notes.append("no stable threshold found below cap")
        elif group < row.n_k:
            notes.append("printed threshold not minimal (computed %d)" % group)
        elif group > row.n_k:
            notes.append("printed threshold too small: criterion first "
                         "stabilises at %d" % group)
        reports.append(RowReport(
            table=1, row_id="r=%s k=%s" % (row.r, row.k_printed),
            passed=claim, notes=tuple(notes),
            detail={"printed": row.n_k, "computed": group,
                    "per_k": computed}))
    return reports


# -- omega-window table --------------------------------------------------

def window_quantities(a, b, wl_exp):
    """Worst-case (S, M, bound) when omega(q^n-1) lies in [a, b]: the
    kept part is the a smallest primes, the sieve removes primes
    #a+1..#b of the minimising sequence 2, 3, 5, ..., and g = L,
    g' = x^n-1 are kept whole with W(g) W(g') <= 2^6 * 2^7."""
    primes = first_primes(b)
    sieved = primes[a:]
    S = Fraction(1) - 2 * sum((Fraction(1, p) for p in sieved), Fraction(0))
    if S <= 0:
        return S, None, None
    M = Fraction(2 * len(sieved) - 1, 1) / S + 2
    bound = 4 * M * Fraction(2) ** (2 * wl_exp) * 2 ** 13
    return S, M, bound


def check_table2():
    reports = []
    for row in load_table2():
        S, M, bound = window_quantities(row.a, row.b, row.wl_exp)
        agree = (agrees_printed(S, row.s_printed)
                 and agrees_printed(M, row.m_printed)
                 and agrees_printed(bound, row.bound_printed))
        s_dir = S > Fraction(Decimal(row.s_printed))
        m_dir = M < Fraction(Decimal(row.m_printed))
        b_dir = bound < Fraction(Decimal(row.bound_printed))
        notes = []
        if not m_dir:
            excess = M - Fraction(Decimal(row.m_printed))
            notes.append("exact M exceeds the printed value by %.1e "
                         "(printed entry truncated, not rounded up); the "
                         "bound column is computed from exact M and holds"
                         % float(excess))
        passed = agree and s_dir and b_dir
        reports.append(RowReport(
            table=2, row_id="a=%d b=%d" % (row.a, row.b),
            passed=passed, notes=tuple(notes),
            detail={"S": S, "M": M, "bound": bound,
                    "S_float": float(S), "M_float": float(M),
                    "bound_float": float(bound)}))
    return reports


# -- certifying-choice tables ---------------------------------------------

def build_choice(row, hints=None):
    """Assemble the SieveChoice a table row describes.

    Needs the complete factorization of q^n-1 (hint-extended), the
    degree profile of x^n-1, and -- when g or g' is a nontrivial
    literal -- its degree decomposition via root-order peeling (gcds
    with x^d - 1; no splitting-field arithmetic).  Returns (choice,
    notes); choice is None when the factorization is incomplete or a
    literal is invalid.
    """
    q, n = row.q, row.n
    raw_hints = hints_for(hints, 7, row.k, n) if hints else None
    group = factor_group_order(7, row.k, n, hints=raw_hints)
    if not group.complete:
        return None, ("factorization of 7^%d-1 incomplete (cofactor %d)"
                      % (row.k * n, group.cofactor),)
    if group.value % row.l:
        return None, ("l = %d does not divide 7^%d-1" % (row.l, row.k * n),)

    kept_l = group.restrict(row.l)
    kept_pr = set(kept_l.primes())
    sieved_pr = tuple(p for p in group.primes() if p not in kept_pr)

    profile = coset_profile(q, n)
    x_degs = sorted(profile.degree_profile)
    l_degs = list(x_degs)
    l_degs.remove(1)   # the x-1 factor

    F = GFq(7, row.k)
    kept_g, err = _decompose(F, row.g, n, within_L=True)
    if err:
        return None, ("g literal: " + err,)
    kept_gp, err = _decompose(F, row.gp, n, within_L=False)
    if err:
        return None, ("g' literal: " + err,)

    sieved_g = _multiset_minus(l_degs, kept_g)
    sieved_gp = _multiset_minus(x_degs, kept_gp)
    if sieved_g is None or sieved_gp is None:
        return None, ("kept factors not contained in the factor profile",)

    choice = SieveChoice(kept_l=kept_l, kept_g=tuple(kept_g),
                         kept_gp=tuple(kept_gp),
                         sieved_primes=sieved_pr,
                         sieved_g=tuple(sieved_g),
                         sieved_gp=tuple(sieved_gp))
    return choice, ()


def _decompose(F, literal, n, within_L):
    if literal == "1":
        return (), None
    try:
        degrees, has_x_minus_1 = degree_split(F, parse_poly(literal, 7), n)
    except ValueError as exc:
        return None, ("%s: %s" % (literal, exc))
    if within_L and has_x_minus_1:
        return None, ("%s is divisible by x-1, so it is not a divisor of L"
                      % literal)
    return degrees, None


def _multiset_minus(whole, part):
    counts = Counter(whole)
    counts.subtract(Counter(part))
    if any(v < 0 for v in counts.values()):
        return None
    return sorted(counts.elements())


def check_choice_row(table, row, hints=None, m=2):
    choice, notes = build_choice(row, hints=hints)
    if choice is None:
        return RowReport(table=table, row_id="(7^%d,%d)" % (row.k, row.n),
                         passed=False, notes=notes)
    rep = check_prime_sieve(choice, row.q, row.n, m)
    return RowReport(table=table, row_id="(7^%d,%d)" % (row.k, row.n),
                     passed=rep.holds, notes=notes,
                     detail={"report": rep, "choice": choice})


# -- published errata -------------------------------------------------------
#
# Two rows of the first choice table carry transcription slips: swapping
# in the corrected entry makes the row certify, and the printed entry
# demonstrably cannot (x+1 does not even divide x^15 - 1 when -1 is not
# an n-th root of unity; l = 6 leaves too much sieved mass).  One row is
# beyond repair: for (7^2, 8) no kept/sieved split certifies at all --
# scan_prime_sieve_choices enumerates every one of them, and
# scan_modified_partitions does the same for the three-way refinement.

@dataclass(frozen=True)
class Erratum:
    table: int
    sr: int
    field: str
    printed: str
    corrected: str     # None when no correction exists
    reason: str


ERRATA = {
    (3, 4): Erratum(
        table=3, sr=4, field="l", printed="6", corrected="30",
        reason="as printed the row fails; keeping 5 as well (l = 30) "
               "certifies, so the printed l dropped a factor"),
    (3, 31): Erratum(
        table=3, sr=31, field="gp", printed="x+1", corrected="x+3",
        reason="x+1 does not divide x^15-1 over F_(7^4); the row "
               "certifies with the root-of-unity divisor x+3"),
    (3, 12): Erratum(
        table=3, sr=12, field="row", printed="(7^2, 8)", corrected=None,
        reason="no certifying choice exists: every kept/sieved split "
               "fails the inequality (exhaustive scan), and so does "
               "every bounded three-way refinement"),
}


def apply_erratum(row, err):
    if err.corrected is None:
        return row
    return replace(row, **{err.field: type(getattr(row, err.field))(
        err.corrected)})


def check_table3(hints=None, corrected=False):
    reports = []
    for row in load_table3():
        err = ERRATA.get((3, row.sr))
        if corrected and err is not None:
            patched = apply_erratum(row, err)
            rep = check_choice_row(3, patched, hints=hints)
            note = ("%s corrected %s -> %s: %s"
                    % (err.field, err.printed, err.corrected, err.reason)
                    if err.corrected is not None else
                    "no correction exists: " + err.reason)
            rep = replace(rep, notes=(note,) + rep.notes)
            reports.append(rep)
        else:
            reports.append(check_choice_row(3, row, hints=hints))
    return reports


def check_table4(hints=None, corrected=False):
    return [check_choice_row(4, row, hints=hints) for row in load_table4()]


# -- exhaustive no-fix certificates ----------------------------------------

def _submultisets(degrees):
    counts = Counter(degrees)
    keys = sorted(counts)
    for take in _iproduct(*(range(counts[k] + 1) for k in keys)):
        yield sorted(d for k, c in zip(keys, take) for d in [k] * c)


def scan_prime_sieve_choices(k, n, hints=None, m=2):
    """Every kept/sieved split for (7^k, n), checked.

    Kept primes range over all subsets of the primes of q^n-1 (2^omega
    of them), kept factor sets over all sub-multisets of the degree
    profiles of L and x^n-1.  Returns totals, the number certifying,
    and the smallest right-hand side seen next to the fixed left-hand
    side, so a zero-certify result carries its own margin evidence.
    """
    q = 7 ** k
    raw = hints_for(hints, 7, k, n) if hints else None
    group = factor_group_order(7, k, n, hints=raw).require_complete()
    profile = coset_profile(q, n)
    x_degs = sorted(profile.degree_profile)
    l_degs = list(x_degs)
    l_degs.remove(1)

    primes = group.primes()
    g_sets = list(_submultisets(l_degs))
    gp_sets = list(_submultisets(x_degs))
    total = certifying = 0
    best_rhs = None
    best = None
    for mask in range(1 << len(primes)):
        kept_pr = [p for i, p in enumerate(primes) if mask >> i & 1]
        divisor = 1
        for p, e in group.factors:
            if p in kept_pr:
                divisor *= p ** e
        kept_l = group.restrict(divisor)
        sieved_pr = tuple(p for p in primes if p not in kept_pr)
        for kept_g in g_sets:
            sieved_g = _multiset_minus(l_degs, kept_g)
            for kept_gp in gp_sets:
                sieved_gp = _multiset_minus(x_degs, kept_gp)
                choice = SieveChoice(
                    kept_l=kept_l, kept_g=tuple(kept_g),
                    kept_gp=tuple(kept_gp), sieved_primes=sieved_pr,
                    sieved_g=tuple(sieved_g), sieved_gp=tuple(sieved_gp))
                total += 1
                S, M = prime_sieve_quantities(choice, q)
                if M is None:
                    continue
                rhs = 2 * m * choice.w_l ** 2 * choice.w_g \
                    * choice.w_gp * M
                if best_rhs is None or rhs < best_rhs:
                    best_rhs, best = rhs, choice
                if check_prime_sieve(choice, q, n, m).holds:
                    certifying += 1
    return {"q": q, "n": n, "total": total, "certifying": certifying,
            "lhs_float": float(q) ** ((n - 4) / 2),
            "best_rhs_float": float(best_rhs) if best_rhs is not None
            else None,
            "best_choice": best}


def scan_modified_partitions(k, n, hints=None, m=2, corrected=False,
                             on_progress=None):
    """Every three-way partition for (7^k, n), checked.

    Primes are assigned kept/mid/tail independently (3^omega ways);
    each degree profile splits as a multiset into three parts.  This is
    the heavyweight companion to scan_prime_sieve_choices -- for
    (7^2, 8) it visits 1,180,980 partitions -- so progress can be
    observed via on_progress(done, total).
    """
    q = 7 ** k
    raw = hints_for(hints, 7, k, n) if hints else None
    group = factor_group_order(7, k, n, hints=raw).require_complete()
    profile = coset_profile(q, n)
    x_degs = sorted(profile.degree_profile)
    l_degs = list(x_degs)
    l_degs.remove(1)
    primes = group.primes()

    def three_way_multisets(degrees):
        out = []
        for kept in _submultisets(degrees):
            rest = _multiset_minus(degrees, kept)
            for mid in _submultisets(rest):
                out.append((tuple(kept), tuple(mid),
                            tuple(_multiset_minus(rest, mid))))
        return out

    g_splits = three_way_multisets(l_degs)
    gp_splits = three_way_multisets(x_degs)
    n_prime_splits = 3 ** len(primes)
    total = n_prime_splits * len(g_splits) * len(gp_splits)
    done = certifying = 0
    for assign in _iproduct(range(3), repeat=len(primes)):
        kp = tuple(p for p, w in zip(primes, assign) if w == 0)
        mp = tuple(p for p, w in zip(primes, assign) if w == 1)
        tp = tuple(p for p, w in zip(primes, assign) if w == 2)
        for kept_g, mid_g, tail_g in g_splits:
            for kept_gp, mid_gp, tail_gp in gp_splits:
                part = ModifiedPartition(
                    kept_primes=kp, mid_primes=mp, tail_primes=tp,
                    kept_g=kept_g, mid_g=mid_g, tail_g=tail_g,
                    kept_gp=kept_gp, mid_gp=mid_gp, tail_gp=tail_gp)
                if check_modified_sieve(part, q, n, m,
                                        corrected=corrected).holds:
                    certifying += 1
                done += 1
        if on_progress:
            on_progress(done, total)
    return {"q": q, "n": n, "total": total, "certifying": certifying}


# -- the large-omega constant chain ---------------------------------------

def _primorial(count):
    out = 1
    for p in first_primes(count):
        out *= p
    return out


def _frac(printed):
    return Fraction(Decimal(printed))


def part_two_report():
    """Re-derive the constant chain that reduces n in {6, 7} to finitely
    many candidate pairs.  Exact integer/rational comparisons throughout;
    each step is reported with its computed quantities."""
    from .ntheory import verify_omega_threshold

    checks = []

    def add(name, ok, **detail):
        checks.append({"name": name, "ok": bool(ok), **detail})

    # W(M) < M^(1/13) for omega(M) >= 2828, and its three constants
    rep = verify_omega_threshold()
    add("thirteenth_root_bound", rep["ok"], report=rep)

    # with that bound: member when q^n > 2^(390n/(9n-52)); the exponent
    # peaks at n = 6 with value 1170 and decreases in n
    peak = Fraction(390 * 6, 9 * 6 - 52)
    mono = all(Fraction(390 * n, 9 * n - 52) <= 1170 for n in range(6, 200))
    add("exponent_peak_1170", peak == 1170 and mono, peak=str(peak))

    # omega >= 2828 forces q^n - 1 >= primorial(2828) > 2^1170
    add("omega_2828_clears_2_pow_1170", _primorial(2828) > 2 ** 1170)

    # the 88-prime window, omega in [88, 2827]: r <= 2739 and S is
    # minimised by the primes 461..25667
    primes = first_primes(2827)
    sieved = primes[88:]
    add("window88_prime_range",
        len(sieved) == 2739 and sieved[0] == 461 and sieved[-1] == 25667,
        first=sieved[0], last=sieved[-1], r=len(sieved))
    S = Fraction(1) - 2 * sum((Fraction(1, p) for p in sieved), Fraction(0))
    add("window88_S", S > _frac("0.0044306"), S_float=float(S))
    M = Fraction(2 * len(sieved) - 1, 1) / S + 2
    add("window88_M", M < _frac("1.24e6"), M_float=float(M))
    R_exact = 4 * M * Fraction(2) ** 176 * 2 ** 13
    R_printed = _frac("3.8797485e63")
    add("window88_R", R_exact < R_printed, R_float=float(R_exact))

    # q^n > R^6 certifies n >= 6 (exponent 2n/(n-4) <= 6); omega >= 157
    # already clears that via the primorial
    conseq = _frac("3.410527e381")
    add("R_sixth_power", R_printed ** 6 <= conseq and R_exact ** 6 < conseq,
        printed_R6_digits=len(str(int(R_printed ** 6))))
    add("omega_157_clears_R6", _primorial(157) > conseq)
    add("window88_upper_edge_tight", _primorial(156) <= conseq)

    # the three narrower windows
    t2 = check_table2()
    for r in t2:
        add("window_row_%s" % r.row_id, r.passed, notes=list(r.notes),
            S=r.detail["S_float"], M=r.detail["M_float"],
            bound=r.detail["bound_float"])

    # window junctions: each bound^6, cleared by the primorial at the
    # next window's b + 1
    rows = load_table2()
    for upper, lower in zip(rows, rows[1:]):
        bound6 = _frac(upper.bound_printed) ** 6
        t = lower.b + 1
        add("junction_b%d_to_b%d" % (upper.b, lower.b),
            _primorial(t) > bound6,
            tight=bool(_primorial(t - 1) <= bound6))

    # small-omega tail: omega <= a-1 keeps everything, M = 1, and the
    # bound 4 * 2^(2*omega) * 2^13 sits far below the final window bound
    final = _frac(rows[-1].bound_printed)
    tail_a = rows[-1].a
    tail_ok = all(4 * Fraction(2) ** (2 * w) * 2 ** 13 < final
                  for w in range(0, tail_a))
    add("small_omega_tail", tail_ok, covers_up_to=tail_a - 1)

    # final thresholds: q^(n/2-2) > 1.09140e13.  n = 6: q > bound, so
    # 7^k remains a candidate exactly for k <= 15; n = 7: q^(3/2) >
    # bound, i.e. q^3 > bound^2, candidates exactly k <= 10.
    n6 = [k for k in range(1, 30) if Fraction(7) ** k <= final]
    n7 = [k for k in range(1, 30) if Fraction(7) ** (3 * k) <= final ** 2]
    add("n6_candidates", n6 == list(range(1, 16)), ks=n6)
    add("n7_candidates", n7 == list(range(1, 11)), ks=n7)

    ok = all(c["ok"] for c in checks)
    return {"ok": ok, "checks": checks}
