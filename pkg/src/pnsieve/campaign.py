"""Per-pair verification pipeline and the sweep around it.

For one pair (q, n) = (p^k, n) the pipeline runs the sufficient
criteria cheapest-first -- basic, prime-sieve search, bounded
modified-sieve search, and (when the factorization of q^n - 1 is
incomplete) the squarefree-bound route that needs no factoring at
all -- stopping at the first certification.  Every attempt is recorded;
a pair that certifies is a "member", a pair whose complete-information
criteria all failed is an "exception-candidate", and a pair whose
factorization is incomplete and whose factoring-free route also failed
stays "indeterminate", never guessed.

A sweep is an ordered list of pair entries plus a summary; when the
sweep is over base 7 with degree sum 2 the summary also compares the
exception-candidate set against the published exception list, range-
restricted.  Reports serialize to versioned, byte-stable JSON (entries
sorted by (q, n), keys sorted, no timestamps) and to CSV.
"""

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .cyclofactor import coset_profile
from .ntheory import factor_group_order, hints_for, squarefree_bound_const
from .sieve import (VERDICT_FAILS, VERDICT_HOLDS, VERDICT_INAPPLICABLE,
                    VERDICT_INDETERMINATE, SieveChoice, check_basic,
                    check_modified_sieve, check_prime_sieve, search_choice,
                    search_modified)

SCHEMA = "pnsieve-report/1"

MEMBER = "member"
EXCEPTION_CANDIDATE = "exception-candidate"
INDETERMINATE = "indeterminate"

#: 1/r exponents tried by the factoring-free squarefree-bound route
SQFREE_R_GRID = (Fraction(17, 2), Fraction(9), Fraction(19, 2),
                 Fraction(10), Fraction(21, 2))

#: published exception lists for base 7, degree sum 2, keyed by k;
#: pairs with larger k have no exceptions
PUBLISHED_EXCEPTIONS_7 = {
    1: (6, 7, 8, 9, 10, 12, 18),
    2: (6, 7),
    3: (6,),
    4: (6,),
}


def published_exception_ns(k):
    return PUBLISHED_EXCEPTIONS_7.get(k, ())


@dataclass
class PairEntry:
    p: int
    k: int
    n: int
    m: int
    verdict: str = INDETERMINATE
    criterion: str = None          # the certifying criterion, when member
    attempts: list = field(default_factory=list)
    certificate: dict = None
    factor_complete: bool = False
    cofactor: int = None           # unfactored remainder when incomplete
    omega: int = None
    oracle: dict = None
    notes: list = field(default_factory=list)

    @property
    def q(self):
        return self.p ** self.k

    def json_dict(self):
        return {
            "p": self.p, "k": self.k, "q": self.q, "n": self.n, "m": self.m,
            "verdict": self.verdict, "criterion": self.criterion,
            "attempts": self.attempts, "certificate": self.certificate,
            "factor_complete": self.factor_complete,
            "cofactor": self.cofactor, "omega": self.omega,
            "oracle": self.oracle, "notes": self.notes,
        }


def _attempt(entry, criterion, report):
    entry.attempts.append({
        "criterion": criterion,
        "verdict": report.verdict,
        "S": None if report.S is None else float(report.S),
        "M": None if report.M is None else float(report.M),
        "margin_log10": list(report.margin) if report.margin else None,
        "notes": list(report.notes),
    })
    return report


def choice_certificate(choice, kind="prime_sieve"):
    return {
        "kind": kind,
        "kept_l": {"value": choice.kept_l.value,
                   "factors": [list(f) for f in choice.kept_l.factors]},
        "kept_g": list(choice.kept_g),
        "kept_gp": list(choice.kept_gp),
        "sieved_primes": list(choice.sieved_primes),
        "sieved_g": list(choice.sieved_g),
        "sieved_gp": list(choice.sieved_gp),
    }


def choice_from_certificate(cert, group_fact):
    """Rebuild the SieveChoice a certificate describes, revalidating
    kept_l against the pair's factorization."""
    kept_l = group_fact.restrict(cert["kept_l"]["value"])
    if [list(f) for f in kept_l.factors] != cert["kept_l"]["factors"]:
        raise ValueError("certificate kept_l factors disagree with the "
                         "group factorization")
    return SieveChoice(
        kept_l=kept_l,
        kept_g=tuple(cert["kept_g"]), kept_gp=tuple(cert["kept_gp"]),
        sieved_primes=tuple(cert["sieved_primes"]),
        sieved_g=tuple(cert["sieved_g"]),
        sieved_gp=tuple(cert["sieved_gp"]))


def partition_certificate(part):
    return {
        "kind": "modified_sieve",
        "kept_primes": list(part.kept_primes),
        "mid_primes": list(part.mid_primes),
        "tail_primes": list(part.tail_primes),
        "kept_g": list(part.kept_g), "mid_g": list(part.mid_g),
        "tail_g": list(part.tail_g),
        "kept_gp": list(part.kept_gp), "mid_gp": list(part.mid_gp),
        "tail_gp": list(part.tail_gp),
    }


def _sqfree_bound_holds(q, n, m, W_L, W_xn, r):
    """q^(n/2-2) > 2m C(r)^2 q^(2n/r) W(L) W(x^n-1), exactly.

    The unconditional W(q^n-1) < C(r) (q^n-1)^(1/r) bound removes the
    need for the factorization; the exponent arithmetic stays in
    Fractions and the comparison is raised to the common denominator.
    """
    r = Fraction(r)
    C = Fraction(squarefree_bound_const(r))
    e = Fraction(n - 4, 2) - 2 * Fraction(n) / r
    rhs = 2 * m * C * C * W_L * W_xn
    if e <= 0:
        return False
    return Fraction(q) ** e.numerator > rhs ** e.denominator


def check_pair(p, k, n, m=2, hints=None, corrected=False, jobs=1,
               with_oracle=False, factor_budget=None):
    """Run the pipeline for one pair and record everything.

    hints is the parsed hint-file dict (or None); corrected switches the
    modified sieve to the corrected-variant annotation; with_oracle adds
    a witness spot-check when the field is small enough.
    """
    if n < 5:
        raise ValueError("pairs with n < 5 are outside every criterion; "
                         "the standing assumption is n >= 5")
    if p == 2:
        raise ValueError("even characteristic is outside scope: the "
                         "subtrace identity divides by 2")
    entry = PairEntry(p=p, k=k, n=n, m=m)
    q = p ** k

    raw_hints = hints_for(hints, p, k, n) if hints else None
    kwargs = {} if factor_budget is None else {"budget": factor_budget}
    group = factor_group_order(p, k, n, hints=raw_hints, **kwargs)
    entry.factor_complete = group.complete
    entry.omega = len(group.factors) if group.complete else None
    if not group.complete:
        entry.cofactor = group.cofactor
        entry.notes.append(
            "factorization of %d^%d-1 incomplete: cofactor %d unfactored"
            % (p, k * n, group.cofactor))
    if group.rejected_hints:
        entry.notes.append("rejected hints: %s"
                           % ", ".join(map(str, group.rejected_hints)))

    profile = coset_profile(q, n)
    W_L = 1 << (len(profile.degree_profile) - 1)
    W_xn = 1 << len(profile.degree_profile)

    # 1. basic criterion (needs the complete factorization for W(q^n-1))
    W_qn = (1 << len(group.factors)) if group.complete else None
    basic = _attempt(entry, "basic", check_basic(q, n, m, W_qn, W_L, W_xn))
    if basic.holds:
        entry.verdict, entry.criterion = MEMBER, "basic"
        entry.certificate = {"kind": "basic", "W_qn": W_qn, "W_L": W_L,
                             "W_xn": W_xn}
    # 2. factoring-free squarefree-bound route
    if entry.verdict != MEMBER:
        hit = next((r for r in SQFREE_R_GRID
                    if _sqfree_bound_holds(q, n, m, W_L, W_xn, r)), None)
        entry.attempts.append({
            "criterion": "squarefree_bound",
            "verdict": VERDICT_HOLDS if hit else VERDICT_FAILS,
            "S": None, "M": None, "margin_log10": None,
            "notes": ["r = %s" % hit] if hit else []})
        if hit is not None:
            entry.verdict, entry.criterion = MEMBER, "squarefree_bound"
            entry.certificate = {"kind": "squarefree_bound",
                                 "r": str(hit), "W_L": W_L, "W_xn": W_xn}
    # 3. prime-sieve search
    if entry.verdict != MEMBER and group.complete:
        choice = search_choice(q, n, m, profile, group)
        if choice is not None:
            rep = _attempt(entry, "prime_sieve",
                           check_prime_sieve(choice, q, n, m))
            assert rep.holds
            entry.verdict, entry.criterion = MEMBER, "prime_sieve"
            entry.certificate = choice_certificate(choice)
        else:
            entry.attempts.append({
                "criterion": "prime_sieve", "verdict": VERDICT_FAILS,
                "S": None, "M": None, "margin_log10": None,
                "notes": ["no certifying kept/sieved split in the "
                          "bounded search"]})
    # 4. bounded modified-sieve search
    if entry.verdict != MEMBER and group.complete:
        found = search_modified(q, n, m, profile, group, corrected=corrected)
        if found is not None:
            part, rep = found
            _attempt(entry, "modified_sieve", rep)
            entry.verdict, entry.criterion = MEMBER, "modified_sieve"
            entry.certificate = partition_certificate(part)
        else:
            entry.attempts.append({
                "criterion": "modified_sieve", "verdict": VERDICT_FAILS,
                "S": None, "M": None, "margin_log10": None,
                "notes": ["no certifying three-way partition in the "
                          "bounded enumeration"]})

    if entry.verdict != MEMBER:
        if group.complete:
            entry.verdict = EXCEPTION_CANDIDATE
            entry.notes.append("all criteria failed or were inapplicable "
                               "with complete factorization; no sufficient "
                               "condition certifies this pair at desk scale")
        else:
            entry.verdict = INDETERMINATE
            entry.notes.append("incomplete factorization blocks the sieve "
                               "criteria and the factoring-free bound "
                               "failed; supply factor hints to resolve")

    if with_oracle:
        entry.oracle = _oracle_spot_check(p, k, n, jobs=jobs)
    return entry


def _oracle_spot_check(p, k, n, jobs=1):
    """Witness search over the standard map set for every valid (a, b),
    on fields under the oracle cap; returns a JSON-ready summary."""
    from . import oracle as O
    from .ffield import build_field

    try:
        ctx = build_field(p, k, n, limit=O.ORACLE_CAP)
        tabs = O.get_tables(ctx)
    except (ValueError, O.OracleCapError) as exc:
        return {"ran": False, "reason": str(exc)}
    F = ctx.gfq
    out = {"ran": True, "witnesses": [], "zero_counts": []}
    for f in O.standard_maps(ctx):
        for b in F.elements():
            if F.is_zero(b):
                continue
            a = F.mul(b, b)
            w = O.find_pair_witness(ctx, f, a, b, tables=tabs, jobs=jobs)
            if w is None:
                out["zero_counts"].append(
                    {"f": f.label, "a": list(a), "b": list(b)})
            else:
                out["witnesses"].append(w.json_dict())
    out["all_configs_witnessed"] = not out["zero_counts"]
    return out


@dataclass
class CampaignReport:
    p: int
    m: int
    k_range: tuple
    n_range: tuple
    entries: list
    corrected: bool = False

    def members(self):
        return [e for e in self.entries if e.verdict == MEMBER]

    def exception_candidates(self):
        return [e for e in self.entries
                if e.verdict == EXCEPTION_CANDIDATE]

    def indeterminates(self):
        return [e for e in self.entries if e.verdict == INDETERMINATE]

    def published_comparison(self):
        """Computed exception-candidates against the published list,
        restricted to the sweep range; None when the sweep is not the
        base-7 degree-2 setting the list belongs to."""
        if self.p != 7 or self.m != 2:
            return None
        lo_n, hi_n = self.n_range
        per_k = {}
        for k in range(self.k_range[0], self.k_range[1] + 1):
            expected = sorted(n for n in published_exception_ns(k)
                              if lo_n <= n <= hi_n)
            computed = sorted(e.n for e in self.exception_candidates()
                              if e.k == k)
            unresolved = sorted(e.n for e in self.indeterminates()
                                if e.k == k)
            per_k[k] = {"expected": expected, "computed": computed,
                        "indeterminate": unresolved,
                        "matches": computed == expected and not unresolved,
                        # published possible-exceptions we certified anyway
                        "resolved": sorted(set(expected) - set(computed)),
                        # uncertified pairs the published list does not carry
                        "extra": sorted(set(computed) - set(expected))}
        return {"per_k": per_k,
                "matches": all(v["matches"] for v in per_k.values())}

    def json_dict(self):
        comparison = self.published_comparison()
        return {
            "schema": SCHEMA,
            "params": {"p": self.p, "m": self.m,
                       "k_range": list(self.k_range),
                       "n_range": list(self.n_range),
                       "corrected": self.corrected},
            "entries": [e.json_dict() for e in self.entries],
            "summary": {
                "pairs": len(self.entries),
                "members": [[e.k, e.n] for e in self.members()],
                "exception_candidates": [[e.k, e.n] for e in
                                         self.exception_candidates()],
                "indeterminate": [[e.k, e.n] for e in
                                  self.indeterminates()],
                "published_list_comparison": comparison,
            },
        }


def run_campaign(p, k_range, n_range, m=2, hints=None, jobs=1,
                 corrected=False, with_oracle=False):
    """Sweep k_range x n_range (inclusive tuples).  Pairs are independent
    work items; the report is a deterministic (q, n)-ordered merge, so
    the jobs count never changes the output."""
    pairs = [(k, n) for k in range(k_range[0], k_range[1] + 1)
             for n in range(n_range[0], n_range[1] + 1)]

    def work(kn):
        k, n = kn
        return check_pair(p, k, n, m=m, hints=hints, corrected=corrected,
                          with_oracle=with_oracle)

    jobs = max(1, int(jobs))
    if jobs == 1:
        entries = [work(kn) for kn in pairs]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(work, pairs))
    entries.sort(key=lambda e: (e.q, e.n))
    counts = {MEMBER: 0, EXCEPTION_CANDIDATE: 0, INDETERMINATE: 0}
    for e in entries:
        counts[e.verdict] += 1
    assert sum(counts.values()) == len(entries)
    return CampaignReport(p=p, m=m, k_range=tuple(k_range),
                          n_range=tuple(n_range), entries=entries,
                          corrected=corrected)


# -- serialization -----------------------------------------------------------

def to_json(obj):
    """Byte-stable JSON: sorted keys, fixed separators, trailing newline."""
    if hasattr(obj, "json_dict"):
        obj = obj.json_dict()
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


CSV_PAIR_COLUMNS = ["p", "k", "q", "n", "m", "verdict", "criterion",
                    "factor_complete", "omega", "notes"]


def pairs_to_csv(entries):
    """One row per pair; list-valued fields joined with '; '."""
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(CSV_PAIR_COLUMNS)
    for e in entries:
        wr.writerow([e.p, e.k, e.q, e.n, e.m, e.verdict,
                     e.criterion or "", e.factor_complete,
                     "" if e.omega is None else e.omega,
                     "; ".join(e.notes)])
    return buf.getvalue()


CSV_ROW_COLUMNS = ["table", "row_id", "passed", "notes"]


def rows_to_csv(reports):
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(CSV_ROW_COLUMNS)
    for r in reports:
        wr.writerow([r.table, r.row_id, r.passed, "; ".join(r.notes)])
    return buf.getvalue()
