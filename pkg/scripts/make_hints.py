#!/usr/bin/env python3
"""Generate data/factor_hints_7.txt: verified prime factors of 7^(k*n)-1.

The package's built-in factoring (trial division + Brent rho) handles pieces
up to roughly 20 digits.  Anything beyond that is factored here, offline,
with sympy's ECM, and shipped as a hint file.  Every emitted factor is
checked for primality and for dividing the target before it is written.

Pieces that resist the ECM ladder within the time budget are reported on
stderr and simply left out; the corresponding pairs will show up as
indeterminate in campaign reports, which is the honest outcome.

Usage: python3 scripts/make_hints.py [--out data/factor_hints_7.txt]
"""

import argparse
import multiprocessing
import sys
import time

import sympy
from sympy import isprime
from sympy.ntheory.ecm import ecm


P = 7

# (k, n) pairs the test suite and desk campaign will actually query.
def needed_pairs():
    pairs = set()
    for k in range(1, 5):
        for n in range(5, 41):
            pairs.add((k, n))
    # table rows beyond the campaign window
    pairs.add((1, 48))
    pairs.add((2, 48))
    for k in range(5, 16):
        pairs.add((k, 6))
    for k in range(3, 11):
        pairs.add((k, 7))
    for k in (5, 6):
        pairs.add((k, 8))
    pairs.add((6, 9))
    pairs.add((4, 15))
    return sorted(pairs)


def trial_strip(n, bound=10**6):
    fs = {}
    for p in sympy.primerange(2, bound):
        while n % p == 0:
            fs[p] = fs.get(p, 0) + 1
            n //= p
        if n == 1:
            break
    return fs, n


def _ecm_worker(n, b1, b2, curves, q):
    try:
        q.put(ecm(n, B1=b1, B2=b2, max_curve=curves))
    except Exception as exc:  # pragma: no cover - diagnostic path
        q.put(exc)


def ecm_with_timeout(n, b1, b2, curves, timeout):
    q = multiprocessing.Queue()
    proc = multiprocessing.Process(target=_ecm_worker, args=(n, b1, b2, curves, q))
    proc.start()
    proc.join(timeout)
    if proc.is_alive():
        proc.terminate()
        proc.join()
        return None
    if q.empty():
        return None
    res = q.get()
    if isinstance(res, Exception):
        return None
    return {int(f) for f in res}


# (B1, B2, curves, timeout seconds): escalate until the composite cracks.
LADDER = [
    (10_000, 1_000_000, 200, 60),
    (100_000, 10_000_000, 300, 180),
    (1_000_000, 100_000_000, 400, 600),
]


def factor_composite(n, label):
    """Fully factor composite n if the ladder allows; return (primes, leftover)."""
    primes = {}
    pending = [n]
    leftover = []
    while pending:
        m = pending.pop()
        if m == 1:
            continue
        if isprime(m):
            primes[m] = primes.get(m, 0) + 1
            continue
        root = sympy.integer_nthroot(m, 2)
        if root[1]:
            pending.extend([root[0], root[0]])
            continue
        found = None
        for b1, b2, curves, tmo in LADDER:
            t0 = time.time()
            res = ecm_with_timeout(m, b1, b2, curves, tmo)
            dt = time.time() - t0
            if res:
                print(f"    [{label}] ecm B1={b1} cracked {len(str(m))}-digit piece "
                      f"in {dt:.1f}s", file=sys.stderr)
                found = res
                break
            print(f"    [{label}] ecm B1={b1} no factor after {dt:.1f}s",
                  file=sys.stderr)
        if not found:
            leftover.append(m)
            continue
        rem = m
        for f in sorted(found):
            while rem % f == 0:
                pending.append(f)
                rem //= f
        if rem != 1:
            pending.append(rem)
    return primes, leftover


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/factor_hints_7.txt")
    args = ap.parse_args()

    pairs = needed_pairs()
    all_d = set()
    for k, n in pairs:
        m = k * n
        all_d.update(sympy.divisors(m))

    phi_primes = {}   # d -> set of primes of Phi_d(7)
    phi_failed = {}   # d -> list of unfactored composites
    for d in sorted(all_d):
        val = int(sympy.cyclotomic_poly(d, P))
        if val == 1:
            phi_primes[d] = set()
            continue
        t0 = time.time()
        small, rem = trial_strip(val)
        primes = set(small)
        leftovers = []
        if rem > 1:
            if isprime(rem):
                primes.add(rem)
            else:
                big, leftovers = factor_composite(rem, f"Phi_{d}(7)")
                primes.update(big)
        phi_primes[d] = primes
        phi_failed[d] = leftovers
        status = "ok" if not leftovers else f"INCOMPLETE ({len(leftovers)} composite)"
        print(f"Phi_{d}(7): {len(str(val))} digits, {len(primes)} primes, "
              f"{status}, {time.time()-t0:.1f}s", file=sys.stderr)

    lines = [
        "# Verified prime factors of 7^(k*n)-1, one line per (7^k, n) pair.",
        "# Format: p^k n : f1,f2,...   (factors are primes, listed once each)",
        "# Generated by scripts/make_hints.py; every factor is primality-checked",
        "# and division-checked before being written.",
    ]
    incomplete_pairs = []
    for k, n in pairs:
        m = k * n
        primes = set()
        complete = True
        for d in sympy.divisors(m):
            primes |= phi_primes.get(d, set())
            if phi_failed.get(d):
                complete = False
        target = P ** m - 1
        emit = sorted(f for f in primes if target % f == 0 and isprime(f))
        assert len(emit) == len(primes), (k, n, sorted(primes))
        if not complete:
            incomplete_pairs.append((k, n))
        lines.append(f"7^{k} {n} : {','.join(str(f) for f in emit)}")
    if incomplete_pairs:
        lines.insert(4, "# Incomplete coverage (ECM budget exceeded) for: "
                     + ", ".join(f"(7^{k},{n})" for k, n in incomplete_pairs))

    with open(args.out, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {args.out}: {len(pairs)} pairs, "
          f"{len(incomplete_pairs)} incomplete", file=sys.stderr)


if __name__ == "__main__":
    main()
