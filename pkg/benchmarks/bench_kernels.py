"""Times the three batch kernels (power table, linear index table,
multiplicative character table) under both backends on F_7^6.

Run:  python3 benchmarks/bench_kernels.py

The numbers are per-call best-of-N wall times after one warmup call, so
the numba column excludes JIT compilation.  Set PNSIEVE_NO_NUMBA=1 to
confirm the package itself falls back cleanly; this script imports both
implementations directly from pnsieve._kernels.BACKENDS, so the flag is
not needed here.
"""

import time

import numpy as np

from pnsieve import _kernels
from pnsieve.ffield import build_field

P, K, N_EXT = 7, 1, 6
REPEATS = 5


def best_of(fn, repeats=REPEATS):
    times = []
    for _ in range(repeats):
        t0 = time.time()
        fn()
        times.append(time.time() - t0)
    return min(times)


def main():
    ctx = build_field(P, K, N_EXT)
    D = ctx.D
    Q = ctx.p ** D
    N = Q - 1
    print(f"field F_{P}^{N_EXT}  (Q = {Q}, N = {N})")
    print(f"numba available: {_kernels.USING_NUMBA}")

    # generator multiplication matrix for the power table
    from pnsieve.ffield import element_order
    gen = None
    for a in ctx.elements():
        if not ctx.is_zero(a) and element_order(ctx, a) == N:
            gen = a
            break
    mulmat = np.ascontiguousarray(ctx.mul_matrix(gen), dtype=np.int64)

    # absolute-trace row for the linear table
    rows = []
    for i in range(D):
        coeffs = [0] * D
        coeffs[i] = 1
        rows.append(ctx.abs_trace(ctx.from_coeffs(coeffs)))
    trace_mat = np.ascontiguousarray(np.array([rows]), dtype=np.int64)
    out_w = np.ones(1, dtype=np.int64)

    # inputs for the character table: a real dlog array and 8 exponents
    pow_np = _kernels.BACKENDS["numpy"][0](mulmat, P, N)
    dlog = np.full(Q, -1, dtype=np.int64)
    dlog[pow_np] = np.arange(N, dtype=np.int64)
    dl = dlog[1:]
    d = 24
    exps = np.array([N // d * c for c in range(1, d) if np.gcd(c, d) == 1],
                    dtype=np.int64)
    weights = np.ones(len(exps), dtype=np.complex128)
    roots = np.exp(2j * np.pi * np.arange(N) / N)

    cases = [
        ("power_table", (mulmat, P, N)),
        ("linear_index_table", (trace_mat, P, D, out_w)),
        ("char_table", (dl, exps, weights, N, roots)),
    ]

    print()
    print(f"{'kernel':<20} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for pos, (name, args) in enumerate(cases):
        f_np = _kernels.BACKENDS["numpy"][pos]
        t_np = best_of(lambda: f_np(*args))
        line = f"{name:<20} {t_np * 1e3:9.1f}ms"
        f_nb = _kernels.BACKENDS["numba"][pos]
        if f_nb is None:
            line += f" {'n/a':>10} {'n/a':>8}"
        else:
            f_nb(*args)  # warmup / compile
            t_nb = best_of(lambda: f_nb(*args))
            line += f" {t_nb * 1e3:9.1f}ms {t_np / t_nb:7.1f}x"
        print(line)

    # sanity: both backends must agree exactly on every case
    for pos, (name, args) in enumerate(cases):
        f_np = _kernels.BACKENDS["numpy"][pos]
        f_nb = _kernels.BACKENDS["numba"][pos]
        if f_nb is None:
            continue
        a, b = f_np(*args), f_nb(*args)
        if name == "char_table":
            assert np.max(np.abs(a - b)) < 1e-9, name
        else:
            assert np.array_equal(a, b), name
    print("\nbackend agreement: ok")


if __name__ == "__main__":
    main()
