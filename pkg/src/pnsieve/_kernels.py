"""Batch kernels for whole-field sweeps, with numba and numpy backends.

Element indexing convention (shared with FieldCtx.elements()): the
element with little-endian coefficient vector (c_0, ..., c_{D-1}) over
F_p has index sum_i c_i p^i.  All tables produced here are numpy int64
or complex128 arrays indexed that way.

Each kernel exists twice: a numba @njit implementation and a pure-numpy
one that computes the identical array.  The active backend is picked at
import time: numba when it is importable and the environment variable
PNSIEVE_NO_NUMBA is unset/0, numpy otherwise.  Both backends stay
importable so the tests can diff them and benchmarks/bench_kernels.py
can time them against each other.
"""

import os

import numpy as np

try:
    import numba as _numba
except ImportError:          # pragma: no cover - depends on environment
    _numba = None

ENV_FLAG = "PNSIEVE_NO_NUMBA"
_force_numpy = os.environ.get(ENV_FLAG, "0") not in ("0", "", None)
USING_NUMBA = (_numba is not None) and not _force_numpy

BLOCK = 4096  # column-block width for the numpy power-table stepper


def backend_name():
    return "numba" if USING_NUMBA else "numpy"


def encode_weights(p, D):
    """int64 vector (1, p, p^2, ..., p^(D-1)) used to pack coefficient
    vectors into element indices."""
    return p ** np.arange(D, dtype=np.int64)


# -- power table: consecutive powers of a fixed element ------------------
#
# Given the D x D multiplication-by-gamma matrix M over F_p (acting on
# little-endian coefficient vectors), produce pow_idx of length `order`
# with pow_idx[j] = index of gamma^j.  The inverse table dlog (length
# p^D, -1 at index 0) is assembled by scatter in power_and_dlog().

def _power_table_numpy(mulmat, p, order):
    D = mulmat.shape[0]
    w = encode_weights(p, D)
    out = np.empty(order, dtype=np.int64)
    block = min(BLOCK, order)
    V = np.zeros((D, block), dtype=np.int64)
    V[0, 0] = 1
    for j in range(1, block):
        V[:, j] = (mulmat @ V[:, j - 1]) % p
    # step the whole block forward with M^block, entries reduced mod p
    MB = np.eye(D, dtype=np.int64)
    e = block
    sq = mulmat
    while e:
        if e & 1:
            MB = (MB @ sq) % p
        sq = (sq @ sq) % p
        e >>= 1
    done = 0
    while done < order:
        take = min(block, order - done)
        out[done:done + take] = w @ V[:, :take]
        done += take
        if done < order:
            V = (MB @ V) % p
    return out


if _numba is not None:
    @_numba.njit(cache=True)
    def _power_table_numba(mulmat, p, order):
        D = mulmat.shape[0]
        out = np.empty(order, dtype=np.int64)
        vec = np.zeros(D, dtype=np.int64)
        nxt = np.zeros(D, dtype=np.int64)
        vec[0] = 1
        for j in range(order):
            idx = np.int64(0)
            pw = np.int64(1)
            for i in range(D):
                idx += vec[i] * pw
                pw *= p
            out[j] = idx
            for r in range(D):
                acc = np.int64(0)
                for c in range(D):
                    acc += mulmat[r, c] * vec[c]
                nxt[r] = acc % p
            for r in range(D):
                vec[r] = nxt[r]
        return out
else:                        # pragma: no cover - depends on environment
    _power_table_numba = None


def power_table(mulmat, p, order):
    impl = _power_table_numba if USING_NUMBA else _power_table_numpy
    return impl(np.ascontiguousarray(mulmat, dtype=np.int64), p, order)


def power_and_dlog(mulmat, p, order):
    """(pow_idx, dlog) for a generator; raises if the element is not one."""
    pow_idx = power_table(mulmat, p, order)
    dlog = np.full(order + 1, -1, dtype=np.int64)
    dlog[pow_idx] = np.arange(order, dtype=np.int64)
    if (dlog[1:] < 0).any():
        raise ValueError("multiplication matrix does not generate the "
                         "whole unit group")
    return pow_idx, dlog


# -- linear map tabulated over the whole field ----------------------------
#
# mat is an R x D matrix over F_p.  For every element index the kernel
# decodes the base-p digits, applies mat mod p, and packs the R output
# digits with out_weights (int64, length R).  With out_weights =
# encode_weights(p, R) the result is the packed index of the image.

def _linear_index_table_numpy(mat, p, D, out_weights):
    Q = p ** D
    out = np.empty(Q, dtype=np.int64)
    chunk = 1 << 16
    w = encode_weights(p, D)
    for lo in range(0, Q, chunk):
        hi = min(lo + chunk, Q)
        idx = np.arange(lo, hi, dtype=np.int64)
        digits = (idx[None, :] // w[:, None]) % p
        img = (mat @ digits) % p
        out[lo:hi] = out_weights @ img
    return out


if _numba is not None:
    @_numba.njit(cache=True)
    def _linear_index_table_numba(mat, p, D, out_weights):
        Q = 1
        for _ in range(D):
            Q *= p
        R = mat.shape[0]
        out = np.empty(Q, dtype=np.int64)
        digits = np.zeros(D, dtype=np.int64)
        for idx in range(Q):
            t = idx
            for i in range(D):
                digits[i] = t % p
                t //= p
            packed = np.int64(0)
            for r in range(R):
                acc = np.int64(0)
                for c in range(D):
                    acc += mat[r, c] * digits[c]
                packed += (acc % p) * out_weights[r]
            out[idx] = packed
        return out
else:                        # pragma: no cover - depends on environment
    _linear_index_table_numba = None


def linear_index_table(mat, p, D, out_weights):
    impl = (_linear_index_table_numba if USING_NUMBA
            else _linear_index_table_numpy)
    return impl(np.ascontiguousarray(mat, dtype=np.int64), p, D,
                np.ascontiguousarray(out_weights, dtype=np.int64))


# -- multiplicative character accumulation --------------------------------
#
# dl: dlog values (must be >= 0; callers mask zero out beforehand).
# For exponents e_j with complex weights w_j the table is
#     acc[i] = sum_j w_j * roots[(e_j * dl[i]) mod N],
# i.e. a weighted sum of characters chi^(e_j) evaluated on gamma^dl.
# The numba path carries Kahan-compensated real/imag accumulators; the
# numpy path relies on pairwise summation plus one vector add per
# character, which keeps the error far below the oracle tolerance.

def _char_table_numpy(dl, exps, weights, N, roots):
    acc = np.zeros(len(dl), dtype=np.complex128)
    for e, w in zip(exps, weights):
        acc += w * roots[(e * dl) % N]
    return acc


if _numba is not None:
    @_numba.njit(cache=True)
    def _char_table_numba(dl, exps, weights, N, roots):
        n = len(dl)
        acc = np.zeros(n, dtype=np.complex128)
        err = np.zeros(n, dtype=np.complex128)
        for j in range(len(exps)):
            e = exps[j]
            w = weights[j]
            for i in range(n):
                term = w * roots[(e * dl[i]) % N] - err[i]
                s = acc[i] + term
                err[i] = (s - acc[i]) - term
                acc[i] = s
        return acc
else:                        # pragma: no cover - depends on environment
    _char_table_numba = None


def char_table(dl, exps, weights, N, roots):
    impl = _char_table_numba if USING_NUMBA else _char_table_numpy
    return impl(np.ascontiguousarray(dl, dtype=np.int64),
                np.ascontiguousarray(exps, dtype=np.int64),
                np.ascontiguousarray(weights, dtype=np.complex128),
                N, np.ascontiguousarray(roots, dtype=np.complex128))


def kahan_sum(values):
    """Compensated sum of a complex vector (used where a scalar total of
    many unit-modulus terms feeds a tolerance comparison)."""
    acc = 0.0 + 0.0j
    err = 0.0 + 0.0j
    for v in values:
        term = v - err
        s = acc + term
        err = (s - acc) - term
        acc = s
    return acc


BACKENDS = {
    "numpy": (_power_table_numpy, _linear_index_table_numpy,
              _char_table_numpy),
    "numba": (_power_table_numba, _linear_index_table_numba,
              _char_table_numba),
}
