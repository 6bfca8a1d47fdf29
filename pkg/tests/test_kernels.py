"""Backend agreement for the batch kernels (numba vs pure numpy)."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from pnsieve import _kernels as K

needs_numba = pytest.mark.skipif(
    K.BACKENDS["numba"][0] is None, reason="numba not installed")


def _gen_mulmat():
    # multiplication by a generator of F_7^3 (order 342)
    from pnsieve.ffield import build_field, element_order
    ctx = build_field(7, 1, 3)
    gen = next(a for a in ctx.elements()
               if not ctx.is_zero(a) and element_order(ctx, a) == ctx.Q - 1)
    return np.ascontiguousarray(ctx.mul_matrix(gen), dtype=np.int64), ctx


def test_encode_weights():
    assert list(K.encode_weights(7, 4)) == [1, 7, 49, 343]


def test_power_table_cycles():
    mulmat, ctx = _gen_mulmat()
    pow_np = K.BACKENDS["numpy"][0](mulmat, 7, ctx.Q - 1)
    assert pow_np[0] == 1                       # gamma^0 = 1 at index 1
    assert len(set(pow_np.tolist())) == ctx.Q - 1


@needs_numba
def test_power_table_backends_agree():
    mulmat, ctx = _gen_mulmat()
    a = K.BACKENDS["numpy"][0](mulmat, 7, ctx.Q - 1)
    b = K.BACKENDS["numba"][0](mulmat, 7, ctx.Q - 1)
    assert np.array_equal(a, b)


def test_power_and_dlog_rejects_non_generator():
    from pnsieve.ffield import build_field, element_order
    ctx = build_field(7, 1, 3)
    a = next(e for e in ctx.elements()
             if not ctx.is_zero(e)
             and element_order(ctx, e) not in (1, ctx.Q - 1))
    M = np.ascontiguousarray(ctx.mul_matrix(a), dtype=np.int64)
    with pytest.raises(ValueError):
        K.power_and_dlog(M, 7, ctx.Q - 1)


def test_linear_index_table_identity():
    eye = np.eye(3, dtype=np.int64)
    w = K.encode_weights(5, 3)
    out = K.BACKENDS["numpy"][1](eye, 5, 3, w)
    assert np.array_equal(out, np.arange(125))


@needs_numba
def test_linear_index_table_backends_agree():
    rng = np.random.default_rng(7)
    mat = rng.integers(0, 5, size=(2, 4)).astype(np.int64)
    w = K.encode_weights(5, 2)
    a = K.BACKENDS["numpy"][1](mat, 5, 4, w)
    b = K.BACKENDS["numba"][1](mat, 5, 4, w)
    assert np.array_equal(a, b)


def _char_inputs():
    rng = np.random.default_rng(11)
    N = 342
    dl = rng.integers(0, N, size=500).astype(np.int64)
    exps = np.array([N // 18 * c for c in (1, 5, 7, 11, 13, 17)],
                    dtype=np.int64)
    weights = np.full(len(exps), 1 / 6, dtype=np.complex128)
    roots = np.exp(2j * np.pi * np.arange(N) / N)
    return dl, exps, weights, N, roots


def test_char_table_matches_direct_sum():
    dl, exps, weights, N, roots = _char_inputs()
    got = K.BACKENDS["numpy"][2](dl, exps, weights, N, roots)
    for i in (0, 13, 499):
        direct = sum(w * np.exp(2j * np.pi * ((e * dl[i]) % N) / N)
                     for e, w in zip(exps, weights))
        assert abs(got[i] - direct) < 1e-12


@needs_numba
def test_char_table_backends_agree():
    dl, exps, weights, N, roots = _char_inputs()
    a = K.BACKENDS["numpy"][2](dl, exps, weights, N, roots)
    b = K.BACKENDS["numba"][2](dl, exps, weights, N, roots)
    assert np.max(np.abs(a - b)) < 1e-12


def test_kahan_sum():
    # many small addends against a large accumulator: naive summation
    # drops them all, the compensated loop keeps every one
    vals = np.array([1e16] + [1.0] * 10000, dtype=np.complex128)
    assert K.kahan_sum(vals).real == 1e16 + 10000
    rng = np.random.default_rng(3)
    z = (rng.standard_normal(1000) + 1j * rng.standard_normal(1000))
    expect = complex(math.fsum(z.real), math.fsum(z.imag))
    assert abs(K.kahan_sum(z) - expect) < 1e-12


def test_env_flag_forces_numpy_backend():
    env = dict(os.environ, PNSIEVE_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c",
         "from pnsieve import _kernels; print(_kernels.backend_name())"],
        capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "numpy"


def test_active_backend_consistent():
    assert K.backend_name() in ("numpy", "numba")
    if K.backend_name() == "numba":
        assert K.USING_NUMBA and K.BACKENDS["numba"][0] is not None
