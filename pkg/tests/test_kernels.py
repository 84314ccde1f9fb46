"""Kernel backends against a naive negacyclic oracle and each other."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hespmm._kernels import _py
from hespmm.ckks.params import build_params, prime_tables

try:
    from hespmm._kernels import _fast
    BACKENDS = [_py, _fast]
except ImportError:
    _fast = None
    BACKENDS = [_py]

N = 64
PARAMS = build_params(ring_degree=N, scale_bits=35, levels=2, seed=3)
PRIMES = [*PARAMS.modulus_chain, PARAMS.aux_prime]


def naive_negacyclic(a, b, q):
    """Schoolbook product in Z_q[X]/(X^N + 1); the golden model."""
    n = len(a)
    out = np.zeros(n, dtype=object)
    ao = a.astype(object)
    bo = b.astype(object)
    for i in range(n):
        for j in range(n):
            k = i + j
            if k < n:
                out[k] = (out[k] + ao[i] * bo[j]) % q
            else:
                out[k - n] = (out[k - n] - ao[i] * bo[j]) % q
    return out.astype(np.uint64)


def rand_poly(rng, q, n=N):
    return rng.integers(0, q, n, dtype=np.uint64)


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.BACKEND)
@pytest.mark.parametrize("q", PRIMES)
def test_ntt_roundtrip(impl, q):
    tab = prime_tables(q, N)
    rng = np.random.default_rng(1)
    a = rand_poly(rng, q)
    fwd = impl.ntt(a, q, tab.roots, tab.roots_sh)
    back = impl.intt(fwd, q, tab.iroots, tab.iroots_sh, tab.n_inv)
    assert np.array_equal(back, a)


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.BACKEND)
@pytest.mark.parametrize("q", PRIMES)
def test_ntt_convolution_matches_golden_model(impl, q):
    tab = prime_tables(q, N)
    rng = np.random.default_rng(2)
    a = rand_poly(rng, q)
    b = rand_poly(rng, q)
    fa = impl.ntt(a, q, tab.roots, tab.roots_sh)
    fb = impl.ntt(b, q, tab.roots, tab.roots_sh)
    prod = impl.mul_mod(fa, fb, q, tab.mu)
    got = impl.intt(prod, q, tab.iroots, tab.iroots_sh, tab.n_inv)
    assert np.array_equal(got, naive_negacyclic(a, b, q))


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.BACKEND)
def test_pointwise_ops_match_bigint(impl):
    q = PRIMES[0]
    tab = prime_tables(q, N)
    rng = np.random.default_rng(3)
    a = rand_poly(rng, q)
    b = rand_poly(rng, q)
    ao, bo = a.astype(object), b.astype(object)
    assert np.array_equal(impl.add_mod(a, b, q), ((ao + bo) % q).astype(np.uint64))
    assert np.array_equal(impl.sub_mod(a, b, q), ((ao - bo) % q).astype(np.uint64))
    assert np.array_equal(impl.neg_mod(a, q), ((-ao) % q).astype(np.uint64))
    assert np.array_equal(impl.mul_mod(a, b, q, tab.mu),
                          ((ao * bo) % q).astype(np.uint64))
    s = 0xDEADBEEF
    assert np.array_equal(impl.scalar_mul_mod(a, s, q),
                          ((ao * s) % q).astype(np.uint64))
    acc = rand_poly(rng, q)
    expect = ((acc.astype(object) + ao * bo) % q).astype(np.uint64)
    impl.fma_mod(acc, a, b, q, tab.mu)
    assert np.array_equal(acc, expect)


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.BACKEND)
def test_extend_mod_centers_residues(impl):
    q_src, q_dst = PRIMES[1], PRIMES[2]
    rng = np.random.default_rng(4)
    a = rand_poly(rng, q_src)
    got = impl.extend_mod(a, q_src, q_dst)
    centered = np.where(a > q_src // 2,
                        a.astype(object) - q_src, a.astype(object))
    assert np.array_equal(got, (centered % q_dst).astype(np.uint64))


@pytest.mark.skipif(_fast is None, reason="compiled backend unavailable")
@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), prime_idx=st.integers(0, len(PRIMES) - 1))
def test_backends_agree(seed, prime_idx):
    q = PRIMES[prime_idx]
    tab = prime_tables(q, N)
    rng = np.random.default_rng(seed)
    a = rand_poly(rng, q)
    b = rand_poly(rng, q)
    assert np.array_equal(_py.ntt(a, q, tab.roots, tab.roots_sh),
                          _fast.ntt(a, q, tab.roots, tab.roots_sh))
    assert np.array_equal(_py.mul_mod(a, b, q, tab.mu),
                          _fast.mul_mod(a, b, q, tab.mu))
    assert np.array_equal(_py.extend_mod(a, q, PRIMES[0]),
                          _fast.extend_mod(a, q, PRIMES[0]))


def test_backend_selection_reports_name():
    import hespmm

    assert hespmm.get_backend() in ("cython", "python")
