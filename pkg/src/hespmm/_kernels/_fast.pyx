# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled modular polynomial kernels.

Same contracts as ``_py``: per-prime negacyclic NTT plus pointwise modular
ops on uint64 residue arrays. Products are taken in 128-bit registers;
twiddle factors use Shoup precomputation, generic products use Barrett
reduction with ``mu = floor(2^(2k)/q)`` for ``k = bit_length(q)``.
"""

import numpy as np

BACKEND = "cython"

ctypedef unsigned long long u64

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"
    int __builtin_clzll(unsigned long long) nogil


cdef inline u64 _mul_shoup(u64 x, u64 w, u64 w_sh, u64 q) nogil:
    # Shoup modmul: w_sh = floor(w * 2^64 / q); requires x < q.
    cdef u64 hi = <u64>((<u128>x * w_sh) >> 64)
    cdef u64 r = x * w - hi * q
    if r >= q:
        r -= q
    return r


cdef inline u64 _mul_barrett(u64 a, u64 b, u64 q, u64 mu, int k) nogil:
    cdef u128 x = <u128>a * b
    cdef u64 q1 = <u64>(x >> (k - 1))
    cdef u64 q2 = <u64>((<u128>q1 * mu) >> (k + 1))
    cdef u64 r = <u64>x - q2 * q
    while r >= q:
        r -= q
    return r


cdef inline int _bits(u64 q) nogil:
    return 64 - __builtin_clzll(q)


def ntt(a, q_, roots, roots_sh):
    """Forward negacyclic NTT, natural-order input."""
    cdef u64 q = q_
    out = np.array(a, dtype=np.uint64, copy=True)
    cdef u64[::1] v = out
    cdef u64[::1] rt = roots
    cdef u64[::1] rt_sh = roots_sh
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t t = n, m = 1, i, j, base
    cdef u64 w, w_sh, x, y
    with nogil:
        while m < n:
            t >>= 1
            for i in range(m):
                w = rt[m + i]
                w_sh = rt_sh[m + i]
                base = 2 * i * t
                for j in range(base, base + t):
                    x = v[j]
                    y = _mul_shoup(v[j + t], w, w_sh, q)
                    v[j] = x + y if x + y < q else x + y - q
                    v[j + t] = x - y if x >= y else x + q - y
            m <<= 1
    return out


def intt(a, q_, iroots, iroots_sh, n_inv_):
    """Inverse of :func:`ntt`."""
    cdef u64 q = q_
    cdef u64 n_inv = n_inv_
    out = np.array(a, dtype=np.uint64, copy=True)
    cdef u64[::1] v = out
    cdef u64[::1] irt = iroots
    cdef u64[::1] irt_sh = iroots_sh
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t t = 1, m = n >> 1, i, j, base
    cdef u64 w, w_sh, x, y, s
    cdef u64 ninv_sh = <u64>(((<u128>n_inv) << 64) // q)
    with nogil:
        while m >= 1:
            for i in range(m):
                w = irt[m + i]
                w_sh = irt_sh[m + i]
                base = 2 * i * t
                for j in range(base, base + t):
                    x = v[j]
                    y = v[j + t]
                    s = x + y
                    if s >= q:
                        s -= q
                    v[j] = s
                    v[j + t] = _mul_shoup(x - y if x >= y else x + q - y, w, w_sh, q)
            t <<= 1
            m >>= 1
        for j in range(n):
            v[j] = _mul_shoup(v[j], n_inv, ninv_sh, q)
    return out


def add_mod(a, b, q_):
    cdef u64 q = q_
    out = np.empty_like(a)
    cdef u64[::1] x = a, y = b, r = out
    cdef Py_ssize_t j, n = x.shape[0]
    cdef u64 s
    with nogil:
        for j in range(n):
            s = x[j] + y[j]
            r[j] = s - q if s >= q else s
    return out


def sub_mod(a, b, q_):
    cdef u64 q = q_
    out = np.empty_like(a)
    cdef u64[::1] x = a, y = b, r = out
    cdef Py_ssize_t j, n = x.shape[0]
    with nogil:
        for j in range(n):
            r[j] = x[j] - y[j] if x[j] >= y[j] else x[j] + q - y[j]
    return out


def neg_mod(a, q_):
    cdef u64 q = q_
    out = np.empty_like(a)
    cdef u64[::1] x = a, r = out
    cdef Py_ssize_t j, n = x.shape[0]
    with nogil:
        for j in range(n):
            r[j] = q - x[j] if x[j] != 0 else 0
    return out


def mul_mod(a, b, q_, mu_):
    cdef u64 q = q_, mu = mu_
    cdef int k = _bits(q)
    out = np.empty_like(a)
    cdef u64[::1] x = a, y = b, r = out
    cdef Py_ssize_t j, n = x.shape[0]
    with nogil:
        for j in range(n):
            r[j] = _mul_barrett(x[j], y[j], q, mu, k)
    return out


def scalar_mul_mod(a, s_, q_):
    cdef u64 q = q_, s = s_ % q_
    cdef u64 s_sh = <u64>(((<u128>s) << 64) // q)
    out = np.empty_like(a)
    cdef u64[::1] x = a, r = out
    cdef Py_ssize_t j, n = x.shape[0]
    with nogil:
        for j in range(n):
            r[j] = _mul_shoup(x[j], s, s_sh, q)
    return out


def fma_mod(acc, a, b, q_, mu_):
    """In-place ``acc = (acc + a*b) mod q``."""
    cdef u64 q = q_, mu = mu_
    cdef int k = _bits(q)
    cdef u64[::1] r = acc, x = a, y = b
    cdef Py_ssize_t j, n = x.shape[0]
    cdef u64 s
    with nogil:
        for j in range(n):
            s = r[j] + _mul_barrett(x[j], y[j], q, mu, k)
            r[j] = s - q if s >= q else s


def extend_mod(a, q_src_, q_dst_):
    """Reinterpret residues mod ``q_src`` as centered integers, reduce mod ``q_dst``."""
    cdef u64 q_src = q_src_, q_dst = q_dst_
    cdef u64 half = q_src >> 1
    out = np.empty_like(a)
    cdef u64[::1] x = a, r = out
    cdef Py_ssize_t j, n = x.shape[0]
    cdef u64 v
    with nogil:
        for j in range(n):
            v = x[j]
            if v > half:
                # negative representative: q_dst - ((q_src - v) mod q_dst)
                v = (q_src - v) % q_dst
                r[j] = q_dst - v if v != 0 else 0
            else:
                r[j] = v % q_dst
    return out
