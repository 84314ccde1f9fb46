"""Pure-Python modular polynomial kernels.

Reference implementation of the per-prime hot loops. Arithmetic is done on
object-dtype arrays (Python big ints), so any prime below 2^62 works without
overflow tricks. Slow but exact; the compiled backend in ``_fast`` mirrors
these semantics bit for bit.

All inputs are 1-D contiguous ``uint64`` arrays of residues in ``[0, q)``.
The Shoup/Barrett helper arguments are accepted for signature parity with the
compiled backend and ignored here.
"""

import numpy as np

BACKEND = "python"


def _obj(a):
    return a.astype(object)


def _u64(a):
    return a.astype(np.uint64)


def ntt(a, q, roots, roots_sh):
    """Forward negacyclic NTT, natural-order input."""
    n = a.shape[0]
    q = int(q)
    work = _obj(a)
    rt = _obj(roots)
    t = n
    m = 1
    while m < n:
        t >>= 1
        view = work.reshape(m, 2 * t)
        w = rt[m : 2 * m]
        u = view[:, :t]
        v = (view[:, t:] * w[:, None]) % q
        hi = (u + v) % q
        lo = (u - v) % q
        view[:, :t] = hi
        view[:, t:] = lo
        m <<= 1
    return _u64(work)


def intt(a, q, iroots, iroots_sh, n_inv):
    """Inverse of :func:`ntt`; exact stage-by-stage reversal."""
    n = a.shape[0]
    q = int(q)
    work = _obj(a)
    irt = _obj(iroots)
    m = n >> 1
    t = 1
    while m >= 1:
        view = work.reshape(m, 2 * t)
        w = irt[m : 2 * m]
        x = view[:, :t]
        y = view[:, t:]
        s = (x + y) % q
        d = ((x - y) * w[:, None]) % q
        view[:, :t] = s
        view[:, t:] = d
        t <<= 1
        m >>= 1
    return _u64((work * int(n_inv)) % q)


def add_mod(a, b, q):
    return _u64((_obj(a) + _obj(b)) % int(q))


def sub_mod(a, b, q):
    return _u64((_obj(a) - _obj(b)) % int(q))


def neg_mod(a, q):
    return _u64((-_obj(a)) % int(q))


def mul_mod(a, b, q, mu):
    return _u64((_obj(a) * _obj(b)) % int(q))


def scalar_mul_mod(a, s, q):
    return _u64((_obj(a) * int(s)) % int(q))


def fma_mod(acc, a, b, q, mu):
    """In-place ``acc = (acc + a*b) mod q``."""
    res = (_obj(acc) + _obj(a) * _obj(b)) % int(q)
    acc[:] = _u64(res)


def extend_mod(a, q_src, q_dst):
    """Reinterpret residues mod ``q_src`` as centered integers, reduce mod ``q_dst``."""
    q_src = int(q_src)
    q_dst = int(q_dst)
    vals = _obj(a)
    centered = np.where(vals > q_src // 2, vals - q_src, vals)
    return _u64(centered % q_dst)
