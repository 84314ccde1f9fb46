"""Scheme parameters: the RNS modulus chain and per-prime NTT tables.

The modulus chain is an ordered list of distinct NTT-friendly primes
``q_0 .. q_L`` (base prime first, then one scaling prime per level), plus a
single auxiliary prime used only inside key switching. Primes are found by a
deterministic downward/alternating scan so the same inputs always produce the
same chain.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..errors import ParameterError

# Deterministic Miller-Rabin witnesses for all 64-bit integers.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

DEFAULT_RING_DEGREE = 1 << 13
DEFAULT_SCALE_BITS = 40
DEFAULT_LEVELS = 4
DEFAULT_SEED = 2024
BASE_PRIME_BITS = 60
AUX_PRIME_BITS = 60


def is_prime(x: int) -> bool:
    if x < 2:
        return False
    for p in _MR_BASES:
        if x % p == 0:
            return x == p
    d = x - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        y = pow(a, d, x)
        if y in (1, x - 1):
            continue
        for _ in range(r - 1):
            y = y * y % x
            if y == x - 1:
                break
        else:
            return False
    return True


def _scan_prime(start: int, step: int, modulus: int, lo: int, hi: int,
                exclude: set[int]) -> int:
    """First prime ≡ 1 (mod modulus) walking from start by step, within [lo, hi]."""
    q = start - (start - 1) % modulus  # largest value ≤ start that is ≡ 1
    if step > 0 and q < start:
        q += modulus
    while lo <= q <= hi:
        if q not in exclude and is_prime(q):
            return q
        q += step * modulus
    raise ParameterError(
        f"no NTT-friendly prime in [{lo}, {hi}] for modulus {modulus}"
    )


def _bitrev(x: int, bits: int) -> int:
    y = 0
    for _ in range(bits):
        y = (y << 1) | (x & 1)
        x >>= 1
    return y


def find_primitive_root(q: int, order: int) -> int:
    """Element of exact multiplicative order ``order`` (a power of two) mod q."""
    if (q - 1) % order != 0:
        raise ParameterError(f"non-NTT-friendly prime {q}: q-1 not divisible by {order}")
    exp = (q - 1) // order
    for g in range(2, 1000):
        psi = pow(g, exp, q)
        if pow(psi, order // 2, q) == q - 1:
            return psi
    raise ParameterError(f"no primitive root of order {order} found mod {q}")


class PrimeTables:
    """Precomputed NTT twiddles and reduction constants for one prime."""

    __slots__ = ("q", "mu", "n", "n_inv", "roots", "roots_sh", "iroots", "iroots_sh")

    def __init__(self, q: int, n: int):
        if (q - 1) % (2 * n) != 0:
            raise ParameterError(f"non-NTT-friendly prime {q} for ring degree {n}")
        self.q = q
        self.n = n
        k = q.bit_length()
        self.mu = (1 << (2 * k)) // q
        psi = find_primitive_root(q, 2 * n)
        bits = n.bit_length() - 1
        roots = [pow(psi, _bitrev(i, bits), q) for i in range(n)]
        iroots = [pow(r, -1, q) for r in roots]
        self.roots = np.array(roots, dtype=np.uint64)
        self.iroots = np.array(iroots, dtype=np.uint64)
        self.roots_sh = np.array([(r << 64) // q for r in roots], dtype=np.uint64)
        self.iroots_sh = np.array([(r << 64) // q for r in iroots], dtype=np.uint64)
        self.n_inv = pow(n, -1, q)


@lru_cache(maxsize=None)
def prime_tables(q: int, n: int) -> PrimeTables:
    return PrimeTables(q, n)


@dataclass(frozen=True)
class CkksParams:
    """Desk-scale leveled CKKS parameter set.

    ``modulus_chain`` holds ``q_0 .. q_L``; ``aux_prime`` is the key-switch
    auxiliary. ``levels`` is L; a fresh ciphertext sits at level L and each
    rescale drops the chain's current last prime. Not production-secure at
    any setting shipped here.
    """

    ring_degree: int
    modulus_chain: tuple[int, ...]
    scale_bits: int
    aux_prime: int
    seed: int = field(default=DEFAULT_SEED)

    def __post_init__(self):
        n = self.ring_degree
        if n < 8 or n & (n - 1):
            raise ParameterError(f"ring degree must be a power of two >= 8, got {n}")
        if len(self.modulus_chain) < 1:
            raise ParameterError("modulus chain is empty")
        if self.scale_bits <= 0:
            raise ParameterError("scale_bits must be positive")
        seen = set()
        for q in (*self.modulus_chain, self.aux_prime):
            if q in seen:
                raise ParameterError(f"duplicate prime {q} in chain")
            seen.add(q)
            if (q - 1) % (2 * n) != 0 or not is_prime(q):
                raise ParameterError(f"non-NTT-friendly prime {q}")
        for q in self.modulus_chain[1:]:
            drift = abs(np.log2(float(q)) - self.scale_bits)
            if drift > 1.0:
                raise ParameterError(
                    f"scaling prime {q} is {drift:.2f} bits away from scale 2^{self.scale_bits}"
                )

    @property
    def levels(self) -> int:
        return len(self.modulus_chain) - 1

    @property
    def slots(self) -> int:
        return self.ring_degree // 2

    @property
    def scale(self) -> float:
        return float(1 << self.scale_bits)

    def max_matrix_dim(self) -> int:
        """Largest N with n >= 2*N^2, i.e. an N x N result fits the slots."""
        return int(np.sqrt(self.slots))


def build_params(ring_degree: int = DEFAULT_RING_DEGREE,
                 scale_bits: int = DEFAULT_SCALE_BITS,
                 levels: int = DEFAULT_LEVELS,
                 seed: int = DEFAULT_SEED) -> CkksParams:
    """Deterministically assemble a chain for the requested shape.

    Base and auxiliary primes are the largest 60-bit NTT-friendly primes;
    scaling primes alternate just above/below 2^scale_bits so the product
    tracks the nominal scale.
    """
    n = ring_degree
    if n < 8 or n & (n - 1):
        raise ParameterError(f"ring degree must be a power of two >= 8, got {n}")
    m = 2 * n
    exclude: set[int] = set()
    base = _scan_prime((1 << BASE_PRIME_BITS) - 1, -1, m,
                       1 << (BASE_PRIME_BITS - 1), 1 << BASE_PRIME_BITS, exclude)
    exclude.add(base)
    target = 1 << scale_bits
    scaling: list[int] = []
    for i in range(levels):
        if i % 2 == 0:
            q = _scan_prime(target + 1, 1, m, target // 2, target * 2, exclude)
        else:
            q = _scan_prime(target - 1, -1, m, target // 2, target * 2, exclude)
        exclude.add(q)
        scaling.append(q)
    aux = _scan_prime((1 << AUX_PRIME_BITS) - 1, -1, m,
                      1 << (AUX_PRIME_BITS - 1), 1 << AUX_PRIME_BITS, exclude)
    return CkksParams(
        ring_degree=n,
        modulus_chain=(base, *scaling),
        scale_bits=scale_bits,
        aux_prime=aux,
        seed=seed,
    )


def default_params(seed: int = DEFAULT_SEED) -> CkksParams:
    """The package's desk-scale default: n = 2^13, Δ = 2^40, four levels."""
    return build_params(DEFAULT_RING_DEGREE, DEFAULT_SCALE_BITS, DEFAULT_LEVELS, seed)
