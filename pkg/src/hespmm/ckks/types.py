"""Value types for the scheme: plaintexts, ciphertexts, key material.

All polynomials are stored limb-wise in NTT (evaluation) form as uint64
arrays, one per chain prime present at the object's level. Instances are
never mutated after construction; every evaluation op allocates its result.
"""

from dataclasses import dataclass, field

import numpy as np

RnsPoly = tuple  # tuple[np.ndarray, ...], one uint64 limb per prime


@dataclass(frozen=True)
class Plaintext:
    limbs: RnsPoly
    scale: float
    level: int

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("plaintext scale must be positive")
        if self.level < 0 or len(self.limbs) != self.level + 1:
            raise ValueError("plaintext limbs inconsistent with level")


@dataclass(frozen=True)
class Ciphertext:
    """2 or 3 RNS polynomials plus exact scale/level bookkeeping.

    Degree 2 (three polynomials) exists only transiently between a
    ciphertext-ciphertext multiplication and its relinearization.
    """

    polys: tuple  # tuple[RnsPoly, ...] of length 2 or 3
    scale: float
    level: int

    def __post_init__(self):
        if len(self.polys) not in (2, 3):
            raise ValueError("ciphertext must hold 2 or 3 polynomials")
        if self.scale <= 0:
            raise ValueError("ciphertext scale must be positive")
        if self.level < 0:
            raise ValueError("ciphertext level is negative")

    @property
    def degree(self) -> int:
        return len(self.polys) - 1


@dataclass(frozen=True)
class KeySwitchKey:
    """Per-digit switching material over the full chain plus the auxiliary prime.

    ``b[i][m]`` / ``a[i][m]`` are the two components for digit ``i`` on limb
    ``m``, where limbs run over ``q_0 .. q_L`` and the auxiliary prime last.
    """

    b: tuple  # tuple over digits of RnsPoly (length L+2 each)
    a: tuple


@dataclass(frozen=True)
class KeyBundle:
    """Secret/public/relinearization keys plus any generated rotation keys.

    ``galois`` maps a normalized rotation step in ``[1, slots)`` to its
    switching key. The bundle fully determines decryption; NTT forms of the
    secret key are cached lazily per prime.
    """

    secret: np.ndarray  # int8 coefficients in {-1, 0, 1}
    public: tuple  # (b_limbs, a_limbs), each an RnsPoly over q_0..q_L
    relin: KeySwitchKey
    galois: dict = field(default_factory=dict)
    _sk_ntt_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def with_galois(self, extra: dict) -> "KeyBundle":
        merged = dict(self.galois)
        merged.update(extra)
        return KeyBundle(self.secret, self.public, self.relin, merged,
                         self._sk_ntt_cache)
