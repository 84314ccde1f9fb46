"""Leveled CKKS evaluator: keygen, packing, and the evaluation primitives.

Everything is double-CRT: polynomials live limb-wise in NTT form and rescale
drops the chain's last prime. Key switching decomposes into one digit per
chain prime against a single auxiliary prime (the digit factors
``(Q_L/q_i)^-1 mod q_i`` are level-independent, so one key bundle serves all
levels). Slot encoding uses the canonical embedding evaluated at the orbit
of 5, via an FFT over the twisted coefficients.
"""

import numpy as np

from .. import _kernels as K
from ..errors import CapacityError, EvalError, KeyMissingError, ParameterError
from .params import CkksParams, prime_tables
from .types import Ciphertext, KeyBundle, KeySwitchKey, Plaintext

NOISE_SIGMA = 3.2
SECRET_HAMMING_WEIGHT = 32
_SCALE_MATCH_RTOL = 1e-9


class CkksContext:
    """Holds parameters plus every precomputed table the primitives need.

    Thread-safety: all evaluation methods are pure functions of their inputs;
    the only interior mutation is the encryption RNG and the no-op
    relinearization counter.
    """

    def __init__(self, params: CkksParams):
        self.params = params
        n = params.ring_degree
        self._n = n
        self._chain = list(params.modulus_chain)
        self._aux = params.aux_prime
        self._tables = {q: prime_tables(q, n) for q in (*self._chain, self._aux)}

        big_q = 1
        for q in self._chain:
            big_q *= q
        self._big_q = big_q
        # Digit factor (Q_L/q_i)^-1 mod q_i and key factor (p * Q_L/q_i) mod q_m.
        self._digit_factor = [pow(big_q // q, -1, q) for q in self._chain]
        self._ksk_factor = [
            [(params.aux_prime * (big_q // qi)) % qm for qm in self._chain]
            for qi in self._chain
        ]
        self._aux_inv = [pow(params.aux_prime, -1, q) for q in self._chain]
        self._qlast_inv = [
            [pow(self._chain[lvl], -1, self._chain[i]) for i in range(lvl)]
            for lvl in range(len(self._chain))
        ]
        # Garner tables for CRT reconstruction at decode time.
        self._garner_inv = [
            pow(self._prefix_prod(i) % self._chain[i], -1, self._chain[i])
            for i in range(1, len(self._chain))
        ]

        # Canonical-embedding tables: slot j sits at the odd exponent 5^j mod 2n.
        idx = np.arange(n)
        self._twist = np.exp(1j * np.pi * idx / n)
        exps = np.array([pow(5, j, 2 * n) for j in range(n // 2)], dtype=np.int64)
        self._slot_pos = (exps - 1) // 2
        self._conj_pos = (2 * n - exps - 1) // 2

        self._perm_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        self._enc_rng = np.random.default_rng(
            np.random.SeedSequence(entropy=(params.seed, 0xEC)))
        self.relin_noops = 0

    def _prefix_prod(self, i: int) -> int:
        p = 1
        for q in self._chain[:i]:
            p *= q
        return p

    # ---------------------------------------------------------------- limbs

    def _coeff_to_limb(self, coeffs: np.ndarray, q: int) -> np.ndarray:
        return (coeffs % q).astype(np.uint64)

    def _ntt(self, limb: np.ndarray, q: int) -> np.ndarray:
        t = self._tables[q]
        return K.ntt(limb, q, t.roots, t.roots_sh)

    def _intt(self, limb: np.ndarray, q: int) -> np.ndarray:
        t = self._tables[q]
        return K.intt(limb, q, t.iroots, t.iroots_sh, t.n_inv)

    def _coeff_to_ntt_limbs(self, coeffs: np.ndarray, nlimbs: int) -> tuple:
        return tuple(
            self._ntt(self._coeff_to_limb(coeffs, q), q)
            for q in self._chain[:nlimbs]
        )

    def _sk_ntt(self, keys: KeyBundle, q: int) -> np.ndarray:
        limb = keys._sk_ntt_cache.get(q)
        if limb is None:
            limb = self._ntt(self._coeff_to_limb(keys.secret.astype(np.int64), q), q)
            keys._sk_ntt_cache[q] = limb
        return limb

    # ------------------------------------------------------------- sampling

    def _sample_ternary(self, rng) -> np.ndarray:
        # Sparse ternary (fixed Hamming weight) keeps the canonical norm of
        # fresh encryption noise low enough for the 1e-8 roundtrip budget.
        h = min(SECRET_HAMMING_WEIGHT, self._n // 4)
        coeffs = np.zeros(self._n, dtype=np.int64)
        pos = rng.choice(self._n, size=h, replace=False)
        coeffs[pos] = rng.integers(0, 2, size=h, dtype=np.int64) * 2 - 1
        return coeffs

    def _sample_gaussian(self, rng) -> np.ndarray:
        return np.rint(rng.normal(0.0, NOISE_SIGMA, self._n)).astype(np.int64)

    # --------------------------------------------------------------- keygen

    def keygen(self) -> KeyBundle:
        """Deterministic key generation from ``params.seed``."""
        if self.params.levels < 2:
            raise ParameterError("insufficient depth: need at least 2 levels")
        rng = np.random.default_rng(self.params.seed)
        secret = self._sample_ternary(rng)

        pk_a = tuple(
            rng.integers(0, q, size=self._n, dtype=np.uint64) for q in self._chain
        )
        pk_e = self._sample_gaussian(rng)
        sk_limbs = {q: self._ntt(self._coeff_to_limb(secret, q), q)
                    for q in (*self._chain, self._aux)}
        pk_b = tuple(
            K.sub_mod(self._ntt(self._coeff_to_limb(pk_e, q), q),
                      K.mul_mod(pk_a[i], sk_limbs[q], q, self._tables[q].mu), q)
            for i, q in enumerate(self._chain)
        )

        sk2_limbs = {
            q: K.mul_mod(sk_limbs[q], sk_limbs[q], q, self._tables[q].mu)
            for q in (*self._chain, self._aux)
        }
        relin = self._make_ksk(rng, sk2_limbs, sk_limbs)

        bundle = KeyBundle(secret=secret.astype(np.int8),
                           public=(pk_b, pk_a), relin=relin)
        bundle._sk_ntt_cache.update(sk_limbs)
        return bundle

    def _make_ksk(self, rng, target_limbs: dict, sk_limbs: dict) -> KeySwitchKey:
        """Switching key for ``target``: digit i encrypts p*(Q_L/q_i)*target."""
        all_primes = (*self._chain, self._aux)
        digits_b = []
        digits_a = []
        for i, qi in enumerate(self._chain):
            a_limbs = tuple(
                rng.integers(0, q, size=self._n, dtype=np.uint64)
                for q in all_primes
            )
            e = self._sample_gaussian(rng)
            b_limbs = []
            for m, qm in enumerate(all_primes):
                mu = self._tables[qm].mu
                acc = self._ntt(self._coeff_to_limb(e, qm), qm)
                if m < len(self._chain):  # the factor vanishes mod the aux prime
                    f = self._ksk_factor[i][m]
                    acc = K.add_mod(
                        acc, K.scalar_mul_mod(target_limbs[qm], f, qm), qm)
                acc = K.sub_mod(
                    acc, K.mul_mod(a_limbs[m], sk_limbs[qm], qm, mu), qm)
                b_limbs.append(acc)
            digits_b.append(tuple(b_limbs))
            digits_a.append(a_limbs)
        return KeySwitchKey(b=tuple(digits_b), a=tuple(digits_a))

    def gen_galois_keys(self, steps, keys: KeyBundle) -> KeyBundle:
        """Return a bundle augmented with rotation keys for ``steps``.

        Each key is derived from ``params.seed`` and the normalized step, so
        the result does not depend on generation order.
        """
        slots = self.params.slots
        extra = {}
        for step in steps:
            if step == 0 or abs(step) >= slots:
                raise ParameterError(f"rotation step {step} out of range")
            r = step % slots
            if r in keys.galois or r in extra:
                continue
            rng = np.random.default_rng(
                np.random.SeedSequence(entropy=(self.params.seed, 0x90, r)))
            g = pow(5, r, 2 * self._n)
            src, neg = self._perm_tables(g)
            sk = keys.secret.astype(np.int64)
            rotated = sk[src] * np.where(neg, -1, 1)
            target = {q: self._ntt(self._coeff_to_limb(rotated, q), q)
                      for q in (*self._chain, self._aux)}
            sk_limbs = {q: self._sk_ntt(keys, q) for q in (*self._chain, self._aux)}
            extra[r] = self._make_ksk(rng, target, sk_limbs)
        return keys.with_galois(extra)

    # ------------------------------------------------------------ pack/crypt

    def encode(self, values, scale: float | None = None,
               level: int | None = None) -> Plaintext:
        """Pack real slot values into a plaintext at the given scale/level."""
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 1:
            values = values.reshape(-1)
        if len(values) > self.params.slots:
            raise CapacityError(
                f"{len(values)} values exceed {self.params.slots} slots")
        if scale is None:
            scale = self.params.scale
        if scale <= 0:
            raise ParameterError("encoding scale must be positive")
        if level is None:
            level = self.params.levels
        if not 0 <= level <= self.params.levels:
            raise ParameterError(f"level {level} outside chain bounds")

        n = self._n
        full = np.zeros(n, dtype=np.complex128)
        padded = np.zeros(self.params.slots, dtype=np.float64)
        padded[: len(values)] = values
        full[self._slot_pos] = padded * scale
        full[self._conj_pos] = padded * scale  # real inputs: conjugate = itself
        b = np.fft.fft(full) / n
        coeffs = np.real(b * np.conj(self._twist))
        peak = np.max(np.abs(coeffs)) if n else 0.0
        if peak >= 2 ** 62:
            raise CapacityError("encoded coefficients overflow 62 bits; lower the scale")
        coeffs = np.rint(coeffs).astype(np.int64)
        return Plaintext(self._coeff_to_ntt_limbs(coeffs, level + 1),
                         float(scale), level)

    def decode(self, pt: Plaintext) -> np.ndarray:
        """Slot values of a plaintext; exact CRT lift then inverse embedding."""
        coeffs = self._crt_to_float(pt.limbs)
        b = coeffs * self._twist
        full = np.fft.ifft(b) * self._n
        return np.real(full[self._slot_pos]) / pt.scale

    def _crt_to_float(self, limbs) -> np.ndarray:
        """Centered CRT reconstruction of coefficient values as float64."""
        nlimbs = len(limbs)
        chain = self._chain
        coeff_limbs = [self._intt(limbs[i], chain[i]) for i in range(nlimbs)]
        if nlimbs == 1:
            q = chain[0]
            vals = coeff_limbs[0].astype(np.int64)
            vals = np.where(vals > q // 2, vals - q, vals)
            return vals.astype(np.float64)
        # Garner: mixed-radix digits in uint64, then an exact big-int Horner.
        digits = [coeff_limbs[0]]
        for i in range(1, nlimbs):
            qi = chain[i]
            mu = self._tables[qi].mu
            t = np.zeros(self._n, dtype=np.uint64)
            for j in range(i - 1, -1, -1):
                t = K.scalar_mul_mod(t, chain[j] % qi, qi)
                t = K.add_mod(t, digits[j] % np.uint64(qi), qi)
            diff = K.sub_mod(coeff_limbs[i], t, qi)
            digits.append(K.scalar_mul_mod(diff, self._garner_inv[i - 1], qi))
        big_q = 1
        for q in chain[:nlimbs]:
            big_q *= q
        half = big_q // 2
        digit_lists = [d.tolist() for d in digits]
        radices = chain[:nlimbs]
        out = np.empty(self._n, dtype=np.float64)
        for c in range(self._n):
            x = digit_lists[nlimbs - 1][c]
            for i in range(nlimbs - 2, -1, -1):
                x = x * radices[i] + digit_lists[i][c]
            if x > half:
                x -= big_q
            out[c] = float(x)
        return out

    def encrypt(self, pt: Plaintext, keys: KeyBundle) -> Ciphertext:
        """Public-key encryption with fresh noise per call."""
        rng = self._enc_rng
        nlimbs = pt.level + 1
        v = self._sample_ternary(rng)
        e0 = self._sample_gaussian(rng)
        e1 = self._sample_gaussian(rng)
        pk_b, pk_a = keys.public
        c0 = []
        c1 = []
        for i in range(nlimbs):
            q = self._chain[i]
            mu = self._tables[q].mu
            v_l = self._ntt(self._coeff_to_limb(v, q), q)
            c0.append(K.add_mod(
                K.add_mod(K.mul_mod(v_l, pk_b[i], q, mu),
                          self._ntt(self._coeff_to_limb(e0, q), q), q),
                pt.limbs[i], q))
            c1.append(K.add_mod(K.mul_mod(v_l, pk_a[i], q, mu),
                                self._ntt(self._coeff_to_limb(e1, q), q), q))
        return Ciphertext((tuple(c0), tuple(c1)), pt.scale, pt.level)

    def decrypt(self, ct: Ciphertext, keys: KeyBundle) -> Plaintext:
        if ct.degree != 1:
            raise EvalError("relinearize first: cannot decrypt a degree-2 ciphertext")
        c0, c1 = ct.polys
        limbs = []
        for i in range(ct.level + 1):
            q = self._chain[i]
            mu = self._tables[q].mu
            limbs.append(K.add_mod(
                c0[i], K.mul_mod(c1[i], self._sk_ntt(keys, q), q, mu), q))
        return Plaintext(tuple(limbs), ct.scale, ct.level)

    # ------------------------------------------------------------ arithmetic

    def _check_same_level(self, a, b):
        if a.level != b.level:
            raise EvalError(f"level mismatch: {a.level} != {b.level}")

    def eval_add(self, a: Ciphertext, b: Ciphertext) -> Ciphertext:
        self._check_same_level(a, b)
        if abs(a.scale - b.scale) / a.scale >= _SCALE_MATCH_RTOL:
            raise EvalError(f"scale mismatch: {a.scale} vs {b.scale}")
        if a.degree != 1 or b.degree != 1:
            raise EvalError("eval_add expects degree-1 ciphertexts")
        polys = []
        for pa, pb in zip(a.polys, b.polys):
            polys.append(tuple(
                K.add_mod(pa[i], pb[i], self._chain[i])
                for i in range(a.level + 1)))
        return Ciphertext(tuple(polys), a.scale, a.level)

    def eval_mult_ct(self, a: Ciphertext, b: Ciphertext) -> Ciphertext:
        """Tensor product; result is degree 2 at the product scale."""
        self._check_same_level(a, b)
        if a.degree != 1 or b.degree != 1:
            raise EvalError("eval_mult_ct expects degree-1 ciphertexts")
        a0, a1 = a.polys
        b0, b1 = b.polys
        d0, d1, d2 = [], [], []
        for i in range(a.level + 1):
            q = self._chain[i]
            mu = self._tables[q].mu
            d0.append(K.mul_mod(a0[i], b0[i], q, mu))
            cross = K.add_mod(K.mul_mod(a0[i], b1[i], q, mu),
                              K.mul_mod(a1[i], b0[i], q, mu), q)
            d1.append(cross)
            d2.append(K.mul_mod(a1[i], b1[i], q, mu))
        return Ciphertext((tuple(d0), tuple(d1), tuple(d2)),
                          a.scale * b.scale, a.level)

    def eval_mult_pt(self, ct: Ciphertext, pt: Plaintext) -> Ciphertext:
        self._check_same_level(ct, pt)
        polys = []
        for part in ct.polys:
            polys.append(tuple(
                K.mul_mod(part[i], pt.limbs[i], self._chain[i],
                          self._tables[self._chain[i]].mu)
                for i in range(ct.level + 1)))
        return Ciphertext(tuple(polys), ct.scale * pt.scale, ct.level)

    def relinearize(self, ct: Ciphertext, keys: KeyBundle) -> Ciphertext:
        """Key-switch a degree-2 ciphertext back to degree 1.

        A degree-1 input is returned unchanged (counted in ``relin_noops``).
        """
        if ct.degree == 1:
            self.relin_noops += 1
            return ct
        if keys.relin is None:
            raise KeyMissingError("no relinearization key in bundle")
        e0, e1, e2 = ct.polys
        digits = self._digits_from_ntt(e2, ct.level)
        ks_b, ks_a = self._key_switch(digits, keys.relin, ct.level)
        new0 = tuple(K.add_mod(e0[i], ks_b[i], self._chain[i])
                     for i in range(ct.level + 1))
        new1 = tuple(K.add_mod(e1[i], ks_a[i], self._chain[i])
                     for i in range(ct.level + 1))
        return Ciphertext((new0, new1), ct.scale, ct.level)

    def rescale(self, ct: Ciphertext) -> Ciphertext:
        """Drop the last chain prime; scale divides by it, level drops by one."""
        if ct.level == 0:
            raise EvalError("modulus chain exhausted: cannot rescale at level 0")
        lvl = ct.level
        q_last = self._chain[lvl]
        inv = self._qlast_inv[lvl]
        polys = []
        for part in ct.polys:
            last_coeff = self._intt(part[lvl], q_last)
            limbs = []
            for i in range(lvl):
                q = self._chain[i]
                delta = self._ntt(K.extend_mod(last_coeff, q_last, q), q)
                limbs.append(
                    K.scalar_mul_mod(K.sub_mod(part[i], delta, q), inv[i], q))
            polys.append(tuple(limbs))
        return Ciphertext(tuple(polys), ct.scale / q_last, lvl - 1)

    def eval_rotate(self, ct: Ciphertext, steps: int, keys: KeyBundle) -> Ciphertext:
        """Cyclic slot rotation: output slot s holds input slot (s + steps)."""
        if ct.degree != 1:
            raise EvalError("eval_rotate expects a degree-1 ciphertext")
        r = steps % self.params.slots
        if r == 0:
            return ct
        gk = keys.galois.get(r)
        if gk is None:
            raise KeyMissingError(f"missing Galois key for step {steps}")
        g = pow(5, r, 2 * self._n)
        src, neg = self._perm_tables(g)
        c0, c1 = ct.polys
        new0 = []
        digits = []
        for i in range(ct.level + 1):
            q = self._chain[i]
            c0_perm = self._apply_perm(self._intt(c0[i], q), src, neg, q)
            new0.append(self._ntt(c0_perm, q))
            c1_perm = self._apply_perm(self._intt(c1[i], q), src, neg, q)
            digits.append(K.scalar_mul_mod(c1_perm, self._digit_factor[i], q))
        ks_b, ks_a = self._key_switch(digits, gk, ct.level)
        res0 = tuple(K.add_mod(new0[i], ks_b[i], self._chain[i])
                     for i in range(ct.level + 1))
        return Ciphertext((res0, tuple(ks_a)), ct.scale, ct.level)

    # ------------------------------------------------------------ internals

    def _perm_tables(self, g: int):
        cached = self._perm_cache.get(g)
        if cached is not None:
            return cached
        n = self._n
        src = np.empty(n, dtype=np.int64)
        neg = np.empty(n, dtype=bool)
        for i in range(n):
            t = (i * g) % (2 * n)
            if t < n:
                src[t] = i
                neg[t] = False
            else:
                src[t - n] = i
                neg[t - n] = True
        self._perm_cache[g] = (src, neg)
        return src, neg

    @staticmethod
    def _apply_perm(coeffs: np.ndarray, src, neg, q: int) -> np.ndarray:
        out = coeffs[src]
        flip = neg & (out != 0)
        out[flip] = np.uint64(q) - out[flip]
        return out

    def _digits_from_ntt(self, limbs, level: int) -> list:
        digits = []
        for i in range(level + 1):
            q = self._chain[i]
            scaled = K.scalar_mul_mod(limbs[i], self._digit_factor[i], q)
            digits.append(self._intt(scaled, q))
        return digits

    def _key_switch(self, digit_coeffs: list, ksk: KeySwitchKey, level: int):
        """Accumulate digit * key over {q_0..q_level, aux}, then divide out aux.

        ``digit_coeffs[i]`` must be the coefficient-domain digit for limb i,
        already scaled by ``(Q_L/q_i)^-1 mod q_i``.
        """
        n = self._n
        chain = self._chain
        aux = self._aux
        aux_idx = len(chain)  # position of the aux limb inside the ksk
        nlimbs = level + 1
        acc_b = [np.zeros(n, dtype=np.uint64) for _ in range(nlimbs + 1)]
        acc_a = [np.zeros(n, dtype=np.uint64) for _ in range(nlimbs + 1)]
        for i in range(nlimbs):
            qi = chain[i]
            for m in range(nlimbs + 1):
                qm = chain[m] if m < nlimbs else aux
                kidx = m if m < nlimbs else aux_idx
                mu = self._tables[qm].mu
                if qm == qi:
                    ext = digit_coeffs[i]
                else:
                    ext = K.extend_mod(digit_coeffs[i], qi, qm)
                ext = self._ntt(ext, qm)
                K.fma_mod(acc_b[m], ext, ksk.b[i][kidx], qm, mu)
                K.fma_mod(acc_a[m], ext, ksk.a[i][kidx], qm, mu)
        out = []
        for acc in (acc_b, acc_a):
            aux_coeff = self._intt(acc[nlimbs], aux)
            limbs = []
            for m in range(nlimbs):
                q = chain[m]
                delta = self._ntt(K.extend_mod(aux_coeff, aux, q), q)
                limbs.append(K.scalar_mul_mod(
                    K.sub_mod(acc[m], delta, q), self._aux_inv[m], q))
            out.append(tuple(limbs))
        return out[0], out[1]


def keygen(params: CkksParams) -> KeyBundle:
    """Standalone key generation; equivalent to ``CkksContext(params).keygen()``."""
    return CkksContext(params).keygen()
