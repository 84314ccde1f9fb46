"""The four encrypted matmul methods with full operation accounting.

Every method drives the same per-pair inner step: multiply the aligned
operands, relinearize, rescale, isolate the product slot with a plaintext
mask, rescale again, rotate the isolated value to its target slot, and add
it into the running result. The methods differ only in which (i, j, a_pos,
b_pos) pairs they schedule, which the plaintext metadata fully determines.
"""

import time
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .ckks import Ciphertext, CkksContext, KeyBundle, Plaintext
from .encmat import (EncryptedResult, EncryptedSparseMatrix, Layout,
                     pair_schedule)
from .errors import ParameterError


class MatmulMethod(str, Enum):
    NAIVE_DENSE = "naive_dense"
    NAIVE_SPARSE = "naive_sparse"
    CSR_C = "csr_c"
    VCSR_C = "vcsr_c"


@dataclass
class OpCounter:
    """Tally of homomorphic primitives; the complexity-law observable.

    ``rotations`` always equals ``alignment_rotations + accumulation_rotations``;
    ``relins`` counts genuine key switches, ``relin_noops`` the literal
    post-mask relinearization calls that have nothing to do.
    """

    ct_ct_mults: int = 0
    pt_mults: int = 0
    rotations: int = 0
    relins: int = 0
    relin_noops: int = 0
    rescales: int = 0
    adds: int = 0
    alignment_rotations: int = 0
    accumulation_rotations: int = 0
    wall_time: float = 0.0

    def as_dict(self) -> dict:
        return {
            "ct_ct_mults": self.ct_ct_mults,
            "pt_mults": self.pt_mults,
            "rotations": self.rotations,
            "relins": self.relins,
            "relin_noops": self.relin_noops,
            "rescales": self.rescales,
            "adds": self.adds,
        }


class MaskCache:
    """Slot-isolation plaintexts, one per distinct target position.

    Masks are encoded at the scale of the prime the second rescale removes,
    so every partial product lands at the same scale. ``misses`` counts
    encodes performed after :meth:`prewarm`, letting callers verify that a
    timed region did no encoding work.
    """

    def __init__(self, ctx: CkksContext, dim: int):
        lvl = ctx.params.levels - 1
        self._ctx = ctx
        self._size = dim * dim
        self._level = lvl
        self._scale = float(ctx.params.modulus_chain[lvl])
        self._masks: dict[int, Plaintext] = {}
        self.misses = 0

    def get(self, position: int) -> Plaintext:
        pt = self._masks.get(position)
        if pt is None:
            self.misses += 1
            pt = self._encode(position)
            self._masks[position] = pt
        return pt

    def prewarm(self, positions) -> None:
        for p in positions:
            if p not in self._masks:
                self._masks[p] = self._encode(p)
        self.misses = 0

    def _encode(self, position: int) -> Plaintext:
        vec = np.zeros(self._size)
        vec[position] = 1.0
        return self._ctx.encode(vec, scale=self._scale, level=self._level)


def fhe_spmspm_step(v_a: Ciphertext, v_b: Ciphertext, min_pos: int, i: int,
                    j: int, dim: int, accumulator: EncryptedResult | None,
                    ctx: CkksContext, keys: KeyBundle, counter: OpCounter,
                    mask_cache: MaskCache) -> EncryptedResult:
    """One aligned scalar product folded into the result accumulator.

    ``v_a``/``v_b`` must already hold both factors at slot ``min_pos``. The
    first product becomes the accumulator; later ones are added in.
    """
    dot = ctx.eval_mult_ct(v_a, v_b)
    counter.ct_ct_mults += 1
    dot = ctx.relinearize(dot, keys)
    counter.relins += 1
    dot = ctx.rescale(dot)
    counter.rescales += 1

    mask = mask_cache.get(min_pos)
    dot = ctx.eval_mult_pt(dot, mask)
    counter.pt_mults += 1
    dot = ctx.relinearize(dot, keys)  # degree is already 1: literal no-op
    counter.relin_noops += 1
    dot = ctx.rescale(dot)
    counter.rescales += 1

    rot_idx = min_pos - (i * dim + j)
    if rot_idx != 0:
        dot = ctx.eval_rotate(dot, rot_idx, keys)
        counter.rotations += 1
        counter.accumulation_rotations += 1

    if accumulator is None or accumulator.ctxt is None:
        return EncryptedResult(ctxt=dot, dim=dim)
    merged = ctx.eval_add(accumulator.ctxt, dot)
    counter.adds += 1
    return EncryptedResult(ctxt=merged, dim=dim)


def _run_schedule(enc_a: EncryptedSparseMatrix, enc_b: EncryptedSparseMatrix,
                  schedule, ctx: CkksContext, keys: KeyBundle,
                  counter: OpCounter, mask_cache: MaskCache | None
                  ) -> EncryptedResult:
    dim = enc_a.dim
    if mask_cache is None:
        mask_cache = MaskCache(ctx, dim)
    acc: EncryptedResult | None = None
    start = time.perf_counter()
    for i, j, a_pos, b_pos in schedule:
        v_a, v_b = enc_a.ctxt, enc_b.ctxt
        if a_pos < b_pos:
            v_b = ctx.eval_rotate(v_b, b_pos - a_pos, keys)
            counter.rotations += 1
            counter.alignment_rotations += 1
            min_pos = a_pos
        elif b_pos < a_pos:
            v_a = ctx.eval_rotate(v_a, a_pos - b_pos, keys)
            counter.rotations += 1
            counter.alignment_rotations += 1
            min_pos = b_pos
        else:
            min_pos = a_pos
        acc = fhe_spmspm_step(v_a, v_b, min_pos, i, j, dim, acc, ctx, keys,
                              counter, mask_cache)
    counter.wall_time += time.perf_counter() - start
    if acc is None:
        acc = EncryptedResult(ctxt=None, dim=dim)
    return acc


def _require_layouts(enc_a, enc_b, layout_a: Layout, layout_b: Layout):
    if enc_a.meta.layout is not layout_a or enc_b.meta.layout is not layout_b:
        raise ParameterError(
            f"layout mismatch: need {layout_a.value} x {layout_b.value}, got "
            f"{enc_a.meta.layout.value} x {enc_b.meta.layout.value}")
    if enc_a.dim != enc_b.dim:
        raise ParameterError("matrix dimensions differ")


def spmm_csr_csc(enc_a: EncryptedSparseMatrix, enc_b: EncryptedSparseMatrix,
                 ctx: CkksContext, keys: KeyBundle,
                 counter: OpCounter | None = None,
                 mask_cache: MaskCache | None = None) -> EncryptedResult:
    """Sorted-index intersection over a row-wise x column-wise packing."""
    _require_layouts(enc_a, enc_b, Layout.CSR, Layout.CSC)
    counter = counter if counter is not None else OpCounter()
    return _run_schedule(enc_a, enc_b, pair_schedule(enc_a.meta, enc_b.meta),
                         ctx, keys, counter, mask_cache)


def spmm_vcsr(enc_a: EncryptedSparseMatrix, enc_b: EncryptedSparseMatrix,
              ctx: CkksContext, keys: KeyBundle,
              counter: OpCounter | None = None,
              mask_cache: MaskCache | None = None) -> EncryptedResult:
    """Same intersection driven by the vertical slice traversal order."""
    _require_layouts(enc_a, enc_b, Layout.VCSR, Layout.VCSC)
    counter = counter if counter is not None else OpCounter()
    return _run_schedule(enc_a, enc_b, pair_schedule(enc_a.meta, enc_b.meta),
                         ctx, keys, counter, mask_cache)


def matmul_naive_dense(enc_a: EncryptedSparseMatrix,
                       enc_b: EncryptedSparseMatrix, ctx: CkksContext,
                       keys: KeyBundle, counter: OpCounter | None = None,
                       mask_cache: MaskCache | None = None) -> EncryptedResult:
    """Element-wise baseline: every scalar product runs, zeros included."""
    _require_layouts(enc_a, enc_b, Layout.DENSE_ROW_MAJOR, Layout.DENSE_COL_MAJOR)
    counter = counter if counter is not None else OpCounter()
    return _run_schedule(enc_a, enc_b, pair_schedule(enc_a.meta, enc_b.meta),
                         ctx, keys, counter, mask_cache)


def matmul_naive_sparse(enc_a: EncryptedSparseMatrix,
                        enc_b: EncryptedSparseMatrix, ctx: CkksContext,
                        keys: KeyBundle, counter: OpCounter | None = None,
                        mask_cache: MaskCache | None = None,
                        skip_both_zero_only: bool = False) -> EncryptedResult:
    """Element-wise with zero skipping driven by the plaintext masks.

    By default a step is skipped when either operand entry is structurally
    zero (a zero factor contributes nothing); ``skip_both_zero_only`` keeps
    steps where exactly one side is zero.
    """
    _require_layouts(enc_a, enc_b, Layout.DENSE_ROW_MAJOR, Layout.DENSE_COL_MAJOR)
    counter = counter if counter is not None else OpCounter()
    skip = "both" if skip_both_zero_only else "either"
    return _run_schedule(enc_a, enc_b,
                         pair_schedule(enc_a.meta, enc_b.meta, skip=skip),
                         ctx, keys, counter, mask_cache)


METHOD_RUNNERS = {
    MatmulMethod.NAIVE_DENSE: matmul_naive_dense,
    MatmulMethod.NAIVE_SPARSE: matmul_naive_sparse,
    MatmulMethod.CSR_C: spmm_csr_csc,
    MatmulMethod.VCSR_C: spmm_vcsr,
}

METHOD_LAYOUTS = {
    MatmulMethod.NAIVE_DENSE: (Layout.DENSE_ROW_MAJOR, Layout.DENSE_COL_MAJOR),
    MatmulMethod.NAIVE_SPARSE: (Layout.DENSE_ROW_MAJOR, Layout.DENSE_COL_MAJOR),
    MatmulMethod.CSR_C: (Layout.CSR, Layout.CSC),
    MatmulMethod.VCSR_C: (Layout.VCSR, Layout.VCSC),
}
