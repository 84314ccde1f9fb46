"""Bridge between plaintext sparse layouts and packed ciphertexts.

A matrix is packed as one ciphertext holding its values in the layout's
traversal order (nonzeros only for the compressed layouts, every entry for
the dense layouts) while the structure stays in plaintext metadata. Because
structure is public, the full set of rotation steps a multiplication will
need is computable before any ciphertext work.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import formats
from .ckks import Ciphertext, CkksContext, KeyBundle
from .errors import CapacityError, ParameterError


class Layout(str, Enum):
    CSR = "csr"
    CSC = "csc"
    VCSR = "vcsr"
    VCSC = "vcsc"
    DENSE_ROW_MAJOR = "dense_row_major"
    DENSE_COL_MAJOR = "dense_col_major"


@dataclass(frozen=True)
class SparseMeta:
    """Plaintext structural metadata; holds no value data.

    ``offsets``/``indices`` mirror the compressed format arrays. For the
    vertical layouts ``offsets`` are the slice offsets and the per-entry
    coordinates live in ``entry_rows``/``entry_cols``. For dense packings
    ``indices`` lists the traversal positions of the structural nonzeros.
    """

    dim: int
    layout: Layout
    nnz: int
    offsets: np.ndarray | None = None
    indices: np.ndarray | None = None
    entry_rows: np.ndarray | None = None
    entry_cols: np.ndarray | None = None
    slice_height: int | None = None

    def __eq__(self, other):
        if not isinstance(other, SparseMeta):
            return NotImplemented
        def eq(a, b):
            if a is None or b is None:
                return a is b
            return np.array_equal(a, b)
        return (self.dim == other.dim and self.layout == other.layout
                and self.nnz == other.nnz
                and self.slice_height == other.slice_height
                and eq(self.offsets, other.offsets)
                and eq(self.indices, other.indices)
                and eq(self.entry_rows, other.entry_rows)
                and eq(self.entry_cols, other.entry_cols))


@dataclass(frozen=True)
class EncryptedSparseMatrix:
    ctxt: Ciphertext
    meta: SparseMeta

    @property
    def dim(self) -> int:
        return self.meta.dim


@dataclass(frozen=True)
class EncryptedResult:
    """Result accumulator: slot i*N+j holds entry (i, j).

    ``ctxt`` is None when no partial product was ever added (fully sparse
    inputs); the decoded result is then the zero matrix.
    """

    ctxt: Ciphertext | None
    dim: int


def meta_and_values(m, layout: Layout, slice_height: int | None = None):
    """Convert a dense matrix to (metadata, packed value vector) for a layout."""
    m = formats.as_dense(m)
    n = m.shape[0]
    if layout is Layout.CSR:
        sp = formats.dense_to_csr(m)
        meta = SparseMeta(n, layout, sp.nnz, offsets=sp.row_offsets,
                          indices=sp.col_indices)
        return meta, sp.values
    if layout is Layout.CSC:
        sp = formats.dense_to_csc(m)
        meta = SparseMeta(n, layout, sp.nnz, offsets=sp.col_offsets,
                          indices=sp.row_indices)
        return meta, sp.values
    if layout is Layout.VCSR:
        sp = formats.dense_to_vcsr(m, slice_height)
        meta = SparseMeta(n, layout, sp.nnz, offsets=sp.slice_offsets,
                          entry_rows=sp.entry_rows, entry_cols=sp.entry_cols,
                          slice_height=sp.slice_height)
        return meta, sp.values
    if layout is Layout.VCSC:
        sp = formats.dense_to_vcsc(m, slice_height)
        meta = SparseMeta(n, layout, sp.nnz, offsets=sp.slice_offsets,
                          entry_rows=sp.entry_rows, entry_cols=sp.entry_cols,
                          slice_height=sp.slice_height)
        return meta, sp.values
    if layout is Layout.DENSE_ROW_MAJOR:
        flat = m.reshape(-1)
        meta = SparseMeta(n, layout, int(np.count_nonzero(flat)),
                          offsets=np.arange(0, n * n + 1, n, dtype=np.int64),
                          indices=np.flatnonzero(flat).astype(np.int64))
        return meta, flat.copy()
    if layout is Layout.DENSE_COL_MAJOR:
        flat = m.T.reshape(-1)
        meta = SparseMeta(n, layout, int(np.count_nonzero(flat)),
                          offsets=np.arange(0, n * n + 1, n, dtype=np.int64),
                          indices=np.flatnonzero(flat).astype(np.int64))
        return meta, flat.copy()
    raise ParameterError(f"unknown layout {layout}")


def encrypt_sparse(m, layout: Layout, ctx: CkksContext, keys: KeyBundle,
                   slice_height: int | None = None) -> EncryptedSparseMatrix:
    """Pack a matrix into one ciphertext in the layout's traversal order."""
    meta, values = meta_and_values(m, layout, slice_height)
    if len(values) > ctx.params.slots:
        raise CapacityError(
            f"matrix needs {len(values)} slots, only {ctx.params.slots} available")
    pt = ctx.encode(values)
    return EncryptedSparseMatrix(ctxt=ctx.encrypt(pt, keys), meta=meta)


def decrypt_result(result: EncryptedResult, ctx: CkksContext,
                   keys: KeyBundle) -> np.ndarray:
    """Dense matrix read row-major from the result slots."""
    n = result.dim
    if result.ctxt is None:
        return np.zeros((n, n))
    slots = ctx.decode(ctx.decrypt(result.ctxt, keys))
    return slots[: n * n].reshape(n, n).copy()


# ----------------------------------------------------------- pair schedules

def _csr_like_row_lists(meta: SparseMeta):
    """Per-row (sorted index, packed position) lists from CSR metadata."""
    out = []
    for i in range(meta.dim):
        lo, hi = int(meta.offsets[i]), int(meta.offsets[i + 1])
        out.append((meta.indices[lo:hi], np.arange(lo, hi)))
    return out


def _vertical_lists(meta: SparseMeta, by_rows: bool):
    """Per-row (or per-column) traversal lists from vertical-layout metadata."""
    keys_arr = meta.entry_rows if by_rows else meta.entry_cols
    other = meta.entry_cols if by_rows else meta.entry_rows
    out = []
    for i in range(meta.dim):
        pos = np.flatnonzero(keys_arr == i)
        out.append((other[pos], pos))
    return out


def _merge_pairs(n, lists_a, lists_b):
    """Two-pointer intersection of sorted index lists for every output cell."""
    for i in range(n):
        idx_a, pos_a = lists_a[i]
        for j in range(n):
            idx_b, pos_b = lists_b[j]
            ai = bi = 0
            while ai < len(idx_a) and bi < len(idx_b):
                col, row = idx_a[ai], idx_b[bi]
                if col == row:
                    yield i, j, int(pos_a[ai]), int(pos_b[bi])
                    ai += 1
                    bi += 1
                elif col < row:
                    ai += 1
                else:
                    bi += 1


def _dense_pairs(meta_a: SparseMeta, meta_b: SparseMeta, skip: str | None):
    """Element-wise schedule over all (i, j, l); optionally skip on zeros."""
    n = meta_a.dim
    nz_a = np.zeros(n * n, dtype=bool)
    nz_a[meta_a.indices] = True
    nz_b = np.zeros(n * n, dtype=bool)
    nz_b[meta_b.indices] = True
    for i in range(n):
        for j in range(n):
            for l in range(n):
                a_pos = i * n + l
                b_pos = j * n + l
                if skip == "either" and not (nz_a[a_pos] and nz_b[b_pos]):
                    continue
                if skip == "both" and not (nz_a[a_pos] or nz_b[b_pos]):
                    continue
                yield i, j, a_pos, b_pos


def pair_schedule(meta_a: SparseMeta, meta_b: SparseMeta,
                  skip: str | None = None):
    """Matching (i, j, a_pos, b_pos) tuples in engine traversal order.

    The layouts select the traversal: compressed layout pairs walk the sorted
    index intersection per output cell; the dense pair enumerates every
    element, with ``skip`` controlling zero-skipping ("either" or "both").
    """
    if meta_a.dim != meta_b.dim:
        raise ParameterError("matrix dimensions differ")
    pair = (meta_a.layout, meta_b.layout)
    if pair == (Layout.CSR, Layout.CSC):
        return _merge_pairs(meta_a.dim, _csr_like_row_lists(meta_a),
                            _csr_like_row_lists(meta_b))
    if pair == (Layout.VCSR, Layout.VCSC):
        if meta_a.slice_height != meta_b.slice_height:
            raise ParameterError("slice heights differ")
        return _merge_pairs(meta_a.dim, _vertical_lists(meta_a, by_rows=True),
                            _vertical_lists(meta_b, by_rows=False))
    if pair == (Layout.DENSE_ROW_MAJOR, Layout.DENSE_COL_MAJOR):
        return _dense_pairs(meta_a, meta_b, skip)
    raise ParameterError(f"unsupported layout pair {pair[0].value} x {pair[1].value}")


def required_rotation_steps(meta_a: SparseMeta, meta_b: SparseMeta,
                            dim: int | None = None,
                            skip: str | None = None) -> set[int]:
    """Every nonzero rotation step the multiplication will request.

    Steps are raw signed amounts as passed to rotation: positive alignment
    steps (the higher-positioned operand rotates down to the lower) plus the
    signed accumulation steps toward each target slot.
    """
    if dim is not None and dim != meta_a.dim:
        raise ParameterError("dimension does not match metadata")
    n = meta_a.dim
    steps: set[int] = set()
    for i, j, a_pos, b_pos in pair_schedule(meta_a, meta_b, skip):
        if a_pos != b_pos:
            steps.add(abs(a_pos - b_pos))
        rot = min(a_pos, b_pos) - (i * n + j)
        if rot != 0:
            steps.add(rot)
    return steps
