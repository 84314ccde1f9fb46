"""Plaintext sparse layouts and conversions.

Dense matrices are square float64 ndarrays. The compressed layouts keep
structure (offsets/indices) as int64 arrays and values in traversal order;
only exact zeros are dropped, so every conversion is lossless for the stored
entries. The vertical formats group rows (columns) into fixed-height slices
and order entries column-major (row-major) inside each slice.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

DEFAULT_SLICE_HEIGHT = 4


def as_dense(m) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ParameterError(f"expected a square matrix, got shape {m.shape}")
    return m


def default_slice_height(dim: int) -> int:
    """Largest divisor of the dimension not exceeding the default height."""
    return math.gcd(dim, DEFAULT_SLICE_HEIGHT)


@dataclass(frozen=True)
class CsrMatrix:
    dim: int
    row_offsets: np.ndarray  # length dim+1
    col_indices: np.ndarray  # length nnz, strictly increasing per row
    values: np.ndarray

    @property
    def nnz(self) -> int:
        return len(self.values)

    def validate(self) -> None:
        _check_compressed(self.dim, self.row_offsets, self.col_indices,
                          self.values, "row")


@dataclass(frozen=True)
class CscMatrix:
    dim: int
    col_offsets: np.ndarray
    row_indices: np.ndarray
    values: np.ndarray

    @property
    def nnz(self) -> int:
        return len(self.values)

    def validate(self) -> None:
        _check_compressed(self.dim, self.col_offsets, self.row_indices,
                          self.values, "column")


@dataclass(frozen=True)
class VcsrMatrix:
    """Row slices of height G, entries ordered by (col, row) within a slice."""

    dim: int
    slice_height: int
    slice_offsets: np.ndarray  # length dim//G + 1
    entry_rows: np.ndarray
    entry_cols: np.ndarray
    values: np.ndarray

    @property
    def nnz(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class VcscMatrix:
    """Column slices of width G, entries ordered by (row, col) within a slice."""

    dim: int
    slice_height: int
    slice_offsets: np.ndarray
    entry_rows: np.ndarray
    entry_cols: np.ndarray
    values: np.ndarray

    @property
    def nnz(self) -> int:
        return len(self.values)


def _check_compressed(dim, offsets, indices, values, axis_name):
    if len(offsets) != dim + 1 or offsets[0] != 0 or offsets[-1] != len(values):
        raise ValueError(f"malformed {axis_name} offsets")
    if np.any(np.diff(offsets) < 0):
        raise ValueError(f"{axis_name} offsets are not non-decreasing")
    if len(indices) != len(values):
        raise ValueError("index/value length mismatch")
    if np.any(values == 0.0):
        raise ValueError("stored values must be nonzero")
    for i in range(dim):
        seg = indices[offsets[i] : offsets[i + 1]]
        if len(seg) and (np.any(seg < 0) or np.any(seg >= dim)):
            raise ValueError("index out of range")
        if len(seg) > 1 and np.any(np.diff(seg) <= 0):
            raise ValueError(f"indices not strictly increasing within a {axis_name}")


def dense_to_csr(m) -> CsrMatrix:
    m = as_dense(m)
    n = m.shape[0]
    rows, cols = np.nonzero(m)  # row-major order, cols increasing per row
    return CsrMatrix(
        dim=n,
        row_offsets=np.searchsorted(rows, np.arange(n + 1)).astype(np.int64),
        col_indices=cols.astype(np.int64),
        values=m[rows, cols],
    )


def dense_to_csc(m) -> CscMatrix:
    m = as_dense(m)
    n = m.shape[0]
    cols, rows = np.nonzero(m.T)
    return CscMatrix(
        dim=n,
        col_offsets=np.searchsorted(cols, np.arange(n + 1)).astype(np.int64),
        row_indices=rows.astype(np.int64),
        values=m[rows, cols],
    )


def _vertical_entries(m, n, g, by_rows):
    """Slice traversal shared by the two vertical formats."""
    if g < 1 or n % g:
        raise ParameterError(f"slice height {g} must divide the dimension {n}")
    offsets = [0]
    rr, cc, vv = [], [], []
    for s in range(n // g):
        lo, hi = s * g, (s + 1) * g
        if by_rows:
            sub = m[lo:hi, :]
            c, r = np.nonzero(sub.T)  # sorted by (col, row)
            r = r + lo
        else:
            sub = m[:, lo:hi]
            r, c = np.nonzero(sub)  # sorted by (row, col)
            c = c + lo
        rr.append(r)
        cc.append(c)
        vv.append(m[r, c])
        offsets.append(offsets[-1] + len(r))
    return (np.array(offsets, dtype=np.int64),
            np.concatenate(rr).astype(np.int64) if rr else np.empty(0, np.int64),
            np.concatenate(cc).astype(np.int64) if cc else np.empty(0, np.int64),
            np.concatenate(vv) if vv else np.empty(0, np.float64))


def dense_to_vcsr(m, slice_height: int | None = None) -> VcsrMatrix:
    m = as_dense(m)
    n = m.shape[0]
    g = default_slice_height(n) if slice_height is None else slice_height
    offs, rows, cols, vals = _vertical_entries(m, n, g, by_rows=True)
    return VcsrMatrix(n, g, offs, rows, cols, vals)


def dense_to_vcsc(m, slice_height: int | None = None) -> VcscMatrix:
    m = as_dense(m)
    n = m.shape[0]
    g = default_slice_height(n) if slice_height is None else slice_height
    offs, rows, cols, vals = _vertical_entries(m, n, g, by_rows=False)
    return VcscMatrix(n, g, offs, rows, cols, vals)


def csr_to_dense(sp: CsrMatrix) -> np.ndarray:
    sp.validate()
    out = np.zeros((sp.dim, sp.dim))
    for i in range(sp.dim):
        lo, hi = sp.row_offsets[i], sp.row_offsets[i + 1]
        out[i, sp.col_indices[lo:hi]] = sp.values[lo:hi]
    return out


def csc_to_dense(sp: CscMatrix) -> np.ndarray:
    sp.validate()
    out = np.zeros((sp.dim, sp.dim))
    for j in range(sp.dim):
        lo, hi = sp.col_offsets[j], sp.col_offsets[j + 1]
        out[sp.row_indices[lo:hi], j] = sp.values[lo:hi]
    return out


def vcsr_to_dense(sp: VcsrMatrix) -> np.ndarray:
    out = np.zeros((sp.dim, sp.dim))
    out[sp.entry_rows, sp.entry_cols] = sp.values
    return out


def vcsc_to_dense(sp: VcscMatrix) -> np.ndarray:
    out = np.zeros((sp.dim, sp.dim))
    out[sp.entry_rows, sp.entry_cols] = sp.values
    return out


def zero_count(dim: int, sparsity: float) -> int:
    """Number of zero entries for a sparsity fraction; round half up."""
    return int(math.floor(sparsity * dim * dim + 0.5))


def generate_random_sparse(dim: int, sparsity: float, seed) -> np.ndarray:
    """Square matrix with the given fraction of uniformly placed exact zeros.

    Nonzero entries are uniform in [-1, 1) with exact zeros resampled away,
    so structural and numerical sparsity coincide.
    """
    if dim < 1:
        raise ParameterError("dimension must be >= 1")
    if not 0.0 <= sparsity <= 1.0:
        raise ParameterError(f"sparsity {sparsity} outside [0, 1]")
    rng = np.random.default_rng(seed)
    vals = rng.uniform(-1.0, 1.0, size=dim * dim)
    while np.any(vals == 0.0):
        hole = vals == 0.0
        vals[hole] = rng.uniform(-1.0, 1.0, size=int(hole.sum()))
    zeros = zero_count(dim, sparsity)
    if zeros:
        pos = rng.choice(dim * dim, size=zeros, replace=False)
        vals[pos] = 0.0
    return vals.reshape(dim, dim)


# ----------------------------------------------------------------- file I/O

_MM_HEADER = "%%MatrixMarket matrix coordinate real general"


def write_matrix_market(path, m) -> None:
    """Coordinate text format, 1-based indices, nonzeros only."""
    m = as_dense(m)
    rows, cols = np.nonzero(m)
    with open(path, "w") as fh:
        fh.write(_MM_HEADER + "\n")
        fh.write(f"{m.shape[0]} {m.shape[1]} {len(rows)}\n")
        for r, c in zip(rows, cols):
            fh.write(f"{r + 1} {c + 1} {m[r, c]:.17g}\n")


def read_matrix_market(path) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline()
        if not header.startswith("%%MatrixMarket"):
            raise ValueError(f"{path}: not a MatrixMarket file")
        line = fh.readline()
        while line.startswith("%"):
            line = fh.readline()
        nrows, ncols, nnz = (int(x) for x in line.split())
        if nrows != ncols:
            raise ParameterError("only square matrices are supported")
        out = np.zeros((nrows, ncols))
        for _ in range(nnz):
            r, c, v = fh.readline().split()
            out[int(r) - 1, int(c) - 1] = float(v)
    return out


def read_dense_csv(path) -> np.ndarray:
    """Square dense matrix from comma-separated rows."""
    out = np.loadtxt(path, delimiter=",", ndmin=2)
    return as_dense(out)
