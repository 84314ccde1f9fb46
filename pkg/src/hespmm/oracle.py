"""Ground-truth plaintext computations.

Everything here is deliberately brute force and independent of the engine's
traversal code: the exact matmul is a literal triple loop, and the operation
predictors enumerate every (i, j, l) combination against position maps
rebuilt from first principles. These are the reference values the encrypted
paths are tested against.
"""

from dataclasses import dataclass

import numpy as np

from .engine import MatmulMethod
from .errors import ParameterError
from .formats import as_dense, default_slice_height


def plain_matmul(a, b) -> np.ndarray:
    """Exact triple-loop product; the single source of truth for correctness."""
    a = as_dense(a)
    b = as_dense(b)
    if a.shape != b.shape:
        raise ParameterError(f"dimension mismatch: {a.shape} vs {b.shape}")
    n = a.shape[0]
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            acc = 0.0
            for l in range(n):
                acc += a[i, l] * b[l, j]
            out[i, j] = acc
    return out


def frobenius_error(a, b) -> float:
    """sqrt of the summed squared entry differences."""
    a = as_dense(a)
    b = as_dense(b)
    if a.shape != b.shape:
        raise ParameterError(f"dimension mismatch: {a.shape} vs {b.shape}")
    d = a - b
    return float(np.sqrt(np.sum(d * d)))


@dataclass(frozen=True)
class PredictedCounts:
    matching_pairs: int
    k_a: int
    k_b: int
    alignment_rotations: int
    accumulation_rotations: int

    @property
    def k(self) -> int:
        return self.k_a + self.k_b


def _positions_csr(m, n):
    pos = {}
    p = 0
    for i in range(n):
        for l in range(n):
            if m[i, l] != 0.0:
                pos[(i, l)] = p
                p += 1
    return pos


def _positions_csc(m, n):
    pos = {}
    p = 0
    for j in range(n):
        for l in range(n):
            if m[l, j] != 0.0:
                pos[(l, j)] = p
                p += 1
    return pos


def _positions_vcsr(m, n, g):
    pos = {}
    p = 0
    for s in range(n // g):
        for c in range(n):
            for r in range(s * g, (s + 1) * g):
                if m[r, c] != 0.0:
                    pos[(r, c)] = p
                    p += 1
    return pos


def _positions_vcsc(m, n, g):
    pos = {}
    p = 0
    for s in range(n // g):
        for r in range(n):
            for c in range(s * g, (s + 1) * g):
                if m[r, c] != 0.0:
                    pos[(r, c)] = p
                    p += 1
    return pos


def predicted_op_counts(a, b, method: MatmulMethod,
                        slice_height: int | None = None,
                        skip_both_zero_only: bool = False) -> PredictedCounts:
    """Brute-force enumeration of the pairs a method will multiply.

    No FHE and no shared traversal code: every (i, j, l) is checked against
    the method's skip rule and packed positions are recomputed directly from
    the layout definitions.
    """
    a = as_dense(a)
    b = as_dense(b)
    if a.shape != b.shape:
        raise ParameterError("dimension mismatch")
    n = a.shape[0]
    k_a = int(np.count_nonzero(a))
    k_b = int(np.count_nonzero(b))

    if method is MatmulMethod.CSR_C:
        pos_a = _positions_csr(a, n)
        pos_b = _positions_csc(b, n)
    elif method is MatmulMethod.VCSR_C:
        g = default_slice_height(n) if slice_height is None else slice_height
        pos_a = _positions_vcsr(a, n, g)
        pos_b = _positions_vcsc(b, n, g)
    else:
        pos_a = pos_b = None  # dense packing: positions are coordinates

    pairs = alignments = accums = 0
    for i in range(n):
        for j in range(n):
            for l in range(n):
                a_nz = a[i, l] != 0.0
                b_nz = b[l, j] != 0.0
                if method in (MatmulMethod.CSR_C, MatmulMethod.VCSR_C):
                    if not (a_nz and b_nz):
                        continue
                    a_pos = pos_a[(i, l)]
                    b_pos = pos_b[(l, j)]
                elif method is MatmulMethod.NAIVE_SPARSE:
                    if skip_both_zero_only:
                        if not (a_nz or b_nz):
                            continue
                    elif not (a_nz and b_nz):
                        continue
                    a_pos = i * n + l
                    b_pos = j * n + l
                else:  # naive dense: nothing is skipped
                    a_pos = i * n + l
                    b_pos = j * n + l
                pairs += 1
                if a_pos != b_pos:
                    alignments += 1
                if min(a_pos, b_pos) != i * n + j:
                    accums += 1
    return PredictedCounts(pairs, k_a, k_b, alignments, accums)


@dataclass(frozen=True)
class ComplexityPoint:
    dim: int
    k: int
    matching_pairs: int
    bound: int
    ratio: float
    residual: float
    ok: bool


@dataclass(frozen=True)
class ComplexityReport:
    """Linear work-bound check: measured pairs against c * N * k."""

    fitted_c: float
    max_ratio: float
    points: tuple
    bound_ok: bool

    def lines(self):
        yield (f"fitted c = {self.fitted_c:.4f}, max ratio = "
               f"{self.max_ratio:.4f}, hard bound (c=1) "
               f"{'holds' if self.bound_ok else 'VIOLATED'}")
        for p in self.points:
            status = "ok" if p.ok else "VIOLATION"
            yield (f"  N={p.dim:3d} k={p.k:5d} pairs={p.matching_pairs:6d} "
                   f"N*k={p.bound:6d} ratio={p.ratio:.4f} "
                   f"residual={p.residual:+.1f} {status}")


def complexity_fit(records) -> ComplexityReport:
    """Fit the work law over (N, k, matching_pairs) observations.

    The constant is fitted by least squares through the origin; every point
    is additionally checked against the provable hard bound pairs <= N*k.
    Requires at least three distinct (N, k) shapes.
    """
    rows = [(int(n), int(k), int(mp)) for n, k, mp in records]
    if len({(n, k) for n, k, _ in rows}) < 3:
        raise ParameterError("insufficient data: need >= 3 distinct (N, k) points")
    xs = np.array([n * k for n, k, _ in rows], dtype=np.float64)
    ys = np.array([mp for _, _, mp in rows], dtype=np.float64)
    denom = float(np.sum(xs * xs))
    fitted = float(np.sum(xs * ys) / denom) if denom > 0 else 0.0
    points = []
    max_ratio = 0.0
    for n, k, mp in rows:
        bound = n * k
        ratio = mp / bound if bound else 0.0
        max_ratio = max(max_ratio, ratio)
        points.append(ComplexityPoint(
            dim=n, k=k, matching_pairs=mp, bound=bound, ratio=ratio,
            residual=mp - fitted * bound, ok=mp <= bound))
    return ComplexityReport(fitted_c=fitted, max_ratio=max_ratio,
                            points=tuple(points),
                            bound_ok=all(p.ok for p in points))
