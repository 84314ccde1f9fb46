"""Benchmark harness: sparsity sweeps, verification runs, and reports.

One cell is a (size, sparsity) pair: a single matrix pair is generated per
cell, encrypted once per layout, and the multiplication itself is re-run
``reps`` times for timing. Keys, format conversion, encoding, encryption and
mask encoding all happen outside the timed region; a mask-cache miss counter
asserts that. Cells are independent, so sweeps can fan out over a process
pool; rows are ordered deterministically regardless of worker scheduling.
"""

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .ckks import CkksContext, CkksParams, default_params
from .encmat import (decrypt_result, encrypt_sparse, required_rotation_steps,
                     pair_schedule)
from .engine import (METHOD_LAYOUTS, METHOD_RUNNERS, MaskCache, MatmulMethod,
                     OpCounter)
from .errors import CapacityError, ParameterError
from .formats import generate_random_sparse, write_matrix_market, zero_count
from .oracle import frobenius_error, plain_matmul, predicted_op_counts

DEFAULT_SIZES = (8, 16)
DEFAULT_SPARSITIES = tuple(round(0.1 * i, 1) for i in range(11))
DEFAULT_REPS = 5

CSV_COLUMNS = (
    "method", "size", "sparsity", "rep", "seed", "wall_ms", "ct_ct_mults",
    "pt_mults", "rotations", "relins", "relin_noops", "rescales", "adds",
    "frobenius_error",
)


@dataclass(frozen=True)
class BenchRecord:
    method: str
    size: int
    sparsity: float
    rep: int
    seed: int
    wall_ms: float
    ct_ct_mults: int
    pt_mults: int
    rotations: int
    relins: int
    relin_noops: int
    rescales: int
    adds: int
    frobenius_error: float

    def csv_row(self) -> list[str]:
        return [
            self.method, str(self.size), f"{self.sparsity:.2f}", str(self.rep),
            str(self.seed), f"{self.wall_ms:.3f}", str(self.ct_ct_mults),
            str(self.pt_mults), str(self.rotations), str(self.relins),
            str(self.relin_noops), str(self.rescales), str(self.adds),
            f"{self.frobenius_error:.17g}",
        ]


@dataclass(frozen=True)
class BenchConfig:
    params: CkksParams
    sizes: tuple = DEFAULT_SIZES
    sparsities: tuple = DEFAULT_SPARSITIES
    reps: int = DEFAULT_REPS
    methods: tuple = tuple(MatmulMethod)
    seed: int = 1
    out_path: str | None = None
    nested: bool = False
    jobs: int = 1

    def __post_init__(self):
        if not self.sizes or not self.sparsities or not self.methods:
            raise ParameterError("sizes, sparsities and methods must be non-empty")
        if self.reps < 1:
            raise ParameterError("reps must be >= 1")
        slots = self.params.slots
        for n in self.sizes:
            if 2 * n * n > slots:
                raise CapacityError(
                    f"size {n} needs {2 * n * n} slots, params provide {slots}")
        for s in self.sparsities:
            if not 0.0 <= s <= 1.0:
                raise ParameterError(f"sparsity {s} outside [0, 1]")


def _cell_seed(master: int, size: int, sp_idx: int) -> int:
    # Stable readable sub-seed; sparsity index ignored in nested mode so the
    # whole nesting chain shares one base pair.
    return master * 1_000_003 + size * 1_009 + sp_idx


def cell_matrices(config: BenchConfig, size: int, sp_idx: int):
    """The plaintext pair every method consumes for this cell."""
    sparsity = config.sparsities[sp_idx]
    if not config.nested:
        seed = _cell_seed(config.seed, size, sp_idx)
        a = generate_random_sparse(size, sparsity, (seed, 0))
        b = generate_random_sparse(size, sparsity, (seed, 1))
        return a, b, seed
    seed = _cell_seed(config.seed, size, 0)
    zeros = zero_count(size, sparsity)
    mats = []
    for stream in (0, 1):
        base = generate_random_sparse(size, 0.0, (seed, stream))
        order = np.random.default_rng((seed, stream, 0xD1)).permutation(size * size)
        flat = base.reshape(-1)
        flat[order[:zeros]] = 0.0
        mats.append(flat.reshape(size, size))
    return mats[0], mats[1], seed


def run_cell(config: BenchConfig, size: int, sp_idx: int,
             keep_results: bool = False):
    """Run every configured method on one cell.

    Returns ``(records, results)`` where ``results`` maps method name to the
    decrypted matrix (only when ``keep_results``).
    """
    sparsity = config.sparsities[sp_idx]
    a, b, seed = cell_matrices(config, size, sp_idx)
    expected = plain_matmul(a, b)

    ctx = CkksContext(config.params)
    keys = ctx.keygen()

    encrypted = {}
    steps: set[int] = set()
    for method in config.methods:
        layout_a, layout_b = METHOD_LAYOUTS[method]
        enc_a = encrypt_sparse(a, layout_a, ctx, keys)
        enc_b = encrypt_sparse(b, layout_b, ctx, keys)
        encrypted[method] = (enc_a, enc_b)
        skip = "either" if method is MatmulMethod.NAIVE_SPARSE else None
        steps |= required_rotation_steps(enc_a.meta, enc_b.meta, skip=skip)
    keys = ctx.gen_galois_keys(steps, keys)

    records = []
    results = {}
    for method in config.methods:
        enc_a, enc_b = encrypted[method]
        skip = "either" if method is MatmulMethod.NAIVE_SPARSE else None
        mask_cache = MaskCache(ctx, size)
        mask_cache.prewarm(
            min(ap, bp) for _, _, ap, bp in
            pair_schedule(enc_a.meta, enc_b.meta, skip=skip))
        runner = METHOD_RUNNERS[method]
        result = None
        for rep in range(1, config.reps + 1):
            counter = OpCounter()
            start = time.perf_counter()
            result = runner(enc_a, enc_b, ctx, keys, counter, mask_cache)
            wall_ms = (time.perf_counter() - start) * 1e3
            if mask_cache.misses:
                raise RuntimeError(
                    "mask encoding leaked into the timed region")
            out = decrypt_result(result, ctx, keys)
            records.append(BenchRecord(
                method=method.value, size=size, sparsity=sparsity, rep=rep,
                seed=seed, wall_ms=wall_ms,
                frobenius_error=frobenius_error(out, expected),
                **counter.as_dict()))
        if keep_results:
            results[method.value] = decrypt_result(result, ctx, keys)
    return records, results


def _cell_task(args):
    config, size, sp_idx, keep_results = args
    records, results = run_cell(config, size, sp_idx, keep_results)
    return (size, sp_idx), records, results


def run_cells(config: BenchConfig, keep_results: bool = False) -> dict:
    """Every cell of the sweep, optionally on a process pool.

    Returns ``{(size, sp_idx): (records, results)}``; row content does not
    depend on ``jobs``.
    """
    cells = [(config, size, sp_idx, keep_results)
             for size in config.sizes
             for sp_idx in range(len(config.sparsities))]
    by_cell = {}
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            for key, recs, results in pool.map(_cell_task, cells):
                by_cell[key] = (recs, results)
    else:
        for args in cells:
            key, recs, results = _cell_task(args)
            by_cell[key] = (recs, results)
    return by_cell


def cmd_sweep(config: BenchConfig):
    """Full sweep; returns records in deterministic order, writes CSV if asked."""
    by_cell = run_cells(config)
    method_order = {m.value: i for i, m in enumerate(config.methods)}
    records = []
    for size in config.sizes:
        for sp_idx in range(len(config.sparsities)):
            cell = list(by_cell[(size, sp_idx)][0])
            cell.sort(key=lambda r: (method_order[r.method], r.rep))
            records.extend(cell)
    if config.out_path:
        write_csv(records, config.out_path)
    return records


def write_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for r in records:
            w.writerow(r.csv_row())


def read_csv(path) -> list[BenchRecord]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != list(CSV_COLUMNS):
            raise ParameterError(f"unexpected CSV columns in {path}")
        out = []
        for row in reader:
            out.append(BenchRecord(
                method=row["method"], size=int(row["size"]),
                sparsity=float(row["sparsity"]), rep=int(row["rep"]),
                seed=int(row["seed"]), wall_ms=float(row["wall_ms"]),
                ct_ct_mults=int(row["ct_ct_mults"]),
                pt_mults=int(row["pt_mults"]), rotations=int(row["rotations"]),
                relins=int(row["relins"]), relin_noops=int(row["relin_noops"]),
                rescales=int(row["rescales"]), adds=int(row["adds"]),
                frobenius_error=float(row["frobenius_error"])))
        return out


def rows_without_timing(records) -> list[tuple]:
    """Record tuples with the wall-clock column dropped (for reproducibility checks)."""
    out = []
    for r in records:
        row = r.csv_row()
        del row[5]  # wall_ms
        out.append(tuple(row))
    return out


def cmd_verify(size: int, sparsity: float, seed: int, params: CkksParams,
               tolerance: float = 1e-6, out=None) -> bool:
    """Run all methods on one pair; check errors and predicted counts.

    Prints one line per method and returns False on any tolerance or count
    violation.
    """
    def emit(line):
        if out is not None:
            out.write(line + "\n")
        else:
            print(line)

    if 2 * size * size > params.slots:
        raise CapacityError(
            f"size {size} needs {2 * size * size} slots, params provide "
            f"{params.slots}")
    config = BenchConfig(params=params, sizes=(size,), sparsities=(sparsity,),
                         reps=1, seed=seed)
    records, _ = run_cell(config, size, 0, keep_results=False)
    a, b, _ = cell_matrices(config, size, 0)
    ok = True
    emit(f"verify N={size} sparsity={sparsity:.2f} seed={seed}")
    for rec in records:
        pred = predicted_op_counts(a, b, MatmulMethod(rec.method))
        count_ok = rec.ct_ct_mults == pred.matching_pairs
        err_ok = rec.frobenius_error < tolerance
        ok &= count_ok and err_ok
        emit(f"  {rec.method:13s} error={rec.frobenius_error:.3e} "
             f"(tol {tolerance:g}) ct_ct={rec.ct_ct_mults} "
             f"predicted={pred.matching_pairs} "
             f"delta={rec.ct_ct_mults - pred.matching_pairs:+d} "
             f"{'ok' if count_ok and err_ok else 'FAIL'}")
    emit("PASS" if ok else "FAIL")
    return ok


def cmd_gen(size: int, sparsity: float, seed: int, out_prefix: str) -> tuple:
    """Write a deterministic matrix pair as coordinate text files."""
    a = generate_random_sparse(size, sparsity, (seed, 0))
    b = generate_random_sparse(size, sparsity, (seed, 1))
    path_a = f"{out_prefix}_a.mtx"
    path_b = f"{out_prefix}_b.mtx"
    write_matrix_market(path_a, a)
    write_matrix_market(path_b, b)
    return path_a, path_b


def cmd_report(records, baseline: str = MatmulMethod.NAIVE_DENSE.value,
               out=None) -> str:
    """Normalized mean-runtime and speedup tables from sweep records."""
    methods = []
    for r in records:
        if r.method not in methods:
            methods.append(r.method)
    if baseline not in methods:
        raise ParameterError(f"baseline {baseline!r} not present in records")
    sizes = sorted({r.size for r in records})
    text = io.StringIO()
    for size in sizes:
        sparsities = sorted({r.sparsity for r in records if r.size == size})
        mean = {}
        for m in methods:
            for s in sparsities:
                walls = [r.wall_ms for r in records
                         if r.size == size and r.method == m and r.sparsity == s]
                if walls:
                    mean[(m, s)] = sum(walls) / len(walls)
        text.write(f"== size {size}: normalized mean runtime "
                   f"(baseline {baseline}) ==\n")
        header = "sparsity " + " ".join(f"{m:>13s}" for m in methods)
        text.write(header + "\n")
        for s in sparsities:
            base = mean.get((baseline, s))
            cells = []
            for m in methods:
                v = mean.get((m, s))
                cells.append(f"{v / base:13.4f}" if v and base else f"{'-':>13s}")
            text.write(f"{s:8.2f} " + " ".join(cells) + "\n")
        text.write(f"== size {size}: speedup vs {baseline} ==\n")
        text.write(header + "\n")
        for s in sparsities:
            base = mean.get((baseline, s))
            cells = []
            for m in methods:
                v = mean.get((m, s))
                cells.append(f"{base / v:13.2f}" if v and base else f"{'-':>13s}")
            text.write(f"{s:8.2f} " + " ".join(cells) + "\n")
    report = text.getvalue()
    if out is not None:
        out.write(report)
    else:
        print(report, end="")
    return report


def default_config(**overrides) -> BenchConfig:
    params = overrides.pop("params", None) or default_params()
    return BenchConfig(params=params, **overrides)
