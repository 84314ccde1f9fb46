"""Command-line harness: gen | sweep | verify | report | kernel-bench.

A params file is a small key-value text file (``ring_degree``,
``scale_bits``, ``levels``, ``seed``; ``#`` comments allowed) and can also be
pointed to by the ``HESPMM_PARAMS`` environment variable.
"""

import argparse
import os
import sys
import time

import numpy as np

from .bench import (BenchConfig, cmd_gen, cmd_report, cmd_sweep, cmd_verify,
                    read_csv, DEFAULT_REPS, DEFAULT_SIZES, DEFAULT_SPARSITIES)
from .ckks import build_params, default_params
from .ckks.params import prime_tables
from .engine import MatmulMethod
from .errors import ParameterError

PARAMS_ENV = "HESPMM_PARAMS"


def load_params_file(path):
    fields = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace("=", " ").split()
            if len(parts) != 2:
                raise ParameterError(f"{path}: cannot parse line {raw!r}")
            fields[parts[0]] = int(parts[1])
    known = {"ring_degree", "scale_bits", "levels", "seed"}
    unknown = set(fields) - known
    if unknown:
        raise ParameterError(f"{path}: unknown keys {sorted(unknown)}")
    return build_params(**fields)


def _params_from_args(args):
    path = getattr(args, "params", None) or os.environ.get(PARAMS_ENV)
    if path:
        return load_params_file(path)
    return default_params()


def _add_params_flag(p):
    p.add_argument("--params", metavar="FILE",
                   help=f"params file (default: ${PARAMS_ENV} or built-in)")


def _float_list(text):
    return tuple(float(x) for x in text.split(","))


def _int_list(text):
    return tuple(int(x) for x in text.split(","))


def _method_list(text):
    try:
        return tuple(MatmulMethod(x) for x in text.split(","))
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hespmm",
        description="Encrypted sparse matmul benchmarks on a desk-scale CKKS scheme")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a deterministic matrix pair")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--sparsity", type=float, required=True)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", required=True, help="output path prefix")

    p = sub.add_parser("sweep", help="run the full benchmark sweep")
    p.add_argument("--sizes", type=_int_list, default=DEFAULT_SIZES)
    p.add_argument("--sparsities", type=_float_list, default=DEFAULT_SPARSITIES)
    p.add_argument("--reps", type=int, default=DEFAULT_REPS)
    p.add_argument("--methods", type=_method_list, default=tuple(MatmulMethod))
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--nested", action="store_true",
                   help="each sparsity level zeroes a superset of entries")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True, help="CSV output path")
    _add_params_flag(p)

    p = sub.add_parser("verify", help="check one pair against the oracle")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--sparsity", type=float, required=True)
    p.add_argument("--seed", type=int, default=1)
    _add_params_flag(p)

    p = sub.add_parser("report", help="normalized runtime and speedup tables")
    p.add_argument("csv", help="CSV written by sweep")
    p.add_argument("--baseline", default=MatmulMethod.NAIVE_DENSE.value)

    p = sub.add_parser("kernel-bench",
                       help="compare compiled and pure-Python kernel backends")
    p.add_argument("--ring-degrees", type=_int_list, default=(1024, 4096, 8192))
    p.add_argument("--iterations", type=int, default=20)
    return parser


def _kernel_bench(ring_degrees, iterations, out=None):
    from ._kernels import _py
    try:
        from ._kernels import _fast
        backends = [("cython", _fast), ("python", _py)]
    except ImportError:
        backends = [("python", _py)]

    def emit(line):
        if out is not None:
            out.write(line + "\n")
        else:
            print(line)

    emit(f"{'n':>6s} {'backend':>8s} {'ntt_ms':>10s} {'intt_ms':>10s} "
         f"{'mul_ms':>10s}")
    baseline = {}
    for n in ring_degrees:
        params = build_params(ring_degree=n, scale_bits=40, levels=2, seed=1)
        q = params.modulus_chain[1]
        tab = prime_tables(q, n)
        rng = np.random.default_rng(0)
        a = rng.integers(0, q, n, dtype=np.uint64)
        b = rng.integers(0, q, n, dtype=np.uint64)
        for name, impl in backends:
            iters = iterations if name == "cython" else max(1, iterations // 10)
            t0 = time.perf_counter()
            for _ in range(iters):
                fwd = impl.ntt(a, q, tab.roots, tab.roots_sh)
            ntt_ms = (time.perf_counter() - t0) / iters * 1e3
            t0 = time.perf_counter()
            for _ in range(iters):
                impl.intt(fwd, q, tab.iroots, tab.iroots_sh, tab.n_inv)
            intt_ms = (time.perf_counter() - t0) / iters * 1e3
            t0 = time.perf_counter()
            for _ in range(iters):
                impl.mul_mod(a, b, q, tab.mu)
            mul_ms = (time.perf_counter() - t0) / iters * 1e3
            emit(f"{n:6d} {name:>8s} {ntt_ms:10.3f} {intt_ms:10.3f} "
                 f"{mul_ms:10.3f}")
            if name == "cython":
                baseline[n] = ntt_ms
            elif n in baseline and baseline[n] > 0:
                emit(f"{'':6s} {'speedup':>8s} {ntt_ms / baseline[n]:9.1f}x")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "gen":
        path_a, path_b = cmd_gen(args.size, args.sparsity, args.seed, args.out)
        print(f"wrote {path_a} and {path_b}")
        return 0
    if args.command == "sweep":
        config = BenchConfig(
            params=_params_from_args(args), sizes=args.sizes,
            sparsities=args.sparsities, reps=args.reps, methods=args.methods,
            seed=args.seed, out_path=args.out, nested=args.nested,
            jobs=args.jobs)
        records = cmd_sweep(config)
        print(f"wrote {len(records)} rows to {args.out}")
        return 0
    if args.command == "verify":
        ok = cmd_verify(args.size, args.sparsity, args.seed,
                        _params_from_args(args))
        return 0 if ok else 1
    if args.command == "report":
        cmd_report(read_csv(args.csv), baseline=args.baseline)
        return 0
    if args.command == "kernel-bench":
        return _kernel_bench(args.ring_degrees, args.iterations)
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
