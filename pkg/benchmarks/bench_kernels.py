"""Benchmark the compiled training kernels against their numpy twins.

Runs each hot kernel (logistic-regression descent, SVM subgradient
descent, Gini split search) in both flavors on the same synthetic
workload, verifies the outputs agree (bitwise for svm/split, to 1e-9
relative for the logistic kernel, whose exp calls round differently
between numpy's vectorized exp and libm), and prints a timing table.
The numba flavor is warmed once before timing so JIT compilation is not
charged to the measurement.

Usage:
    python3 benchmarks/bench_kernels.py [--size N] [--seed S] [--repeats R]

Setting RUHATE_DISABLE_NUMBA=1 only changes which flavor the library
selects at runtime; this script always imports both flavors explicitly
and will simply report when numba is unavailable.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from ruhate import _kernels, synthetic
from ruhate.features import FeatureConfig, fit_vocabulary, transform


def build_workload(size: int, seed: int):
    docs, labels = synthetic.generate(n=size, seed=seed)
    vocab = fit_vocabulary(docs, FeatureConfig())
    X = transform(vocab, docs, "count")
    y01 = np.array([1.0 if lab == "Hostile" else 0.0 for lab in labels])
    y_signed = 2.0 * y01 - 1.0
    rng = np.random.default_rng(seed)
    # dense block for the split search: 40 gathered columns
    n_cols = min(40, X.n_cols)
    cols = X.to_dense()[:, rng.choice(X.n_cols, size=n_cols, replace=False)]
    cols = np.ascontiguousarray(cols)
    y_int = y01.astype(np.int64)
    return X, y01, y_signed, cols, y_int


def time_call(fn, repeats: int) -> float:
    return min(timeit.repeat(fn, number=1, repeat=repeats))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=2000, help="synthetic corpus size")
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--repeats", type=int, default=5, help="timing repeats, min is reported")
    args = ap.parse_args(argv)

    X, y01, y_signed, cols, y_int = build_workload(args.size, args.seed)
    print(
        f"workload: {X.n_rows} docs x {X.n_cols} features "
        f"({len(X.data)} nonzeros), split block {cols.shape[0]} x {cols.shape[1]}"
    )
    csr = (X.indptr, X.indices, X.data)

    jobs = [
        (
            "logreg_fit (300 iters)",
            _kernels.logreg_fit_numpy,
            _kernels.logreg_fit_numba,
            (*csr, y01, X.n_cols, 0.01, 0.5, 300, 0.0),
            1e-9,
        ),
        (
            "svm_fit (300 epochs)",
            _kernels.svm_fit_numpy,
            _kernels.svm_fit_numba,
            (*csr, y_signed, X.n_cols, 0.01, 300),
            0.0,
        ),
        (
            "best_split",
            _kernels.best_split_numpy,
            _kernels.best_split_numba,
            (cols, y_int, 2, 1),
            0.0,
        ),
    ]

    if not _kernels.HAS_NUMBA:
        print("numba is not importable; timing the numpy flavor only")

    header = f"{'kernel':<24}{'numpy':>12}{'numba':>12}{'speedup':>10}  agreement"
    print(header)
    print("-" * len(header))
    for name, fn_np, fn_nb, call_args, rtol in jobs:
        out_np = fn_np(*call_args)
        t_np = time_call(lambda: fn_np(*call_args), args.repeats)
        if not _kernels.HAS_NUMBA:
            print(f"{name:<24}{t_np * 1e3:>10.1f}ms{'-':>12}{'-':>10}  -")
            continue
        out_nb = fn_nb(*call_args)  # warm the JIT before timing
        t_nb = time_call(lambda: fn_nb(*call_args), args.repeats)
        if rtol == 0.0:
            agree = all(
                np.array_equal(np.asarray(a), np.asarray(b))
                for a, b in zip(out_np, out_nb)
            )
            verdict = "bitwise" if agree else "MISMATCH"
        else:
            rel = max(
                float(
                    np.max(
                        np.abs(np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64))
                        / np.maximum(np.abs(np.asarray(a, dtype=np.float64)), 1e-300)
                    )
                )
                for a, b in zip(out_np, out_nb)
            )
            agree = rel <= rtol
            verdict = f"rel {rel:.1e}" if agree else f"MISMATCH (rel {rel:.1e})"
        print(
            f"{name:<24}{t_np * 1e3:>10.1f}ms{t_nb * 1e3:>10.1f}ms"
            f"{t_np / t_nb:>9.1f}x  {verdict}"
        )
        if not agree:
            return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
