"""Numeric training kernels in two interchangeable flavors.

The hot loops (logistic-regression epochs, SVM subgradient epochs, Gini
split search) ship both as numba-compiled kernels and as pure-numpy
implementations.  The compiled flavor is used when numba imports cleanly
unless the environment variable RUHATE_DISABLE_NUMBA=1 forces the numpy
path.  Both flavors stay importable so benchmarks and tests can compare
them directly.

Cross-flavor agreement contract: both flavors perform the same
floating-point operations in the same order, so the SVM and split-search
kernels agree bitwise.  The logistic kernel agrees to about one ulp per
exp call, not bitwise: numpy's vectorized exp and the scalar libm exp
that the compiled flavor lowers to round differently on a few percent of
inputs.  Within one flavor every kernel is deterministic, so trained
models are bit-reproducible for a fixed environment.

CSR input convention everywhere: (indptr, indices, data) with int64
index arrays and float64 data, plus explicit row/column counts.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


def numba_enabled() -> bool:
    return HAS_NUMBA and os.environ.get("RUHATE_DISABLE_NUMBA", "") != "1"


# --------------------------------------------------------------------------
# logistic regression: full-batch gradient descent on L2-regularized loss
# --------------------------------------------------------------------------

def _ordered_sum(values: np.ndarray) -> float:
    # bincount reduces in input order; ndarray.sum() is pairwise and would
    # round differently from the compiled flavor's sequential loop
    return float(np.bincount(np.zeros(len(values), dtype=np.int64), weights=values, minlength=1)[0])


def logreg_fit_numpy(indptr, indices, data, y, n_features, lam, lr, max_iters, tol):
    """Returns (w, b, iters_run, converged, finite)."""
    n = len(indptr) - 1
    row_ids = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    w = np.zeros(n_features, dtype=np.float64)
    b = 0.0
    with np.errstate(over="ignore", invalid="ignore"):
        for it in range(max_iters):
            z = np.bincount(row_ids, weights=data * w[indices], minlength=n) + b
            p = np.where(
                z >= 0.0,
                1.0 / (1.0 + np.exp(-z)),
                np.exp(z) / (1.0 + np.exp(z)),
            )
            r = (p - y) / n
            gw = np.bincount(indices, weights=data * r[row_ids], minlength=n_features) + lam * w
            gb = _ordered_sum(r)
            gnorm = np.sqrt(_ordered_sum(gw * gw) + gb * gb)
            if not np.isfinite(gnorm):
                return w, b, it, False, False
            if gnorm < tol:
                return w, b, it, True, True
            w -= lr * gw
            b -= lr * gb
    finite = bool(np.isfinite(w).all() and np.isfinite(b))
    return w, b, max_iters, False, finite


@njit(cache=True)
def _logreg_fit_jit(indptr, indices, data, y, n_features, lam, lr, max_iters, tol):
    n = len(indptr) - 1
    w = np.zeros(n_features, dtype=np.float64)
    b = 0.0
    gw = np.zeros(n_features, dtype=np.float64)
    for it in range(max_iters):
        for j in range(n_features):
            gw[j] = 0.0
        gb = 0.0
        gsq = 0.0
        # accumulate X^T (sigmoid(Xw+b) - y) / n row by row, nnz order;
        # z sums the products first and adds b last, and the ridge term
        # joins gw after the data pass, matching the numpy flavor's
        # rounding exactly
        r = np.empty(n, dtype=np.float64)
        for i in range(n):
            z = 0.0
            for k in range(indptr[i], indptr[i + 1]):
                z += data[k] * w[indices[k]]
            z = z + b
            if z >= 0.0:
                p = 1.0 / (1.0 + np.exp(-z))
            else:
                e = np.exp(z)
                p = e / (1.0 + e)
            r[i] = (p - y[i]) / n
        for i in range(n):
            for k in range(indptr[i], indptr[i + 1]):
                gw[indices[k]] += data[k] * r[i]
            gb += r[i]
        for j in range(n_features):
            gw[j] = gw[j] + lam * w[j]
            gsq += gw[j] * gw[j]
        gnorm = np.sqrt(gsq + gb * gb)
        if not np.isfinite(gnorm):
            return w, b, it, False, False
        if gnorm < tol:
            return w, b, it, True, True
        for j in range(n_features):
            w[j] -= lr * gw[j]
        b -= lr * gb
    finite = np.isfinite(b)
    for j in range(n_features):
        finite = finite and np.isfinite(w[j])
    return w, b, max_iters, False, finite


def logreg_fit_numba(indptr, indices, data, y, n_features, lam, lr, max_iters, tol):
    w, b, it, conv, finite = _logreg_fit_jit(
        indptr, indices, data, y, n_features, lam, lr, max_iters, tol
    )
    return w, b, int(it), bool(conv), bool(finite)


# --------------------------------------------------------------------------
# linear SVM: full-batch subgradient descent on hinge loss + L2
# --------------------------------------------------------------------------

def svm_fit_numpy(indptr, indices, data, y_signed, n_features, lam, epochs):
    n = len(indptr) - 1
    row_ids = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    w = np.zeros(n_features, dtype=np.float64)
    b = 0.0
    for t in range(1, epochs + 1):
        z = np.bincount(row_ids, weights=data * w[indices], minlength=n) + b
        coef = np.where(y_signed * z < 1.0, -y_signed, 0.0) / n
        gw = np.bincount(indices, weights=data * coef[row_ids], minlength=n_features) + lam * w
        gb = _ordered_sum(coef)
        eta = 1.0 / (lam * t)
        w -= eta * gw
        b -= eta * gb
    return w, b


@njit(cache=True)
def _svm_fit_jit(indptr, indices, data, y_signed, n_features, lam, epochs):
    n = len(indptr) - 1
    w = np.zeros(n_features, dtype=np.float64)
    b = 0.0
    gw = np.zeros(n_features, dtype=np.float64)
    coef = np.empty(n, dtype=np.float64)
    for t in range(1, epochs + 1):
        for j in range(n_features):
            gw[j] = 0.0
        for i in range(n):
            z = 0.0
            for k in range(indptr[i], indptr[i + 1]):
                z += data[k] * w[indices[k]]
            z = z + b
            if y_signed[i] * z < 1.0:
                coef[i] = -y_signed[i] / n
            else:
                coef[i] = 0.0
        gb = 0.0
        for i in range(n):
            for k in range(indptr[i], indptr[i + 1]):
                gw[indices[k]] += data[k] * coef[i]
            gb += coef[i]
        eta = 1.0 / (lam * t)
        for j in range(n_features):
            w[j] = w[j] - eta * (gw[j] + lam * w[j])
        b -= eta * gb
    return w, b


def svm_fit_numba(indptr, indices, data, y_signed, n_features, lam, epochs):
    w, b = _svm_fit_jit(indptr, indices, data, y_signed, n_features, lam, epochs)
    return w, b


# --------------------------------------------------------------------------
# Gini best-split search over a dense gathered column block
# --------------------------------------------------------------------------

def best_split_numpy(cols, y, n_classes, min_leaf):
    """cols: (n, f) float64; y: int64 class ids.

    Returns (feature_local_index, threshold, weighted_gini, found).
    Candidate thresholds are midpoints between adjacent distinct sorted
    values; both sides must keep at least min_leaf rows.  Ties keep the
    first (lowest feature index, then lowest threshold).
    """
    n, f = cols.shape
    best_j, best_thr, best_g = -1, 0.0, np.inf
    total = np.bincount(y, minlength=n_classes).astype(np.float64)
    for j in range(f):
        vals = cols[:, j]
        order = np.argsort(vals, kind="stable")
        sv = vals[order]
        sy = y[order]
        onehot = np.zeros((n, n_classes), dtype=np.float64)
        onehot[np.arange(n), sy] = 1.0
        cum = np.cumsum(onehot, axis=0)
        sizes_l = np.arange(1, n, dtype=np.float64)
        boundary = sv[:-1] < sv[1:]
        valid = boundary & (sizes_l >= min_leaf) & ((n - sizes_l) >= min_leaf)
        if not valid.any():
            continue
        cl = cum[:-1]
        cr = total[None, :] - cl
        sizes_r = n - sizes_l
        gl = 1.0 - ((cl / sizes_l[:, None]) ** 2).sum(axis=1)
        gr = 1.0 - ((cr / sizes_r[:, None]) ** 2).sum(axis=1)
        weighted = (sizes_l * gl + sizes_r * gr) / n
        weighted = np.where(valid, weighted, np.inf)
        i = int(np.argmin(weighted))
        if weighted[i] < best_g:
            best_g = float(weighted[i])
            best_j = j
            best_thr = (sv[i] + sv[i + 1]) / 2.0
    return best_j, best_thr, best_g, best_j >= 0


@njit(cache=True)
def _best_split_jit(cols, y, n_classes, min_leaf):
    n, f = cols.shape
    best_j = -1
    best_thr = 0.0
    best_g = np.inf
    total = np.zeros(n_classes, dtype=np.float64)
    for i in range(n):
        total[y[i]] += 1.0
    left = np.zeros(n_classes, dtype=np.float64)
    for j in range(f):
        vals = cols[:, j].copy()
        order = np.argsort(vals)
        for c in range(n_classes):
            left[c] = 0.0
        local_best = np.inf
        local_thr = 0.0
        for i in range(n - 1):
            left[y[order[i]]] += 1.0
            if vals[order[i]] >= vals[order[i + 1]]:
                continue
            nl = float(i + 1)
            nr = float(n - i - 1)
            if nl < min_leaf or nr < min_leaf:
                continue
            # same expression shape as the numpy flavor so exact ties
            # between features resolve identically in both
            sl = 0.0
            sr = 0.0
            for c in range(n_classes):
                sl += (left[c] / nl) ** 2
                sr += ((total[c] - left[c]) / nr) ** 2
            gl = 1.0 - sl
            gr = 1.0 - sr
            weighted = (nl * gl + nr * gr) / n
            if weighted < local_best:
                local_best = weighted
                local_thr = (vals[order[i]] + vals[order[i + 1]]) / 2.0
        if local_best < best_g:
            best_g = local_best
            best_j = j
            best_thr = local_thr
    return best_j, best_thr, best_g, best_j >= 0


def best_split_numba(cols, y, n_classes, min_leaf):
    j, thr, g, found = _best_split_jit(cols, y, n_classes, min_leaf)
    return int(j), float(thr), float(g), bool(found)


# --------------------------------------------------------------------------
# flavor selection
# --------------------------------------------------------------------------

def select_kernels():
    """Return dict of the active kernel flavor, chosen at call time."""
    if numba_enabled():
        return {
            "flavor": "numba",
            "logreg_fit": logreg_fit_numba,
            "svm_fit": svm_fit_numba,
            "best_split": best_split_numba,
        }
    return {
        "flavor": "numpy",
        "logreg_fit": logreg_fit_numpy,
        "svm_fit": svm_fit_numpy,
        "best_split": best_split_numpy,
    }
