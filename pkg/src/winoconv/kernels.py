"""Batched matrix-multiply kernels with a fixed reduction order.

The whole package leans on one primitive: out[b] = u[b] @ v[b] for a stack of
b independent matrices.  It is written as a plain triple loop and compiled
with numba so results are reproducible: every output element is accumulated
by exactly one worker, over the shared axis in ascending index order, so the
answer is bit-identical for any thread count.  No BLAS library is involved;
BLAS kernels reorder reductions and would break bit-level determinism.
"""
from __future__ import annotations

import os

os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

import numba
import numpy as np
from numba import njit, prange

from .counters import OpCounter


def set_threads(n: int) -> int:
    """Cap numba worker threads; returns the value actually set."""
    limit = numba.config.NUMBA_NUM_THREADS
    n = max(1, min(int(n), limit))
    numba.set_num_threads(n)
    return n


@njit(parallel=True, cache=True)
def _bgemm(u, v, out):  # pragma: no cover - exercised via batched_matmul
    B, K, C = u.shape
    P = v.shape[2]
    for idx in prange(B * K):
        b = idx // K
        k = idx % K
        row = u[b, k]
        src = v[b]
        dst = out[b, k]
        for p in range(P):
            dst[p] = 0.0
        for c in range(C):
            s = row[c]
            line = src[c]
            for p in range(P):
                dst[p] += s * line[p]


def batched_matmul(u: np.ndarray, v: np.ndarray, counter: OpCounter | None = None,
                   key: str = "mul") -> np.ndarray:
    """out[b] = u[b] @ v[b] for u (B,K,C), v (B,C,P); accumulation in c-ascending order."""
    if u.ndim != 3 or v.ndim != 3:
        raise ValueError(f"expected 3-axis stacks, got {u.ndim} and {v.ndim}")
    if u.shape[0] != v.shape[0] or u.shape[2] != v.shape[1]:
        raise ValueError(f"shape mismatch: {u.shape} @ {v.shape}")
    if u.dtype != v.dtype:
        raise ValueError(f"dtype mismatch: {u.dtype} vs {v.dtype}")
    u = np.ascontiguousarray(u)
    v = np.ascontiguousarray(v)
    out = np.empty((u.shape[0], u.shape[1], v.shape[2]), dtype=u.dtype)
    _bgemm(u, v, out)
    if counter is not None:
        counter.add(key, u.shape[0] * u.shape[1] * u.shape[2] * v.shape[2])
    return out


def matmul(a: np.ndarray, b: np.ndarray, counter: OpCounter | None = None,
           key: str = "mul") -> np.ndarray:
    """Two-operand matmul through the same deterministic kernel."""
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError(f"expected 2-axis operands, got {a.ndim} and {b.ndim}")
    return batched_matmul(a[None, :, :], b[None, :, :], counter=counter, key=key)[0]
