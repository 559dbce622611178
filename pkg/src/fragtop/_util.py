"""Shared numerical helpers: deterministic RNG, canonical JSON, small linear algebra."""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Iterable, List, Sequence, Tuple

import numpy as np

TWO_PI = 2.0 * np.pi


def rng_for(master_seed: int, *tags: int) -> np.random.Generator:
    """Deterministic generator derived from a master seed and integer tags.

    Distinct tag tuples give statistically independent streams, so every
    randomized stage of a pipeline can be replayed bit-for-bit.
    """
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(t) for t in tags))
    return np.random.default_rng(ss)


def parallel_map(fn: Callable[[Any], Any], items: Sequence[Any]) -> List[Any]:
    """Order-preserving map, threaded when FRAGTOP_THREADS > 1."""
    try:
        threads = int(os.environ.get("FRAGTOP_THREADS", "1"))
    except ValueError:
        threads = 1
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def jsonable(obj: Any) -> Any:
    """Recursively convert numpy scalars and arrays to plain Python values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def canonical_json_bytes(obj: Any) -> bytes:
    """Serialize to byte-identical JSON: sorted keys, fixed separators, trailing newline."""
    text = json.dumps(jsonable(obj), sort_keys=True, indent=2, separators=(",", ": "))
    return (text + "\n").encode("utf-8")


def wrap_angle(x: np.ndarray | float) -> np.ndarray | float:
    """Reduce angles to the principal branch (-pi, pi]."""
    out = np.mod(np.asarray(x) + np.pi, TWO_PI) - np.pi
    out = np.where(out == -np.pi, np.pi, out)
    if np.isscalar(x):
        return float(out)
    return out


def polar_unitary(m: np.ndarray) -> np.ndarray:
    """Closest unitary (orthogonal for real input) factor of a full-rank matrix."""
    u, _, vh = np.linalg.svd(m)
    return u @ vh


def phase_fix(v: np.ndarray) -> np.ndarray:
    """Rotate a complex vector so its largest-magnitude entry is real positive.

    Ties resolve to the lowest index, which keeps the convention deterministic.
    """
    i = int(np.argmax(np.abs(v)))
    a = v[i]
    if a == 0:
        return v.copy()
    return v * (np.conj(a) / abs(a))


def sign_fix(v: np.ndarray) -> np.ndarray:
    """Flip a real vector so its largest-magnitude entry is positive."""
    i = int(np.argmax(np.abs(v)))
    if v[i] < 0:
        return -v
    return v.copy()


def gram_schmidt(cols: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Orthonormalize matrix columns in order; raise if a column collapses."""
    out = np.array(cols, dtype=cols.dtype, copy=True)
    n, r = out.shape
    for a in range(r):
        for b in range(a):
            out[:, a] -= out[:, b] * (np.conj(out[:, b]) @ out[:, a])
        nrm = float(np.linalg.norm(out[:, a]))
        if nrm < tol:
            raise np.linalg.LinAlgError("column collapsed during orthonormalization")
        out[:, a] /= nrm
    return out


def takagi_symmetric_unitary(s: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Factor a symmetric unitary S as A A^T with S conj(A) = A.

    Splits S into commuting real and imaginary parts, diagonalizes them by a
    common real orthogonal basis, and takes half-angle phases. The result maps
    real vectors to the fixed locus of v -> S conj(v).
    """
    s = np.asarray(s)
    n = s.shape[0]
    if s.shape != (n, n):
        raise ValueError("square matrix required")
    if np.linalg.norm(s - s.T) > tol * max(1.0, np.linalg.norm(s)):
        raise ValueError("matrix is not symmetric")
    if np.linalg.norm(s @ np.conj(s.T) - np.eye(n)) > tol * n:
        raise ValueError("matrix is not unitary")
    r_part = np.real(s)
    j_part = np.imag(s)
    # R and J commute and R^2 + J^2 = I for symmetric unitary S.
    evals, q = np.linalg.eigh(r_part)
    q = np.asarray(q)
    # Within each R-eigenspace, diagonalize the projected J to finish the pair.
    groups: List[Tuple[int, int]] = []
    start = 0
    for i in range(1, n + 1):
        if i == n or abs(evals[i] - evals[start]) > 1e-8:
            groups.append((start, i))
            start = i
    q_full = q.copy()
    d_r = np.zeros(n)
    d_j = np.zeros(n)
    for lo, hi in groups:
        block = q[:, lo:hi]
        jj = block.T @ j_part @ block
        jj = 0.5 * (jj + jj.T)
        sub_evals, sub_q = np.linalg.eigh(jj)
        q_full[:, lo:hi] = block @ sub_q
        d_r[lo:hi] = evals[lo:hi]
        d_j[lo:hi] = sub_evals
    phases = np.arctan2(d_j, d_r)
    a = q_full @ np.diag(np.exp(0.5j * phases))
    if np.linalg.norm(a @ a.T - s) > 1e-8 * n:
        raise np.linalg.LinAlgError("factorization failed to reproduce the input")
    return a


def realify_vector(v: np.ndarray) -> np.ndarray:
    """Complex n-vector to real 2n-vector, real parts stacked over imaginary."""
    return np.concatenate([np.real(v), np.imag(v)])


def realify_operator(h: np.ndarray) -> np.ndarray:
    """Complex n x n operator to the real 2n x 2n operator on stacked coordinates."""
    a = np.real(h)
    b = np.imag(h)
    return np.block([[a, -b], [b, a]])


def iter_index(shape: Sequence[int]) -> Iterable[Tuple[int, ...]]:
    """Row-major iteration over a multidimensional index range."""
    return np.ndindex(*tuple(int(s) for s in shape))
