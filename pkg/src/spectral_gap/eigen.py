"""Lowest eigenpairs of sparse symmetric positive-definite operators.

Block Lanczos with full reorthogonalisation, Rayleigh-Ritz extraction,
locking of converged pairs and thick restarts. By default the iteration runs
on the inverse operator (shift-and-invert at zero), where the wanted end of
the spectrum is the well-separated one. When a sparse LU factorisation is too
expensive (large or 3D grids) the exact inverse is replaced by one algebraic
multigrid V-cycle applied to the Ritz residuals (block Davidson).
``transform="none"`` runs plain block Lanczos on A itself.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .model import DiscreteOperator

DEFAULT_SEED = 42
DEFAULT_TOL = 1e-10
MAX_K = 16
TIE_TOL = 1e-10
LU_MAX_SIZE = 300_000  # above this (or in 3D) AMG replaces the LU factorisation


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: tuple[float, ...]
    residual_norms: tuple[float, ...]  # ||A v - lam v|| / (||A||_1 ||v||)
    iterations: int
    converged: bool
    seed: int
    ties: tuple[tuple[int, int], ...] = ()
    method: str = ""
    vectors: np.ndarray | None = field(default=None, repr=False, compare=False)


def _as_matrix(A) -> sp.csr_matrix:
    if isinstance(A, DiscreteOperator):
        return A.to_scipy()
    return sp.csr_matrix(A, dtype=float)


def norm1(a: sp.csr_matrix) -> float:
    return float(abs(a).sum(axis=0).max())


class _InverseOperator:
    """Exact A^{-1} through a sparse LU factorisation."""

    backend = "lu"

    def __init__(self, a: sp.csr_matrix):
        self._lu = spla.splu(a.tocsc())

    def __call__(self, block: np.ndarray) -> np.ndarray:
        return self._lu.solve(block)


class _AmgPreconditioner:
    """One smoothed-aggregation V-cycle per column, an approximate A^{-1}."""

    backend = "amg"

    def __init__(self, a: sp.csr_matrix):
        import pyamg
        self._m = pyamg.smoothed_aggregation_solver(a, symmetry="symmetric").aspreconditioner(cycle="V")

    def __call__(self, block: np.ndarray) -> np.ndarray:
        return np.column_stack([self._m @ block[:, j] for j in range(block.shape[1])])


def _orthonormalise(w: np.ndarray, v: np.ndarray | None, rng) -> np.ndarray:
    """Orthonormalise the block w against the basis v (two Gram-Schmidt passes)."""
    for _ in range(2):
        if v is not None and v.shape[1]:
            w = w - v @ (v.T @ w)
    q, r = np.linalg.qr(w)
    scale = np.max(np.abs(np.diag(r))) if r.size else 0.0
    keep = np.abs(np.diag(r)) > 1e-10 * max(scale, 1e-300)
    q = q[:, keep]
    if v is not None and q.shape[1]:
        q = q - v @ (v.T @ q)
        q, _ = np.linalg.qr(q)
    if q.shape[1] == 0:
        # invariant subspace: continue from fresh random directions
        fresh = rng.standard_normal((w.shape[0], w.shape[1]))
        return _orthonormalise(fresh, v, rng)
    return q


def smallest_eigenpairs(A, k: int = 2, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED, *,
                        want_vectors: bool = False, transform: str = "invert",
                        backend: str = "auto", start: np.ndarray | None = None,
                        max_basis: int | None = None, max_iter: int | None = None) -> SpectrumResult:
    """The k smallest eigenvalues of the symmetric positive-definite A.

    Converged pairs satisfy ``||A y - lam y|| <= tol * ||A||_1`` with
    ``lam`` the Rayleigh quotient of the unit Ritz vector ``y``. ``start``
    optionally supplies initial vectors (columns), e.g. interpolated
    eigenvectors from a coarser grid; random columns from ``seed`` fill the
    block otherwise.
    """
    a = _as_matrix(A)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("operator must be square")
    if not 1 <= k <= MAX_K:
        raise ValueError(f"k must lie in 1..{MAX_K}")
    if k >= n:
        raise ValueError("k must be smaller than the matrix size")
    if tol < 1e-12:
        raise ValueError("tol must be >= 1e-12")
    diag = a.diagonal()
    if np.any(diag <= 0):
        raise ValueError("operator diagonal must be positive")
    dim = A.dim if isinstance(A, DiscreteOperator) else 1

    if transform == "invert":
        if backend == "auto":
            backend = "lu" if (n <= LU_MAX_SIZE and dim <= 2) else "amg"
        if backend == "lu":
            op, mode = _InverseOperator(a), "inverse"
            method = "block-lanczos/inverse-lu"
        elif backend == "amg":
            op, mode = _AmgPreconditioner(a), "preconditioned"
            method = "block-davidson/amg"
        else:
            raise ValueError(f"unknown backend {backend!r}")
    elif transform == "none":
        op, mode = (lambda x: a @ x), "direct"
        method = "block-lanczos/direct"
    else:
        raise ValueError(f"unknown transform {transform!r}")

    rng = np.random.default_rng(seed)
    b = k
    m_max = max_basis or min(n, max(20 * b, 80) if mode == "direct" else max(6 * b + 10, 30))
    cap = max_iter or int(50 * k * math.sqrt(n)) + 10
    a_norm = norm1(a)
    target = tol * a_norm

    block = rng.standard_normal((n, b))
    if start is not None:
        s0 = np.asarray(start, dtype=float).reshape(n, -1)[:, :b]
        block[:, : s0.shape[1]] = s0
    v = _orthonormalise(block, None, rng)
    # Rayleigh-Ritz runs on A^{-1} in inverse mode, on A otherwise
    rr = lambda x: op(x) if mode == "inverse" else a @ x
    wv = rr(v)

    lams = np.zeros(k)
    res = np.full(k, np.inf)
    y = v[:, :k]
    converged = False
    it = 0
    while it < cap:
        it += 1
        t = v.T @ wv
        t = 0.5 * (t + t.T)
        theta, s = np.linalg.eigh(t)
        if mode == "inverse":
            s = s[:, ::-1]  # largest 1/lambda first
        nwant = min(k, v.shape[1])
        y = v @ s[:, :nwant]
        ay = a @ y if mode == "inverse" else wv @ s[:, :nwant]
        lams = np.einsum("ij,ij->j", y, ay)
        resid = ay - y * lams
        res = np.linalg.norm(resid, axis=0)
        done = res <= target
        if nwant == k and np.all(done):
            converged = True
            break
        # locking: converged Ritz vectors stay in the basis but are not expanded
        active = np.nonzero(~done)[0] if nwant == k else np.arange(nwant)
        if mode == "inverse":
            w = wv @ s[:, active]
        elif mode == "direct":
            w = ay[:, active]
        else:
            w = op(resid[:, active])
        if v.shape[1] + w.shape[1] > m_max:
            keep = min(max(3 * k, k + 2), v.shape[1])
            v = v @ s[:, :keep]
            wv = wv @ s[:, :keep]
        q = _orthonormalise(w, v, rng)
        v = np.hstack([v, q])
        wv = np.hstack([wv, rr(q)])

    order = np.argsort(lams)
    lams = lams[order]
    res = res[order] / a_norm
    y = y[:, order]
    ties = tuple((i, i + 1) for i in range(len(lams) - 1)
                 if abs(lams[i + 1] - lams[i]) <= TIE_TOL * max(abs(lams[i]), 1.0))
    return SpectrumResult(tuple(float(x) for x in lams), tuple(float(x) for x in res), it, converged,
                          seed, ties, method, y if want_vectors else None)


def rayleigh_quotient(A, u) -> float:
    """<u, A u> / <u, u> for a vector sampled on A's grid (any shape with A.size entries)."""
    a = _as_matrix(A)
    u = np.asarray(u, dtype=float).ravel()
    if u.shape[0] != a.shape[0]:
        raise ValueError("vector does not match the operator size")
    nn = float(u @ u)
    if nn == 0.0:
        raise ValueError("zero vector has no Rayleigh quotient")
    return float(u @ (a @ u)) / nn
