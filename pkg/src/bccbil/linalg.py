"""Truncated SVD of the bi-adjacency matrix and spectral diagnostics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, SVDConvergenceError
from .graph import SignedBipartiteGraph

__all__ = [
    "LowRankFactors",
    "truncated_svd",
    "frobenius_norm",
    "spectral_norm_estimate",
    "residual_spectral_norm",
    "OVERSAMPLING",
    "MAX_ITER",
]

OVERSAMPLING = 8
MAX_ITER = 200
RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class LowRankFactors:
    """Rank-r factors ``B ~ U diag(s) V^T``.

    ``u_factor`` is (m, r), ``v_factor`` is (n, r), both with orthonormal
    columns; ``singular_values`` is nonincreasing.
    """

    u_factor: np.ndarray
    singular_values: np.ndarray
    v_factor: np.ndarray

    @property
    def rank(self) -> int:
        return self.singular_values.size

    @property
    def m(self) -> int:
        return self.u_factor.shape[0]

    @property
    def n(self) -> int:
        return self.v_factor.shape[0]

    @property
    def scaled_u(self) -> np.ndarray:
        """``U diag(s)``, the left factor used by the candidate search."""
        return self.u_factor * self.singular_values[None, :]

    def dense(self) -> np.ndarray:
        """Materialize the rank-r approximation (tests and diagnostics only)."""
        return self.scaled_u @ self.v_factor.T


def _as_matrix(g) -> np.ndarray:
    if isinstance(g, SignedBipartiteGraph):
        return g.as_float()
    return np.asarray(g, dtype=np.float64)


def truncated_svd(g, r: int, seed: int = 0, *, max_iter: int = MAX_ITER) -> LowRankFactors:
    """Top-``r`` singular triples by randomized subspace iteration.

    Uses a Gaussian start block of ``r + 8`` columns (capped at ``min(m, n)``),
    re-orthonormalized every half step. Stops when no singular value estimate
    moves by more than 1e-9 relative to the largest one.
    """
    a = _as_matrix(g)
    m, n = a.shape
    if not 1 <= r <= min(m, n):
        raise InvalidInputError(f"rank r={r} outside [1, {min(m, n)}]")

    block = min(r + OVERSAMPLING, min(m, n))
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(a @ rng.standard_normal((n, block)))
    prev = None
    change = np.inf
    for it in range(1, max_iter + 1):
        w, _ = np.linalg.qr(a.T @ q)
        q, _ = np.linalg.qr(a @ w)
        # a ~ q (q^T a); the small SVD gives the current estimates
        ub, s, vt = np.linalg.svd(q.T @ a, full_matrices=False)
        if prev is not None:
            scale = max(s[0], np.finfo(float).tiny)
            change = float(np.max(np.abs(s[:r] - prev)) / scale)
            # a full-width block spans the whole range after one pass
            if change < RTOL or block == min(m, n):
                break
        prev = s[:r].copy()
    else:
        raise SVDConvergenceError(
            f"subspace iteration did not converge in {max_iter} iterations "
            f"(last relative change {change:.3e})",
            residual=change,
            iterations=max_iter,
        )
    u = q @ ub[:, :r]
    v = vt[:r].T
    return LowRankFactors(u, s[:r].copy(), v.copy())


def frobenius_norm(g) -> float:
    """``||B||_F``; equals sqrt(nnz) for a signed graph."""
    if isinstance(g, SignedBipartiteGraph):
        return float(np.sqrt(g.nnz))
    return float(np.linalg.norm(_as_matrix(g)))


def spectral_norm_estimate(f: LowRankFactors) -> float:
    """Largest singular value, read off the factors."""
    return float(f.singular_values[0])


def residual_spectral_norm(g, f: LowRankFactors, seed: int = 0, iters: int = 500, tol: float = 1e-12) -> float:
    """Power-iteration estimate of ``||B - U S V^T||_2`` without forming the product."""
    a = _as_matrix(g)
    us = f.scaled_u
    vt = f.v_factor.T

    def apply(x):
        return a @ x - us @ (vt @ x)

    def apply_t(y):
        return a.T @ y - f.v_factor @ (us.T @ y)

    x = np.random.default_rng(seed).standard_normal(a.shape[1])
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(iters):
        y = apply(x)
        x = apply_t(y)
        nx = np.linalg.norm(x)
        if nx == 0.0:
            return 0.0
        x /= nx
        new = float(np.sqrt(nx))
        if abs(new - est) <= tol * max(new, 1.0):
            est = new
            break
        est = new
    return est
