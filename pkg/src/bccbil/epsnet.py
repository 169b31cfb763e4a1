"""Candidate matrices for the low-rank bilinear search.

Two ways to produce the r x k matrices ``C`` whose columns seed ``L = U S C``:

* :class:`Exact` walks an epsilon-net of the unit ball, one net point per
  column. The net is the cubic lattice of spacing ``2 eps / sqrt(r)``: every
  lattice point whose cell touches the ball is kept, projected onto the ball
  if it lies outside. Any ball point is within half a cell diagonal (= eps)
  of its cell's center, and projection onto the ball does not increase that
  distance.
* :class:`Sampled` draws columns uniformly from the unit ball.

Streams are generated lazily in fixed-size chunks that depend only on
``(seed, chunk index)``, so any partition of the index range reproduces the
same candidates.
"""
from __future__ import annotations

import math
from collections.abc import Iterator
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import GuardError, InvalidInputError

__all__ = [
    "Exact",
    "Sampled",
    "net_points",
    "net_size_estimate",
    "candidate_stream",
    "CandidatePlan",
    "plan_candidates",
    "PRODUCT_GUARD",
    "CHUNK",
]

PRODUCT_GUARD = 10**9
CHUNK = 2048


@dataclass(frozen=True)
class Exact:
    """Enumerate an epsilon-net.

    With ``anchored=False`` this is the full product net^k. With
    ``anchored=True`` the last column is pinned to 0 and the others range over
    a finer net (accuracy ``eps * sqrt(k / (k - 1)) / 2``). The row-wise argmax
    is unchanged when the same vector is added to every column of ``L``, so
    the anchored set keeps the same worst-case guarantee with one fewer
    factor in the product.
    """

    eps: float
    anchored: bool = False

    def __post_init__(self):
        if not 0.0 < self.eps <= 1.0:
            raise InvalidInputError(f"eps must lie in (0, 1], got {self.eps}")

    def column_eps(self, k: int) -> float:
        if not self.anchored:
            return self.eps
        if k == 1:
            return math.inf
        return self.eps * math.sqrt(k / (k - 1)) / 2.0

    def free_columns(self, k: int) -> int:
        return k - 1 if self.anchored else k


@dataclass(frozen=True)
class Sampled:
    """``budget`` candidates with columns uniform in the unit ball."""

    budget: int = 10_000

    def __post_init__(self):
        if int(self.budget) < 1:
            raise InvalidInputError(f"budget must be >= 1, got {self.budget}")


def _log_net_size(r: int, eps: float) -> float:
    h = 2.0 * eps / math.sqrt(r)
    log_vol = (r / 2) * math.log(math.pi) - math.lgamma(r / 2 + 1)
    return max(0.0, log_vol + r * math.log1p(eps) - r * math.log(h))


def net_size_estimate(r: int, eps: float) -> float:
    """Volume estimate of the lattice net size (an overestimate in practice)."""
    log_size = _log_net_size(r, eps)
    return math.exp(log_size) if log_size < 700 else math.inf


@lru_cache(maxsize=4)
def _lattice_net(r: int, eps: float) -> np.ndarray:
    # cached and read-only: repeated solves at one (r, eps) reuse the net
    h = 2.0 * eps / math.sqrt(r)
    jmax = int(math.floor((1.0 + h / 2.0) / h))
    axis = np.arange(-jmax, jmax + 1)
    # squared distance from the origin to each 1-D cell along an axis
    gap = np.maximum(np.abs(axis) * h - h / 2.0, 0.0) ** 2
    idx = np.zeros((1, 0), dtype=np.int64)
    partial = np.zeros(1)
    for _ in range(r):
        cand = partial[:, None] + gap[None, :]
        keep = cand <= 1.0 + 1e-12
        rows, cols = np.nonzero(keep)
        idx = np.concatenate([idx[rows], axis[cols][:, None]], axis=1)
        partial = cand[rows, cols]
    pts = idx.astype(np.float64) * h
    norms = np.linalg.norm(pts, axis=1)
    outside = norms > 1.0
    pts[outside] /= norms[outside, None]
    # only points on the sphere can coincide after projection
    rim = np.flatnonzero(norms >= 1.0 - 1e-9)
    _, first = np.unique(np.round(pts[rim], 12), axis=0, return_index=True)
    keep = np.ones(pts.shape[0], dtype=bool)
    keep[rim] = False
    keep[rim[first]] = True
    net = pts[keep]
    net.flags.writeable = False
    return net


def net_points(r: int, eps: float) -> np.ndarray:
    """Epsilon-net of the closed unit ball in ``r`` dimensions, one point per row."""
    if r < 1:
        raise InvalidInputError(f"dimension r must be >= 1, got {r}")
    if not eps > 0:
        raise InvalidInputError(f"eps must be > 0, got {eps}")
    est = net_size_estimate(r, eps)
    if est > PRODUCT_GUARD:
        raise GuardError(f"epsilon-net of ~{est:.3g} points exceeds guard", est, PRODUCT_GUARD)
    return _lattice_net(r, eps)


def _sample_ball(rng: np.random.Generator, count: int, r: int, k: int) -> np.ndarray:
    g = rng.standard_normal((count, r, k))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    radius = rng.random((count, 1, k)) ** (1.0 / r)
    return g / norms * radius


@dataclass(frozen=True)
class CandidatePlan:
    """Indexable description of a candidate stream.

    ``batch(start, stop)`` returns the candidates with indices in
    ``[start, stop)`` as an array of shape (stop - start, r, k).
    """

    r: int
    k: int
    mode: object
    seed: int
    total: int
    net: np.ndarray | None = None

    def batch(self, start: int, stop: int) -> np.ndarray:
        stop = min(stop, self.total)
        if isinstance(self.mode, Sampled):
            return self._sampled(start, stop)
        return self._exact(start, stop)

    def _sampled(self, start, stop):
        out = []
        c0, c1 = start // CHUNK, (stop - 1) // CHUNK
        for c in range(c0, c1 + 1):
            rng = np.random.default_rng([self.seed, c])
            block = _sample_ball(rng, CHUNK, self.r, self.k)
            lo = max(start - c * CHUNK, 0)
            hi = min(stop - c * CHUNK, CHUNK)
            out.append(block[lo:hi])
        return np.concatenate(out, axis=0)

    def _exact(self, start, stop):
        idx = np.arange(start, stop, dtype=np.int64)
        out = np.zeros((idx.size, self.r, self.k))
        free = self.mode.free_columns(self.k)
        if free == 0:
            return out
        size = self.net.shape[0]
        # column 0 is the most significant digit
        for col in range(free - 1, -1, -1):
            out[:, :, col] = self.net[idx % size]
            idx //= size
        return out

    def chunks(self, size: int = CHUNK) -> Iterator[tuple[int, int]]:
        for start in range(0, self.total, size):
            yield start, min(start + size, self.total)


def plan_candidates(r: int, k: int, mode, seed: int = 0) -> CandidatePlan:
    """Validate ``mode`` and size the stream, refusing oversized exact products."""
    if r < 1 or k < 1:
        raise InvalidInputError(f"r and k must be >= 1, got r={r}, k={k}")
    if isinstance(mode, Sampled):
        return CandidatePlan(r, k, mode, int(seed), int(mode.budget))
    if not isinstance(mode, Exact):
        raise InvalidInputError(f"unknown candidate mode {mode!r}")
    free = mode.free_columns(k)
    if free == 0:
        return CandidatePlan(r, k, mode, int(seed), 1, np.zeros((1, r)))
    col_eps = mode.column_eps(k)
    log_est = free * _log_net_size(r, col_eps)
    est = math.exp(log_est) if log_est < 700 else math.inf
    if est > PRODUCT_GUARD:
        raise GuardError(
            f"exact candidate set of ~{est:.3g} matrices exceeds the {PRODUCT_GUARD:.0e} guard "
            f"(r={r}, k={k}, eps={mode.eps})",
            est,
            PRODUCT_GUARD,
        )
    net = _lattice_net(r, col_eps)
    total = net.shape[0] ** free
    if total > PRODUCT_GUARD:
        raise GuardError(f"exact candidate set of {total} matrices exceeds guard", total, PRODUCT_GUARD)
    return CandidatePlan(r, k, mode, int(seed), int(total), net)


def candidate_stream(r: int, k: int, mode, seed: int = 0) -> Iterator[np.ndarray]:
    """Lazily yield every candidate matrix (shape (r, k)) of ``mode``."""
    plan = plan_candidates(r, k, mode, seed)
    for start, stop in plan.chunks():
        yield from plan.batch(start, stop)
