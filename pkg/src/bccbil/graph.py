"""Signed bipartite graphs, clusterings and agreement accounting.

A graph is stored as its dense ``m x n`` bi-adjacency matrix with entries in
{-1, 0, +1}; a 0 marks an unlabeled pair (incomplete instance) and never
contributes to the objective. Everything here is integer-exact.
"""
from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "SignedBipartiteGraph",
    "Clustering",
    "from_edge_list",
    "generate_planted",
    "from_ratings",
    "RatingsGraph",
    "count_agreements",
    "trace_objective",
    "merge_single_sided",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class SignedBipartiteGraph:
    """Immutable signed bi-adjacency matrix ``weights`` of shape (m, n)."""

    weights: np.ndarray
    neg_count: int = field(init=False)
    pos_count: int = field(init=False)

    def __post_init__(self):
        w = np.array(self.weights, copy=True)
        if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] < 1:
            raise InvalidInputError(f"weights must be a non-empty 2-D array, got shape {w.shape}")
        if not np.isin(w, (-1, 0, 1)).all():
            bad = np.argwhere(~np.isin(w, (-1, 0, 1)))[0]
            raise InvalidInputError(f"entry {tuple(int(i) for i in bad)} is not in {{-1, 0, +1}}")
        w = _frozen(w.astype(np.int8))
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "neg_count", int(np.count_nonzero(w == -1)))
        object.__setattr__(self, "pos_count", int(np.count_nonzero(w == 1)))

    @property
    def m(self) -> int:
        return self.weights.shape[0]

    @property
    def n(self) -> int:
        return self.weights.shape[1]

    @property
    def nnz(self) -> int:
        return self.neg_count + self.pos_count

    @property
    def is_complete(self) -> bool:
        return self.nnz == self.m * self.n

    def as_float(self) -> np.ndarray:
        return self.weights.astype(np.float64)

    def __eq__(self, other):
        if not isinstance(other, SignedBipartiteGraph):
            return NotImplemented
        return np.array_equal(self.weights, other.weights)

    def __repr__(self):
        return f"SignedBipartiteGraph(m={self.m}, n={self.n}, nnz={self.nnz}, neg={self.neg_count})"


@dataclass(frozen=True, eq=False)
class Clustering:
    """Cluster ids for the left (``labels_u``) and right (``labels_v``) vertices.

    Ids live in ``[0, k)``; empty clusters are allowed, so ``k`` is an upper
    bound on the number of clusters actually used.
    """

    labels_u: np.ndarray
    labels_v: np.ndarray
    k: int

    def __post_init__(self):
        if int(self.k) < 1:
            raise InvalidInputError(f"k must be >= 1, got {self.k}")
        object.__setattr__(self, "k", int(self.k))
        for name in ("labels_u", "labels_v"):
            a = np.array(getattr(self, name), dtype=np.int64, copy=True)
            if a.ndim != 1:
                raise InvalidInputError(f"{name} must be 1-D")
            if a.size and (a.min() < 0 or a.max() >= self.k):
                raise InvalidInputError(f"{name} has ids outside [0, {self.k})")
            object.__setattr__(self, name, _frozen(a))

    @property
    def m(self) -> int:
        return self.labels_u.size

    @property
    def n(self) -> int:
        return self.labels_v.size

    def x_matrix(self) -> np.ndarray:
        """0/1 assignment matrix of the left vertices, shape (m, k)."""
        x = np.zeros((self.m, self.k), dtype=np.int64)
        x[np.arange(self.m), self.labels_u] = 1
        return x

    def y_matrix(self) -> np.ndarray:
        y = np.zeros((self.n, self.k), dtype=np.int64)
        y[np.arange(self.n), self.labels_v] = 1
        return y

    def cluster_sizes(self) -> np.ndarray:
        return np.bincount(np.concatenate([self.labels_u, self.labels_v]), minlength=self.k)

    @property
    def num_nonempty(self) -> int:
        return int(np.count_nonzero(self.cluster_sizes()))

    @property
    def num_singletons(self) -> int:
        return int(np.count_nonzero(self.cluster_sizes() == 1))

    def __eq__(self, other):
        if not isinstance(other, Clustering):
            return NotImplemented
        return (
            self.k == other.k
            and np.array_equal(self.labels_u, other.labels_u)
            and np.array_equal(self.labels_v, other.labels_v)
        )

    def __repr__(self):
        return f"Clustering(m={self.m}, n={self.n}, k={self.k}, nonempty={self.num_nonempty})"


def from_edge_list(m: int, n: int, edges: Iterable[tuple[int, int, int]]) -> SignedBipartiteGraph:
    """Build a graph from ``(u, v, sign)`` records; unlisted pairs are 0."""
    if m < 1 or n < 1:
        raise InvalidInputError(f"m and n must be >= 1, got m={m}, n={n}")
    w = np.zeros((m, n), dtype=np.int8)
    seen = np.zeros((m, n), dtype=bool)
    for pos, rec in enumerate(edges):
        try:
            u, v, s = (int(x) for x in rec)
        except (TypeError, ValueError) as exc:
            raise InvalidInputError(f"record {pos}: malformed edge {rec!r}") from exc
        if not (0 <= u < m and 0 <= v < n):
            raise InvalidInputError(f"record {pos}: index ({u}, {v}) out of range for {m}x{n}")
        if s not in (-1, 1):
            raise InvalidInputError(f"record {pos}: sign {s} is not -1 or +1")
        if seen[u, v]:
            raise InvalidInputError(f"record {pos}: duplicate pair ({u}, {v})")
        seen[u, v] = True
        w[u, v] = s
    return SignedBipartiteGraph(w)


def generate_planted(m: int, n: int, k_true: int, p: float, seed: int):
    """Complete graph whose signs follow a random planted clustering.

    Every vertex draws a cluster id uniformly from ``[0, k_true)``; an edge is
    +1 iff its endpoints share a cluster, and each sign is then flipped
    independently with probability ``p``. Returns ``(graph, planted)``.
    """
    if k_true < 1:
        raise InvalidInputError(f"k_true must be >= 1, got {k_true}")
    if not 0.0 <= p <= 1.0:
        raise InvalidInputError(f"flip probability must lie in [0, 1], got {p}")
    if m < 1 or n < 1:
        raise InvalidInputError(f"m and n must be >= 1, got m={m}, n={n}")
    rng = np.random.default_rng(seed)
    lu = rng.integers(0, k_true, size=m)
    lv = rng.integers(0, k_true, size=n)
    w = np.where(lu[:, None] == lv[None, :], 1, -1).astype(np.int8)
    flips = rng.random((m, n)) < p
    w[flips] *= -1
    return SignedBipartiteGraph(w), Clustering(lu, lv, k_true)


@dataclass(frozen=True)
class RatingsGraph:
    """Graph built from ratings plus the external-id tables of both sides."""

    graph: SignedBipartiteGraph
    user_ids: tuple
    item_ids: tuple
    threshold: float


def from_ratings(records: Iterable[tuple], threshold="mean") -> RatingsGraph:
    """Threshold a stream of ``(user, item, rating)`` records into a graph.

    Ids are indexed densely in first-seen order. A rated pair becomes +1 when
    its rating is strictly above ``threshold`` and -1 otherwise; unrated
    pairs stay 0. ``threshold="mean"`` uses the global mean rating.
    """
    users: dict = {}
    items: dict = {}
    rows, cols, vals = [], [], []
    for pos, rec in enumerate(records):
        if len(rec) < 3:
            raise InvalidInputError(f"record {pos}: expected (user, item, rating), got {rec!r}")
        user, item, rating = rec[0], rec[1], rec[2]
        try:
            value = float(rating)
        except (TypeError, ValueError) as exc:
            raise InvalidInputError(f"record {pos}: non-numeric rating {rating!r}") from exc
        if not np.isfinite(value):
            raise InvalidInputError(f"record {pos}: non-finite rating {rating!r}")
        rows.append(users.setdefault(user, len(users)))
        cols.append(items.setdefault(item, len(items)))
        vals.append(value)
    if not vals:
        raise InvalidInputError("empty ratings stream")

    rows_a = np.asarray(rows, dtype=np.int64)
    cols_a = np.asarray(cols, dtype=np.int64)
    vals_a = np.asarray(vals, dtype=np.float64)
    if isinstance(threshold, str):
        if threshold != "mean":
            raise InvalidInputError(f"unknown threshold rule {threshold!r}")
        cut = float(vals_a.mean())
    else:
        cut = float(threshold)

    m, n = len(users), len(items)
    flat = rows_a * n + cols_a
    uniq, first = np.unique(flat, return_index=True)
    if uniq.size != flat.size:
        dup = np.setdiff1d(np.arange(flat.size), first)[0]
        raise InvalidInputError(f"record {dup}: duplicate rating for ({rows_a[dup]}, {cols_a[dup]})")
    w = np.zeros((m, n), dtype=np.int8)
    w[rows_a, cols_a] = np.where(vals_a > cut, 1, -1)
    return RatingsGraph(SignedBipartiteGraph(w), tuple(users), tuple(items), cut)


def _check_dims(g: SignedBipartiteGraph, c: Clustering):
    if c.m != g.m or c.n != g.n:
        raise InvalidInputError(
            f"clustering covers {c.m}+{c.n} vertices but graph is {g.m}x{g.n}"
        )


def count_agreements(g: SignedBipartiteGraph, c: Clustering) -> int:
    """Positive edges inside clusters plus negative edges across clusters."""
    _check_dims(g, c)
    same = c.labels_u[:, None] == c.labels_v[None, :]
    w = g.weights
    return int(np.count_nonzero((w == 1) & same) + np.count_nonzero((w == -1) & ~same))


def trace_objective(g: SignedBipartiteGraph, labels_u, labels_v) -> int:
    """``Tr(X^T B Y)``: signed weight of all co-clustered pairs."""
    lu = np.asarray(labels_u)
    lv = np.asarray(labels_v)
    if lu.shape != (g.m,) or lv.shape != (g.n,):
        raise InvalidInputError(f"label shapes {lu.shape}, {lv.shape} do not match {g.m}x{g.n}")
    same = lu[:, None] == lv[None, :]
    return int(g.weights[same].sum(dtype=np.int64))


def merge_single_sided(c: Clustering) -> Clustering:
    """Merge all U-only clusters into one and all V-only clusters into one.

    Mixed clusters keep their ids; a merged group takes the smallest id among
    its members. Agreements are unchanged on every graph.
    """
    in_u = np.bincount(c.labels_u, minlength=c.k) > 0
    in_v = np.bincount(c.labels_v, minlength=c.k) > 0
    remap = np.arange(c.k)
    u_only = np.flatnonzero(in_u & ~in_v)
    v_only = np.flatnonzero(in_v & ~in_u)
    if u_only.size:
        remap[u_only] = u_only[0]
    if v_only.size:
        remap[v_only] = v_only[0]
    return Clustering(remap[c.labels_u], remap[c.labels_v], c.k)
