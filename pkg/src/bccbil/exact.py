"""Brute-force MaxAgree for small instances.

Clusterings of U and V are enumerated jointly as set partitions of the
``m + n`` vertices (U first), each emitted once as a restricted growth string.
"""
from __future__ import annotations

from collections.abc import Iterator
from functools import lru_cache

import numpy as np

from . import _backend
from ._kernels_py import iter_rgs
from .errors import GuardError, InvalidInputError
from .graph import Clustering, SignedBipartiteGraph

__all__ = ["stirling2", "partition_count", "enumerate_clusterings", "max_agree_exact", "PARTITION_GUARD"]

PARTITION_GUARD = 10**7


@lru_cache(maxsize=None)
def stirling2(n: int, j: int) -> int:
    """Stirling number of the second kind S(n, j)."""
    if n == j:
        return 1
    if j == 0 or j > n:
        return 0
    return j * stirling2(n - 1, j) + stirling2(n - 1, j - 1)


def partition_count(v_count: int, k: int) -> int:
    """Number of partitions of ``v_count`` items into at most ``k`` blocks."""
    return sum(stirling2(v_count, j) for j in range(1, min(k, v_count) + 1))


def _guard(v_count: int, k: int) -> int:
    if v_count < 1 or k < 1:
        raise InvalidInputError(f"need v_count >= 1 and k >= 1, got {v_count}, {k}")
    total = partition_count(v_count, k)
    if total > PARTITION_GUARD:
        raise GuardError(
            f"{total} partitions of {v_count} vertices into <= {k} clusters exceeds the "
            f"{PARTITION_GUARD:.0e} guard",
            total,
            PARTITION_GUARD,
        )
    return total


def enumerate_clusterings(v_count: int, k: int) -> Iterator[tuple[int, ...]]:
    """Every partition of ``v_count`` items into at most ``k`` blocks, exactly once."""
    _guard(v_count, k)
    return iter_rgs(v_count, k)


def max_agree_exact(g: SignedBipartiteGraph, k: int, kernels=None):
    """Optimal agreements with at most ``k`` clusters, and one optimal clustering."""
    _guard(g.m + g.n, k)
    kern = kernels or _backend.kernels
    w = np.ascontiguousarray(g.weights, dtype=np.int8)
    best_trace, labels = kern.exact_max_trace(w, int(k))
    labels = np.asarray(labels, dtype=np.int64)
    best = Clustering(labels[: g.m], labels[g.m :], k)
    return best_trace + g.neg_count, best
