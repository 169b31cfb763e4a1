"""Linear maximization over cluster-assignment matrices, and the bilinear objective."""
from __future__ import annotations

import numpy as np

from .errors import InvalidInputError
from .graph import SignedBipartiteGraph, trace_objective
from .linalg import LowRankFactors

__all__ = ["assign_rows", "assignment_value", "bilinear_objective", "cluster_sums"]


def assign_rows(L) -> np.ndarray:
    """Row-wise argmax of ``L`` (d x k), ties going to the smallest column.

    The induced 0/1 matrix X (one 1 per row) maximizes ``Tr(X^T L)``; the
    same routine serves both sides of the bilinear problem.
    """
    a = np.asarray(L, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise InvalidInputError(f"L must be a non-empty 2-D array, got shape {a.shape}")
    if np.isnan(a).any():
        raise InvalidInputError("L contains NaN; argmax is undefined")
    return np.argmax(a, axis=1)


def assignment_value(L, labels) -> float:
    """``Tr(X^T L)`` for the assignment given by ``labels``."""
    a = np.asarray(L, dtype=np.float64)
    return float(a[np.arange(a.shape[0]), labels].sum())


def cluster_sums(rows: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    """``X^T rows``: per-cluster sums of the rows of a (d, r) array."""
    out = np.zeros((k, rows.shape[1]))
    np.add.at(out, labels, rows)
    return out


def bilinear_objective(x_labels, operand, y_labels, k: int | None = None):
    """``Tr(X^T A Y)`` for a graph (exact integer) or for low-rank factors.

    With :class:`LowRankFactors` the value is ``sum_j <(U S)^T x_j, V^T y_j>``,
    never forming the m x n product.
    """
    xl = np.asarray(x_labels, dtype=np.int64)
    yl = np.asarray(y_labels, dtype=np.int64)
    if isinstance(operand, SignedBipartiteGraph):
        return trace_objective(operand, xl, yl)
    if isinstance(operand, LowRankFactors):
        if xl.shape != (operand.m,) or yl.shape != (operand.n,):
            raise InvalidInputError(
                f"label shapes {xl.shape}, {yl.shape} do not match factors {operand.m}x{operand.n}"
            )
        if k is None:
            k = int(max(xl.max(initial=0), yl.max(initial=0))) + 1
        left = cluster_sums(operand.scaled_u, xl, k)
        right = cluster_sums(operand.v_factor, yl, k)
        return float(np.einsum("jr,jr->", left, right))
    raise InvalidInputError(f"unsupported operand type {type(operand).__name__}")
