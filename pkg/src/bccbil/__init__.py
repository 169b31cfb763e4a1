"""Bipartite correlation clustering that maximizes agreements.

The solver casts k-BCC as a bilinear maximization over cluster-assignment
matrices and searches it on a truncated SVD of the bi-adjacency matrix.
"""
from ._backend import kernels as _kernels
from .assignment import assign_rows, bilinear_objective
from .epsnet import Exact, Sampled, candidate_stream, net_points
from .errors import BCCError, GuardError, InvalidInputError, SVDConvergenceError
from .exact import enumerate_clusterings, max_agree_exact
from .graph import (
    Clustering,
    SignedBipartiteGraph,
    count_agreements,
    from_edge_list,
    from_ratings,
    generate_planted,
    merge_single_sided,
)
from .linalg import LowRankFactors, frobenius_norm, spectral_norm_estimate, truncated_svd
from .solver import (
    SolveReport,
    SolverConfig,
    baseline,
    bcc_ptas,
    bilinear_low_rank_solve,
    kbcc,
    kbcc_core,
)

KERNEL_BACKEND = _kernels.NAME

__version__ = "0.1.0"
