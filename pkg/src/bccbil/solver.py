"""k-BCC / BCC solvers built on the low-rank bilinear search.

The search evaluates every candidate matrix ``C`` of a stream:
``L = U S C`` -> row argmax gives X -> ``R = X^T U S V^T`` -> column argmax
gives Y, and keeps the pairs with the largest ``Tr(X^T U S V^T Y)``.
Candidates are processed in fixed chunks by a thread pool; results are
reduced by (objective desc, candidate index asc), so the outcome does not
depend on the number of workers.
"""
from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .assignment import bilinear_objective
from .epsnet import CHUNK, Exact, Sampled, plan_candidates
from .errors import InvalidInputError
from .graph import Clustering, SignedBipartiteGraph, count_agreements
from .linalg import LowRankFactors, truncated_svd

__all__ = [
    "SolverConfig",
    "SolveReport",
    "BilinearSolution",
    "bilinear_low_rank_solve",
    "kbcc_core",
    "kbcc",
    "bcc_ptas",
    "baseline",
    "baseline_clusterings",
    "kbcc_parameters",
    "ptas_parameters",
    "default_workers",
    "FINALISTS",
]

FINALISTS = 16


def default_workers() -> int:
    env = os.environ.get("BCC_THREADS")
    if env:
        try:
            value = int(env)
        except ValueError as exc:
            raise InvalidInputError(f"BCC_THREADS must be an integer, got {env!r}") from exc
        if value < 1:
            raise InvalidInputError(f"BCC_THREADS must be >= 1, got {value}")
        return value
    return os.cpu_count() or 1


@dataclass(frozen=True)
class SolverConfig:
    k: int
    r: int
    mode: Exact | Sampled = field(default_factory=Sampled)
    seed: int = 0
    finalize_on: str = "original"

    def __post_init__(self):
        if self.k < 1:
            raise InvalidInputError(f"k must be >= 1, got {self.k}")
        if self.r < 1:
            raise InvalidInputError(f"r must be >= 1, got {self.r}")
        if not isinstance(self.mode, (Exact, Sampled)):
            raise InvalidInputError(f"mode must be Exact or Sampled, got {self.mode!r}")
        if isinstance(self.mode, Exact) and not self.mode.eps < 1.0:
            raise InvalidInputError(f"exact mode needs eps in (0, 1), got {self.mode.eps}")
        if self.finalize_on not in ("original", "lowrank"):
            raise InvalidInputError(f"finalize_on must be 'original' or 'lowrank', got {self.finalize_on!r}")


@dataclass
class SolveReport:
    agreements: int
    clustering: Clustering
    config: SolverConfig
    candidates_evaluated: int
    baseline_agreements: int
    r_effective: int
    lowrank_objective: float | None = None
    algorithm: str = "core"
    delta: float | None = None
    eps: float | None = None
    phase_times_ms: dict = field(default_factory=dict)

    def to_dict(self, timings: bool = False) -> dict:
        cfg = self.config
        out = {
            "agreements": self.agreements,
            "algorithm": self.algorithm,
            "k": cfg.k,
            "r": self.r_effective,
            "r_requested": cfg.r,
            "mode": "exact" if isinstance(cfg.mode, Exact) else "sampled",
        }
        if self.delta is not None:
            out["delta"] = self.delta
        if isinstance(cfg.mode, Exact):
            out["eps"] = cfg.mode.eps
            out["anchored"] = cfg.mode.anchored
        else:
            if self.eps is not None:
                out["eps"] = self.eps
            out["budget"] = cfg.mode.budget
        out.update(
            seed=cfg.seed,
            finalize_on=cfg.finalize_on,
            candidates_evaluated=self.candidates_evaluated,
            baseline_agreements=self.baseline_agreements,
        )
        if timings:
            out["phase_times_ms"] = {k: round(v, 3) for k, v in self.phase_times_ms.items()}
        out["labels_u"] = self.clustering.labels_u.tolist()
        out["labels_v"] = self.clustering.labels_v.tolist()
        return out


@dataclass
class BilinearSolution:
    """Best pair found by the candidate search plus the runner-up finalists."""

    x_labels: np.ndarray
    y_labels: np.ndarray
    objective: float
    candidates_evaluated: int
    finalists: list


def _evaluate_chunk(plan, us, v, start, stop, top, kern):
    cands = np.ascontiguousarray(plan.batch(start, stop))
    b = cands.shape[0]
    x = np.empty((b, us.shape[0]), dtype=np.int64)
    y = np.empty((b, v.shape[0]), dtype=np.int64)
    obj = np.empty(b)
    kern.evaluate_candidates(us, v, cands, x, y, obj)
    order = np.lexsort((np.arange(b), -obj))[:top]
    return [(float(obj[i]), start + int(i), x[i].copy(), y[i].copy()) for i in order]


def bilinear_low_rank_solve(
    factors: LowRankFactors,
    k: int,
    mode,
    seed: int = 0,
    *,
    finalists: int = 1,
    workers: int | None = None,
    kernels=None,
) -> BilinearSolution:
    """Approximately maximize ``Tr(X^T A Y)`` over assignment matrices for ``A = U S V^T``."""
    if k < 1:
        raise InvalidInputError(f"k must be >= 1, got {k}")
    kern = kernels or _backend.kernels
    plan = plan_candidates(factors.rank, k, mode, seed)
    us = np.ascontiguousarray(factors.scaled_u)
    v = np.ascontiguousarray(factors.v_factor)
    top = max(1, int(finalists))
    workers = workers or default_workers()

    def run(bounds):
        return _evaluate_chunk(plan, us, v, bounds[0], bounds[1], top, kern)

    chunks = list(plan.chunks(CHUNK))
    if workers == 1 or len(chunks) == 1:
        parts = map(run, chunks)
        merged = [item for part in parts for item in part]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            merged = [item for part in pool.map(run, chunks) for item in part]
    merged.sort(key=lambda item: (-item[0], item[1]))
    merged = merged[:top]
    best = merged[0]
    return BilinearSolution(best[2], best[3], best[0], plan.total, merged)


def baseline_clusterings(g: SignedBipartiteGraph, k: int = 2) -> list[Clustering]:
    """Single cluster, then (when ``k >= 2``) the U | V split."""
    out = [Clustering(np.zeros(g.m, dtype=np.int64), np.zeros(g.n, dtype=np.int64), k)]
    if k >= 2:
        out.append(Clustering(np.zeros(g.m, dtype=np.int64), np.ones(g.n, dtype=np.int64), k))
    return out


def baseline(g: SignedBipartiteGraph) -> SolveReport:
    """One cluster if at least half the labeled edges are '+', else U | V."""
    single, split = baseline_clusterings(g, 2)
    chosen = single if g.pos_count >= g.neg_count else split
    agree = count_agreements(g, chosen)
    cfg = SolverConfig(k=2, r=1, mode=Sampled(1))
    return SolveReport(agree, chosen, cfg, 0, agree, 0, algorithm="baseline")


def _ms(t0, t1):
    return (t1 - t0) * 1e3


def kbcc_core(
    g: SignedBipartiteGraph,
    config: SolverConfig,
    *,
    workers: int | None = None,
    kernels=None,
    algorithm: str = "core",
    delta: float | None = None,
    eps: float | None = None,
) -> SolveReport:
    """Truncated SVD, low-rank bilinear search, then final selection.

    ``r`` is clamped to ``min(m, n)``. The two trivial baselines always join the
    final pool. With ``finalize_on="original"`` the best few search results
    and the baselines are re-scored on the true graph; with ``"lowrank"`` the
    pair with the best low-rank objective is kept unless a baseline beats it
    on true agreements.
    """
    t0 = time.perf_counter()
    r_eff = min(config.r, g.m, g.n)
    factors = truncated_svd(g, r_eff, seed=config.seed)
    t1 = time.perf_counter()
    top = FINALISTS if config.finalize_on == "original" else 1
    sol = bilinear_low_rank_solve(
        factors, config.k, config.mode, config.seed, finalists=top, workers=workers, kernels=kernels
    )
    t2 = time.perf_counter()

    found = [Clustering(x, y, config.k) for _, _, x, y in sol.finalists]
    bases = baseline_clusterings(g, config.k)
    base_scores = [count_agreements(g, c) for c in bases]
    base_best = max(base_scores)

    if config.finalize_on == "original":
        pool = found + bases
        scores = [count_agreements(g, c) for c in found] + base_scores
        pick = int(np.argmax(scores))
        chosen, agree = pool[pick], scores[pick]
    else:
        pool = found[:1] + bases
        lowrank = [sol.objective] + [bilinear_objective(c.labels_u, factors, c.labels_v, config.k) for c in bases]
        pick = int(np.argmax(lowrank))
        chosen = pool[pick]
        agree = count_agreements(g, chosen)
        if agree < base_best:
            chosen = bases[int(np.argmax(base_scores))]
            agree = base_best
    t3 = time.perf_counter()

    return SolveReport(
        agreements=int(agree),
        clustering=chosen,
        config=config,
        candidates_evaluated=sol.candidates_evaluated,
        baseline_agreements=int(base_best),
        r_effective=r_eff,
        lowrank_objective=float(bilinear_objective(chosen.labels_u, factors, chosen.labels_v, config.k)),
        algorithm=algorithm,
        delta=delta,
        eps=eps,
        phase_times_ms={"svd": _ms(t0, t1), "search": _ms(t1, t2), "finalize": _ms(t2, t3)},
    )


def _ceil(x: float) -> int:
    # absorbs float noise such as 64 / (1 - 1e-9)**2 - 1 = 63.0000001
    return int(math.ceil(x - 1e-6))


def _check_delta(delta):
    if not 0.0 < delta < 1.0:
        raise InvalidInputError(f"delta must lie in (0, 1), got {delta}")


def kbcc_parameters(k: int, delta: float) -> tuple[float, int]:
    """``(eps, r)`` for a (1 - delta) guarantee with at most ``k`` clusters."""
    _check_delta(delta)
    return delta / (8.0 * math.sqrt(k)), _ceil(64.0 / delta**2 - 1.0)


def ptas_parameters(delta: float) -> tuple[int, float, int]:
    """``(k, eps, r)`` for a (1 - delta) guarantee with no cluster limit."""
    _check_delta(delta)
    return _ceil(8.0 / delta), delta**2 / 64.0, _ceil(256.0 / delta**2 - 1.0)


def _resolve_mode(mode, eps):
    if mode is None:
        return Sampled()
    if mode == "exact":
        return Exact(eps, anchored=True)
    if isinstance(mode, (Exact, Sampled)):
        return mode
    raise InvalidInputError(f"unknown candidate mode {mode!r}")


def kbcc(
    g: SignedBipartiteGraph,
    k: int,
    delta: float,
    *,
    mode=None,
    seed: int = 0,
    finalize_on: str = "original",
    workers: int | None = None,
    kernels=None,
) -> SolveReport:
    """k-BCC with accuracy ``delta``.

    ``mode=None`` samples 10^4 candidates; ``mode="exact"`` walks the
    (anchored) epsilon-net with the accuracy the guarantee calls for.
    """
    if k < 2:
        raise InvalidInputError(f"k must be >= 2, got {k}")
    eps, r = kbcc_parameters(k, delta)
    cfg = SolverConfig(k=k, r=r, mode=_resolve_mode(mode, eps), seed=seed, finalize_on=finalize_on)
    return kbcc_core(g, cfg, workers=workers, kernels=kernels, algorithm="kbcc", delta=delta, eps=eps)


def bcc_ptas(
    g: SignedBipartiteGraph,
    delta: float,
    *,
    mode=None,
    seed: int = 0,
    finalize_on: str = "original",
    workers: int | None = None,
    kernels=None,
) -> SolveReport:
    """Unconstrained BCC: k-BCC with ``k = 8 / delta`` and matching ``eps``, ``r``."""
    k, eps, r = ptas_parameters(delta)
    cfg = SolverConfig(k=k, r=r, mode=_resolve_mode(mode, eps), seed=seed, finalize_on=finalize_on)
    return kbcc_core(g, cfg, workers=workers, kernels=kernels, algorithm="ptas", delta=delta, eps=eps)
