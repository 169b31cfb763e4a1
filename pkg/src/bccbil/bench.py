"""Synthetic benchmark: planted instances across flip probabilities."""
from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .epsnet import Sampled
from .graph import count_agreements, generate_planted
from .solver import SolverConfig, default_workers, kbcc_core

__all__ = ["BenchRow", "run_bench", "rows_to_csv", "derive_seed"]


@dataclass
class BenchRow:
    p: float
    k: int
    instances: int
    mean_agreements: float
    mean_baseline_agreements: float
    mean_planted_agreements: float
    num_output_clusters: float
    num_singletons: float
    mean_runtime_ms: float | None = None

    def as_dict(self, timings: bool = False) -> dict:
        d = asdict(self)
        if not timings:
            d.pop("mean_runtime_ms")
        return d


def derive_seed(*parts: int) -> int:
    return int(np.random.SeedSequence([int(x) for x in parts]).generate_state(1)[0])


def _one_instance(m, n, k_true, p, p_index, i, ks, r, budget, seed):
    g, planted = generate_planted(m, n, k_true, p, derive_seed(seed, p_index, i))
    planted_agree = count_agreements(g, planted)
    out = []
    for k in ks:
        cfg = SolverConfig(k=k, r=r, mode=Sampled(budget), seed=derive_seed(seed, p_index, i, k))
        t0 = time.perf_counter()
        rep = kbcc_core(g, cfg, workers=1)
        dt = (time.perf_counter() - t0) * 1e3
        c = rep.clustering
        out.append((k, rep.agreements, rep.baseline_agreements, planted_agree, c.num_nonempty, c.num_singletons, dt))
    return out


def run_bench(
    m: int,
    n: int,
    k_true: int,
    ps,
    instances: int,
    ks,
    r: int = 5,
    budget: int = 10_000,
    seed: int = 0,
    workers: int | None = None,
) -> list[BenchRow]:
    """One row per (p, k), averaged over ``instances`` planted graphs.

    Instances run in parallel; each solve is single-threaded. Row order is
    (p, k) as given.
    """
    ps = [float(p) for p in ps]
    ks = [int(k) for k in ks]
    jobs = [(pi, i) for pi in range(len(ps)) for i in range(instances)]

    def run(job):
        pi, i = job
        return _one_instance(m, n, k_true, ps[pi], pi, i, ks, r, budget, seed)

    workers = workers or default_workers()
    if workers == 1:
        results = list(map(run, jobs))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, jobs))

    rows = []
    for pi, p in enumerate(ps):
        block = results[pi * instances : (pi + 1) * instances]
        for ki, k in enumerate(ks):
            vals = np.array([res[ki][1:] for res in block], dtype=np.float64)
            means = vals.mean(axis=0)
            rows.append(
                BenchRow(
                    p=p,
                    k=k,
                    instances=instances,
                    mean_agreements=float(means[0]),
                    mean_baseline_agreements=float(means[1]),
                    mean_planted_agreements=float(means[2]),
                    num_output_clusters=float(means[3]),
                    num_singletons=float(means[4]),
                    mean_runtime_ms=float(means[5]),
                )
            )
    return rows


def rows_to_csv(rows: list[BenchRow], timings: bool = False) -> str:
    buf = io.StringIO()
    dicts = [row.as_dict(timings) for row in rows]
    writer = csv.DictWriter(buf, fieldnames=list(dicts[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(dicts)
    return buf.getvalue()
