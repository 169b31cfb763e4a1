import itertools
import math

import numpy as np
import pytest

from bccbil import (
    Clustering,
    Exact,
    GuardError,
    InvalidInputError,
    Sampled,
    SignedBipartiteGraph,
    SolverConfig,
    baseline,
    bcc_ptas,
    bilinear_low_rank_solve,
    count_agreements,
    generate_planted,
    kbcc,
    kbcc_core,
    max_agree_exact,
    truncated_svd,
)
from bccbil.assignment import bilinear_objective
from bccbil.linalg import residual_spectral_norm
from bccbil.solver import baseline_clusterings, kbcc_parameters, ptas_parameters
from oracles import max_trace_over_pairs, random_signs


def _full_factors(w):
    return truncated_svd(SignedBipartiteGraph(w), min(w.shape))


def test_single_cluster_rank_one():
    w = np.ones((4, 3), dtype=np.int8)
    f = truncated_svd(SignedBipartiteGraph(w), 1)
    sol = bilinear_low_rank_solve(f, 1, Exact(0.5))
    assert sol.x_labels.tolist() == [0] * 4 and sol.y_labels.tolist() == [0] * 3
    assert sol.objective == pytest.approx(12.0)


@pytest.mark.parametrize("anchored", [False, True])
def test_two_by_two_reaches_exhaustive_max(anchored):
    w = np.array([[1, -1], [-1, 1]])
    sol = bilinear_low_rank_solve(_full_factors(w), 2, Exact(0.1, anchored=anchored))
    assert sol.objective == pytest.approx(2.0)
    assert max_trace_over_pairs(w.astype(float), 2) == 2


@pytest.mark.parametrize("anchored", [False, True])
def test_net_search_bound_small(anchored):
    # exhaustive max minus the covering slack, literal and anchored nets alike
    rng = np.random.default_rng(11)
    eps, k = 0.3, 2
    for _ in range(10):
        w = random_signs(rng, 5, 3)
        f = _full_factors(w)
        sol = bilinear_low_rank_solve(f, k, Exact(eps, anchored=anchored))
        best = max_trace_over_pairs(w.astype(float), k)
        slack = 2 * eps * math.sqrt(k) * f.singular_values[0] * math.sqrt(15)
        assert sol.objective >= best - slack - 1e-9
        assert bilinear_objective(sol.x_labels, SignedBipartiteGraph(w), sol.y_labels) == pytest.approx(
            sol.objective, abs=1e-8
        )


def test_search_returns_valid_labels_and_sorted_finalists():
    w = random_signs(np.random.default_rng(0), 12, 9)
    f = truncated_svd(SignedBipartiteGraph(w), 3)
    sol = bilinear_low_rank_solve(f, 4, Sampled(3000), seed=2, finalists=8)
    assert sol.candidates_evaluated == 3000
    assert len(sol.finalists) == 8
    objs = [item[0] for item in sol.finalists]
    assert objs == sorted(objs, reverse=True)
    assert objs[0] == sol.objective
    for obj, _, x, y in sol.finalists:
        assert x.min() >= 0 and x.max() < 4 and y.min() >= 0 and y.max() < 4
        assert bilinear_objective(x, f, y, 4) == pytest.approx(obj, abs=1e-9)


def test_worker_count_does_not_change_result():
    g, _ = generate_planted(40, 30, 4, 0.25, seed=3)
    cfg = SolverConfig(k=4, r=4, mode=Sampled(9000), seed=5)
    reps = [kbcc_core(g, cfg, workers=w) for w in (1, 2, 3, 7)]
    for rep in reps[1:]:
        assert rep.clustering == reps[0].clustering
        assert rep.to_dict() == reps[0].to_dict()


def test_env_threads(monkeypatch):
    from bccbil.solver import default_workers

    monkeypatch.setenv("BCC_THREADS", "3")
    assert default_workers() == 3
    monkeypatch.setenv("BCC_THREADS", "zero")
    with pytest.raises(InvalidInputError):
        default_workers()


def test_monotone_in_budget():
    # nested sampled streams: the best low-rank objective can only grow
    g, _ = generate_planted(30, 20, 3, 0.3, seed=8)
    f = truncated_svd(g, 3)
    prev = -math.inf
    for budget in (1, 10, 100, 1000, 2048, 2049, 5000):
        obj = bilinear_low_rank_solve(f, 3, Sampled(budget), seed=4).objective
        assert obj >= prev
        prev = obj


def test_planted_exact_mode_recovers_everything():
    g, _ = generate_planted(8, 6, 2, 0.0, seed=1)
    rep = kbcc_core(g, SolverConfig(k=2, r=2, mode=Exact(0.2)))
    assert rep.agreements == 48


def test_small_instances_exact_mode_ratio():
    rng = np.random.default_rng(2024)
    hits = 0
    for _ in range(100):
        m = int(rng.integers(1, 10))
        n = int(rng.integers(1, 11 - m))
        if min(m, n) > 4:
            m, n = 4, 5
        g = SignedBipartiteGraph(random_signs(rng, m, n))
        rep = kbcc_core(g, SolverConfig(k=2, r=min(m, n), mode=Exact(0.2, anchored=True)))
        opt = max_agree_exact(g, 2)[0]
        hits += rep.agreements >= 0.75 * opt
    assert hits >= 95


def test_hundred_by_fifty_sampled_configuration():
    g, _ = generate_planted(100, 50, 5, 0.1, seed=0)
    cfg = SolverConfig(k=5, r=5, mode=Sampled(10_000), seed=1)
    a = kbcc_core(g, cfg)
    b = kbcc_core(g, cfg)
    assert a.agreements >= a.baseline_agreements
    assert a.to_dict() == b.to_dict()
    assert a.agreements == count_agreements(g, a.clustering)
    assert a.candidates_evaluated == 10_000


def test_lowrank_to_original_transfer():
    rng = np.random.default_rng(6)
    for _ in range(20):
        w = random_signs(rng, 12, 8, complete=bool(rng.integers(2)))
        g = SignedBipartiteGraph(w)
        if g.nnz == 0:
            continue
        r = int(rng.integers(1, 6))
        f = truncated_svd(g, r)
        sol = bilinear_low_rank_solve(f, 3, Sampled(500), seed=1)
        gap = residual_spectral_norm(g, f)
        true_trace = bilinear_objective(sol.x_labels, g, sol.y_labels)
        assert true_trace >= sol.objective - 2 * gap * math.sqrt(96) - 1e-9


def test_rank_is_clamped():
    g, _ = generate_planted(6, 4, 2, 0.1, seed=0)
    rep = kbcc_core(g, SolverConfig(k=2, r=50, mode=Sampled(100)))
    assert rep.r_effective == 4
    d = rep.to_dict()
    assert d["r"] == 4 and d["r_requested"] == 50


@pytest.mark.parametrize("finalize_on", ["original", "lowrank"])
def test_report_dominates_baselines(finalize_on):
    rng = np.random.default_rng(9)
    for _ in range(30):
        m, n = int(rng.integers(1, 15)), int(rng.integers(1, 15))
        g = SignedBipartiteGraph(random_signs(rng, m, n, complete=bool(rng.integers(2))))
        k = int(rng.integers(1, 5))
        rep = kbcc_core(g, SolverConfig(k=k, r=3, mode=Sampled(50), seed=1, finalize_on=finalize_on))
        best_base = max(count_agreements(g, c) for c in baseline_clusterings(g, k))
        assert rep.baseline_agreements == best_base
        assert rep.agreements >= best_base
        assert rep.agreements == count_agreements(g, rep.clustering)
        assert rep.clustering.labels_u.max(initial=0) < k


def test_original_finalize_never_worse_than_lowrank():
    g, _ = generate_planted(40, 25, 4, 0.3, seed=12)
    a = kbcc_core(g, SolverConfig(k=4, r=4, mode=Sampled(2000), seed=3, finalize_on="original"))
    b = kbcc_core(g, SolverConfig(k=4, r=4, mode=Sampled(2000), seed=3, finalize_on="lowrank"))
    assert a.agreements >= b.agreements


def test_kbcc_parameters():
    eps, r = kbcc_parameters(4, 0.5)
    assert eps == pytest.approx(0.03125)
    assert r == 255
    eps, r = kbcc_parameters(3, 1 - 1e-9)
    assert eps == pytest.approx(1 / (8 * math.sqrt(3)))
    assert r == 63


def test_ptas_parameters():
    assert ptas_parameters(0.5) == (16, pytest.approx(0.25 / 64), 1023)
    k, eps, r = ptas_parameters(1 - 1e-9)
    assert (k, r) == (8, 255)
    assert eps == pytest.approx(1 / 64)


@pytest.mark.parametrize("delta", [0.0, 1.0, -0.2, 1.5])
def test_delta_range(delta):
    g = SignedBipartiteGraph(np.ones((2, 2), dtype=np.int8))
    with pytest.raises(InvalidInputError):
        kbcc(g, 2, delta)
    with pytest.raises(InvalidInputError):
        bcc_ptas(g, delta)


def test_kbcc_needs_two_clusters():
    g = SignedBipartiteGraph(np.ones((2, 2), dtype=np.int8))
    with pytest.raises(InvalidInputError):
        kbcc(g, 1, 0.5)


def test_kbcc_report_echo():
    g, _ = generate_planted(20, 10, 3, 0.1, seed=1)
    rep = kbcc(g, 4, 0.5, mode=Sampled(500))
    d = rep.to_dict()
    assert d["algorithm"] == "kbcc" and d["delta"] == 0.5
    assert d["eps"] == pytest.approx(0.03125)
    assert d["r_requested"] == 255 and d["r"] == 10
    assert rep.clustering.num_nonempty <= 4


def test_kbcc_exact_small_instances():
    rng = np.random.default_rng(77)
    for _ in range(50):
        m = int(rng.integers(1, 8))
        n = int(rng.integers(1, 10 - m))
        if min(m, n) > 3:
            m, n = 3, n
        g = SignedBipartiteGraph(random_signs(rng, m, n))
        rep = kbcc(g, 2, 0.4, mode="exact")
        assert rep.agreements >= 0.6 * max_agree_exact(g, 2)[0]


def test_ptas_report_echo():
    g, _ = generate_planted(12, 9, 3, 0.2, seed=2)
    rep = bcc_ptas(g, 0.5, mode=Sampled(300))
    d = rep.to_dict()
    assert (d["k"], d["r_requested"], d["r"]) == (16, 1023, 9)
    assert d["eps"] == pytest.approx(2**-6 * 0.25)


def test_ptas_exact_mode_is_refused():
    g, _ = generate_planted(5, 4, 2, 0.2, seed=2)
    with pytest.raises(GuardError):
        bcc_ptas(g, 0.5, mode="exact")


def test_ptas_sampled_half_of_unconstrained_optimum():
    rng = np.random.default_rng(5)
    for _ in range(50):
        m = int(rng.integers(1, 8))
        n = int(rng.integers(1, 10 - m))
        g = SignedBipartiteGraph(random_signs(rng, m, n))
        rep = bcc_ptas(g, 0.5, mode=Sampled(200))
        assert rep.agreements >= 0.5 * max_agree_exact(g, m + n)[0]


def test_baseline_examples():
    pos = SignedBipartiteGraph(np.ones((3, 3), dtype=np.int8))
    rep = baseline(pos)
    assert rep.agreements == 9 and rep.clustering.num_nonempty == 1
    neg = SignedBipartiteGraph(-np.ones((3, 3), dtype=np.int8))
    rep = baseline(neg)
    assert rep.agreements == 9 and rep.clustering.num_nonempty == 2


def test_baseline_floor():
    rng = np.random.default_rng(0)
    for _ in range(200):
        g = SignedBipartiteGraph(random_signs(rng, 6, 5))
        assert 2 * baseline(g).agreements >= 30


def test_config_validation():
    with pytest.raises(InvalidInputError):
        SolverConfig(k=0, r=1)
    with pytest.raises(InvalidInputError):
        SolverConfig(k=1, r=0)
    with pytest.raises(InvalidInputError):
        SolverConfig(k=1, r=1, mode=Exact(1.0))
    with pytest.raises(InvalidInputError):
        SolverConfig(k=1, r=1, finalize_on="best")
    with pytest.raises(InvalidInputError):
        SolverConfig(k=1, r=1, mode="sampled")


def test_incomplete_instance_runs():
    w = random_signs(np.random.default_rng(1), 15, 10, complete=False)
    g = SignedBipartiteGraph(w)
    rep = kbcc_core(g, SolverConfig(k=3, r=3, mode=Sampled(500)))
    assert rep.agreements <= g.nnz
    assert rep.agreements >= rep.baseline_agreements


def test_timings_are_opt_in():
    g, _ = generate_planted(10, 8, 2, 0.1, seed=0)
    rep = kbcc_core(g, SolverConfig(k=2, r=2, mode=Sampled(100)))
    assert "phase_times_ms" not in rep.to_dict()
    assert set(rep.to_dict(timings=True)["phase_times_ms"]) == {"svd", "search", "finalize"}
