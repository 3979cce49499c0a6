import numpy as np
import pytest

from reciplab.bdsi import BDSIParams, ContagionNetwork, CoverageCurve, mean_coverage_curve, run_many, run_seed, simulate_batch
from reciplab.errors import IncompatibleError, ValidationError
from reciplab.graph import EdgeClass, FriendshipGraph, classify
from reciplab.percolation import (
    Matching,
    PercolationPlan,
    PercolationPoint,
    PercolationResult,
    bootstrap_mean_difference,
    delta_z,
    percolate,
    percolation_sweep,
    removal_order,
)
from reciplab.synth import GraphGenSpec, gen_graph


@pytest.fixture(scope="module")
def small_world():
    spec = GraphGenSpec(n_nodes=40, n_communities=4, intra_edge_prob=0.5, inter_edge_prob=0.05,
                        reciprocity_intra=0.6, reciprocity_inter=0.2, seed=3)
    return gen_graph(spec)


def test_percolate_identity_and_exhaustion(small_world):
    edges = list(classify(small_world))
    rng = np.random.default_rng(0)
    assert percolate(edges, "reciprocal", 0, rng) == edges
    n_rec = sum(e.is_reciprocal for e in edges)
    left = percolate(edges, EdgeClass.RECIPROCAL, n_rec, rng)
    assert not any(e.is_reciprocal for e in left)
    assert len(left) == len(edges) - n_rec
    with pytest.raises(ValidationError):
        percolate(edges, "reciprocal", n_rec + 1, rng)


def test_percolate_nested_within_sweep(small_world):
    edges = list(classify(small_world))
    n_uni = sum(not e.is_reciprocal for e in edges)
    prev = set()
    for count in range(0, n_uni + 1, 7):
        removed = set(edges) - set(percolate(edges, "unilateral", count, np.random.default_rng(42)))
        assert len(removed) == count
        assert prev <= removed
        assert all(not e.is_reciprocal for e in removed)
        prev = removed
    order = removal_order(edges, "unilateral", np.random.default_rng(42))
    assert set(order) == {e for e in edges if not e.is_reciprocal}


def test_plan_validation():
    p = BDSIParams()
    with pytest.raises(ValidationError):
        PercolationPlan("reciprocal", (0.2, 0.1), p, 0)
    with pytest.raises(ValidationError):
        PercolationPlan("reciprocal", (0.0, 1.5), p, 0)
    with pytest.raises(ValidationError):
        PercolationPlan("reciprocal", (0.0,), p, 0, runs_per_point=0)


def test_removal_counts():
    p = BDSIParams()
    by_frac = PercolationPlan("unilateral", (0.0, 0.25, 0.5, 1.0), p, 0, matching=Matching.FRACTION)
    assert by_frac.removal_counts(315, 383) == [0, 96, 192, 383]
    by_count = PercolationPlan("unilateral", (0.0, 0.25, 0.5, 1.0), p, 0)
    assert by_count.removal_counts(315, 383) == [0, 79, 158, 315]
    assert by_count.with_class("reciprocal").removal_counts(315, 383) == [0, 79, 158, 315]


def test_zero_fraction_equals_plain_batch(small_world):
    net = ContagionNetwork(small_world)
    params = BDSIParams(0.3, 0.1, 0.05, max_steps=15)
    plan = PercolationPlan("reciprocal", (0.0,), params, master_seed=77, replicates=6, runs_per_point=5)
    res = percolation_sweep(net, plan)
    plain = mean_coverage_curve(run_many(net, params, 30, 77), 15)
    assert np.array_equal(res.points[0].curve.mean, plain.mean)
    assert np.array_equal(res.points[0].curve.se, plain.se)
    other = percolation_sweep(net, plan.with_class("unilateral"))
    assert np.array_equal(other.points[0].z, res.points[0].z)


def test_plateau_at_reciprocal_component():
    arcs = []
    core = ["a", "b", "c", "d"]
    for x in core:
        for y in core:
            if x != y:
                arcs.append((x, y, 6))
    arcs += [("a", "e", 5), ("f", "b", 4), ("e", "g", 3), ("d", "h", 7)]
    g = FriendshipGraph.from_arcs(arcs)
    params = BDSIParams(1, 1, 1, seed_nodes=("a",), max_steps=10)
    plan = PercolationPlan("unilateral", (0.0, 1.0), params, 1, matching="fraction", replicates=3, runs_per_point=2)
    res = percolation_sweep(g, plan)
    assert res.points[0].curve.mean[-1] == len(g)
    assert res.points[1].removed_count == 4
    assert np.all(res.points[1].curve.mean[1:] == 4)


def test_coverage_nonincreasing_in_f_per_run(small_world):
    params = BDSIParams(0.4, 0.2, 0.1, max_steps=12)
    plan = PercolationPlan("reciprocal", (0.0, 0.3, 0.6, 1.0), params, 5, matching="fraction", replicates=10, runs_per_point=3)
    res = percolation_sweep(small_world, plan)
    zs = np.stack([p.z for p in res.points])  # (F, runs, t)
    assert (np.diff(zs, axis=0) <= 0).all()


def test_nested_removal_coupling_sets(small_world):
    net = ContagionNetwork(small_world)
    params = BDSIParams(0.5, 0.3, 0.1, max_steps=10)
    idx = net.class_indices("unilateral")
    seeds = [run_seed(9, k) for k in range(20)]
    perm = idx[np.random.default_rng(1).permutation(idx.size)]
    prev = None
    for count in (0, 10, 20, idx.size):
        active = np.ones(net.n_edges, dtype=bool)
        active[perm[:count]] = False
        steps = simulate_batch(net, params, seeds, active=active).infection_step
        if prev is not None:
            for t in range(11):
                now = (steps >= 0) & (steps <= t)
                before = (prev >= 0) & (prev <= t)
                assert not (now & ~before).any()
        prev = steps


def test_independent_resampling_flag(small_world):
    params = BDSIParams(0.3, 0.1, 0.05, max_steps=8)
    plan = PercolationPlan("reciprocal", (0.0, 0.5), params, 2, replicates=4, runs_per_point=2, nested=False)
    res = percolation_sweep(small_world, plan)
    assert [p.removed_count for p in res.points][0] == 0


def _fake_result(mean_by_t, plan):
    z = np.array([mean_by_t], dtype=float)
    curve = CoverageCurve(z[0], np.zeros_like(z[0]), 1)
    point = PercolationPoint(plan.target_class, 0.0, 0, curve, None, 0.0, z)
    return PercolationResult(plan, {"reciprocal": 1, "unilateral": 1}, [point])


def test_delta_z_examples(small_world):
    params = BDSIParams(max_steps=3)
    plan_a = PercolationPlan("reciprocal", (0.0,), params, 0, horizon=3)
    plan_b = plan_a.with_class("unilateral")
    a = _fake_result([1, 4, 5, 5], plan_a)
    b = _fake_result([1, 3, 4, 6], plan_b)
    (d,) = delta_z(a, b)
    assert d.delta.tolist() == [0, 1, 1, -1]
    (self_d,) = delta_z(a, a)
    assert (self_d.delta == 0).all()
    assert np.isnan(self_d.early_mean)  # horizon 3 never reaches the t >= 5 window


def test_delta_z_incompatible(small_world):
    params = BDSIParams(0.3, 0.1, 0.05, max_steps=6)
    a = percolation_sweep(small_world, PercolationPlan("reciprocal", (0.0, 0.5), params, 1, replicates=2))
    b = percolation_sweep(small_world, PercolationPlan("unilateral", (0.0, 0.4), params, 1, replicates=2))
    with pytest.raises(IncompatibleError):
        delta_z(a, b)
    c = percolation_sweep(small_world, PercolationPlan("unilateral", (0.0, 0.5), BDSIParams(0.3, 0.1, 0.0, max_steps=6), 1, replicates=2))
    with pytest.raises(IncompatibleError):
        delta_z(a, c)


def test_delta_z_early_window(small_world):
    params = BDSIParams(0.3, 0.1, 0.05, max_steps=12)
    base = PercolationPlan("reciprocal", (0.0, 0.5), params, 4, replicates=20, runs_per_point=2)
    rec = percolation_sweep(small_world, base)
    uni = percolation_sweep(small_world, base.with_class("unilateral"))
    deltas = delta_z(uni, rec)
    for d, pu, pr in zip(deltas, uni.points, rec.points):
        want = (pu.curve.mean[5:11] - pr.curve.mean[5:11]).mean()
        assert d.early_mean == pytest.approx(want, abs=1e-12)
        assert np.allclose(d.se, np.sqrt(pu.curve.se**2 + pr.curve.se**2))
    assert deltas[0].early_mean == 0.0


def test_bootstrap_mean_difference():
    x = np.arange(10.0)
    mean, lo, hi = bootstrap_mean_difference(x, x, n_boot=200, rng=0)
    assert mean == 0.0 and lo <= 0.0 <= hi
    mean, lo, hi = bootstrap_mean_difference(x + 100, x, n_boot=200, rng=0)
    assert lo > 90
