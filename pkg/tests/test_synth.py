import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reciplab.errors import GenerationError, ValidationError
from reciplab.graph import classify, reciprocity_stats
from reciplab.regression import tie_covariates
from reciplab.synth import (
    PLANTED_BETA,
    STUDY_PRESET,
    GraphGenSpec,
    OutcomeGenSpec,
    assign_buddies,
    community_labels,
    gen_graph,
    gen_outcomes,
    study_preset,
)


def realized_fractions(g, labels):
    intra = [0, 0]
    inter = [0, 0]
    for e in classify(g):
        bucket = intra if labels[e.u] == labels[e.v] else inter
        bucket[0] += e.is_reciprocal
        bucket[1] += 1
    return intra, inter


def test_full_reciprocity():
    g = gen_graph(GraphGenSpec(30, intra_edge_prob=0.3, reciprocity_intra=1.0, seed=1))
    stats = reciprocity_stats(classify(g))
    assert stats.n_edges > 0 and stats.fraction_reciprocal == 1.0


def test_zero_reciprocity():
    g = gen_graph(GraphGenSpec(30, intra_edge_prob=0.3, reciprocity_intra=0.0, seed=1))
    assert reciprocity_stats(classify(g)).n_reciprocal == 0


def test_no_cross_community_edges():
    spec = GraphGenSpec(40, n_communities=4, intra_edge_prob=0.5, inter_edge_prob=0.0, seed=2)
    labels = community_labels(spec)
    g = gen_graph(spec)
    assert all(labels[e.u] == labels[e.v] for e in classify(g))
    assert all(labels[a.src] == labels[a.dst] for a in g.arcs)


def test_study_preset_preset():
    g = gen_graph(STUDY_PRESET)
    assert len(g) == 120
    stats = reciprocity_stats(classify(g))
    assert abs(stats.fraction_reciprocal - 0.45) <= 0.05
    labels = community_labels(STUDY_PRESET)
    assert sorted(set(labels.values())) == list(range(6))
    for seed in range(5):
        f = reciprocity_stats(classify(gen_graph(study_preset(seed)))).fraction_reciprocal
        assert abs(f - 0.45) <= 0.05


@settings(max_examples=15, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.integers(0, 1000))
def test_realized_reciprocity_tracks_targets(r_intra, r_inter, seed):
    spec = GraphGenSpec(80, n_communities=4, intra_edge_prob=0.4, inter_edge_prob=0.15,
                        reciprocity_intra=r_intra, reciprocity_inter=r_inter, seed=seed)
    intra, inter = realized_fractions(gen_graph(spec), community_labels(spec))
    assert intra[1] >= 200 and inter[1] >= 200
    assert abs(intra[0] / intra[1] - r_intra) <= 0.05
    assert abs(inter[0] / inter[1] - r_inter) <= 0.05


def test_determinism():
    spec = study_preset(77)
    assert gen_graph(spec) == gen_graph(spec)
    assert gen_graph(spec) != gen_graph(study_preset(78))
    g = gen_graph(spec)
    b1, b2 = assign_buddies(g, 20, seed=3), assign_buddies(g, 20, seed=3)
    assert b1 == b2
    o = OutcomeGenSpec(PLANTED_BETA, seed=9)
    assert gen_outcomes(g, b1, o) == gen_outcomes(g, b2, o)


def test_graph_invariants():
    g = gen_graph(study_preset(5))
    seen = set()
    for a in g.arcs:
        assert a.src != a.dst and 0 <= a.closeness <= 7
        assert (a.src, a.dst) not in seen
        seen.add((a.src, a.dst))
    edges = classify(g)
    for e in edges:
        scores = e.explicit_scores()
        assert all(3 <= s <= 7 for s in scores)
    assert len(edges) == len({(e.u, e.v) for e in edges})


def test_closeness_shift():
    edges = classify(gen_graph(study_preset(6)))
    rec = [s for e in edges if e.is_reciprocal for s in e.explicit_scores()]
    uni = [e.explicit_scores()[0] for e in edges if not e.is_reciprocal]
    assert np.mean(rec) > np.mean(uni)


def test_generation_errors():
    with pytest.raises(GenerationError):
        gen_graph(GraphGenSpec(10, n_communities=10, intra_edge_prob=1.0, inter_edge_prob=0.0))
    with pytest.raises(GenerationError):
        gen_graph(GraphGenSpec(10, intra_edge_prob=0.0))
    with pytest.raises(ValidationError):
        GraphGenSpec(10, reciprocity_intra=1.2)
    with pytest.raises(ValidationError):
        GraphGenSpec(10, closeness_reciprocal=(0.5, 0.5))
    with pytest.raises(ValidationError):
        OutcomeGenSpec({"n_friends": 1.0})
    with pytest.raises(ValidationError):
        OutcomeGenSpec(noise_sd=-1.0)


def test_buddies_within_groups():
    spec = study_preset(2)
    g = gen_graph(spec)
    labels = community_labels(spec)
    buddies = assign_buddies(g, 50, seed=1, groups=labels)
    assert len(buddies) == 50
    for ego, alters in buddies.items():
        assert len(set(alters)) == 2 and ego not in alters
        assert all(labels[a] == labels[ego] for a in alters)
    with pytest.raises(ValidationError):
        assign_buddies(g, 0)


def test_outcomes_follow_planted_model():
    g = gen_graph(study_preset(1))
    buddies = assign_buddies(g, 40, seed=1)
    recs = gen_outcomes(g, buddies, OutcomeGenSpec(PLANTED_BETA, intercept=1.0, noise_sd=0.0, seed=1))
    for rec in recs:
        x = tie_covariates(g, rec.ego, rec.alters)
        want = 1.0 + sum(b * x[c] for c, b in PLANTED_BETA.items())
        assert rec.activity_change == pytest.approx(want, rel=1e-12)
        assert rec.activity_p1 > 0
