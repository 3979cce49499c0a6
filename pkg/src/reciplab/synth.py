"""Synthetic friendship surveys and planted-coefficient intervention outcomes.

Graphs come from a planted-partition scheme: each unordered pair is a
friendship with probability ``intra_edge_prob`` inside a community and
``inter_edge_prob`` across communities. Within each of the two groups an
exact share of the realized friendships (the nearest integer to the target
fraction) is made reciprocal; the rest are unilateral with a random
nominator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GenerationError, ValidationError
from .graph import FriendshipGraph, NominationArc
from .regression import COVARIATES, EgoRecord, tie_covariates

SCORES = np.arange(3, 8)
# closeness pmfs over scores 3..7; means 4.74 (reciprocal) and 3.94 (unilateral)
RECIPROCAL_PMF = (0.12, 0.33, 0.32, 0.15, 0.08)
UNILATERAL_PMF = (0.40, 0.36, 0.16, 0.06, 0.02)


@dataclass(frozen=True)
class GraphGenSpec:
    n_nodes: int
    n_communities: int = 1
    intra_edge_prob: float = 0.1
    inter_edge_prob: float = 0.0
    reciprocity_intra: float = 0.5
    reciprocity_inter: float = 0.5
    closeness_reciprocal: tuple[float, ...] = RECIPROCAL_PMF
    closeness_unilateral: tuple[float, ...] = UNILATERAL_PMF
    # chance that the silent side of a unilateral tie still reports a 0-2 score
    subthreshold_prob: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.n_nodes < 2:
            raise ValidationError("need at least two nodes")
        if not 1 <= self.n_communities <= self.n_nodes:
            raise ValidationError("n_communities must lie in [1, n_nodes]")
        for name in ("intra_edge_prob", "inter_edge_prob", "reciprocity_intra", "reciprocity_inter", "subthreshold_prob"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name}={v} must lie in [0, 1]")
        for name in ("closeness_reciprocal", "closeness_unilateral"):
            pmf = np.asarray(getattr(self, name), dtype=float)
            if pmf.shape != (5,) or (pmf < 0).any() or not math.isclose(pmf.sum(), 1.0, abs_tol=1e-9):
                raise ValidationError(f"{name} must be a pmf over scores 3..7")

    def communities(self) -> list[int]:
        """Community label per node index (contiguous, near-equal blocks)."""
        return [i * self.n_communities // self.n_nodes for i in range(self.n_nodes)]

    def node_ids(self) -> list[str]:
        width = len(str(self.n_nodes - 1))
        return [f"n{i:0{width}d}" for i in range(self.n_nodes)]


STUDY_PRESET = GraphGenSpec(
    n_nodes=120,
    n_communities=6,
    intra_edge_prob=0.35,
    inter_edge_prob=0.05,
    reciprocity_intra=0.68,
    reciprocity_inter=0.15,
    seed=2016,
)


def study_preset(seed: int | None = None) -> GraphGenSpec:
    """120-node, six-community preset with about 45% reciprocal friendships."""
    if seed is None:
        return STUDY_PRESET
    kw = {f: getattr(STUDY_PRESET, f) for f in STUDY_PRESET.__dataclass_fields__}
    kw["seed"] = seed
    return GraphGenSpec(**kw)


def community_labels(spec: GraphGenSpec) -> dict[str, int]:
    return dict(zip(spec.node_ids(), spec.communities()))


def gen_graph(spec: GraphGenSpec) -> FriendshipGraph:
    rng = np.random.default_rng(spec.seed)
    ids = spec.node_ids()
    comm = np.asarray(spec.communities())
    iu, ju = np.triu_indices(spec.n_nodes, k=1)
    same = comm[iu] == comm[ju]
    has_pairs = (same.any() and spec.intra_edge_prob > 0) or ((~same).any() and spec.inter_edge_prob > 0)
    if not has_pairs:
        raise GenerationError("edge probabilities admit no friendships for this partition")
    prob = np.where(same, spec.intra_edge_prob, spec.inter_edge_prob)
    present = rng.random(iu.size) < prob

    reciprocal = np.zeros(iu.size, dtype=bool)
    for group, target in ((same, spec.reciprocity_intra), (~same, spec.reciprocity_inter)):
        idx = np.flatnonzero(present & group)
        n_rec = int(math.floor(target * idx.size + 0.5))
        if n_rec:
            reciprocal[rng.choice(idx, size=n_rec, replace=False)] = True

    rec_pmf = np.asarray(spec.closeness_reciprocal)
    uni_pmf = np.asarray(spec.closeness_unilateral)
    arcs = []
    for k in np.flatnonzero(present):
        a, b = ids[iu[k]], ids[ju[k]]
        if reciprocal[k]:
            s1, s2 = rng.choice(SCORES, size=2, p=rec_pmf)
            arcs.append(NominationArc(a, b, int(s1)))
            arcs.append(NominationArc(b, a, int(s2)))
        else:
            if rng.random() < 0.5:
                a, b = b, a
            arcs.append(NominationArc(a, b, int(rng.choice(SCORES, p=uni_pmf))))
            if rng.random() < spec.subthreshold_prob:
                arcs.append(NominationArc(b, a, int(rng.integers(0, 3))))
    return FriendshipGraph(ids, arcs)


@dataclass(frozen=True)
class OutcomeGenSpec:
    beta: dict[str, float] = field(default_factory=dict)
    intercept: float = 1.0
    noise_sd: float = 0.05
    seed: int = 0
    baseline_mean: float = 8000.0  # mean daily activity in P1, arbitrary units
    baseline_cv: float = 0.3

    def __post_init__(self):
        if self.noise_sd < 0:
            raise ValidationError("noise_sd must be non-negative")
        unknown = set(self.beta) - set(COVARIATES)
        if unknown:
            raise ValidationError(f"unknown covariates in beta: {sorted(unknown)}")
        if self.baseline_mean <= 0 or self.baseline_cv < 0:
            raise ValidationError("baseline activity must be positive")


# planted sign pattern: reciprocal > incoming > 0, outgoing 0, small tie-strength effect
PLANTED_BETA = {"n_reciprocal": 0.25, "n_incoming": 0.12, "n_outgoing": 0.0, "tie_strength": 0.002}


def assign_buddies(graph: FriendshipGraph, n_egos: int, seed: int = 0, tie_bias: float = 0.7, per_ego: int = 2, groups: dict | None = None) -> dict[str, tuple[str, ...]]:
    """Pair ``n_egos`` randomly chosen egos with ``per_ego`` buddies from their group.

    Each buddy slot is filled, with probability ``tie_bias``, by a group
    member sharing a recorded explicit tie with the ego (either direction),
    otherwise by any other group member.
    """
    nodes = list(graph.nodes)
    if not 0 < n_egos <= len(nodes):
        raise ValidationError(f"n_egos must lie in [1, {len(nodes)}]")
    if not 0.0 <= tie_bias <= 1.0:
        raise ValidationError("tie_bias must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    neighbors: dict[str, set[str]] = {n: set() for n in nodes}
    for e in graph.logical_edges:
        neighbors[e.u].add(e.v)
        neighbors[e.v].add(e.u)
    egos = [nodes[i] for i in sorted(rng.choice(len(nodes), size=n_egos, replace=False))]
    out = {}
    for ego in egos:
        pool = [n for n in nodes if n != ego and (groups is None or groups[n] == groups[ego])]
        if len(pool) < per_ego:
            raise ValidationError(f"group of {ego} has fewer than {per_ego} other members")
        chosen: list[str] = []
        for _ in range(per_ego):
            friends = sorted(neighbors[ego].intersection(pool).difference(chosen), key=graph.index.get)
            if friends and rng.random() < tie_bias:
                pick = friends[rng.integers(len(friends))]
            else:
                rest = [n for n in pool if n not in chosen]
                pick = rest[rng.integers(len(rest))]
            chosen.append(pick)
        out[ego] = tuple(chosen)
    return out


def gen_outcomes(graph: FriendshipGraph, buddies: dict[str, tuple[str, ...]], spec: OutcomeGenSpec) -> list[EgoRecord]:
    """Activity records whose P2/P1 ratio is linear in the tie covariates plus Gaussian noise."""
    rng = np.random.default_rng(spec.seed)
    sigma_log = math.sqrt(math.log1p(spec.baseline_cv**2))
    mu_log = math.log(spec.baseline_mean) - sigma_log**2 / 2
    records = []
    for ego, alters in buddies.items():
        x = tie_covariates(graph, ego, alters)
        y = spec.intercept + sum(spec.beta.get(c, 0.0) * x[c] for c in COVARIATES)
        y += spec.noise_sd * rng.standard_normal()
        p1 = float(np.exp(mu_log + sigma_log * rng.standard_normal()))
        records.append(EgoRecord(ego, tuple(alters), p1, y * p1))
    return records
