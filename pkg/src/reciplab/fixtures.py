"""Bundled survey fixtures that reproduce published reciprocity counts.

Each fixture is a synthetic survey whose classified friendship graph has the
published number of friendships and reciprocal friendships. Node counts are
arbitrary except for the Friends and Family fixture (122 participants). The
Friends and Family fixture additionally fixes the closeness totals so that
reciprocal ties average 4.7 over directed scores and unilateral ties round to
3.9.

Regenerate the CSVs with ``python -m reciplab.fixtures``.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .graph import FriendshipGraph, NominationArc, load_graph, save_graph
from .synth import RECIPROCAL_PMF, SCORES, UNILATERAL_PMF


@dataclass(frozen=True)
class FixtureSpec:
    name: str
    n_nodes: int
    n_edges: int
    n_reciprocal: int
    seed: int
    reciprocal_score_total: int | None = None
    unilateral_score_total: int | None = None


FIXTURES = {
    "friends_and_family": FixtureSpec("friends_and_family", 122, 698, 315, 11, 2961, 1494),
    "reality_mining": FixtureSpec("reality_mining", 90, 82, 28, 12),
    "social_evolution": FixtureSpec("social_evolution", 84, 1596, 555, 13),
    "strongest_ties": FixtureSpec("strongest_ties", 60, 208, 102, 14),
}


def _draw_scores(rng, size, pmf, total):
    scores = rng.choice(SCORES, size=size, p=np.asarray(pmf))
    if total is None:
        return scores
    if not 3 * size <= total <= 7 * size:
        raise ValueError("score total out of reach")
    # nudge random entries by one point until the total matches
    while (diff := int(scores.sum()) - total) != 0:
        step = -1 if diff > 0 else 1
        movable = np.flatnonzero((scores + step >= 3) & (scores + step <= 7))
        pick = rng.choice(movable, size=min(abs(diff), movable.size), replace=False)
        scores[pick] += step
    return scores


def build_fixture(spec: FixtureSpec) -> FriendshipGraph:
    rng = np.random.default_rng(spec.seed)
    ids = [f"p{i:03d}" for i in range(spec.n_nodes)]
    iu, ju = np.triu_indices(spec.n_nodes, k=1)
    n_noise = spec.n_edges // 10
    picks = rng.choice(iu.size, size=spec.n_edges + n_noise, replace=False)
    edge_pairs, noise_pairs = picks[: spec.n_edges], picks[spec.n_edges :]
    n_uni = spec.n_edges - spec.n_reciprocal
    rec_scores = _draw_scores(rng, 2 * spec.n_reciprocal, RECIPROCAL_PMF, spec.reciprocal_score_total)
    uni_scores = _draw_scores(rng, n_uni, UNILATERAL_PMF, spec.unilateral_score_total)
    arcs = []
    for k, pair in enumerate(edge_pairs):
        a, b = ids[iu[pair]], ids[ju[pair]]
        if k < spec.n_reciprocal:
            arcs.append(NominationArc(a, b, int(rec_scores[2 * k])))
            arcs.append(NominationArc(b, a, int(rec_scores[2 * k + 1])))
            continue
        if rng.random() < 0.5:
            a, b = b, a
        arcs.append(NominationArc(a, b, int(uni_scores[k - spec.n_reciprocal])))
        if rng.random() < 0.5:
            arcs.append(NominationArc(b, a, int(rng.integers(0, 3))))
    # pairs that know each other but stay at or below the threshold both ways
    for pair in noise_pairs:
        a, b = ids[iu[pair]], ids[ju[pair]]
        arcs.append(NominationArc(a, b, int(rng.integers(0, 3))))
        arcs.append(NominationArc(b, a, int(rng.integers(0, 3))))
    order = rng.permutation(len(arcs))
    return FriendshipGraph(ids, [arcs[i] for i in order])


def fixture_path(name: str) -> Path:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}")
    return Path(str(resources.files("reciplab") / "data" / f"{name}.csv"))


def load_fixture(name: str) -> FriendshipGraph:
    return load_graph(fixture_path(name))


def main() -> None:
    out = Path(__file__).parent / "data"
    out.mkdir(exist_ok=True)
    for name, spec in FIXTURES.items():
        save_graph(build_fixture(spec), out / f"{name}.csv")
        print(f"wrote {out / name}.csv")


if __name__ == "__main__":
    main()
