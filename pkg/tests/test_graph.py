import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reciplab.errors import EmptyInputError, ParseError, ValidationError
from reciplab.graph import (
    EdgeClass,
    FriendshipGraph,
    LogicalEdge,
    NominationArc,
    TieClass,
    classify,
    graph_from_json,
    graph_to_json,
    load_any_graph,
    load_edges_csv,
    load_graph,
    reciprocity_stats,
    save_graph,
    save_graph_json,
    write_edges_csv,
)


def write_survey(tmp_path, rows, name="survey.csv"):
    path = tmp_path / name
    path.write_text("src,dst,closeness\n" + "".join(f"{a},{b},{c}\n" for a, b, c in rows), encoding="utf-8")
    return path


def test_load_two_rows(tmp_path):
    g = load_graph(write_survey(tmp_path, [("a", "b", 5), ("b", "a", 3)]))
    assert set(g.nodes) == {"a", "b"}
    assert len(g.arcs) == 2
    assert g.score("a", "b") == 5


@pytest.mark.parametrize("row", [("a", "a", 4), ("a", "b", 9), ("a", "b", -1)])
def test_load_rejects_invalid_rows(tmp_path, row):
    path = write_survey(tmp_path, [("x", "y", 3), row])
    with pytest.raises(ValidationError) as exc:
        load_graph(path)
    assert isinstance(exc.value, ParseError)
    assert exc.value.line == 3


def test_load_malformed_row_reports_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("src,dst,closeness\na,b,3\nc,d\n", encoding="utf-8")
    with pytest.raises(ParseError, match=":3"):
        load_graph(path)
    path.write_text("src,dst,closeness\na,b,three\n", encoding="utf-8")
    with pytest.raises(ParseError, match="not an integer"):
        load_graph(path)


def test_load_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("from,to,score\na,b,3\n", encoding="utf-8")
    with pytest.raises(ParseError):
        load_graph(path)


def test_duplicate_ordered_pair_rejected(tmp_path):
    with pytest.raises(ParseError, match="duplicate"):
        load_graph(write_survey(tmp_path, [("a", "b", 5), ("a", "b", 6)]))


def test_arc_invariants():
    with pytest.raises(ValidationError):
        NominationArc("a", "a", 3)
    with pytest.raises(ValidationError):
        NominationArc("a", "b", 8)
    with pytest.raises(ValidationError):
        FriendshipGraph(["a"], [NominationArc("a", "b", 3)])


def test_classify_examples():
    rec = classify(FriendshipGraph.from_arcs([("a", "b", 5), ("b", "a", 3)]))
    assert len(rec) == 1 and rec[0].kind is EdgeClass.RECIPROCAL

    uni = classify(FriendshipGraph.from_arcs([("a", "b", 5), ("b", "a", 2)]))
    assert len(uni) == 1
    assert uni[0].kind is EdgeClass.UNILATERAL
    assert uni[0].nominator == "a" and uni[0].nominee == "b"

    assert classify(FriendshipGraph.from_arcs([("a", "b", 1), ("b", "a", 2)])) == ()


def _oracle_class(s_ab, s_ba, threshold):
    ab = s_ab is not None and s_ab > threshold
    ba = s_ba is not None and s_ba > threshold
    if ab and ba:
        return ("reciprocal", None)
    if ab:
        return ("unilateral", "a")
    if ba:
        return ("unilateral", "b")
    return None


@pytest.mark.parametrize("threshold", [0, 2, 5])
def test_classify_all_score_pairs_against_rule(threshold):
    scores = [None] + list(range(8))
    for s_ab, s_ba in itertools.product(scores, scores):
        arcs = []
        if s_ab is not None:
            arcs.append(("a", "b", s_ab))
        if s_ba is not None:
            arcs.append(("b", "a", s_ba))
        g = FriendshipGraph(["a", "b"], [NominationArc(*x) for x in arcs], threshold)
        edges = classify(g)
        want = _oracle_class(s_ab, s_ba, threshold)
        if want is None:
            assert edges == ()
        else:
            (e,) = edges
            assert (e.kind.value, e.nominator) == want


def test_tie_class_is_consistent_under_swap():
    g = FriendshipGraph.from_arcs([("a", "b", 5), ("b", "a", 4), ("a", "c", 6), ("d", "a", 3), ("e", "a", 1)])
    for x, y in itertools.permutations(g.nodes, 2):
        assert g.tie_class(y, x) is g.tie_class(x, y).flipped()
    assert g.tie_class("a", "b") is TieClass.RECIPROCAL
    assert g.tie_class("a", "c") is TieClass.UNILATERAL_OUT
    assert g.tie_class("a", "d") is TieClass.UNILATERAL_IN
    assert g.tie_class("a", "e") is TieClass.NONE


@pytest.mark.parametrize(
    "n_edges,n_rec,expected",
    [(698, 315, 315 / 698), (82, 28, 28 / 82)],
)
def test_reciprocity_fraction(n_edges, n_rec, expected):
    edges = [LogicalEdge(f"u{i}", f"v{i}", EdgeClass.RECIPROCAL, None, 5, 5) for i in range(n_rec)]
    edges += [LogicalEdge(f"x{i}", f"y{i}", EdgeClass.UNILATERAL, f"x{i}", 4, None) for i in range(n_edges - n_rec)]
    s = reciprocity_stats(edges)
    assert (s.n_edges, s.n_reciprocal, s.n_unilateral) == (n_edges, n_rec, n_edges - n_rec)
    assert s.fraction_reciprocal == expected
    assert round(s.fraction_reciprocal, 3) == {698: 0.451, 82: 0.341}[n_edges]


def test_reciprocity_all_reciprocal_and_empty():
    g = FriendshipGraph.from_arcs([("a", "b", 5), ("b", "a", 5), ("c", "d", 7), ("d", "c", 3)])
    assert reciprocity_stats(classify(g)).fraction_reciprocal == 1.0
    with pytest.raises(EmptyInputError):
        reciprocity_stats([])


# --- properties on random graphs --------------------------------------------------

node_ids = st.sampled_from([f"n{i}" for i in range(7)])


@st.composite
def random_graphs(draw):
    pairs = draw(st.lists(st.tuples(node_ids, node_ids).filter(lambda p: p[0] != p[1]), unique=True, max_size=30))
    scores = draw(st.lists(st.integers(0, 7), min_size=len(pairs), max_size=len(pairs)))
    threshold = draw(st.integers(0, 6))
    return [(a, b, s) for (a, b), s in zip(pairs, scores)], threshold


def _edge_key(e):
    return (frozenset((e.u, e.v)), e.kind, e.nominator)


@settings(max_examples=150, deadline=None)
@given(random_graphs(), st.randoms(use_true_random=False))
def test_classification_ignores_arc_order(data, rnd):
    arcs, th = data
    g1 = FriendshipGraph.from_arcs(arcs, th)
    shuffled = list(arcs)
    rnd.shuffle(shuffled)
    g2 = FriendshipGraph.from_arcs(shuffled, th)
    assert {_edge_key(e) for e in classify(g1)} == {_edge_key(e) for e in classify(g2)}


@settings(max_examples=150, deadline=None)
@given(random_graphs())
def test_owned_arcs_equal_explicit_arcs(data):
    arcs, th = data
    g = FriendshipGraph.from_arcs(arcs, th)
    edges = classify(g)
    assert sum(e.n_arcs for e in edges) == len(g.explicit_arcs)
    assert len(edges) == len({frozenset((e.u, e.v)) for e in edges})
    s = reciprocity_stats(edges) if edges else None
    if s:
        n_uni_arcs = sum(1 for a in g.explicit_arcs if not g.is_explicit(a.dst, a.src))
        assert s.n_edges == s.n_reciprocal + n_uni_arcs


@settings(max_examples=150, deadline=None)
@given(random_graphs())
def test_edge_count_monotone_in_threshold(data):
    arcs, _ = data
    counts = [len(classify(FriendshipGraph.from_arcs(arcs, th))) for th in range(-1, 8)]
    assert all(b <= a for a, b in zip(counts, counts[1:]))


@settings(max_examples=60, deadline=None)
@given(random_graphs())
def test_round_trips(tmp_path_factory, data):
    arcs, th = data
    g = FriendshipGraph.from_arcs(arcs, th)
    d = tmp_path_factory.mktemp("rt")
    save_graph(g, d / "g.csv")
    if g.arcs:
        assert load_graph(d / "g.csv", th) == g
    save_graph_json(g, d / "g.json")
    assert load_any_graph(d / "g.json") == g
    assert graph_from_json(json.loads(json.dumps(graph_to_json(g)))) == g


def test_edges_export_round_trip(tmp_path):
    g = FriendshipGraph.from_arcs([("a", "b", 5), ("b", "a", 4), ("a", "c", 6), ("c", "a", 1), ("d", "a", 3)])
    with open(tmp_path / "edges.csv", "w", newline="") as fh:
        write_edges_csv(classify(g), fh)
    text = (tmp_path / "edges.csv").read_text()
    assert text.splitlines()[0] == "u,v,class,direction,closeness_uv,closeness_vu"
    assert "a,c,unilateral,a,6,1" in text
    back = load_edges_csv(tmp_path / "edges.csv")
    assert {_edge_key(e) for e in classify(back)} == {_edge_key(e) for e in classify(g)}
    assert load_any_graph(tmp_path / "edges.csv").score("c", "a") == 1


def test_missing_file_is_validation_error(tmp_path):
    with pytest.raises(ValidationError, match="not found"):
        load_any_graph(tmp_path / "nope.csv")
