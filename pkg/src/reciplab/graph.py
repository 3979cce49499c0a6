"""Directed friendship nomination graphs and reciprocal/unilateral tie classification.

A survey yields ordered nominations ``src -> dst`` scored 0-7. A nomination is
an *explicit* tie when its score is strictly above the threshold (default 2).
Each unordered pair with at least one explicit nomination becomes exactly one
`LogicalEdge`: reciprocal when both directions are explicit, unilateral
otherwise.
"""

from __future__ import annotations

import csv
import enum
import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

from .errors import EmptyInputError, ParseError, ValidationError

MIN_SCORE = 0
MAX_SCORE = 7
DEFAULT_THRESHOLD = 2

SURVEY_HEADER = ("src", "dst", "closeness")
EDGES_HEADER = ("u", "v", "class", "direction", "closeness_uv", "closeness_vu")


class TieClass(enum.Enum):
    """Relationship of an ordered pair (ego, alter)."""

    RECIPROCAL = "reciprocal"
    UNILATERAL_OUT = "unilateral_out"  # ego nominates alter only
    UNILATERAL_IN = "unilateral_in"  # alter nominates ego only
    NONE = "none"

    def flipped(self) -> "TieClass":
        if self is TieClass.UNILATERAL_OUT:
            return TieClass.UNILATERAL_IN
        if self is TieClass.UNILATERAL_IN:
            return TieClass.UNILATERAL_OUT
        return self


class EdgeClass(str, enum.Enum):
    RECIPROCAL = "reciprocal"
    UNILATERAL = "unilateral"


@dataclass(frozen=True)
class NominationArc:
    src: str
    dst: str
    closeness: int

    def __post_init__(self):
        if isinstance(self.closeness, bool) or not isinstance(self.closeness, int):
            raise ValidationError(f"closeness must be an integer, got {self.closeness!r}")
        if not MIN_SCORE <= self.closeness <= MAX_SCORE:
            raise ValidationError(
                f"closeness {self.closeness} for {self.src}->{self.dst} outside [{MIN_SCORE}, {MAX_SCORE}]"
            )
        if self.src == self.dst:
            raise ValidationError(f"self-nomination {self.src}->{self.dst}")


@dataclass(frozen=True)
class LogicalEdge:
    """One friendship: a reciprocal pair or a single unilateral nomination.

    ``u``/``v`` follow the graph's node order. ``nominator`` is set only for
    unilateral edges. Scores are the recorded survey values in each
    direction (possibly below threshold), or None when no arc was recorded.
    """

    u: str
    v: str
    kind: EdgeClass
    nominator: str | None = None
    closeness_uv: int | None = None
    closeness_vu: int | None = None

    @property
    def nominee(self) -> str | None:
        if self.nominator is None:
            return None
        return self.v if self.nominator == self.u else self.u

    @property
    def is_reciprocal(self) -> bool:
        return self.kind is EdgeClass.RECIPROCAL

    @property
    def n_arcs(self) -> int:
        """Number of explicit arcs owned by this edge."""
        return 2 if self.is_reciprocal else 1

    def explicit_scores(self) -> tuple[int, ...]:
        if self.is_reciprocal:
            return (self.closeness_uv, self.closeness_vu)
        return (self.closeness_uv if self.nominator == self.u else self.closeness_vu,)


class FriendshipGraph:
    """Immutable directed nomination graph.

    Node ids are opaque strings; ``index`` maps them to dense integers in
    ``nodes`` order. Build one with `FriendshipGraph.from_arcs` or `load_graph`.
    """

    def __init__(self, nodes: Sequence[str], arcs: Iterable[NominationArc], threshold: int = DEFAULT_THRESHOLD):
        if isinstance(threshold, bool) or not isinstance(threshold, int):
            raise ValidationError(f"threshold must be an integer, got {threshold!r}")
        nodes = tuple(str(n) for n in nodes)
        if len(set(nodes)) != len(nodes):
            raise ValidationError("duplicate node ids")
        index = {n: i for i, n in enumerate(nodes)}
        scores: dict[tuple[str, str], int] = {}
        arc_list = []
        for arc in arcs:
            if arc.src not in index or arc.dst not in index:
                raise ValidationError(f"arc {arc.src}->{arc.dst} has an endpoint outside the node set")
            key = (arc.src, arc.dst)
            if key in scores:
                raise ValidationError(f"duplicate nomination {arc.src}->{arc.dst}")
            scores[key] = arc.closeness
            arc_list.append(arc)
        self._nodes = nodes
        self._index = index
        self._arcs = tuple(arc_list)
        self._scores = scores
        self._threshold = threshold

    @classmethod
    def from_arcs(cls, arcs: Iterable[NominationArc | tuple], threshold: int = DEFAULT_THRESHOLD, nodes=None):
        """Build from arcs (or ``(src, dst, score)`` tuples); nodes in first-seen order."""
        arcs = [a if isinstance(a, NominationArc) else NominationArc(str(a[0]), str(a[1]), a[2]) for a in arcs]
        seen = dict.fromkeys(nodes or ())
        for a in arcs:
            seen.setdefault(a.src)
            seen.setdefault(a.dst)
        return cls(list(seen), arcs, threshold)

    @property
    def nodes(self) -> tuple[str, ...]:
        return self._nodes

    @property
    def arcs(self) -> tuple[NominationArc, ...]:
        return self._arcs

    @property
    def threshold(self) -> int:
        return self._threshold

    @property
    def index(self) -> dict[str, int]:
        return dict(self._index)

    def __len__(self):
        return len(self._nodes)

    def __contains__(self, node):
        return node in self._index

    def __eq__(self, other):
        if not isinstance(other, FriendshipGraph):
            return NotImplemented
        return (
            self._nodes == other._nodes
            and self._threshold == other._threshold
            and self._scores == other._scores
        )

    def __repr__(self):
        return f"FriendshipGraph(n_nodes={len(self._nodes)}, n_arcs={len(self._arcs)}, threshold={self._threshold})"

    def score(self, src: str, dst: str) -> int | None:
        return self._scores.get((src, dst))

    def is_explicit(self, src: str, dst: str) -> bool:
        s = self._scores.get((src, dst))
        return s is not None and s > self._threshold

    @cached_property
    def explicit_arcs(self) -> tuple[NominationArc, ...]:
        return tuple(a for a in self._arcs if a.closeness > self._threshold)

    def tie_class(self, ego: str, alter: str) -> TieClass:
        out = self.is_explicit(ego, alter)
        inc = self.is_explicit(alter, ego)
        if out and inc:
            return TieClass.RECIPROCAL
        if out:
            return TieClass.UNILATERAL_OUT
        if inc:
            return TieClass.UNILATERAL_IN
        return TieClass.NONE

    @cached_property
    def logical_edges(self) -> tuple[LogicalEdge, ...]:
        edges = {}
        for arc in self.explicit_arcs:
            a, b = arc.src, arc.dst
            u, v = (a, b) if self._index[a] < self._index[b] else (b, a)
            if (u, v) in edges:
                continue
            s_uv = self._scores.get((u, v))
            s_vu = self._scores.get((v, u))
            uv = s_uv is not None and s_uv > self._threshold
            vu = s_vu is not None and s_vu > self._threshold
            if uv and vu:
                edges[(u, v)] = LogicalEdge(u, v, EdgeClass.RECIPROCAL, None, s_uv, s_vu)
            else:
                edges[(u, v)] = LogicalEdge(u, v, EdgeClass.UNILATERAL, u if uv else v, s_uv, s_vu)
        return tuple(
            edges[k] for k in sorted(edges, key=lambda k: (self._index[k[0]], self._index[k[1]]))
        )

    def with_threshold(self, threshold: int) -> "FriendshipGraph":
        return FriendshipGraph(self._nodes, self._arcs, threshold)


def classify(graph: FriendshipGraph) -> tuple[LogicalEdge, ...]:
    """Logical edges of ``graph`` (one per pair with an explicit nomination)."""
    return graph.logical_edges


@dataclass(frozen=True)
class ReciprocityStats:
    n_edges: int
    n_reciprocal: int
    n_unilateral: int

    @property
    def fraction_reciprocal(self) -> float:
        return self.n_reciprocal / self.n_edges

    def as_dict(self) -> dict:
        return {
            "n_edges": self.n_edges,
            "n_reciprocal": self.n_reciprocal,
            "n_unilateral": self.n_unilateral,
            "fraction_reciprocal": self.fraction_reciprocal,
        }


def reciprocity_stats(edges: Iterable[LogicalEdge]) -> ReciprocityStats:
    edges = list(edges)
    if not edges:
        raise EmptyInputError("no logical edges; reciprocal fraction is undefined")
    n_rec = sum(1 for e in edges if e.is_reciprocal)
    return ReciprocityStats(len(edges), n_rec, len(edges) - n_rec)


# --- I/O -------------------------------------------------------------------


def _parse_score(text, path, line):
    try:
        value = int(text.strip())
    except (TypeError, ValueError):
        raise ParseError(f"closeness {text!r} is not an integer", path, line) from None
    return value


def read_survey_rows(path) -> list[tuple[int, str, str, int]]:
    """Rows ``(line_no, src, dst, closeness)`` of a survey CSV, unvalidated."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != SURVEY_HEADER:
            raise ParseError(f"expected header {','.join(SURVEY_HEADER)}, got {header!r}", path, 1)
        rows = []
        for rec in reader:
            line = reader.line_num
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != 3:
                raise ParseError(f"expected 3 fields, got {len(rec)}", path, line)
            src, dst = rec[0].strip(), rec[1].strip()
            if not src or not dst:
                raise ParseError("empty node id", path, line)
            rows.append((line, src, dst, _parse_score(rec[2], path, line)))
    return rows


def load_graph(path, threshold: int = DEFAULT_THRESHOLD) -> FriendshipGraph:
    """Load a survey CSV (``src,dst,closeness``). Errors carry the line number."""
    arcs = []
    seen = set()
    for line, src, dst, score in read_survey_rows(path):
        try:
            arc = NominationArc(src, dst, score)
        except ValidationError as exc:
            raise ParseError(str(exc), path, line) from None
        if (src, dst) in seen:
            raise ParseError(f"duplicate nomination {src}->{dst}", path, line)
        seen.add((src, dst))
        arcs.append(arc)
    return FriendshipGraph.from_arcs(arcs, threshold)


def write_survey_csv(graph: FriendshipGraph, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SURVEY_HEADER)
    for a in graph.arcs:
        w.writerow((a.src, a.dst, a.closeness))


def save_graph(graph: FriendshipGraph, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        write_survey_csv(graph, fh)


def graph_to_json(graph: FriendshipGraph) -> dict:
    return {
        "nodes": list(graph.nodes),
        "arcs": [[a.src, a.dst, a.closeness] for a in graph.arcs],
        "threshold": graph.threshold,
    }


def graph_from_json(obj: dict) -> FriendshipGraph:
    try:
        nodes = obj["nodes"]
        arcs = [NominationArc(str(s), str(d), c) for s, d, c in obj["arcs"]]
        threshold = obj.get("threshold", DEFAULT_THRESHOLD)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"malformed graph JSON: {exc}") from None
    return FriendshipGraph(nodes, arcs, threshold)


def save_graph_json(graph: FriendshipGraph, path) -> None:
    Path(path).write_text(json.dumps(graph_to_json(graph), indent=1) + "\n", encoding="utf-8")


def load_graph_json(path) -> FriendshipGraph:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", path, exc.lineno) from None
    return graph_from_json(obj)


def _fmt_opt(x):
    return "" if x is None else x


def write_edges_csv(edges: Iterable[LogicalEdge], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(EDGES_HEADER)
    for e in edges:
        w.writerow((e.u, e.v, e.kind.value, _fmt_opt(e.nominator), _fmt_opt(e.closeness_uv), _fmt_opt(e.closeness_vu)))


def load_edges_csv(path, threshold: int = DEFAULT_THRESHOLD) -> FriendshipGraph:
    """Rebuild a graph from a classified-edge export.

    Only pairs that carry a logical edge survive the export, so pairs with
    sub-threshold scores in both directions are not recovered.
    """
    arcs = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != EDGES_HEADER:
            raise ParseError(f"expected header {','.join(EDGES_HEADER)}", path, 1)
        for rec in reader:
            line = reader.line_num
            if not rec:
                continue
            if len(rec) != len(EDGES_HEADER):
                raise ParseError(f"expected {len(EDGES_HEADER)} fields, got {len(rec)}", path, line)
            u, v, _, _, s_uv, s_vu = (c.strip() for c in rec)
            try:
                if s_uv:
                    arcs.append(NominationArc(u, v, _parse_score(s_uv, path, line)))
                if s_vu:
                    arcs.append(NominationArc(v, u, _parse_score(s_vu, path, line)))
            except ValidationError as exc:
                if isinstance(exc, ParseError):
                    raise
                raise ParseError(str(exc), path, line) from None
    return FriendshipGraph.from_arcs(arcs, threshold)


def load_any_graph(path, threshold: int | None = None) -> FriendshipGraph:
    """Load a graph JSON export, survey CSV, or classified-edge CSV by content."""
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"input file not found: {path}")
    if path.suffix.lower() == ".json":
        g = load_graph_json(path)
        return g if threshold is None else g.with_threshold(threshold)
    th = DEFAULT_THRESHOLD if threshold is None else threshold
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().strip()
    if first.replace(" ", "").startswith("u,v,class"):
        return load_edges_csv(path, th)
    return load_graph(path, th)
