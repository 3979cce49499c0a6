"""Bi-directional susceptible-infected (BDSI) contagion on classified friendship graphs.

Time is discrete and updates are synchronous. Each logical edge is compiled
into two transmission arcs:

* reciprocal edge: both arcs transmit with ``p_rec``;
* unilateral edge: nominator -> nominee with ``p_plus``, the reverse with ``p_minus``.

Every run owns one random stream. It first draws its seed nodes (when seeding
is uniform) and then exactly one uniform per base transmission arc per step,
whether or not the arc is currently usable. Arc ``a`` fires at step ``t`` iff
its source is infected and ``U[t, a] < p_a``. Because the draws never depend
on the state, two runs that share a stream are coupled: larger probabilities
or a superset of edges give a superset of infected nodes at every step.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import EmptyInputError, ValidationError
from .graph import EdgeClass, FriendshipGraph

REC, PLUS, MINUS = 0, 1, 2

# upper bound on uniforms held in memory per chunk of runs
_CHUNK_FLOATS = 1 << 22


class RegimeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class BDSIParams:
    p_rec: float = 0.10
    p_plus: float = 0.05
    p_minus: float = 0.02
    seed_count: int = 1
    seed_nodes: tuple[str, ...] | None = None  # explicit seeding; None means uniform random
    max_steps: int = 50
    stop_at_coverage: float | None = None

    def __post_init__(self):
        for name in ("p_rec", "p_plus", "p_minus"):
            p = getattr(self, name)
            if not (0.0 <= float(p) <= 1.0):
                raise ValidationError(f"{name}={p} is not a probability")
        if self.seed_nodes is not None:
            nodes = tuple(str(s) for s in self.seed_nodes)
            if not nodes:
                raise ValidationError("explicit seed list is empty")
            if len(set(nodes)) != len(nodes):
                raise ValidationError("explicit seed list has duplicates")
            object.__setattr__(self, "seed_nodes", nodes)
            object.__setattr__(self, "seed_count", len(nodes))
        if int(self.seed_count) < 1:
            raise ValidationError("seed_count must be positive")
        if int(self.max_steps) < 1:
            raise ValidationError("max_steps must be positive")
        if self.stop_at_coverage is not None and not (0.0 < self.stop_at_coverage <= 1.0):
            raise ValidationError("stop_at_coverage must lie in (0, 1]")
        if not self.in_regime:
            warnings.warn(
                f"p_rec={self.p_rec}, p_plus={self.p_plus}, p_minus={self.p_minus} "
                "outside the p_rec >= p_plus >= p_minus regime",
                RegimeWarning,
                stacklevel=3,
            )

    @property
    def in_regime(self) -> bool:
        return self.p_rec >= self.p_plus >= self.p_minus

    @property
    def seed_policy(self) -> str:
        return "uniform" if self.seed_nodes is None else "explicit"

    def probabilities(self) -> np.ndarray:
        return np.array([self.p_rec, self.p_plus, self.p_minus], dtype=float)

    def to_dict(self) -> dict:
        return {
            "p_rec": self.p_rec,
            "p_plus": self.p_plus,
            "p_minus": self.p_minus,
            "seed_count": self.seed_count,
            "seed_policy": self.seed_policy,
            "seed_nodes": list(self.seed_nodes) if self.seed_nodes else None,
            "max_steps": self.max_steps,
            "stop_at_coverage": self.stop_at_coverage,
        }


def run_seed(master_seed: int, run_index: int) -> np.random.SeedSequence:
    """Stream for run ``run_index`` of a batch keyed by ``master_seed``."""
    return np.random.SeedSequence(master_seed, spawn_key=(run_index,))


def _as_seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


class ContagionNetwork:
    """Transmission arcs compiled from a graph's logical edges.

    Logical edge ``k`` owns arcs ``2k`` (u -> v) and ``2k + 1`` (v -> u). An
    ``active`` mask over logical edges expresses a perturbed graph without
    changing the arc indexing, which keeps random draws aligned.
    """

    def __init__(self, graph: FriendshipGraph):
        self.graph = graph
        self.nodes = graph.nodes
        self.edges = graph.logical_edges
        idx = graph.index
        m = len(self.edges)
        src = np.empty(2 * m, dtype=np.intp)
        dst = np.empty(2 * m, dtype=np.intp)
        kind = np.empty(2 * m, dtype=np.intp)
        for k, e in enumerate(self.edges):
            u, v = idx[e.u], idx[e.v]
            src[2 * k], dst[2 * k] = u, v
            src[2 * k + 1], dst[2 * k + 1] = v, u
            if e.kind is EdgeClass.RECIPROCAL:
                kind[2 * k] = kind[2 * k + 1] = REC
            elif e.nominator == e.u:
                kind[2 * k], kind[2 * k + 1] = PLUS, MINUS
            else:
                kind[2 * k], kind[2 * k + 1] = MINUS, PLUS
        self.src, self.dst, self.kind = src, dst, kind
        self.edge_class = np.array([e.is_reciprocal for e in self.edges], dtype=bool)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_arcs(self) -> int:
        return self.src.size

    def class_indices(self, target: EdgeClass | str) -> np.ndarray:
        target = EdgeClass(target)
        want = target is EdgeClass.RECIPROCAL
        return np.flatnonzero(self.edge_class == want)

    def arc_probabilities(self, params: BDSIParams, active=None) -> np.ndarray:
        p = params.probabilities()[self.kind]
        if active is None:
            return p
        active = np.asarray(active, dtype=bool)
        return p * np.repeat(active, 2, axis=-1)


@dataclass
class SimulationTrace:
    infection_time: dict[str, int]
    z_curve: np.ndarray  # Z(t) for t = 0..t_end
    rng_seed: tuple
    n_nodes: int

    @property
    def t_end(self) -> int:
        return len(self.z_curve) - 1

    def z_at(self, t: int) -> int:
        return int(self.z_curve[min(t, self.t_end)])

    def padded(self, horizon: int) -> np.ndarray:
        return _pad(self.z_curve, horizon)


@dataclass(frozen=True)
class TimeToInfect:
    target_fraction: float
    T: int | None  # None means the target was never reached

    @property
    def reached(self) -> bool:
        return self.T is not None


@dataclass
class TraceBatch:
    """Results of many runs over one network, indexed by run."""

    nodes: tuple[str, ...]
    infection_step: np.ndarray  # (runs, nodes), -1 = never infected
    t_end: np.ndarray  # (runs,)
    seeds: list = field(repr=False)

    def __len__(self):
        return self.infection_step.shape[0]

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def z_matrix(self, horizon: int | None = None) -> np.ndarray:
        """Z(t) per run for t = 0..horizon, carrying each final value forward."""
        if horizon is None:
            horizon = int(self.t_end.max()) if len(self) else 0
        steps = self.infection_step
        t = np.arange(horizon + 1)
        infected = steps >= 0
        # counts of nodes infected at or before t
        z = np.zeros((len(self), horizon + 1), dtype=np.int64)
        for j, tt in enumerate(t):
            z[:, j] = (infected & (steps <= tt)).sum(axis=1)
        return z

    def final_sets(self) -> np.ndarray:
        return self.infection_step >= 0

    def trace(self, i: int) -> SimulationTrace:
        row = self.infection_step[i]
        t_end = int(self.t_end[i])
        infection_time = {self.nodes[j]: int(s) for j, s in enumerate(row) if s >= 0}
        z = np.array([(row >= 0) & (row <= t) for t in range(t_end + 1)]).sum(axis=1)
        ss = self.seeds[i]
        return SimulationTrace(infection_time, z.astype(np.int64), (ss.entropy, tuple(ss.spawn_key)), self.n_nodes)

    def traces(self) -> list[SimulationTrace]:
        return [self.trace(i) for i in range(len(self))]


def _pad(z, horizon: int) -> np.ndarray:
    z = np.asarray(z)
    if horizon + 1 <= z.size:
        return z[: horizon + 1].copy()
    out = np.empty(horizon + 1, dtype=z.dtype)
    out[: z.size] = z
    out[z.size :] = z[-1]
    return out


def _seed_indices(net: ContagionNetwork, params: BDSIParams) -> np.ndarray | None:
    if params.seed_nodes is None:
        if params.seed_count > net.n_nodes:
            raise ValidationError(f"seed_count {params.seed_count} exceeds node count {net.n_nodes}")
        return None
    idx = net.graph.index
    missing = [s for s in params.seed_nodes if s not in idx]
    if missing:
        raise ValidationError(f"seed nodes not in graph: {missing}")
    return np.array([idx[s] for s in params.seed_nodes], dtype=np.intp)


def _simulate_chunk(net, params, seeds, p_arc, fixed_seeds):
    n, a = net.n_nodes, net.n_arcs
    runs = len(seeds)
    gens = [np.random.Generator(np.random.PCG64(s)) for s in seeds]
    infected = np.zeros((runs, n), dtype=bool)
    if fixed_seeds is not None:
        infected[:, fixed_seeds] = True
    else:
        for r, g in enumerate(gens):
            infected[r, g.choice(n, size=params.seed_count, replace=False)] = True
    step_of = np.where(infected, 0, -1).astype(np.int32)
    t_end = np.zeros(runs, dtype=np.int64)

    usable = p_arc > 0
    src, dst = net.src, net.dst
    stop_z = None
    if params.stop_at_coverage is not None:
        stop_z = params.stop_at_coverage * n

    def still_running(inf):
        frontier = inf[:, src] & ~inf[:, dst] & usable
        alive = frontier.any(axis=1)
        if stop_z is not None:
            alive &= inf.sum(axis=1) < stop_z
        return alive

    alive = still_running(infected)
    block = max(1, min(params.max_steps, _CHUNK_FLOATS // max(1, runs * max(a, 1))))
    u = None
    for t in range(1, params.max_steps + 1):
        if not alive.any():
            break
        j = (t - 1) % block
        if j == 0:
            nb = min(block, params.max_steps - t + 1)
            u = np.stack([g.random((nb, a)) for g in gens]) if a else np.zeros((runs, nb, 0))
        fire = infected[:, src] & (u[:, j, :] < p_arc)
        fire &= alive[:, None]
        r, arc = np.nonzero(fire)
        newly = np.zeros_like(infected)
        newly[r, dst[arc]] = True
        newly &= ~infected
        step_of[newly] = t
        infected |= newly
        t_end[alive] = t
        alive &= still_running(infected)
    return step_of, t_end


def simulate_batch(
    net: ContagionNetwork,
    params: BDSIParams,
    seeds: Sequence,
    active=None,
    threads: int = 1,
) -> TraceBatch:
    """Run one BDSI realization per entry of ``seeds``.

    ``active`` masks logical edges: shape ``(n_edges,)`` for all runs or
    ``(len(seeds), n_edges)`` per run. Results depend only on each run's seed,
    never on chunking or ``threads``.
    """
    if net.n_nodes == 0:
        raise ValidationError("graph has no nodes")
    seeds = [_as_seed_sequence(s) for s in seeds]
    fixed = _seed_indices(net, params)
    p_arc = net.arc_probabilities(params, active)
    if p_arc.ndim == 2 and p_arc.shape[0] != len(seeds):
        raise ValidationError("per-run active mask does not match the number of runs")
    runs = len(seeds)
    per_step = max(1, net.n_arcs) * min(params.max_steps, 8)
    chunk = max(1, min(runs, _CHUNK_FLOATS // per_step, 4096))
    bounds = [(lo, min(runs, lo + chunk)) for lo in range(0, runs, chunk)]

    def work(b):
        lo, hi = b
        p = p_arc[lo:hi] if p_arc.ndim == 2 else p_arc
        return _simulate_chunk(net, params, seeds[lo:hi], p, fixed)

    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, bounds))
    else:
        parts = [work(b) for b in bounds]
    if parts:
        step_of = np.concatenate([p[0] for p in parts])
        t_end = np.concatenate([p[1] for p in parts])
    else:
        step_of = np.zeros((0, net.n_nodes), dtype=np.int32)
        t_end = np.zeros(0, dtype=np.int64)
    return TraceBatch(net.nodes, step_of, t_end, seeds)


def run_many(net: ContagionNetwork, params: BDSIParams, runs: int, master_seed: int, active=None, threads: int = 1, first_run: int = 0) -> TraceBatch:
    seeds = [run_seed(master_seed, first_run + i) for i in range(runs)]
    return simulate_batch(net, params, seeds, active=active, threads=threads)


def bdsi_run(graph: FriendshipGraph | ContagionNetwork, params: BDSIParams, rng_seed, active=None) -> SimulationTrace:
    """Single BDSI realization; ``rng_seed`` is an int or a SeedSequence."""
    net = graph if isinstance(graph, ContagionNetwork) else ContagionNetwork(graph)
    return simulate_batch(net, params, [rng_seed], active=active).trace(0)


@dataclass(frozen=True)
class CoverageCurve:
    mean: np.ndarray
    se: np.ndarray
    n_runs: int

    @property
    def horizon(self) -> int:
        return self.mean.size - 1


def mean_coverage_curve(traces, horizon: int) -> CoverageCurve:
    """Pointwise mean of Z(t) over runs with its standard error (sd / sqrt(n))."""
    if isinstance(traces, TraceBatch):
        z = traces.z_matrix(horizon)
    else:
        traces = list(traces)
        if not traces:
            raise EmptyInputError("no traces to average")
        z = np.stack([t.padded(horizon) for t in traces])
    if z.shape[0] == 0:
        raise EmptyInputError("no traces to average")
    z = z.astype(float)
    mean = z.mean(axis=0)
    n = z.shape[0]
    se = z.std(axis=0, ddof=1) / math.sqrt(n) if n > 1 else np.zeros_like(mean)
    return CoverageCurve(mean, se, n)


def time_to_coverage(trace: SimulationTrace, target_fraction: float) -> TimeToInfect:
    if not 0.0 < target_fraction <= 1.0:
        raise ValidationError("target_fraction must lie in (0, 1]")
    hits = np.flatnonzero(np.asarray(trace.z_curve) / trace.n_nodes >= target_fraction)
    return TimeToInfect(target_fraction, int(hits[0]) if hits.size else None)


def times_to_coverage(z: np.ndarray, n_nodes: int, target_fraction: float) -> np.ndarray:
    """Vectorized `time_to_coverage` over a Z matrix; -1 marks unreached."""
    if not 0.0 < target_fraction <= 1.0:
        raise ValidationError("target_fraction must lie in (0, 1]")
    ok = z / n_nodes >= target_fraction
    first = ok.argmax(axis=1)
    return np.where(ok.any(axis=1), first, -1)
