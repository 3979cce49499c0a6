"""Edge-percolation sweeps: remove reciprocal or unilateral edges, then run BDSI.

Removal works on logical edges, so dropping a reciprocal edge deletes both of
its arcs. Within one replicate, removals are nested: a single permutation of
the target class is drawn and the first ``count`` edges of it are removed.

Random streams are keyed by cell coordinates only. Run ``j`` of replicate
``r`` uses BDSI stream ``r * runs_per_point + j`` for every F and for both
edge classes. The F = 0 cell of a sweep is therefore identical to a plain
batch of runs, and arms that differ only in the target class share their
contagion draws.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bdsi import BDSIParams, ContagionNetwork, CoverageCurve, mean_coverage_curve, run_seed, simulate_batch, times_to_coverage
from .errors import IncompatibleError, ValidationError
from .graph import EdgeClass, FriendshipGraph, LogicalEdge

_PERMUTATION_TAG = 0x5045524D  # separates removal streams from contagion streams
EARLY_WINDOW = (5, 10)


class Matching(str, enum.Enum):
    FRACTION = "fraction"
    COUNT = "count"


def removal_order(edges: Sequence[LogicalEdge], target_class, rng: np.random.Generator) -> list[LogicalEdge]:
    """Edges of ``target_class`` in the order a sweep removes them."""
    target = EdgeClass(target_class)
    pool = [e for e in edges if e.kind is target]
    return [pool[i] for i in rng.permutation(len(pool))]


def percolate(edges: Sequence[LogicalEdge], target_class, count: int, rng: np.random.Generator) -> list[LogicalEdge]:
    """Drop ``count`` uniformly chosen edges of ``target_class``; order of the rest is kept."""
    target = EdgeClass(target_class)
    n_class = sum(1 for e in edges if e.kind is target)
    if count < 0 or count > n_class:
        raise ValidationError(f"cannot remove {count} {target.value} edges; class has {n_class}")
    removed = set(removal_order(edges, target, rng)[:count])
    return [e for e in edges if e not in removed]


@dataclass(frozen=True)
class PercolationPlan:
    target_class: EdgeClass
    fractions: tuple[float, ...]
    bdsi: BDSIParams
    master_seed: int
    matching: Matching = Matching.COUNT
    runs_per_point: int = 1
    replicates: int = 100
    reference_count: int | None = None  # ByCount base; None = smaller class size
    nested: bool = True
    horizon: int | None = None  # defaults to bdsi.max_steps
    target_coverage: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "target_class", EdgeClass(self.target_class))
        object.__setattr__(self, "matching", Matching(self.matching))
        fr = tuple(float(f) for f in self.fractions)
        if not fr:
            raise ValidationError("no fractions given")
        if any(not 0.0 <= f <= 1.0 for f in fr):
            raise ValidationError("fractions must lie in [0, 1]")
        if any(b <= a for a, b in zip(fr, fr[1:])):
            raise ValidationError("fractions must be strictly increasing")
        object.__setattr__(self, "fractions", fr)
        if self.runs_per_point < 1 or self.replicates < 1:
            raise ValidationError("runs_per_point and replicates must be positive")
        if self.reference_count is not None and self.reference_count < 0:
            raise ValidationError("reference_count must be non-negative")
        if not 0.0 < self.target_coverage <= 1.0:
            raise ValidationError("target_coverage must lie in (0, 1]")

    @property
    def steps(self) -> int:
        return self.bdsi.max_steps if self.horizon is None else self.horizon

    def with_class(self, target_class) -> "PercolationPlan":
        kw = {f: getattr(self, f) for f in self.__dataclass_fields__}
        kw["target_class"] = EdgeClass(target_class)
        return PercolationPlan(**kw)

    def removal_counts(self, n_reciprocal: int, n_unilateral: int) -> list[int]:
        if self.matching is Matching.FRACTION:
            base = n_reciprocal if self.target_class is EdgeClass.RECIPROCAL else n_unilateral
        else:
            base = min(n_reciprocal, n_unilateral) if self.reference_count is None else self.reference_count
        # round half up so that counts do not depend on banker's rounding
        return [int(math.floor(f * base + 0.5)) for f in self.fractions]

    def to_dict(self) -> dict:
        return {
            "target_class": self.target_class.value,
            "fractions": list(self.fractions),
            "matching": self.matching.value,
            "runs_per_point": self.runs_per_point,
            "replicates": self.replicates,
            "reference_count": self.reference_count,
            "nested": self.nested,
            "horizon": self.steps,
            "target_coverage": self.target_coverage,
            "master_seed": self.master_seed,
            "bdsi": self.bdsi.to_dict(),
        }


@dataclass
class PercolationPoint:
    target_class: EdgeClass
    fraction: float
    removed_count: int
    curve: CoverageCurve
    mean_T: float | None  # over runs that reached the target coverage
    frac_reached: float
    z: np.ndarray = field(repr=False)  # (runs, horizon + 1)


@dataclass
class PercolationResult:
    plan: PercolationPlan
    class_sizes: dict[str, int]
    points: list[PercolationPoint]

    @property
    def horizon(self) -> int:
        return self.plan.steps

    def point(self, fraction: float) -> PercolationPoint:
        for p in self.points:
            if p.fraction == fraction:
                return p
        raise KeyError(fraction)


def _removal_stream(master_seed: int, replicate: int, f_index: int | None) -> np.random.Generator:
    key = (replicate,) if f_index is None else (replicate, f_index)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([master_seed, _PERMUTATION_TAG], spawn_key=key)))


def percolation_sweep(graph: FriendshipGraph | ContagionNetwork, plan: PercolationPlan, threads: int = 1) -> PercolationResult:
    net = graph if isinstance(graph, ContagionNetwork) else ContagionNetwork(graph)
    rec_idx = net.class_indices(EdgeClass.RECIPROCAL)
    uni_idx = net.class_indices(EdgeClass.UNILATERAL)
    class_idx = rec_idx if plan.target_class is EdgeClass.RECIPROCAL else uni_idx
    counts = plan.removal_counts(rec_idx.size, uni_idx.size)
    for c in counts:
        if c > class_idx.size:
            raise ValidationError(
                f"cannot remove {c} {plan.target_class.value} edges; class has {class_idx.size}"
            )
    reps, per = plan.replicates, plan.runs_per_point
    seeds = [run_seed(plan.master_seed, k) for k in range(reps * per)]
    horizon = plan.steps
    perms = None
    if plan.nested:
        perms = [class_idx[_removal_stream(plan.master_seed, r, None).permutation(class_idx.size)] for r in range(reps)]

    points = []
    for fi, (f, count) in enumerate(zip(plan.fractions, counts)):
        active = np.ones((reps * per, net.n_edges), dtype=bool)
        for r in range(reps):
            if plan.nested:
                order = perms[r]
            else:
                order = class_idx[_removal_stream(plan.master_seed, r, fi).permutation(class_idx.size)]
            active[r * per : (r + 1) * per, order[:count]] = False
        batch = simulate_batch(net, plan.bdsi, seeds, active=active, threads=threads)
        z = batch.z_matrix(horizon)
        T = times_to_coverage(z, net.n_nodes, plan.target_coverage)
        reached = T >= 0
        points.append(
            PercolationPoint(
                plan.target_class,
                f,
                count,
                mean_coverage_curve(batch, horizon),
                float(T[reached].mean()) if reached.any() else None,
                float(reached.mean()),
                z,
            )
        )
    sizes = {"reciprocal": int(rec_idx.size), "unilateral": int(uni_idx.size)}
    return PercolationResult(plan, sizes, points)


@dataclass
class DeltaCurve:
    fraction: float
    removed_count: int
    delta: np.ndarray
    se: np.ndarray
    early_mean: float
    early_se: float


def _check_compatible(a: PercolationResult, b: PercolationResult):
    pa, pb = a.plan, b.plan
    if pa.fractions != pb.fractions:
        raise IncompatibleError("results use different fractions")
    if pa.matching is not pb.matching:
        raise IncompatibleError("results use different matching modes")
    if pa.matching is Matching.COUNT and [p.removed_count for p in a.points] != [p.removed_count for p in b.points]:
        raise IncompatibleError("count-matched results removed different numbers of edges")
    if a.horizon != b.horizon:
        raise IncompatibleError("results use different horizons")
    if pa.bdsi != pb.bdsi:
        raise IncompatibleError("results use different BDSI parameters")


def delta_z(result_a: PercolationResult, result_b: PercolationResult, window=EARLY_WINDOW) -> list[DeltaCurve]:
    """Pointwise mean coverage of ``result_a`` minus ``result_b`` for each matched F.

    Standard errors add the two arms' variances as if independent. The
    early-window summary averages ΔZ(t) over ``window`` (inclusive); it is
    NaN when the horizon ends before the window starts.
    """
    _check_compatible(result_a, result_b)
    lo, hi = window
    hi = min(hi, result_a.horizon)
    out = []
    for pa, pb in zip(result_a.points, result_b.points):
        d = pa.curve.mean - pb.curve.mean
        se = np.sqrt(pa.curve.se**2 + pb.curve.se**2)
        if lo > hi:
            early, early_se = math.nan, math.nan
        else:
            wa = pa.z[:, lo : hi + 1].mean(axis=1)
            wb = pb.z[:, lo : hi + 1].mean(axis=1)
            early = float(wa.mean() - wb.mean())
            early_se = math.sqrt(_var_of_mean(wa) + _var_of_mean(wb))
        out.append(DeltaCurve(pa.fraction, pa.removed_count, d, se, early, early_se))
    return out


def _var_of_mean(x: np.ndarray) -> float:
    return float(x.var(ddof=1) / x.size) if x.size > 1 else 0.0


def bootstrap_mean_difference(x, y, n_boot: int = 500, rng=None, level: float = 0.95) -> tuple[float, float, float]:
    """Percentile bootstrap CI for mean(x) - mean(y), resampling each arm independently."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    rng = np.random.default_rng(rng)
    bx = x[rng.integers(0, x.size, size=(n_boot, x.size))].mean(axis=1)
    by = y[rng.integers(0, y.size, size=(n_boot, y.size))].mean(axis=1)
    diffs = bx - by
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(diffs, [alpha, 1.0 - alpha])
    return float(x.mean() - y.mean()), float(lo), float(hi)
