"""Peer-influence regression: ego activity change against buddy tie types.

Each ego is paired with a few alters ("buddies"). The outcome is the ratio of
mean daily activity after and before the intervention, regressed on the
number of buddies in each tie class plus total tie strength.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import InsufficientDataError, ParseError, SingularDesignError, ValidationError
from .graph import FriendshipGraph, TieClass
from .stats import t_ppf, t_two_sided_p

COVARIATES = ("n_reciprocal", "n_incoming", "n_outgoing", "tie_strength")
RECORDS_HEADER = ("ego", "alter1", "alter2", "activity_p1", "activity_p2")
ESTIMATES_HEADER = ("name", "coef", "se", "ci_low", "ci_high", "p")
RANK_TOL = 1e-10


@dataclass(frozen=True)
class EgoRecord:
    ego: str
    alters: tuple[str, ...]
    activity_p1: float
    activity_p2: float

    def __post_init__(self):
        object.__setattr__(self, "alters", tuple(str(a) for a in self.alters))
        if not self.alters:
            raise ValidationError(f"ego {self.ego} has no alters")
        if self.ego in self.alters:
            raise ValidationError(f"ego {self.ego} lists itself as an alter")
        if not self.activity_p1 > 0:
            raise ValidationError(f"ego {self.ego}: baseline activity must be positive")

    @property
    def activity_change(self) -> float:
        return self.activity_p2 / self.activity_p1


@dataclass(frozen=True)
class CovariateRow:
    ego: str
    y: float
    n_reciprocal: int
    n_incoming: int
    n_outgoing: int
    tie_strength: float

    def __getitem__(self, name):
        return getattr(self, name)


def tie_covariates(graph: FriendshipGraph, ego: str, alters: Sequence[str]) -> dict[str, float]:
    """Counts of alters per tie class as seen from ``ego``, plus summed closeness.

    Tie strength adds every recorded score between ego and each alter in both
    directions, including scores at or below the threshold.
    """
    counts = {TieClass.RECIPROCAL: 0, TieClass.UNILATERAL_IN: 0, TieClass.UNILATERAL_OUT: 0, TieClass.NONE: 0}
    strength = 0
    for alter in alters:
        counts[graph.tie_class(ego, alter)] += 1
        for s in (graph.score(ego, alter), graph.score(alter, ego)):
            if s is not None:
                strength += s
    return {
        "n_reciprocal": counts[TieClass.RECIPROCAL],
        "n_incoming": counts[TieClass.UNILATERAL_IN],
        "n_outgoing": counts[TieClass.UNILATERAL_OUT],
        "tie_strength": strength,
    }


def build_rows(graph: FriendshipGraph, records: Sequence[EgoRecord], log_ratio: bool = False) -> list[CovariateRow]:
    rows = []
    for rec in records:
        unknown = [n for n in (rec.ego, *rec.alters) if n not in graph]
        if unknown:
            raise ValidationError(f"unknown node(s) {unknown} in record for ego {rec.ego}")
        y = rec.activity_change
        if log_ratio:
            if y <= 0:
                raise ValidationError(f"ego {rec.ego}: log ratio needs positive activity")
            y = math.log(y)
        rows.append(CovariateRow(rec.ego, y, **tie_covariates(graph, rec.ego, rec.alters)))
    return rows


@dataclass(frozen=True)
class EffectEstimate:
    name: str
    coefficient: float
    std_error: float
    ci95: tuple[float, float]
    p_value: float
    t_statistic: float = math.nan


@dataclass
class OLSFit:
    names: tuple[str, ...]
    coef: np.ndarray
    cov: np.ndarray
    residuals: np.ndarray
    sigma2: float
    df: int

    @property
    def std_errors(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.cov), 0.0, None))

    def estimates(self, level: float = 0.95) -> list[EffectEstimate]:
        tcrit = t_ppf(0.5 + level / 2.0, self.df)
        out = []
        for name, b, se in zip(self.names, self.coef, self.std_errors):
            b, se = float(b), float(se)
            if se > 0:
                t = b / se
                p = t_two_sided_p(t, self.df)
            else:
                t = math.copysign(math.inf, b) if b != 0 else math.nan
                p = 0.0 if b != 0 else 1.0
            out.append(EffectEstimate(name, b, se, (b - tcrit * se, b + tcrit * se), p, t))
        return out


def ols(X, y, names: Sequence[str]) -> OLSFit:
    """Least squares through a Householder QR of the design matrix."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, k = X.shape
    if n <= k:
        raise InsufficientDataError(f"{n} rows cannot identify {k} coefficients with residual degrees of freedom")
    q, r = np.linalg.qr(X, mode="reduced")
    diag = np.abs(np.diag(r))
    bad = np.flatnonzero(diag < RANK_TOL)
    if bad.size:
        j = int(bad[0])
        cols = [j]
        if j > 0:
            c = np.linalg.solve(r[:j, :j], r[:j, j])
            cols = [i for i in range(j) if abs(c[i]) > 1e-8] + [j]
        named = [names[i] for i in cols]
        raise SingularDesignError(f"design matrix is rank deficient; collinear columns: {', '.join(named)}", named)
    coef = np.linalg.solve(r, q.T @ y)
    resid = y - X @ coef
    df = n - k
    sigma2 = float(resid @ resid) / df
    rinv = np.linalg.inv(r)
    cov = sigma2 * (rinv @ rinv.T)
    return OLSFit(tuple(names), coef, cov, resid, sigma2, df)


def design_matrix(rows: Sequence[CovariateRow | Mapping], covariates: Sequence[str] = COVARIATES, intercept: bool = True):
    names = (["intercept"] if intercept else []) + list(covariates)
    X = np.array([([1.0] if intercept else []) + [float(r[c]) for c in covariates] for r in rows], dtype=float)
    y = np.array([float(r["y"]) for r in rows], dtype=float)
    return X.reshape(len(rows), len(names)), y, names


def ols_fit(rows: Sequence[CovariateRow | Mapping], covariates: Sequence[str] = COVARIATES, intercept: bool = True, level: float = 0.95) -> list[EffectEstimate]:
    rows = list(rows)
    k = len(covariates) + (1 if intercept else 0)
    if len(rows) <= k:
        raise InsufficientDataError(f"need more than {k} rows, got {len(rows)}")
    X, y, names = design_matrix(rows, covariates, intercept)
    return ols(X, y, names).estimates(level)


# --- I/O -------------------------------------------------------------------


def load_records(path) -> list[EgoRecord]:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"input file not found: {path}")
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != RECORDS_HEADER:
            raise ParseError(f"expected header {','.join(RECORDS_HEADER)}", path, 1)
        for rec in reader:
            line = reader.line_num
            if not rec:
                continue
            if len(rec) != len(RECORDS_HEADER):
                raise ParseError(f"expected {len(RECORDS_HEADER)} fields, got {len(rec)}", path, line)
            ego, a1, a2, p1, p2 = (c.strip() for c in rec)
            try:
                records.append(EgoRecord(ego, tuple(a for a in (a1, a2) if a), float(p1), float(p2)))
            except ValueError as exc:
                raise ParseError(str(exc), path, line) from None
    return records


def write_records(records: Sequence[EgoRecord], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(RECORDS_HEADER)
    for r in records:
        if len(r.alters) > 2:
            raise ValidationError(f"ego {r.ego}: the records format holds at most two alters")
        alters = list(r.alters) + [""] * (2 - len(r.alters))
        w.writerow((r.ego, *alters, repr(float(r.activity_p1)), repr(float(r.activity_p2))))


def write_estimates(estimates: Sequence[EffectEstimate], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(ESTIMATES_HEADER)
    for e in estimates:
        w.writerow((e.name, repr(e.coefficient), repr(e.std_error), repr(e.ci95[0]), repr(e.ci95[1]), repr(e.p_value)))
