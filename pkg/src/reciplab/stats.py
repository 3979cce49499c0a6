"""Closeness-score comparisons between tie classes: summaries, t-tests, ECDF, KDE.

The Student t tail probabilities are computed here from the regularized
incomplete beta function (Lentz continued fraction), so that the regression
module and the t-test share one audited implementation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateError, EmptyInputError, InsufficientDataError, ValidationError
from .graph import LogicalEdge

_BETA_EPS = 1e-15
_BETA_MAX_ITER = 10_000


@dataclass(frozen=True)
class SampleSummary:
    n: int
    mean: float
    variance: float  # unbiased; 0.0 when n == 1

    @classmethod
    def of(cls, values) -> "SampleSummary":
        x = np.asarray(values, dtype=float)
        if x.size == 0:
            raise EmptyInputError("empty sample")
        var = float(x.var(ddof=1)) if x.size > 1 else 0.0
        return cls(int(x.size), float(x.mean()), var)


@dataclass(frozen=True)
class TTestResult:
    t_statistic: float
    degrees_of_freedom: float
    p_value: float


def closeness_samples(edges: Iterable[LogicalEdge], convention: str = "directed") -> dict[str, list[float]]:
    """Per-class closeness samples.

    ``directed``: every explicit score counts, so a reciprocal edge adds two
    values. ``pair_mean``: a reciprocal edge adds the mean of its two scores.
    """
    if convention not in ("directed", "pair_mean"):
        raise ValidationError(f"unknown closeness convention {convention!r}")
    rec, uni = [], []
    for e in edges:
        scores = e.explicit_scores()
        if e.is_reciprocal:
            if convention == "directed":
                rec.extend(float(s) for s in scores)
            else:
                rec.append((scores[0] + scores[1]) / 2.0)
        else:
            uni.append(float(scores[0]))
    return {"reciprocal": rec, "unilateral": uni}


def closeness_by_class(edges: Iterable[LogicalEdge], convention: str = "directed") -> dict[str, SampleSummary | None]:
    samples = closeness_samples(edges, convention)
    return {k: (SampleSummary.of(v) if v else None) for k, v in samples.items()}


# --- t distribution ----------------------------------------------------------


def _beta_cf(a: float, b: float, x: float) -> float:
    # modified Lentz evaluation of the incomplete beta continued fraction
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc_regularized(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and 0 <= x <= 1."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def t_two_sided_p(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student t with ``df`` degrees of freedom."""
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    if math.isnan(t):
        return math.nan
    if math.isinf(t):
        return 0.0
    t, df = float(t), float(df)
    x = df / (df + t * t)
    return min(1.0, max(0.0, betainc_regularized(df / 2.0, 0.5, x)))


def t_cdf(t: float, df: float) -> float:
    half = 0.5 * t_two_sided_p(t, df)
    return 1.0 - half if t > 0 else half


def t_ppf(q: float, df: float) -> float:
    """Inverse of `t_cdf` by bisection; accurate to ~1e-12."""
    if not 0.0 < q < 1.0:
        raise ValueError("quantile must lie in (0, 1)")
    if q == 0.5:
        return 0.0
    if q < 0.5:
        return -t_ppf(1.0 - q, df)
    lo, hi = 0.0, 1.0
    while t_cdf(hi, df) < q:
        lo, hi = hi, hi * 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if t_cdf(mid, df) < q:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def welch_t_test(a: Sequence[float], b: Sequence[float], pooled: bool = False) -> TTestResult:
    """Two-sample t-test, Welch form by default (``pooled=True`` for Student's)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size < 2 or b.size < 2:
        raise InsufficientDataError(f"need at least 2 observations per sample, got {a.size} and {b.size}")
    na, nb = a.size, b.size
    ma, mb = a.mean(), b.mean()
    va, vb = a.var(ddof=1), b.var(ddof=1)
    if va == 0.0 and vb == 0.0:
        if ma == mb:
            raise DegenerateError("both samples are constant and equal")
        return TTestResult(math.copysign(math.inf, ma - mb), float(na + nb - 2), 0.0)
    if pooled:
        df = float(na + nb - 2)
        sp2 = ((na - 1) * va + (nb - 1) * vb) / df
        se2 = sp2 * (1.0 / na + 1.0 / nb)
    else:
        sa, sb = va / na, vb / nb
        se2 = sa + sb
        # scaled to avoid underflow of the squared variances
        m = max(sa, sb)
        ra, rb = sa / m, sb / m
        df = (ra + rb) ** 2 / (ra * ra / (na - 1) + rb * rb / (nb - 1))
    t = float((ma - mb) / math.sqrt(se2))
    return TTestResult(t, float(df), t_two_sided_p(t, df))


# --- ECDF / KDE ---------------------------------------------------------------


def ecdf(values) -> list[tuple[float, float]]:
    """Jump points ``(x, F(x))`` of the empirical CDF, x ascending and unique."""
    x = np.sort(np.asarray(values, dtype=float))
    if x.size == 0:
        raise EmptyInputError("ECDF of an empty sample")
    uniq, counts = np.unique(x, return_counts=True)
    cum = np.cumsum(counts)
    return [(float(u), float(c) / x.size) for u, c in zip(uniq, cum)]


def silverman_bandwidth(values) -> float:
    """Rule-of-thumb bandwidth 1.06 * sd * n**(-1/5), sd with ddof=1."""
    x = np.asarray(values, dtype=float)
    if x.size < 2:
        raise InsufficientDataError("bandwidth rule needs at least 2 observations")
    sd = float(x.std(ddof=1))
    if sd == 0.0:
        raise DegenerateError("constant sample; automatic bandwidth is zero")
    return 1.06 * sd * x.size ** (-0.2)


def kde(values, grid, bandwidth: float | str | None = "auto") -> np.ndarray:
    """Gaussian kernel density of ``values`` evaluated at ``grid``."""
    x = np.asarray(values, dtype=float)
    if x.size < 1:
        raise EmptyInputError("KDE of an empty sample")
    if bandwidth is None or bandwidth == "auto":
        h = silverman_bandwidth(x)
    else:
        h = float(bandwidth)
        if not h > 0 or not math.isfinite(h):
            raise ValidationError(f"bandwidth must be positive, got {bandwidth!r}")
    g = np.asarray(grid, dtype=float)
    z = (g[..., None] - x) / h
    return np.exp(-0.5 * z * z).sum(axis=-1) / (x.size * h * math.sqrt(2.0 * math.pi))


def default_grid(values, bandwidth: float, n_points: int = 256, pad: float = 5.0) -> np.ndarray:
    x = np.asarray(values, dtype=float)
    return np.linspace(x.min() - pad * bandwidth, x.max() + pad * bandwidth, n_points)
