"""Continuous power-law fits to acceleration and deceleration magnitudes."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .phases import Phase, TimelineSet

MIN_TAIL = 50


class DegenerateSampleError(ValueError):
    pass


@dataclass(frozen=True)
class PowerLawFitResult:
    alpha: float
    xmin: float
    ks_stat: float
    n_tail: int
    reportable: bool = True     # tail holds at least the minimum sample count

    def ccdf(self, x):
        """Fitted P(X >= x) for x >= xmin."""
        return (np.asarray(x, dtype=float) / self.xmin) ** (1.0 - self.alpha)


def collect_magnitudes(timelines: TimelineSet, kind) -> np.ndarray:
    """Pooled node-week magnitudes: a in acc weeks, |a| in dec weeks."""
    kind = Phase.parse(kind)
    if kind not in (Phase.ACC, Phase.DEC):
        raise ValueError("kind must be acc or dec")
    x = np.abs(timelines.a[timelines.s == kind])
    if x.size == 0:
        raise ValueError(f"no {kind} weeks in population")
    return x


def _alpha(logs_sum, n):
    if logs_sum <= 0:
        raise DegenerateSampleError("all tail samples equal xmin; exponent undefined")
    return 1.0 + n / logs_sum


def _tail_ks(tail_sorted, xmin, alpha):
    n = tail_sorted.size
    cdf = 1.0 - (tail_sorted / xmin) ** (1.0 - alpha)
    i = np.arange(1, n + 1)
    return float(max((i / n - cdf).max(), (cdf - (i - 1) / n).max()))


def fit_powerlaw(samples, xmin=None, min_tail=MIN_TAIL, max_candidates=2000) -> PowerLawFitResult:
    """Clauset-style fit: MLE exponent per candidate xmin, xmin by minimum K-S.

    With ``xmin`` given, only the closed-form exponent is computed and the
    fit is marked unreportable when the tail is shorter than ``min_tail``.
    Candidates are the distinct sample values leaving at least ``min_tail``
    points in the tail; when there are more than ``max_candidates`` an evenly
    spaced (by rank) subset is scanned. Ties go to the smallest xmin.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size == 0:
        raise ValueError("empty sample")
    if (x <= 0).any():
        raise ValueError("power-law samples must be positive")
    if xmin is not None:
        tail = x[x >= xmin]
        if tail.size == 0:
            raise ValueError("no samples at or above xmin")
        alpha = _alpha(np.log(tail / xmin).sum(), tail.size)
        return PowerLawFitResult(alpha, float(xmin), _tail_ks(tail, xmin, alpha), int(tail.size),
                                 reportable=tail.size >= min_tail)

    values, first = np.unique(x, return_index=True)
    n_tail = x.size - first
    ok = n_tail >= min_tail
    if not ok.any():
        raise ValueError(f"fewer than {min_tail} samples in every candidate tail")
    if np.unique(x[first[ok][0]:]).size == 1:
        raise DegenerateSampleError("all candidate tails are constant")
    cand = np.flatnonzero(ok)
    if cand.size > max_candidates:
        cand = np.unique(cand[np.linspace(0, cand.size - 1, max_candidates).round().astype(int)])

    # suffix sums of ln x give every candidate's exponent in O(1)
    logx = np.log(x)
    suffix = np.concatenate([np.cumsum(logx[::-1])[::-1], [0.0]])
    best = None
    for c in cand:
        lo = first[c]
        n = x.size - lo
        s = suffix[lo] - n * math.log(values[c])
        if s <= 0:
            continue
        alpha = 1.0 + n / s
        d = _tail_ks(x[lo:], values[c], alpha)
        if best is None or d < best[0]:
            best = (d, alpha, float(values[c]), int(n))
    if best is None:
        raise DegenerateSampleError("all candidate tails are constant")
    d, alpha, xm, n = best
    return PowerLawFitResult(alpha, xm, d, n)


def ccdf(samples):
    """Distinct values with their empirical P(X >= v), ascending in v."""
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size == 0:
        raise ValueError("empty sample")
    values, first = np.unique(x, return_index=True)
    return values, (x.size - first) / x.size
