"""Degree acceleration, four-phase labelling, transitions and aging reports."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .trace import NodeSeries, NodeSeriesSet


class Phase(enum.IntEnum):
    ACC = 0
    DEC = 1
    CRUISE = 2
    INACT = 3

    def __str__(self):
        return self.name.lower()

    @classmethod
    def parse(cls, label) -> "Phase":
        if isinstance(label, cls):
            return label
        return cls[str(label).upper()]


PHASE_NAMES = tuple(str(p) for p in Phase)


@dataclass(frozen=True)
class PhaseConfig:
    theta1: float = 2.0     # links/week^2; a > theta1 is acceleration
    theta2: float = -2.0    # a < theta2 is deceleration
    dt_weeks: int = 1       # lag of the second difference, in bins

    def __post_init__(self):
        if not self.theta2 < 0 < self.theta1:
            raise ValueError("thresholds must satisfy theta2 < 0 < theta1")
        if int(self.dt_weeks) != self.dt_weeks or self.dt_weeks < 1:
            raise ValueError("dt_weeks must be a positive integer")


@dataclass(frozen=True)
class PhaseTimeline:
    node: int
    join_week: int
    a: np.ndarray
    s: np.ndarray       # Phase codes (int8)
    c: np.ndarray       # activity bits

    @property
    def labels(self) -> list[Phase]:
        return [Phase(int(x)) for x in self.s]

    @property
    def life(self) -> int:
        return int(self.a.size)


def _lag(x, k):
    return np.concatenate([np.zeros(k), x[:-k] if k < x.size else x[:0]])[:x.size]


def _second_difference(n, dt_weeks):
    d = np.cumsum(np.asarray(n, dtype=np.float64))
    return (d - 2.0 * _lag(d, dt_weeks) + _lag(d, 2 * dt_weeks)) / float(dt_weeks) ** 2


def degree_acceleration(series: NodeSeries, cfg: PhaseConfig = PhaseConfig()) -> np.ndarray:
    """Discrete second derivative of cumulative degree, one value per week of life.

    Degree is zero before the join week, so the join week carries
    ``a = n(join_week)``; with a one-week lag ``a(t) = n(t) - n(t-1)``.
    """
    n = series.n if isinstance(series, NodeSeries) else series
    return _second_difference(n, cfg.dt_weeks)


def classify_phases(a, c, cfg: PhaseConfig = PhaseConfig()) -> np.ndarray:
    """Label weeks as acc/dec/cruise/inact.

    Branches are tested in order acc, dec, cruise, inact, so a week whose
    acceleration is below ``theta2`` is ``dec`` even when it has no activity.
    """
    a = np.asarray(a, dtype=np.float64)
    c = np.asarray(c).astype(bool)
    if a.shape != c.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {c.shape}")
    out = np.full(a.shape, Phase.INACT, dtype=np.int8)
    acc = a > cfg.theta1
    dec = ~acc & (a < cfg.theta2)
    cruise = ~acc & ~dec & c
    out[acc] = Phase.ACC
    out[dec] = Phase.DEC
    out[cruise] = Phase.CRUISE
    return out


def node_timeline(series: NodeSeries, cfg: PhaseConfig = PhaseConfig()) -> PhaseTimeline:
    a = degree_acceleration(series, cfg)
    c = np.asarray(series.n) >= 1
    return PhaseTimeline(series.node, series.join_week, a, classify_phases(a, c, cfg), c)


@dataclass(frozen=True, eq=False)
class TimelineSet:
    """Phase timelines for a whole population, sharing the series' CSR layout."""

    series: NodeSeriesSet
    a: np.ndarray
    s: np.ndarray
    cfg: PhaseConfig = field(default_factory=PhaseConfig)

    @property
    def c(self) -> np.ndarray:
        return self.series.n >= 1

    def __len__(self):
        return len(self.series)

    def timeline(self, i) -> PhaseTimeline:
        lo, hi = self.series.offsets[i], self.series.offsets[i + 1]
        return PhaseTimeline(int(self.series.nodes[i]), int(self.series.join_week[i]),
                             self.a[lo:hi], self.s[lo:hi], self.c[lo:hi])

    def __iter__(self):
        for i in range(len(self)):
            yield self.timeline(i)


def compute_timelines(series: NodeSeriesSet, cfg: PhaseConfig = PhaseConfig()) -> TimelineSet:
    """Acceleration and labels for every node, vectorized over the flat layout."""
    lag = cfg.dt_weeks
    n = series.n.astype(np.float64)
    d = np.cumsum(n)
    # per-node cumulative degree: subtract the running total before each block
    base = np.concatenate([[0.0], d])[series.offsets[:-1]]
    row = series.row
    d = d - base[row]
    age = np.arange(n.size) - series.offsets[row]

    def lagged(k):
        out = np.zeros_like(d)
        src = np.arange(n.size) - k
        ok = age >= k
        out[ok] = d[src[ok]]
        return out

    a = (d - 2.0 * lagged(lag) + lagged(2 * lag)) / float(lag) ** 2
    s = classify_phases(a, series.n >= 1, cfg)
    return TimelineSet(series, a, s, cfg)


def phase_transitions(timeline: PhaseTimeline) -> list[tuple[int, Phase, Phase]]:
    """(week, from, to) for every change of label between consecutive weeks."""
    s = np.asarray(timeline.s)
    idx = np.flatnonzero(s[1:] != s[:-1]) + 1
    return [(int(timeline.join_week + i), Phase(int(s[i - 1])), Phase(int(s[i]))) for i in idx]


def all_transitions(timelines: TimelineSet):
    """Vectorized transitions for a population: arrays (node, week, from, to)."""
    ser = timelines.series
    s = timelines.s
    change = np.zeros(s.size, dtype=bool)
    change[1:] = s[1:] != s[:-1]
    change[ser.offsets[:-1]] = False
    idx = np.flatnonzero(change)
    row = ser.row[idx]
    week = ser.join_week[row] + (idx - ser.offsets[row])
    return ser.nodes[row], week, s[idx - 1], s[idx]


@dataclass(frozen=True)
class AgingReport:
    n_first_acc: np.ndarray     # indexed by week 0..T
    n_first_dec: np.ndarray
    n_max_acc: np.ndarray
    n_max_dec: np.ndarray
    acc_dec_counts: np.ndarray
    network_size: np.ndarray
    avg_acc: np.ndarray         # indexed by age 0..max life - 1; NaN where undefined
    avg_dec: np.ndarray
    n_acc_weeks: np.ndarray     # sample sizes behind avg_acc / avg_dec
    n_dec_weeks: np.ndarray


def _first_week_per_node(mask, row, week, n_nodes):
    first = np.full(n_nodes, np.iinfo(np.int64).max, dtype=np.int64)
    np.minimum.at(first, row[mask], week[mask])
    return first[first != np.iinfo(np.int64).max]


def _argmax_week_per_node(values, mask, row, week):
    # earliest week among ties: sort by (node, -value, week) and take the head
    r, v, w = row[mask], values[mask], week[mask]
    order = np.lexsort((w, -v, r))
    r = r[order]
    head = np.ones(r.size, dtype=bool)
    head[1:] = r[1:] != r[:-1]
    return w[order][head]


def aging_report(timelines: TimelineSet, series: NodeSeriesSet | None = None) -> AgingReport:
    """Population observables by network week and by node age."""
    ser = timelines.series if series is None else series
    if len(ser) == 0:
        raise ValueError("aging report needs at least one node")
    T = ser.T
    row, week, age = ser.row, ser.week, ser.age
    s, a = timelines.s, timelines.a
    nn = len(ser)
    is_acc = s == Phase.ACC
    is_dec = s == Phase.DEC

    def count_weeks(w):
        return np.bincount(w, minlength=T + 1).astype(np.int64)

    n_first_acc = count_weeks(_first_week_per_node(is_acc, row, week, nn))
    n_first_dec = count_weeks(_first_week_per_node(is_dec, row, week, nn))
    n_max_acc = count_weeks(_argmax_week_per_node(a, is_acc, row, week))
    n_max_dec = count_weeks(_argmax_week_per_node(-a, is_dec, row, week))
    acc_dec = count_weeks(week[is_acc | is_dec])
    network_size = np.cumsum(np.bincount(ser.join_week, minlength=T + 1)).astype(np.int64)

    n_ages = int(ser.life.max())
    n_acc_w = np.bincount(age[is_acc], minlength=n_ages)
    n_dec_w = np.bincount(age[is_dec], minlength=n_ages)
    sum_acc = np.bincount(age[is_acc], weights=a[is_acc], minlength=n_ages)
    sum_dec = np.bincount(age[is_dec], weights=a[is_dec], minlength=n_ages)
    with np.errstate(invalid="ignore", divide="ignore"):
        avg_acc = np.where(n_acc_w > 0, sum_acc / n_acc_w, np.nan)
        avg_dec = np.where(n_dec_w > 0, sum_dec / n_dec_w, np.nan)
    return AgingReport(n_first_acc, n_first_dec, n_max_acc, n_max_dec, acc_dec,
                       network_size, avg_acc, avg_dec, n_acc_w, n_dec_w)
