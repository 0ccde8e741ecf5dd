"""Synthetic edge traces with known per-node arrival processes.

Three node processes are available: homogeneous Poisson, a renewal
process with power-law-with-cutoff gaps, and a scripted weekly count
schedule. Every node draws from its own PCG64 stream keyed by
``(seed, node id)`` through :class:`numpy.random.SeedSequence`, so the
output is reproducible regardless of generation order.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
import pandas as pd

from .trace import WEEK_SECONDS, Trace, _validated

MAX_DRAWS_PER_GAP = 10**6


class SamplerError(RuntimeError):
    pass


class PartnerExhaustedError(RuntimeError):
    pass


def node_rng(seed, node, stream=0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(stream, int(node))))


def _proposal_exponent(alpha, lam, xmin):
    # alpha <= 1 has no normalizable Pareto proposal; use a slightly steeper one
    span = math.log(max(lam / xmin, math.e ** 2))
    return max(alpha, 1.0 + 1.0 / span)


def acceptance_probability(alpha, lam, xmin) -> float:
    """Expected acceptance rate of :func:`sample_cutoff_gaps`, by quadrature."""
    from scipy import integrate

    ap = _proposal_exponent(alpha, lam, xmin)
    delta = ap - alpha
    t_star = max(delta * lam, xmin)
    # int_xmin^inf t^-alpha e^(-t/lam) dt, in the variable v = ln(t/xmin)
    f = lambda v: math.exp((1 - alpha) * v - xmin * math.exp(v) / lam) * xmin ** (1 - alpha)
    vmax = math.log(max(lam / xmin, 1.0)) + 50.0
    z, _ = integrate.quad(f, 0, vmax, limit=400)
    log_w_star = delta * math.log(t_star) - t_star / lam
    return (ap - 1) * xmin ** (ap - 1) * z / math.exp(log_w_star)


def sample_cutoff_gaps(rng, n, alpha, lam, xmin, max_draws=MAX_DRAWS_PER_GAP, stats=None):
    """Draw ``n`` gaps with density proportional to t^-alpha exp(-t/lam) on [xmin, inf).

    Rejection sampling from a Pareto proposal with exponent
    ``ap = max(alpha, 1 + 1/ln(lam/xmin))``, drawn by inverse CDF. When
    ``ap == alpha`` a proposal is kept with probability exp(-(t - xmin)/lam);
    otherwise the ratio (t/t*)^(ap-alpha) exp(-(t - t*)/lam) is used, t* its
    maximizer.

    Args:
        stats: optional dict; receives ``draws`` and ``accepted`` counts.

    Raises:
        SamplerError: more than ``max_draws`` proposals per requested gap.
    """
    if not (alpha > 0 and lam > 0 and xmin > 0):
        raise ValueError("alpha, lam and xmin must be positive")
    n = int(n)
    ap = _proposal_exponent(alpha, lam, xmin)
    delta = ap - alpha
    t_star = max(delta * lam, xmin)
    out = np.empty(n)
    filled = 0
    draws = 0
    accepted = 0
    rate = 0.5
    while filled < n:
        want = n - filled
        batch = int(min(max(want / rate * 1.2 + 16, 64), 4_000_000))
        u = 1.0 - rng.random(batch)
        t = xmin * u ** (-1.0 / (ap - 1.0))
        if delta == 0:
            log_acc = -(t - xmin) / lam
        else:
            log_acc = delta * np.log(t / t_star) - (t - t_star) / lam
        ok = t[np.log(1.0 - rng.random(batch)) < log_acc]
        draws += batch
        accepted += ok.size
        take = min(ok.size, want)
        out[filled:filled + take] = ok[:take]
        filled += take
        rate = max(ok.size / batch, 1e-7)
        if draws > max_draws * max(n, 1) and filled < n:
            raise SamplerError(f"rejection sampler exceeded {max_draws} draws per gap")
    if stats is not None:
        stats["draws"] = stats.get("draws", 0) + draws
        stats["accepted"] = stats.get("accepted", 0) + accepted
    return out


@dataclass(frozen=True)
class NodeProcessSpec:
    kind: str                       # "poisson" | "bursty" | "scripted"
    start_ts: float = 0.0
    horizon_ts: float = 52 * WEEK_SECONDS
    seed: int = 0
    rate: float | None = None       # events/s, poisson
    alpha: float | None = None      # bursty gap exponent
    lambda_s: float | None = None   # bursty cutoff scale, seconds
    xmin_s: float = 1.0             # bursty minimum gap, seconds
    counts: tuple = ()              # scripted weekly counts from start_ts

    def __post_init__(self):
        if self.kind == "poisson":
            if not self.rate or self.rate <= 0:
                raise ValueError("poisson process needs rate > 0")
        elif self.kind == "bursty":
            if not (self.alpha and self.alpha > 0 and self.lambda_s and self.lambda_s > 0
                    and self.xmin_s > 0):
                raise ValueError("bursty process needs alpha, lambda_s, xmin_s > 0")
        elif self.kind == "scripted":
            if any(c < 0 for c in self.counts):
                raise ValueError("scripted counts must be non-negative")
        else:
            raise ValueError(f"unknown process kind {self.kind!r}")


def _renewal(rng, start, horizon, draw):
    times = [np.array([start])]
    last = start
    chunk = 64
    while last < horizon:
        steps = last + np.cumsum(draw(chunk))
        times.append(steps)
        last = steps[-1]
        chunk = min(chunk * 2, 1 << 20)
    t = np.concatenate(times)
    return t[t < horizon]


def gen_event_times(spec: NodeProcessSpec, rng=None) -> np.ndarray:
    """Continuous event times of one node in [start_ts, horizon_ts), ascending.

    Renewal processes place their first event at ``start_ts``.
    """
    if spec.horizon_ts <= spec.start_ts:
        raise ValueError("empty horizon")
    rng = np.random.default_rng(spec.seed) if rng is None else rng
    if spec.kind == "poisson":
        return _renewal(rng, spec.start_ts, spec.horizon_ts,
                        lambda k: -np.log(1.0 - rng.random(k)) / spec.rate)
    if spec.kind == "bursty":
        return _renewal(rng, spec.start_ts, spec.horizon_ts,
                        lambda k: sample_cutoff_gaps(rng, k, spec.alpha, spec.lambda_s, spec.xmin_s))
    counts = np.asarray(spec.counts, dtype=np.int64)
    week = np.repeat(np.arange(counts.size), counts)
    t = spec.start_ts + (week + rng.random(week.size)) * WEEK_SECONDS
    t = np.sort(t)
    return t[t < spec.horizon_ts]


@dataclass(frozen=True)
class NodeGroup:
    kind: str
    count: int
    rate: float | None = None
    alpha: float | None = None
    alpha_sd: float = 0.0           # per-node alpha ~ Normal(alpha, alpha_sd), clipped
    alpha_max: float = 5.0          # to [0.2, alpha_max]
    lambda_s: float | None = None
    xmin_s: float = 1.0
    counts: tuple = ()
    join_weeks: tuple = (0, 0)      # join week uniform on this inclusive range


@dataclass(frozen=True)
class SynthConfig:
    groups: tuple
    seed: int = 0
    horizon_weeks: int = 52
    sink_nodes: int = 0             # >0 routes partners into a throwaway pool
    max_events: int | None = None   # keep only the earliest events

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(
            g if isinstance(g, NodeGroup) else NodeGroup(**g) for g in self.groups))
        n = sum(g.count for g in self.groups)
        if n + self.sink_nodes < 2:
            raise ValueError("need at least two nodes")

    @property
    def n_nodes(self) -> int:
        return sum(g.count for g in self.groups)

    def to_dict(self):
        d = asdict(self)
        d["groups"] = [asdict(g) for g in self.groups]
        return d


def node_specs(cfg: SynthConfig) -> list[NodeProcessSpec]:
    """Per-node process specs, node ids 0..n_nodes-1 in group order."""
    specs = []
    horizon = cfg.horizon_weeks * WEEK_SECONDS
    node = 0
    for g in cfg.groups:
        for _ in range(g.count):
            rng = node_rng(cfg.seed, node, stream=1)
            lo, hi = g.join_weeks
            join = int(rng.integers(lo, hi + 1))
            start = join * WEEK_SECONDS
            if g.kind != "scripted":
                start += float(rng.random()) * WEEK_SECONDS
            alpha = g.alpha
            if g.kind == "bursty" and g.alpha_sd > 0:
                alpha = min(max(0.2, float(rng.normal(g.alpha, g.alpha_sd))), g.alpha_max)
            specs.append(NodeProcessSpec(
                kind=g.kind, start_ts=start, horizon_ts=horizon, seed=node,
                rate=g.rate, alpha=alpha, lambda_s=g.lambda_s, xmin_s=g.xmin_s,
                counts=tuple(g.counts)))
            node += 1
    return specs


def _assign_partners(owner, n_pool, pool_offset, rng, exclude_self, max_rounds=200):
    partner = pool_offset + rng.integers(0, n_pool, owner.size)
    n_all = int(max(owner.max(initial=0), partner.max(initial=0))) + 1 + n_pool
    for _ in range(max_rounds):
        lo = np.minimum(owner, partner)
        hi = np.maximum(owner, partner)
        key = lo * n_all + hi
        _, first = np.unique(key, return_index=True)
        bad = np.ones(owner.size, dtype=bool)
        bad[first] = False
        if exclude_self:
            bad |= owner == partner
        if not bad.any():
            return partner
        partner[bad] = pool_offset + rng.integers(0, n_pool, int(bad.sum()))
    raise PartnerExhaustedError("could not find distinct partners; graph too small")


def gen_trace(cfg: SynthConfig):
    """Realize every node's process and pair each event with a random partner.

    Returns ``(trace, truth)`` where ``truth`` is a DataFrame with one row per
    node describing its generating process.
    """
    specs = node_specs(cfg)
    owners, times = [], []
    for node, spec in enumerate(specs):
        t = gen_event_times(spec, node_rng(cfg.seed, node))
        owners.append(np.full(t.size, node, dtype=np.int64))
        times.append(t)
    owner = np.concatenate(owners) if owners else np.empty(0, np.int64)
    ts = np.floor(np.concatenate(times) if times else np.empty(0)).astype(np.int64)
    if owner.size == 0:
        raise ValueError("configuration generated no events")

    prng = np.random.default_rng(np.random.SeedSequence(int(cfg.seed), spawn_key=(2,)))
    if cfg.sink_nodes > 0:
        partner = _assign_partners(owner, cfg.sink_nodes, cfg.n_nodes, prng, exclude_self=False)
    else:
        if cfg.n_nodes < 2:
            raise PartnerExhaustedError("need two nodes to form an edge")
        partner = _assign_partners(owner, cfg.n_nodes, 0, prng, exclude_self=True)

    trace = _validated(owner, partner, ts)
    if cfg.max_events is not None and trace.m > cfg.max_events:
        k = cfg.max_events
        trace = Trace(trace.src[:k], trace.dst[:k], trace.ts[:k])

    counts = np.bincount(owner, minlength=cfg.n_nodes)
    rows = []
    for node, spec in enumerate(specs):
        rows.append(dict(node=node, kind=spec.kind, rate=spec.rate, alpha=spec.alpha,
                         lambda_s=spec.lambda_s,
                         xmin_s=spec.xmin_s if spec.kind == "bursty" else None,
                         counts=" ".join(map(str, spec.counts)) if spec.counts else None,
                         start_ts=spec.start_ts, n_events=int(counts[node])))
    for j in range(cfg.sink_nodes):
        rows.append(dict(node=cfg.n_nodes + j, kind="sink"))
    truth = pd.DataFrame(rows, columns=["node", "kind", "rate", "alpha", "lambda_s", "xmin_s",
                                        "counts", "start_ts", "n_events"])
    return trace, truth


def full_scale_config(seed=0, n_nodes=60_000, n_events=8_000_000, sink_nodes=0) -> SynthConfig:
    """60k nodes joining over a year, half Poisson and half bursty, cut at 8M edges."""
    half = n_nodes // 2
    return SynthConfig(
        groups=(
            NodeGroup("bursty", half, alpha=1.0, alpha_sd=0.1, alpha_max=1.3,
                      lambda_s=1.5e6, join_weeks=(0, 51)),
            NodeGroup("poisson", n_nodes - half, rate=1 / 9.0e4, join_weeks=(0, 51)),
        ),
        seed=seed, horizon_weeks=52, sink_nodes=sink_nodes, max_events=n_events)
