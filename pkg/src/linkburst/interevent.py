"""Per-node inter-event times: exponential vs. cutoff power-law fits, AIC
selection, bootstrap Kolmogorov-Smirnov validation and exponent summaries.

The cutoff power law has density C * t^-alpha * exp(-t/lam) on [xmin, inf)
with C = 1 / (xmin^(1-alpha) E_alpha(xmin/lam)). Its likelihood depends on
the data only through (n, mean ln(t/xmin), mean t/xmin), so fits run
batched over many nodes or bootstrap replicates at once.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd

from ._expint import log_expint
from .shares import binned_stats
from .synth import sample_cutoff_gaps
from .trace import Trace, node_event_times

EXPONENTIAL = "exponential"
PARETO = "pareto_cutoff"


@dataclass(frozen=True)
class InterEventConfig:
    min_degree: int = 15
    resolution: float = 1.0         # timestamp resolution, seconds; smallest gap
    pareto_xmin: str = "resolution"  # "resolution" or "min" (smallest observed gap)
    alpha_bounds: tuple = (0.1, 5.0)
    lambda_lo_factor: float = 0.01  # lam >= xmin * factor
    lambda_hi_factor: float = 1.0   # lam <= max gap * factor
    grid: int = 12                  # coarse grid points per axis
    loglik_tol: float = 1e-6
    max_iter: int = 100
    n_bootstrap: int = 1000
    ks_level: float = 0.1
    bootstrap_nodes: int | None = None  # cap on bootstrapped nodes, lowest ids first
    threads: int = 1


@dataclass(frozen=True)
class InterEventSample:
    node: int
    gaps: np.ndarray
    final_degree: int
    age_weeks: int


@dataclass(frozen=True)
class FitResult:
    model: str
    loglik: float
    n: int
    mu: float = math.nan
    alpha: float = math.nan
    lam: float = math.nan
    xmin: float = 0.0
    ks_stat: float = math.nan
    ks_p: float = math.nan
    converged: bool = True
    at_bound: tuple = ()        # subset of alpha_lo, alpha_hi, lambda_lo, lambda_hi
    degenerate: bool = False    # all gaps equal

    @property
    def k(self) -> int:
        return 1 if self.model == EXPONENTIAL else 2

    @property
    def aic(self) -> float:
        return 2 * self.k - 2 * self.loglik

    def cdf(self, t):
        return model_cdf(self, t)


def extract_gaps(ts, node=-1, min_degree=15, final_degree=None, age_weeks=0, resolution=1.0):
    """Consecutive differences of a node's sorted event times.

    Returns None when the node's final degree is below ``min_degree``. Gaps
    shorter than ``resolution`` (simultaneous events) are raised to it.
    """
    ts = np.asarray(ts)
    if ts.size > 1 and (np.diff(ts) < 0).any():
        raise ValueError("event times must be sorted")
    degree = ts.size if final_degree is None else int(final_degree)
    if degree < min_degree:
        return None
    gaps = np.diff(ts).astype(float)
    if resolution:
        gaps = np.maximum(gaps, resolution)
    return InterEventSample(int(node), gaps, degree, int(age_weeks))


def _gaps_of(sample):
    return np.asarray(sample.gaps if isinstance(sample, InterEventSample) else sample, dtype=float)


def fit_exponential(sample) -> FitResult:
    """Closed-form exponential MLE: mu = 1/mean(gaps)."""
    g = _gaps_of(sample)
    if g.size < 2:
        raise ValueError("exponential fit needs at least 2 gaps")
    mu = 1.0 / g.mean()
    loglik = float(g.size * math.log(mu) - mu * g.sum())
    return FitResult(EXPONENTIAL, loglik, int(g.size), mu=float(mu))


# -- cutoff power law ------------------------------------------------------

def _objective(alpha, rho, mlog, mlin):
    """Per-sample loglik + ln xmin, in terms of alpha and rho = ln(xmin/lam)."""
    r = np.exp(rho)
    return -alpha * mlog - r * mlin - log_expint(alpha, r)


@dataclass
class _BatchFit:
    alpha: np.ndarray
    rho: np.ndarray
    f: np.ndarray
    converged: np.ndarray
    iterations: np.ndarray


def _fit_batch(mlog, mlin, n, rho_lo, rho_hi, alpha_bounds=(0.1, 5.0), grid=12,
               loglik_tol=1e-6, max_iter=100):
    """Maximize the cutoff power-law likelihood for a batch of samples.

    A coarse (alpha, rho) grid picks the start; projected Newton steps with
    central-difference derivatives and backtracking refine it. The problem is
    concave in (alpha, 1/lam), so the box-constrained stationary point found
    is the global maximum.
    """
    mlog, mlin, n = (np.asarray(v, dtype=float) for v in (mlog, mlin, n))
    rho_lo, rho_hi = np.asarray(rho_lo, float), np.asarray(rho_hi, float)
    B = mlog.size
    a_lo, a_hi = alpha_bounds

    # coarse grid
    ga = np.linspace(a_lo, a_hi, grid)
    u = np.linspace(0.0, 1.0, grid)
    A = np.broadcast_to(ga[None, :, None], (B, grid, grid))
    R = np.broadcast_to(rho_lo[:, None, None] + (rho_hi - rho_lo)[:, None, None] * u[None, None, :],
                        (B, grid, grid))
    F = _objective(A, R, mlog[:, None, None], mlin[:, None, None]).reshape(B, -1)
    best = np.argmax(F, axis=1)
    alpha = ga[best // grid].copy()
    rho = R.reshape(B, -1)[np.arange(B), best].copy()
    f = F[np.arange(B), best].copy()

    converged = np.zeros(B, dtype=bool)
    iters = np.zeros(B, dtype=np.int64)
    active = np.arange(B)
    h = 1e-4
    fine_tol = loglik_tol * 1e-3
    da = np.array([0, h, -h, 0, 0, h, -h, h, -h])
    dr = np.array([0, 0, 0, h, -h, h, -h, -h, h])
    for _ in range(max_iter):
        if active.size == 0:
            break
        a0, r0 = alpha[active], rho[active]
        ml, mn, nn = mlog[active], mlin[active], n[active]
        S = _objective(a0[:, None] + da, r0[:, None] + dr, ml[:, None], mn[:, None])
        f0 = S[:, 0]
        ga_ = (S[:, 1] - S[:, 2]) / (2 * h)
        gr_ = (S[:, 3] - S[:, 4]) / (2 * h)
        haa = (S[:, 1] - 2 * f0 + S[:, 2]) / h**2
        hrr = (S[:, 3] - 2 * f0 + S[:, 4]) / h**2
        har = (S[:, 5] + S[:, 6] - S[:, 7] - S[:, 8]) / (4 * h**2)

        lo_a, hi_a = a0 <= a_lo + 1e-12, a0 >= a_hi - 1e-12
        lo_r, hi_r = r0 <= rho_lo[active] + 1e-12, r0 >= rho_hi[active] - 1e-12
        free_a = ~((lo_a & (ga_ < 0)) | (hi_a & (ga_ > 0)))
        free_r = ~((lo_r & (gr_ < 0)) | (hi_r & (gr_ > 0)))
        ga_ = np.where(free_a, ga_, 0.0)
        gr_ = np.where(free_r, gr_, 0.0)
        har = np.where(free_a & free_r, har, 0.0)
        haa = np.where(free_a, haa, -1.0)
        hrr = np.where(free_r, hrr, -1.0)

        # shift the Hessian until negative definite
        tr, det = haa + hrr, haa * hrr - har**2
        lam_max = tr / 2 + np.sqrt(np.maximum((tr / 2) ** 2 - det, 0.0))
        eps = 1e-8 * (1.0 + np.abs(haa) + np.abs(hrr))
        shift = np.maximum(0.0, lam_max + eps)
        Haa, Hrr = haa - shift, hrr - shift
        det = Haa * Hrr - har**2
        sa = -(Hrr * ga_ - har * gr_) / det
        sr = -(-har * ga_ + Haa * gr_) / det
        gain = 0.5 * (ga_ * sa + gr_ * sr) * nn
        done = gain < fine_tol
        converged[active[done]] = True
        scale = np.minimum(1.0, np.minimum(0.5 / np.maximum(np.abs(sa), 1e-300),
                                           2.0 / np.maximum(np.abs(sr), 1e-300)))
        sa, sr = sa * scale, sr * scale

        step = ~done
        t = np.ones(active.size)
        moved = np.zeros(active.size, dtype=bool)
        for _ls in range(30):
            pend = step & ~moved
            if not pend.any():
                break
            idx = np.flatnonzero(pend)
            gi = active[idx]
            na = np.clip(a0[idx] + t[idx] * sa[idx], a_lo, a_hi)
            nr = np.clip(r0[idx] + t[idx] * sr[idx], rho_lo[gi], rho_hi[gi])
            fn = _objective(na, nr, ml[idx], mn[idx])
            ok = fn >= f0[idx]
            ok_idx = idx[ok]
            alpha[active[ok_idx]] = na[ok]
            rho[active[ok_idx]] = nr[ok]
            f[active[ok_idx]] = fn[ok]
            moved[ok_idx] = True
            t[idx[~ok]] *= 0.5
        iters[active] += 1
        stuck = step & ~moved
        # no ascent possible along the Newton direction: treat as converged
        # when the remaining predicted gain is within tolerance
        converged[active[stuck]] = gain[stuck] < loglik_tol
        tiny = moved & ((f[active] - f0) * nn < fine_tol * 1e-3) & (gain < loglik_tol)
        converged[active[tiny]] = True
        active = active[step & moved & ~tiny]
    return _BatchFit(alpha, rho, f, converged, iters)


def _rho_bounds(xmin, gmax, cfg):
    lam_lo = xmin * cfg.lambda_lo_factor
    lam_hi = np.maximum(gmax * cfg.lambda_hi_factor, xmin * cfg.lambda_lo_factor * 1.0001)
    return np.log(xmin / lam_hi), np.log(xmin / lam_lo)


def _bound_flags(alpha, rho, rho_lo, rho_hi, cfg):
    flags = []
    a_lo, a_hi = cfg.alpha_bounds
    if alpha <= a_lo + 1e-9:
        flags.append("alpha_lo")
    if alpha >= a_hi - 1e-9:
        flags.append("alpha_hi")
    if rho >= rho_hi - 1e-9:
        flags.append("lambda_lo")
    if rho <= rho_lo + 1e-9:
        flags.append("lambda_hi")
    return tuple(flags)


def _pareto_results(g_stats, xmin, cfg):
    n, mlog, mlin, gmax, gmin = g_stats
    rho_lo, rho_hi = _rho_bounds(xmin, gmax, cfg)
    bf = _fit_batch(mlog, mlin, n, rho_lo, rho_hi, cfg.alpha_bounds, cfg.grid,
                    cfg.loglik_tol, cfg.max_iter)
    loglik = n * (bf.f - np.log(xmin))
    lam = xmin / np.exp(bf.rho)
    return bf, loglik, lam, rho_lo, rho_hi


def fit_pareto_cutoff(sample, xmin=None, cfg: InterEventConfig = InterEventConfig()) -> FitResult:
    """Maximum-likelihood cutoff power law on [xmin, inf).

    ``xmin`` defaults to the smallest gap. Alpha is searched on
    ``cfg.alpha_bounds`` and lam on [xmin * lambda_lo_factor,
    max gap * lambda_hi_factor]; parameters finishing on a bound are listed
    in ``at_bound``.
    """
    g = _gaps_of(sample)
    if g.size < 5:
        raise ValueError("cutoff power-law fit needs at least 5 gaps")
    xmin = float(g.min()) if xmin is None else float(xmin)
    if (g < xmin).any():
        raise ValueError("gaps below xmin")
    u = g / xmin
    stats = (np.array([g.size]), np.array([np.log(u).mean()]), np.array([u.mean()]),
             np.array([g.max()]), np.array([g.min()]))
    bf, loglik, lam, rho_lo, rho_hi = _pareto_results(stats, np.array([xmin]), cfg)
    return FitResult(
        PARETO, float(loglik[0]), int(g.size), alpha=float(bf.alpha[0]), lam=float(lam[0]),
        xmin=xmin, converged=bool(bf.converged[0]),
        at_bound=_bound_flags(bf.alpha[0], bf.rho[0], rho_lo[0], rho_hi[0], cfg),
        degenerate=bool(g.max() == g.min()))


def pareto_loglik(gaps, alpha, lam, xmin):
    """Log-likelihood of the cutoff power law at fixed parameters."""
    g = np.asarray(gaps, dtype=float)
    r = xmin / lam
    return float(-alpha * np.log(g).sum() - g.sum() / lam
                 - g.size * ((1 - alpha) * math.log(xmin) + log_expint(alpha, r)))


def select_model(fit_exp: FitResult, fit_pareto: FitResult) -> FitResult:
    """Minimum AIC; an exact tie goes to the exponential."""
    if fit_exp.n != fit_pareto.n:
        raise ValueError("fits were made on different samples")
    return fit_pareto if fit_pareto.aic < fit_exp.aic else fit_exp


# -- goodness of fit -------------------------------------------------------

def _pareto_sf(t, alpha, lam, xmin):
    t = np.asarray(t, dtype=float)
    ls = ((1 - alpha) * np.log(t / xmin) + log_expint(alpha, t / lam)
          - log_expint(alpha, xmin / lam))
    return np.exp(np.minimum(ls, 0.0))


def model_cdf(fit: FitResult, t):
    t = np.asarray(t, dtype=float)
    if fit.model == EXPONENTIAL:
        return -np.expm1(-fit.mu * t)
    out = np.zeros_like(t)
    above = t > fit.xmin
    out[above] = 1.0 - _pareto_sf(t[above], fit.alpha, fit.lam, fit.xmin)
    return out


def _ks_rows(x_sorted, cdf):
    """Two-sided K-S distance per row of sorted samples and their model CDF."""
    n = x_sorted.shape[-1]
    i = np.arange(1, n + 1)
    return np.maximum((i / n - cdf).max(axis=-1), (cdf - (i - 1) / n).max(axis=-1))


def ks_distance(gaps, fit: FitResult) -> float:
    x = np.sort(_gaps_of(gaps))
    return float(_ks_rows(x, model_cdf(fit, x)))


def discretize(draws, resolution, rng):
    """Mimic integer timestamps: floor cumulative event times, clamp gaps.

    ``draws`` has one replicate per row. A uniform random phase is added
    so that the floor is not aligned with the first event.
    """
    B, n = draws.shape
    phase = rng.random((B, 1)) * resolution
    pts = np.concatenate([phase, phase + np.cumsum(draws, axis=1)], axis=1)
    ticks = np.floor(pts / resolution)
    return np.maximum(np.diff(ticks, axis=1) * resolution, resolution)


def bootstrap_distances(fit: FitResult, n, n_bootstrap, rng, resolution=None,
                        cfg: InterEventConfig = InterEventConfig()):
    """K-S distances of ``n_bootstrap`` samples drawn from ``fit`` and refitted."""
    if n_bootstrap <= 0:
        raise ValueError("n_bootstrap must be positive")
    B = int(n_bootstrap)
    if fit.model == EXPONENTIAL:
        draws = -np.log(1.0 - rng.random((B, n))) / fit.mu
    else:
        draws = sample_cutoff_gaps(rng, B * n, fit.alpha, fit.lam, fit.xmin).reshape(B, n)
    if resolution:
        draws = discretize(draws, resolution, rng)
    x = np.sort(draws, axis=1)
    if fit.model == EXPONENTIAL:
        mu = 1.0 / x.mean(axis=1)
        cdf = -np.expm1(-mu[:, None] * x)
    else:
        xmin = fit.xmin
        u = x / xmin
        stats = (np.full(B, float(n)), np.log(u).mean(axis=1), u.mean(axis=1),
                 x[:, -1], x[:, 0])
        bf, _, lam, _, _ = _pareto_results(stats, np.full(B, xmin), cfg)
        cdf = np.zeros_like(x)
        above = x > xmin
        rows = np.broadcast_to(np.arange(B)[:, None], x.shape)[above]
        cdf[above] = 1.0 - _pareto_sf(x[above], bf.alpha[rows], lam[rows], xmin)
    return _ks_rows(x, cdf)


def ks_pvalue(ks_stat, distances) -> float:
    return float(np.mean(np.asarray(distances) >= ks_stat))


def ks_test(sample, fit: FitResult, n_bootstrap=1000, seed=0, resolution=None,
            cfg: InterEventConfig = InterEventConfig()):
    """Bootstrap Kolmogorov-Smirnov test of ``fit`` against ``sample``.

    The p-value is the fraction of parametric resamples (drawn from the
    fitted model, refitted, and discretized to ``resolution`` when given)
    whose distance is at least the observed one.

    Returns:
        (ks_stat, ks_p)
    """
    if n_bootstrap <= 0:
        raise ValueError("n_bootstrap must be positive")
    g = _gaps_of(sample)
    node = sample.node if isinstance(sample, InterEventSample) else 0
    d = ks_distance(g, fit)
    rng = np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(3, max(node, 0))))
    dist = bootstrap_distances(fit, g.size, n_bootstrap, rng, resolution, cfg)
    return d, ks_pvalue(d, dist)


# -- population pipeline ---------------------------------------------------

@dataclass
class PopulationFit:
    """Per-node fits for every node passing the degree filter, ordered by id."""

    node: np.ndarray
    final_degree: np.ndarray
    age_weeks: np.ndarray
    n_gaps: np.ndarray
    mu: np.ndarray
    loglik_exp: np.ndarray
    alpha: np.ndarray
    lam: np.ndarray
    xmin: np.ndarray
    loglik_pareto: np.ndarray
    converged: np.ndarray
    at_bound: list
    ks_stat: np.ndarray
    ks_p: np.ndarray
    cfg: InterEventConfig = field(default_factory=InterEventConfig)

    @property
    def aic_exp(self):
        return 2 - 2 * self.loglik_exp

    @property
    def aic_pareto(self):
        return 4 - 2 * self.loglik_pareto

    @property
    def pareto_selected(self):
        return self.converged & (self.aic_pareto < self.aic_exp)

    @property
    def model(self):
        return np.where(self.pareto_selected, PARETO, EXPONENTIAL)

    @property
    def retained(self):
        return self.ks_p >= self.cfg.ks_level

    def fit(self, i) -> FitResult:
        if self.pareto_selected[i]:
            return FitResult(PARETO, float(self.loglik_pareto[i]), int(self.n_gaps[i]),
                             alpha=float(self.alpha[i]), lam=float(self.lam[i]),
                             xmin=float(self.xmin[i]), ks_stat=float(self.ks_stat[i]),
                             ks_p=float(self.ks_p[i]), at_bound=self.at_bound[i])
        return FitResult(EXPONENTIAL, float(self.loglik_exp[i]), int(self.n_gaps[i]),
                         mu=float(self.mu[i]), ks_stat=float(self.ks_stat[i]),
                         ks_p=float(self.ks_p[i]))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "node": self.node, "model": self.model, "alpha": self.alpha, "lambda": self.lam,
            "mu": self.mu, "aic_exp": self.aic_exp, "aic_pareto": self.aic_pareto,
            "ks_stat": self.ks_stat, "ks_p": self.ks_p, "final_degree": self.final_degree,
            "age_weeks": self.age_weeks})


def _group_gaps(nodes, offsets, ts, degree_mask, resolution):
    """Flat gaps of the selected nodes plus their CSR offsets."""
    sel = np.flatnonzero(degree_mask)
    counts = np.diff(offsets)[sel] - 1
    goff = np.concatenate([[0], np.cumsum(counts)])
    # gap j of node k is ts[offsets[k] + j + 1] - ts[offsets[k] + j]
    row = np.repeat(np.arange(sel.size), counts)
    within = np.arange(goff[-1]) - goff[row]
    base = offsets[sel][row] + within
    gaps = (ts[base + 1] - ts[base]).astype(float)
    if resolution:
        gaps = np.maximum(gaps, resolution)
    return sel, goff, row, gaps


def fit_samples(samples, cfg: InterEventConfig = InterEventConfig(), seed=None,
                chunk=4096) -> PopulationFit:
    """Fit both models to every sample, select, and compute K-S statistics.

    Bootstrap p-values are computed when ``seed`` is given, for all samples
    or the first ``cfg.bootstrap_nodes`` of them.
    """
    samples = list(samples)
    counts = np.array([s.gaps.size for s in samples], dtype=np.int64)
    goff = np.concatenate([[0], np.cumsum(counts)])
    gaps = np.concatenate([s.gaps for s in samples]) if samples else np.empty(0)
    return _fit_flat(np.array([s.node for s in samples], dtype=np.int64),
                     np.array([s.final_degree for s in samples], dtype=np.int64),
                     np.array([s.age_weeks for s in samples], dtype=np.int64),
                     goff, gaps, cfg, seed, chunk)


def _fit_flat(node, degree, age, goff, gaps, cfg, seed, chunk=4096):
    K = node.size
    counts = np.diff(goff)
    if K and counts.min() < 5:
        raise ValueError("every sample needs at least 5 gaps")
    if cfg.pareto_xmin not in ("resolution", "min"):
        raise ValueError(f"unknown pareto_xmin rule {cfg.pareto_xmin!r}")

    mu = np.empty(K)
    loglik_exp = np.empty(K)
    alpha = np.empty(K)
    lam = np.empty(K)
    xmin = np.empty(K)
    loglik_p = np.empty(K)
    conv = np.empty(K, dtype=bool)
    ks_stat = np.empty(K)
    flags = []
    # node chunks keep the per-gap temporaries small on large traces
    for lo in range(0, K, chunk):
        hi = min(lo + chunk, K)
        g = gaps[goff[lo]:goff[hi]]
        off = goff[lo:hi + 1] - goff[lo]
        n = counts[lo:hi]
        row = np.repeat(np.arange(hi - lo), n)
        mu_c = n / np.bincount(row, weights=g, minlength=hi - lo)
        if cfg.pareto_xmin == "resolution":
            xm = np.full(hi - lo, float(cfg.resolution))
        else:
            xm = np.minimum.reduceat(g, off[:-1])
        u = g / xm[row]
        if (u < 1).any():
            raise ValueError("gaps below the cutoff power law's xmin")
        stats = (n.astype(float), np.bincount(row, weights=np.log(u)) / n,
                 np.bincount(row, weights=u) / n,
                 np.maximum.reduceat(g, off[:-1]), np.minimum.reduceat(g, off[:-1]))
        bf, ll, lm, rlo, rhi = _pareto_results(stats, xm, cfg)
        s = slice(lo, hi)
        mu[s], loglik_exp[s], xmin[s] = mu_c, n * np.log(mu_c) - n, xm
        alpha[s], lam[s], loglik_p[s], conv[s] = bf.alpha, lm, ll, bf.converged
        flags.extend(_bound_flags(a, r, l, h, cfg) for a, r, l, h in zip(bf.alpha, bf.rho, rlo, rhi))

        # K-S distance of the model AIC selects (same rule as pareto_selected)
        pick = conv[s] & (4 - 2 * ll < 2 - 2 * loglik_exp[s])
        xs = g[np.lexsort((g, row))]
        cdf = -np.expm1(-mu_c[row] * xs)
        pr = pick[row]
        if pr.any():
            r = row[pr]
            x = xs[pr]
            cdf[pr] = 1.0 - np.where(x > xm[r], _pareto_sf(np.maximum(x, xm[r]), bf.alpha[r],
                                                           lm[r], xm[r]), 1.0)
        rank = np.arange(g.size) - off[row] + 1
        nn = n[row]
        dev = np.maximum(rank / nn - cdf, cdf - (rank - 1) / nn)
        ks_stat[s] = np.maximum.reduceat(dev, off[:-1])

    pop = PopulationFit(node, degree, age, counts, mu, loglik_exp, alpha, lam, xmin, loglik_p,
                        conv, flags, ks_stat, np.full(K, np.nan), cfg)

    if seed is not None and K:
        if cfg.n_bootstrap <= 0:
            raise ValueError("n_bootstrap must be positive")
        n_boot = K if cfg.bootstrap_nodes is None else min(K, cfg.bootstrap_nodes)

        def one(i):
            fit = pop.fit(i)
            rng = np.random.default_rng(
                np.random.SeedSequence(int(seed), spawn_key=(3, int(node[i]))))
            dist = bootstrap_distances(fit, int(counts[i]), cfg.n_bootstrap, rng,
                                       cfg.resolution, cfg)
            return ks_pvalue(pop.ks_stat[i], dist)

        with ThreadPoolExecutor(max_workers=max(1, cfg.threads)) as ex:
            pvals = list(ex.map(one, range(n_boot)))
        pop.ks_p[:n_boot] = pvals
    return pop


def fit_population(trace: Trace, series, cfg: InterEventConfig = InterEventConfig(),
                   seed=None) -> PopulationFit:
    """Inter-event fits for every node of a trace with final degree >= min_degree."""
    nodes, offsets, ts = node_event_times(trace)
    degree = np.diff(offsets)
    keep = degree >= max(cfg.min_degree, 6)
    sel, goff, _, gaps = _group_gaps(nodes, offsets, ts, keep, cfg.resolution)
    idx = np.searchsorted(series.nodes, nodes[sel])
    age = series.T - series.join_week[idx]
    return _fit_flat(nodes[sel], degree[sel], age, goff, gaps, cfg, seed)


# -- exponent summaries ----------------------------------------------------

def alpha_distribution(alphas, bin_width=0.05):
    """Histogram of exponents on bins [k*w, (k+1)*w); returns (left_edges, counts).

    Bins run contiguously from the lowest to the highest occupied bin.
    """
    a = np.asarray(alphas, dtype=float)
    if a.size == 0:
        raise ValueError("no exponents to histogram")
    k = np.floor(a / bin_width + 1e-9).astype(np.int64)
    ks = np.arange(k.min(), k.max() + 1)
    counts = np.bincount(k - k.min(), minlength=ks.size)
    return np.round(ks * bin_width, 10), counts


def alpha_vs_covariate(alphas, covariate, bin_width):
    """Mean, median, population std and count of exponents per covariate bin."""
    return binned_stats(covariate, alphas, bin_width)


def retained_pareto(pop: PopulationFit):
    """Mask of nodes that select the cutoff power law and pass the K-S test."""
    return pop.pareto_selected & pop.retained
