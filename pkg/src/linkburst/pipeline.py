"""Stage orchestration and CSV report emission.

Every stage writes plain CSV with a single header line. Floats are printed
with 12 significant digits, so reruns with the same inputs and seed give
byte-identical files. ``manifest.json`` records the config, the input
digest, per-stage wall-clock time and the digest of every report file.
"""
from __future__ import annotations

import hashlib
import json
import time
import traceback
from pathlib import Path

import numpy as np
import pandas as pd

from . import __version__
from .config import ConfigError, RunConfig
from .interevent import (InterEventConfig, alpha_distribution, alpha_vs_covariate,
                         fit_population, retained_pareto)
from .phases import PHASE_NAMES, PhaseConfig, aging_report, all_transitions, compute_timelines
from .powerlaw import DegenerateSampleError, ccdf, collect_magnitudes, fit_powerlaw
from .shares import cruise_share_vs_degree, phase_shares
from .synth import gen_trace, full_scale_config
from .trace import TraceError, build_node_series, read_trace, write_trace

FLOAT_FORMAT = "%.12g"

STAGES = {
    "ingest-check": ("ingest",),
    "phases": ("ingest", "phases"),
    "stats": ("ingest", "phases", "stats"),
    "fit": ("ingest", "fit"),
    "powerlaw": ("ingest", "phases", "powerlaw"),
    "synth": ("synth",),
    "all": ("ingest", "phases", "stats", "fit", "powerlaw"),
}


class StageError(RuntimeError):
    def __init__(self, stage, exc):
        super().__init__(f"{stage}: {exc}")
        self.stage = stage
        self.exc = exc


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def write_csv(df: pd.DataFrame, path):
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n")


class Run:
    """State shared between stages of one invocation."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.out = Path(cfg.out)
        self.outputs = []
        self.warnings = []
        self.trace = self.series = self.timelines = None

    def emit(self, name, df):
        path = self.out / name
        write_csv(df, path)
        self.outputs.append(name)

    # -- stages --

    def ingest(self):
        cfg = self.cfg
        self.trace = read_trace(cfg.input, cfg.fmt)
        self.series = build_node_series(self.trace, cfg.dt_seconds)
        deg = self.series.final_degree
        self.emit("ingest_summary.csv", pd.DataFrame([dict(
            m=self.trace.m, N=len(self.series), T=self.series.T, epoch=self.trace.epoch,
            dt_seconds=cfg.dt_seconds, sum_final_degree=int(deg.sum()),
            max_final_degree=int(deg.max()), median_final_degree=float(np.median(deg)))]))

    def phases(self):
        cfg = self.cfg
        tl = compute_timelines(self.series, PhaseConfig(cfg.theta1, cfg.theta2))
        self.timelines = tl
        ser = self.series
        row = ser.row
        self.emit("phases.csv", pd.DataFrame({
            "node": ser.nodes[row], "week": ser.week, "n": ser.n, "a": tl.a,
            "phase": np.asarray(PHASE_NAMES)[tl.s]}))
        node, week, s0, s1 = all_transitions(tl)
        names = np.asarray(PHASE_NAMES)
        self.emit("transitions.csv", pd.DataFrame({
            "node": node, "week": week, "from": names[s0], "to": names[s1]}))
        rep = aging_report(tl)
        self.emit("aging_by_week.csv", pd.DataFrame({
            "week": np.arange(ser.T + 1), "n_first_acc": rep.n_first_acc,
            "n_first_dec": rep.n_first_dec, "n_max_acc": rep.n_max_acc,
            "n_max_dec": rep.n_max_dec, "n_acc_or_dec": rep.acc_dec_counts,
            "network_size": rep.network_size}))
        self.emit("aging_by_age.csv", pd.DataFrame({
            "age": np.arange(rep.avg_acc.size), "avg_acc": rep.avg_acc,
            "n_acc_weeks": rep.n_acc_weeks, "avg_dec": rep.avg_dec,
            "n_dec_weeks": rep.n_dec_weeks}))

    def stats(self):
        cfg = self.cfg
        tl = self.timelines
        deg = self.series.final_degree
        for name, mask in (("phase_table_all.csv", None),
                           ("phase_table_min_degree.csv", deg >= cfg.min_degree)):
            if mask is not None and not mask.any():
                self.warnings.append(f"{name}: no node reaches degree {cfg.min_degree}")
                self.emit(name, pd.DataFrame(columns=["statistic", *PHASE_NAMES, "n_nodes"]))
                continue
            ps = phase_shares(tl, mask, m=self.trace.m)
            # phi rows always cover the whole population; psi rows the filtered nodes
            self.emit(name, pd.DataFrame(
                [dict(statistic=k, **v, n_nodes=len(ps.nodes) if k.startswith("psi") else len(deg))
                 for k, v in ps.table()]))
        self.emit("cruise_vs_degree.csv", pd.DataFrame(
            cruise_share_vs_degree(tl, cfg.degree_bin, cfg.min_degree),
            columns=["bin_lo", "bin_hi", "midpoint", "count", "mean", "median", "std"]))

    def fit(self):
        cfg = self.cfg
        icfg = InterEventConfig(min_degree=cfg.min_degree, n_bootstrap=cfg.n_bootstrap,
                                ks_level=cfg.ks_level, bootstrap_nodes=cfg.bootstrap_nodes,
                                threads=cfg.threads)
        pop = fit_population(self.trace, self.series, icfg, seed=cfg.seed)
        self.emit("interevent_fits.csv", pop.to_frame())
        keep = retained_pareto(pop)
        cols = ["bin_lo", "bin_hi", "midpoint", "count", "mean", "median", "std"]
        if keep.any():
            edges, counts = alpha_distribution(pop.alpha[keep], cfg.alpha_bin)
            hist = pd.DataFrame({"bin_lo": edges, "count": counts})
            by_deg = alpha_vs_covariate(pop.alpha[keep], pop.final_degree[keep], cfg.degree_bin)
            by_age = alpha_vs_covariate(pop.alpha[keep], pop.age_weeks[keep], 1)
        else:
            self.warnings.append("no node selects the cutoff power law and passes K-S")
            hist = pd.DataFrame(columns=["bin_lo", "count"])
            by_deg = by_age = []
        self.emit("alpha_histogram.csv", hist)
        self.emit("alpha_vs_degree.csv", pd.DataFrame(by_deg, columns=cols))
        self.emit("alpha_vs_age.csv", pd.DataFrame(by_age, columns=cols))

    def powerlaw(self):
        rows = []
        for kind in ("acc", "dec"):
            try:
                x = collect_magnitudes(self.timelines, kind)
            except ValueError as e:
                self.warnings.append(f"powerlaw {kind}: {e}")
                rows.append(dict(kind=kind, n_samples=0, status=str(e)))
                self.emit(f"ccdf_{kind}.csv", pd.DataFrame(columns=["value", "ccdf", "fitted"]))
                continue
            v, p = ccdf(x)
            fitted = np.full(v.size, np.nan)
            try:
                fit = fit_powerlaw(x)
                above = v >= fit.xmin
                # fitted tail, scaled to the empirical mass above xmin
                fitted[above] = p[above][0] * fit.ccdf(v[above])
                rows.append(dict(kind=kind, n_samples=x.size, alpha=fit.alpha, xmin=fit.xmin,
                                 ks_stat=fit.ks_stat, n_tail=fit.n_tail, status="ok"))
            except (ValueError, DegenerateSampleError) as e:
                self.warnings.append(f"powerlaw {kind}: {e}")
                rows.append(dict(kind=kind, n_samples=x.size, status=str(e)))
            self.emit(f"ccdf_{kind}.csv", pd.DataFrame({"value": v, "ccdf": p, "fitted": fitted}))
        self.emit("powerlaw_fits.csv", pd.DataFrame(
            rows, columns=["kind", "n_samples", "alpha", "xmin", "ks_stat", "n_tail", "status"]))

    def synth(self):
        cfg = self.cfg
        scfg = full_scale_config(cfg.seed, cfg.synth_nodes, cfg.synth_events,
                                  sink_nodes=cfg.synth_sink_nodes)
        trace, truth = gen_trace(scfg)
        write_trace(trace, self.out / "trace.tsv")
        self.outputs.append("trace.tsv")
        self.emit("ground_truth.csv", truth)


def run(subcommand: str, cfg: RunConfig) -> dict:
    """Run a subcommand; returns the manifest. Raises ConfigError or StageError."""
    cfg.validate(subcommand)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    err = out / "error.json"
    if err.exists():
        err.unlink()
    r = Run(cfg)
    timings = {}
    for stage in STAGES[subcommand]:
        t0 = time.perf_counter()
        try:
            getattr(r, stage)()
        except (ConfigError, StageError):
            raise
        except (OSError, ValueError, RuntimeError, TraceError) as e:
            raise StageError(stage, e) from e
        timings[stage] = round(time.perf_counter() - t0, 3)
    manifest = {
        "version": __version__,
        "subcommand": subcommand,
        "config": cfg.to_dict(),
        "input_sha256": sha256_file(cfg.input) if cfg.input and subcommand != "synth" else None,
        "stage_seconds": timings,
        "outputs": {name: sha256_file(out / name) for name in r.outputs},
        "warnings": r.warnings,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest


def error_record(exc, subcommand=None) -> dict:
    inner = exc.exc if isinstance(exc, StageError) else exc
    rec = {
        "subcommand": subcommand,
        "stage": getattr(exc, "stage", "config" if isinstance(exc, ConfigError) else None),
        "error": type(inner).__name__,
        "message": str(inner),
    }
    if getattr(inner, "line", None) is not None:
        rec["line"] = inner.line
    if not isinstance(inner, (ConfigError, TraceError)):
        rec["traceback"] = traceback.format_exception_only(type(inner), inner)[-1].strip()
    return rec
