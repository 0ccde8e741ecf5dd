"""Time-share and edge-share statistics of the four phases."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .phases import PHASE_NAMES, Phase, TimelineSet

N_PHASES = len(Phase)


def quantile(values, q) -> float:
    """Nearest-rank quantile: the ceil(q*n)-th smallest value (1-based)."""
    x = np.sort(np.asarray(values, dtype=float).ravel())
    if x.size == 0:
        raise ValueError("quantile of an empty sample")
    if not 0 < q < 1:
        raise ValueError("q must lie strictly between 0 and 1")
    # round before ceil so that e.g. 0.7 * 10 lands on rank 7, not 8
    rank = max(1, math.ceil(round(q * x.size, 9)))
    return float(x[rank - 1])


def _per_node_sums(timelines: TimelineSet):
    ser = timelines.series
    row = ser.row
    key = row * N_PHASES + timelines.s.astype(np.int64)
    size = len(ser) * N_PHASES
    weeks = np.bincount(key, minlength=size).reshape(-1, N_PHASES)
    edges = np.bincount(key, weights=ser.n, minlength=size).reshape(-1, N_PHASES)
    return weeks, edges


def node_shares(timelines: TimelineSet):
    """Per-node fractions of life (psi_l) and of own edges (psi_e) in each phase.

    Returns two (n_nodes, 4) arrays, columns ordered acc, dec, cruise, inact.
    """
    weeks, edges = _per_node_sums(timelines)
    life = timelines.series.life.astype(float)
    degree = timelines.series.final_degree.astype(float)
    if (degree < 1).any():
        raise ValueError("zero-degree node in population")
    return weeks / life[:, None], edges / degree[:, None]


def aggregate_shares(timelines: TimelineSet, m=None):
    """Population fractions of node-weeks (phi_l) and of edge endpoints (phi_e).

    ``m`` defaults to half the total final degree, i.e. the trace's edge count
    when the population is complete.
    """
    ser = timelines.series
    if len(ser) == 0:
        raise ValueError("empty population")
    weeks = np.bincount(timelines.s, minlength=N_PHASES).astype(float)
    edges = np.bincount(timelines.s, weights=ser.n, minlength=N_PHASES)
    two_m = float(ser.n.sum()) if m is None else 2.0 * m
    return weeks / ser.life.sum(), edges / two_m


@dataclass(frozen=True)
class PhaseShares:
    phi_l: dict
    phi_e: dict
    psi_l: np.ndarray       # (n_nodes, 4)
    psi_e: np.ndarray
    psi_l_q80: dict
    psi_e_q80: dict
    nodes: np.ndarray

    def table(self):
        """Rows phi_l, phi_e, psi_l_q80, psi_e_q80 over columns acc..inact."""
        return [("phi_l", self.phi_l), ("phi_e", self.phi_e),
                ("psi_l_q80", self.psi_l_q80), ("psi_e_q80", self.psi_e_q80)]


def _as_dict(vec):
    return {name: float(v) for name, v in zip(PHASE_NAMES, vec)}


def phase_shares(timelines: TimelineSet, psi_mask=None, q=0.8, m=None) -> PhaseShares:
    """Population-wide phi and the psi distributions of the nodes in ``psi_mask``.

    The aggregates always cover every node; the degree filter used for the
    fitting analysis only restricts which nodes enter the psi quantiles.
    """
    phi_l, phi_e = aggregate_shares(timelines, m)
    psi_l, psi_e = node_shares(timelines)
    ser = timelines.series
    if psi_mask is None:
        psi_mask = np.ones(len(ser), dtype=bool)
    if not psi_mask.any():
        raise ValueError("no nodes pass the filter")
    psi_l, psi_e = psi_l[psi_mask], psi_e[psi_mask]
    return PhaseShares(
        phi_l=_as_dict(phi_l), phi_e=_as_dict(phi_e), psi_l=psi_l, psi_e=psi_e,
        psi_l_q80=_as_dict([quantile(psi_l[:, k], q) for k in range(N_PHASES)]),
        psi_e_q80=_as_dict([quantile(psi_e[:, k], q) for k in range(N_PHASES)]),
        nodes=ser.nodes[psi_mask],
    )


def binned_stats(x, values, width, lo=0):
    """Group ``values`` by bins [lo + k*width, lo + (k+1)*width) of ``x``.

    Returns a list of dicts with bin edges, midpoint, count, mean, median and
    population standard deviation; empty bins are omitted.
    """
    x = np.asarray(x, dtype=float)
    values = np.asarray(values, dtype=float)
    k = np.floor((x - lo) / width + 1e-9).astype(np.int64)
    rows = []
    for b in np.unique(k):
        v = values[k == b]
        left = lo + b * width
        rows.append(dict(bin_lo=left, bin_hi=left + width, midpoint=left + width / 2,
                         count=int(v.size), mean=float(v.mean()),
                         median=float(np.median(v)), std=float(v.std())))
    return rows


def cruise_share_vs_degree(timelines: TimelineSet, degree_bin=10, min_degree=0):
    """Mean/median cruise edge share per final-degree bin."""
    _, psi_e = node_shares(timelines)
    degree = timelines.series.final_degree
    keep = degree >= min_degree
    return binned_stats(degree[keep], psi_e[keep, Phase.CRUISE], degree_bin)
