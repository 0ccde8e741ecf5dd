"""Edge-creation traces: parsing, validation, and weekly per-node binning.

A trace is a text edge list, one ``src SEP dst SEP ts`` line per created
undirected edge, with SEP a tab or a comma and ``#`` comment lines. Events
are held columnar (three int64 arrays) because realistic traces carry
millions of events; :class:`EdgeEvent` objects are produced on demand.
"""
from __future__ import annotations

import gzip
import io
import os
import re
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np
import pandas as pd

WEEK_SECONDS = 604800


class TraceError(ValueError):
    """Base class for trace validation failures."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyTraceError(TraceError):
    pass


class MalformedLineError(TraceError):
    pass


class SelfLoopError(TraceError):
    pass


class DuplicateEdgeError(TraceError):
    pass


class EdgeEvent(NamedTuple):
    src: int
    dst: int
    ts: int


@dataclass(frozen=True, eq=False)
class Trace:
    """Validated edge events sorted by (ts, src, dst)."""

    src: np.ndarray
    dst: np.ndarray
    ts: np.ndarray

    @property
    def m(self) -> int:
        return int(self.ts.size)

    @property
    def epoch(self) -> int:
        return int(self.ts[0])

    @property
    def nodes(self) -> np.ndarray:
        return np.unique(np.concatenate([self.src, self.dst]))

    @property
    def N(self) -> int:
        return int(self.nodes.size)

    @property
    def T(self) -> int:
        return week_index(self.ts[-1], self.epoch)

    @property
    def events(self) -> list[EdgeEvent]:
        return list(iter(self))

    def __len__(self):
        return self.m

    def __iter__(self) -> Iterator[EdgeEvent]:
        for s, d, t in zip(self.src.tolist(), self.dst.tolist(), self.ts.tolist()):
            yield EdgeEvent(s, d, t)

    def __eq__(self, other):
        if not isinstance(other, Trace):
            return NotImplemented
        return (np.array_equal(self.src, other.src)
                and np.array_equal(self.dst, other.dst)
                and np.array_equal(self.ts, other.ts))

    def shifted(self, seconds: int) -> "Trace":
        return Trace(self.src, self.dst, self.ts + seconds)

    @classmethod
    def from_events(cls, events) -> "Trace":
        arr = np.asarray([tuple(e) for e in events], dtype=np.int64).reshape(-1, 3)
        return _validated(arr[:, 0], arr[:, 1], arr[:, 2])


def week_index(ts, epoch, dt_seconds=WEEK_SECONDS):
    """Epoch-relative bin index, floor((ts - epoch) / dt_seconds)."""
    return (np.asarray(ts) - epoch) // dt_seconds if np.ndim(ts) else int((ts - epoch) // dt_seconds)


def _read_bytes(source) -> bytes:
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    elif isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as f:
            data = f.read()
    else:
        data = source.read()
        if isinstance(data, str):
            data = data.encode()
    if data[:2] == b"\x1f\x8b":
        data = gzip.decompress(data)
    return data


def _detect_sep(data: bytes, fmt) -> str:
    if fmt in ("tab", "tsv", "\t"):
        return "\t"
    if fmt in ("comma", "csv", ","):
        return ","
    if fmt not in (None, "auto"):
        raise ValueError(f"unknown trace format {fmt!r}")
    for raw in data.splitlines():
        line = raw.strip()
        if line and not line.startswith(b"#"):
            return "," if b"," in line and b"\t" not in line else "\t"
    return "\t"


def _slow_parse(data: bytes, sep: str):
    """Line-by-line parse; slow, but reports exact line numbers."""
    bsep = sep.encode()
    rows = []
    seen = {}
    for lineno, raw in enumerate(data.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(b"#"):
            continue
        parts = line.split(bsep)
        if len(parts) != 3:
            raise MalformedLineError(f"expected 3 fields, got {len(parts)}", lineno)
        try:
            s, d, t = (int(p.strip()) for p in parts)
        except ValueError:
            raise MalformedLineError(f"non-integer field in {raw!r}", lineno) from None
        if s < 0 or d < 0:
            raise MalformedLineError("node ids must be non-negative", lineno)
        if t < 0:
            raise MalformedLineError("timestamps must be non-negative", lineno)
        if s == d:
            raise SelfLoopError(f"self-loop on node {s}", lineno)
        key = (min(s, d), max(s, d))
        if key in seen:
            raise DuplicateEdgeError(
                f"edge {key} already created on line {seen[key]}", lineno)
        seen[key] = lineno
        rows.append((s, d, t))
    return rows


def _duplicate_mask(src, dst):
    lo = np.minimum(src, dst)
    hi = np.maximum(src, dst)
    order = np.lexsort((hi, lo))
    lo_s, hi_s = lo[order], hi[order]
    same = (lo_s[1:] == lo_s[:-1]) & (hi_s[1:] == hi_s[:-1])
    return same.any()


def _validated(src, dst, ts) -> Trace:
    if ts.size == 0:
        raise EmptyTraceError("empty trace: no events")
    if (src < 0).any() or (dst < 0).any() or (ts < 0).any():
        raise MalformedLineError("negative node id or timestamp")
    loops = np.flatnonzero(src == dst)
    if loops.size:
        raise SelfLoopError(f"self-loop on node {src[loops[0]]}")
    if _duplicate_mask(src, dst):
        raise DuplicateEdgeError("duplicate undirected edge")
    order = np.lexsort((dst, src, ts))
    return Trace(np.ascontiguousarray(src[order]), np.ascontiguousarray(dst[order]),
                 np.ascontiguousarray(ts[order]))


# a '#' anywhere but at the start of a line sends parsing to the slow path
_MIDLINE_HASH = re.compile(rb"[^\n]#")


def parse_trace(source, fmt="auto") -> Trace:
    """Parse a (possibly gzip-compressed) edge list into a sorted Trace.

    Args:
        source: path, bytes, or binary/text stream.
        fmt: ``"tab"``, ``"comma"`` or ``"auto"`` (sniffed from the first
            data line).

    Raises:
        EmptyTraceError, MalformedLineError, SelfLoopError,
        DuplicateEdgeError. Errors carry the offending line number where
        one exists.
    """
    data = _read_bytes(source)
    sep = _detect_sep(data, fmt)
    arr = None
    if not _MIDLINE_HASH.search(data):
        try:
            df = pd.read_csv(io.BytesIO(data), sep=sep, header=None, comment="#",
                             names=["src", "dst", "ts"], dtype=np.int64,
                             engine="c", skipinitialspace=True)
            arr = df.to_numpy()
        except (ValueError, pd.errors.ParserError, pd.errors.EmptyDataError):
            arr = None
    if arr is not None and arr.shape[0] == 0:
        raise EmptyTraceError("empty trace: no events")
    if arr is None or _needs_line_numbers(arr):
        rows = _slow_parse(data, sep)
        if not rows:
            raise EmptyTraceError("empty trace: no events")
        arr = np.asarray(rows, dtype=np.int64)
    return _validated(arr[:, 0], arr[:, 1], arr[:, 2])


def _needs_line_numbers(arr) -> bool:
    src, dst, ts = arr[:, 0], arr[:, 1], arr[:, 2]
    return bool((arr < 0).any() or (src == dst).any() or _duplicate_mask(src, dst))


def read_trace(path, fmt="auto") -> Trace:
    return parse_trace(path, fmt)


def format_trace(trace: Trace, sep="\t") -> bytes:
    """Serialize a trace to the edge-list text format, one line per event."""
    chunk = 500_000
    parts = []
    for lo in range(0, trace.m, chunk):
        s = slice(lo, lo + chunk)
        rows = zip(trace.src[s].tolist(), trace.dst[s].tolist(), trace.ts[s].tolist())
        parts.append("".join(f"{a}{sep}{b}{sep}{t}\n" for a, b, t in rows).encode())
    return b"".join(parts)


def write_trace(trace: Trace, dest, sep="\t"):
    payload = format_trace(trace, sep)
    if isinstance(dest, (str, os.PathLike)):
        opener = gzip.open if str(dest).endswith(".gz") else open
        with opener(dest, "wb") as f:
            f.write(payload)
    else:
        dest.write(payload)


@dataclass(frozen=True)
class NodeSeries:
    node: int
    join_week: int
    n: np.ndarray       # weekly new-link counts, weeks join_week..T
    T: int

    @property
    def life(self) -> int:
        return self.T - self.join_week + 1

    @property
    def degree(self) -> np.ndarray:
        return np.cumsum(self.n)

    @property
    def final_degree(self) -> int:
        return int(self.n.sum())

    @property
    def weeks(self) -> np.ndarray:
        return np.arange(self.join_week, self.T + 1)


@dataclass(frozen=True, eq=False)
class NodeSeriesSet:
    """All node series in CSR layout: node i owns ``n[offsets[i]:offsets[i+1]]``.

    Nodes are ordered by id; every node's block runs from its join week to
    the shared last week ``T``.
    """

    nodes: np.ndarray
    join_week: np.ndarray
    offsets: np.ndarray
    n: np.ndarray
    T: int

    def __len__(self):
        return int(self.nodes.size)

    def __iter__(self) -> Iterator[NodeSeries]:
        for i in range(len(self)):
            yield self.series(i)

    def series(self, i) -> NodeSeries:
        lo, hi = self.offsets[i], self.offsets[i + 1]
        return NodeSeries(int(self.nodes[i]), int(self.join_week[i]), self.n[lo:hi], self.T)

    def get(self, node) -> NodeSeries:
        i = int(np.searchsorted(self.nodes, node))
        if i >= len(self) or self.nodes[i] != node:
            raise KeyError(node)
        return self.series(i)

    @property
    def life(self) -> np.ndarray:
        return self.T - self.join_week + 1

    @property
    def final_degree(self) -> np.ndarray:
        return np.add.reduceat(self.n, self.offsets[:-1])

    @property
    def row(self) -> np.ndarray:
        """Owning node position for every flat week entry."""
        return np.repeat(np.arange(len(self)), self.life)

    @property
    def week(self) -> np.ndarray:
        row = self.row
        return self.join_week[row] + (np.arange(self.n.size) - self.offsets[row])

    @property
    def age(self) -> np.ndarray:
        row = self.row
        return np.arange(self.n.size) - self.offsets[row]

    @classmethod
    def from_series(cls, series) -> "NodeSeriesSet":
        series = sorted(series, key=lambda s: s.node)
        T = max(s.T for s in series)
        if any(s.T != T for s in series):
            raise ValueError("all series must end at the same week")
        life = np.array([s.life for s in series], dtype=np.int64)
        offsets = np.concatenate([[0], np.cumsum(life)])
        return cls(np.array([s.node for s in series], dtype=np.int64),
                   np.array([s.join_week for s in series], dtype=np.int64),
                   offsets, np.concatenate([np.asarray(s.n, dtype=np.int64) for s in series]), T)


def build_node_series(trace: Trace, dt_seconds: int = WEEK_SECONDS, epoch=None) -> NodeSeriesSet:
    """Bin every node's incident events into fixed-width time bins.

    Each event counts once at both endpoints. Bins are global, anchored at
    ``epoch`` (defaults to the trace's first timestamp); a node's series
    starts at its first non-empty bin and ends at the trace's last bin.
    """
    if dt_seconds <= 0:
        raise ValueError("dt_seconds must be positive")
    if trace.m == 0:
        raise EmptyTraceError("empty trace: no events")
    epoch = trace.epoch if epoch is None else epoch
    week = (trace.ts - epoch) // dt_seconds
    if (week < 0).any():
        raise ValueError("epoch is later than the first event")
    T = int(week[-1])
    ends = np.concatenate([trace.src, trace.dst])
    weeks = np.concatenate([week, week])
    nodes, inv = np.unique(ends, return_inverse=True)
    join = np.full(nodes.size, T, dtype=np.int64)
    np.minimum.at(join, inv, weeks)
    life = T - join + 1
    offsets = np.concatenate([[0], np.cumsum(life)])
    counts = np.bincount(offsets[inv] + (weeks - join[inv]), minlength=int(offsets[-1]))
    return NodeSeriesSet(nodes, join, offsets, counts.astype(np.int64), T)


def node_event_times(trace: Trace):
    """Group incident timestamps by node: (nodes, offsets, ts) in CSR form."""
    ends = np.concatenate([trace.src, trace.dst])
    ts = np.concatenate([trace.ts, trace.ts])
    order = np.lexsort((ts, ends))
    ends, ts = ends[order], ts[order]
    nodes, start = np.unique(ends, return_index=True)
    offsets = np.concatenate([start, [ends.size]])
    return nodes, offsets, ts
