"""Packet, flow, and window data model plus tumbling-window aggregation.

Traffic is represented either as a sequence of individual ``PacketRecord``
objects or as a column-oriented ``Trace`` (numpy arrays plus a flow-key
table). The columnar form is the fast path for large inputs: aggregation
runs through a compiled kernel when available (``flowsentry._kernels``).
Timestamps are integer microseconds throughout so window membership is exact
integer arithmetic with no float boundary ambiguity.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence, Union

import numpy as np

from . import _kernels
from .errors import ContractError, InvalidParameterError


class Protocol(enum.IntEnum):
    """Transport protocol of a flow. Values follow IANA protocol numbers."""

    OTHER = 0
    TCP = 6
    UDP = 17

    @classmethod
    def parse(cls, text: str) -> "Protocol":
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValueError(
                f"unknown protocol {text!r}; expected TCP, UDP or OTHER"
            ) from None


class FlowKey(NamedTuple):
    """Directed 5-tuple identifying a flow.

    Hashable, and ordered field-wise, so the same tuple always names the same
    flow and sorts identically across runs and backends.
    """

    src: str
    dst: str
    proto: Protocol
    sport: int
    dport: int


class PacketRecord(NamedTuple):
    """One captured packet: microsecond timestamp, owning flow, wire bytes."""

    ts_us: int
    flow: FlowKey
    nbytes: int


class TimeWindow(NamedTuple):
    """Half-open tumbling interval [start, start + delta) in microseconds."""

    start: int
    delta: int

    @property
    def end(self) -> int:
        return self.start + self.delta

    def contains(self, ts_us: int) -> bool:
        return self.start <= ts_us < self.end


@dataclass(frozen=True)
class WindowStats:
    """Aggregate of one window: total bytes, distinct flows, per-flow bytes.

    Internally consistent by construction: volume equals the sum of
    ``per_flow_bytes`` values and flow_count equals its size; construction
    re-checks both.
    """

    window: TimeWindow
    volume_bytes: int
    flow_count: int
    per_flow_bytes: Mapping[FlowKey, int]

    def __post_init__(self):
        if self.volume_bytes != sum(self.per_flow_bytes.values()):
            raise ContractError("volume_bytes does not match per_flow_bytes total")
        if self.flow_count != len(self.per_flow_bytes):
            raise ContractError("flow_count does not match per_flow_bytes size")

    @property
    def active_flows(self) -> frozenset:
        return frozenset(self.per_flow_bytes)


@dataclass
class Trace:
    """Column-oriented packet trace: parallel int64 arrays plus a flow table.

    ``flow_ids[i]`` indexes into ``flows``. Rows are expected to be sorted by
    ``ts_us`` (stable order for equal timestamps); the windowing entry points
    validate that before aggregating.
    """

    ts_us: np.ndarray
    flow_ids: np.ndarray
    nbytes: np.ndarray
    flows: tuple

    def __len__(self) -> int:
        return int(self.ts_us.shape[0])

    def total_bytes(self) -> int:
        return int(self.nbytes.sum()) if len(self) else 0

    def records(self) -> Iterator[PacketRecord]:
        flows = self.flows
        for ts, fid, nb in zip(
            self.ts_us.tolist(), self.flow_ids.tolist(), self.nbytes.tolist()
        ):
            yield PacketRecord(ts, flows[fid], nb)

    @classmethod
    def empty(cls) -> "Trace":
        z = np.empty(0, dtype=np.int64)
        return cls(z, z.copy(), z.copy(), ())

    @classmethod
    def from_records(cls, records: Iterable[PacketRecord]) -> "Trace":
        ts, fids, nb = [], [], []
        table: dict = {}
        for rec in records:
            fid = table.get(rec.flow)
            if fid is None:
                fid = len(table)
                table[rec.flow] = fid
            ts.append(rec.ts_us)
            fids.append(fid)
            nb.append(rec.nbytes)
        return cls(
            np.asarray(ts, dtype=np.int64),
            np.asarray(fids, dtype=np.int64),
            np.asarray(nb, dtype=np.int64),
            tuple(table),
        )

    @classmethod
    def concat(cls, first: "Trace", second: "Trace") -> "Trace":
        """Merge two traces, re-sorting by timestamp (stable, first-then-second
        for ties) and unifying the flow tables."""
        if len(first) == 0:
            return second
        if len(second) == 0:
            return first
        table = {key: i for i, key in enumerate(first.flows)}
        remap = np.empty(len(second.flows), dtype=np.int64)
        for j, key in enumerate(second.flows):
            fid = table.get(key)
            if fid is None:
                fid = len(table)
                table[key] = fid
            remap[j] = fid
        ts = np.concatenate([first.ts_us, second.ts_us])
        fids = np.concatenate([first.flow_ids, remap[second.flow_ids]])
        nb = np.concatenate([first.nbytes, second.nbytes])
        order = np.argsort(ts, kind="stable")
        return cls(ts[order], fids[order], nb[order], tuple(table))


TraceLike = Union[Trace, Sequence[PacketRecord]]


def aggregate_window(trace_slice: Sequence[PacketRecord], window: TimeWindow) -> WindowStats:
    """Aggregate the records of a single window.

    Args:
        trace_slice: packet records, all of which must fall inside ``window``.
        window: the target window.

    Returns:
        WindowStats with total bytes, distinct flow count and per-flow totals.

    Raises:
        ContractError: if any record's timestamp lies outside the window; the
            message names the offending record index.
    """
    per_flow: dict = {}
    volume = 0
    for i, rec in enumerate(trace_slice):
        if not window.contains(rec.ts_us):
            raise ContractError(
                f"record index {i}: timestamp {rec.ts_us} outside window "
                f"[{window.start}, {window.end})"
            )
        per_flow[rec.flow] = per_flow.get(rec.flow, 0) + rec.nbytes
        volume += rec.nbytes
    return WindowStats(window, volume, len(per_flow), per_flow)


def window_stream(trace: TraceLike, delta: int, t0: int = 0) -> list:
    """Tile a trace into tumbling windows and aggregate each one.

    Emits one WindowStats per window of width ``delta`` covering ``t0``
    through the last timestamp inclusive; windows with no packets appear with
    zero stats so downstream consumers see every interval. An empty trace
    yields an empty list.

    Args:
        trace: a ``Trace`` or a sequence of ``PacketRecord`` sorted by
            timestamp, all timestamps >= ``t0``.
        delta: window width in microseconds, > 0.
        t0: start of the first window (microseconds).

    Raises:
        InvalidParameterError: if ``delta`` <= 0.
        ContractError: if the trace is unsorted or reaches back before ``t0``;
            the message names the first offending record index.
    """
    if delta <= 0:
        raise InvalidParameterError(f"delta must be positive, got {delta}")
    ts, fids, nb, flows = _as_columns(trace, t0)
    if ts.shape[0] == 0:
        return []
    n_windows = int((int(ts[-1]) - t0) // delta) + 1
    volumes, maps = _kernels.accumulate_windows(ts, fids, nb, t0, delta, n_windows)
    out = []
    for i in range(n_windows):
        m = maps[i]
        per_flow = {} if m is None else {flows[fid]: b for fid, b in m.items()}
        out.append(
            WindowStats(TimeWindow(t0 + i * delta, delta), volumes[i], len(per_flow), per_flow)
        )
    return out


def _as_columns(trace: TraceLike, t0: int):
    """Columnarize + validate ordering. Returns (ts, flow_ids, nbytes, flows)."""
    if isinstance(trace, Trace):
        ts = np.ascontiguousarray(trace.ts_us, dtype=np.int64)
        if ts.shape[0]:
            if int(ts[0]) < t0:
                raise ContractError(
                    f"record 0: timestamp {int(ts[0])} precedes window origin {t0}"
                )
            steps = np.diff(ts)
            if steps.shape[0] and int(steps.min()) < 0:
                bad = int(np.argmax(steps < 0)) + 1
                raise ContractError(
                    f"record {bad}: trace is not sorted by timestamp"
                )
        fids = np.ascontiguousarray(trace.flow_ids, dtype=np.int64)
        nb = np.ascontiguousarray(trace.nbytes, dtype=np.int64)
        return ts, fids, nb, trace.flows

    ts_l, fid_l, nb_l = [], [], []
    table: dict = {}
    prev = None
    for i, rec in enumerate(trace):
        if rec.ts_us < t0:
            raise ContractError(
                f"record {i}: timestamp {rec.ts_us} precedes window origin {t0}"
            )
        if prev is not None and rec.ts_us < prev:
            raise ContractError(f"record {i}: trace is not sorted by timestamp")
        prev = rec.ts_us
        fid = table.get(rec.flow)
        if fid is None:
            fid = len(table)
            table[rec.flow] = fid
        ts_l.append(rec.ts_us)
        fid_l.append(fid)
        nb_l.append(rec.nbytes)
    return (
        np.asarray(ts_l, dtype=np.int64),
        np.asarray(fid_l, dtype=np.int64),
        np.asarray(nb_l, dtype=np.int64),
        tuple(table),
    )
