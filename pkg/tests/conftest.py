"""Shared fixtures and factories for the test suite."""

import numpy as np
import pytest

from flowsentry.model import (
    FlowKey,
    PacketRecord,
    Protocol,
    TimeWindow,
    Trace,
    WindowStats,
)


def make_flow(i: int, proto: Protocol = Protocol.TCP) -> FlowKey:
    return FlowKey(
        src=f"10.1.{i >> 8}.{i & 0xFF}",
        dst="192.168.100.1",
        proto=proto,
        sport=50000 + (i % 10000),
        dport=80,
    )


def make_window_stats(start=0, delta=200_000, per_flow=None) -> WindowStats:
    per_flow = dict(per_flow or {})
    return WindowStats(
        window=TimeWindow(start, delta),
        volume_bytes=sum(per_flow.values()),
        flow_count=len(per_flow),
        per_flow_bytes=per_flow,
    )


def random_trace(rng, n_records, n_flows=20, span_us=10_000_000) -> Trace:
    """Sorted random trace: the workhorse input for oracle comparisons."""
    if n_records == 0:
        return Trace.empty()
    ts = np.sort(rng.integers(0, span_us, n_records)).astype(np.int64)
    flow_idx = rng.integers(0, n_flows, n_records)
    nbytes = rng.integers(1, 1500, n_records).astype(np.int64)
    flows = tuple(make_flow(i) for i in range(n_flows))
    return Trace(
        ts_us=ts,
        flow_ids=flow_idx.astype(np.int64),
        nbytes=nbytes,
        flows=flows,
    )


def brute_force_windows(trace: Trace, delta: int, t0: int = 0):
    """Independent whole-trace recomputation of per-window stats.

    Deliberately naive: one dict pass per window over the full record list,
    no shared code with the streaming implementation.
    """
    records = list(trace.records())
    if not records:
        return []
    last = max(r.ts_us for r in records)
    n_windows = (last - t0) // delta + 1
    out = []
    for w in range(n_windows):
        lo = t0 + w * delta
        hi = lo + delta
        per_flow = {}
        for r in records:
            if lo <= r.ts_us < hi:
                per_flow[r.flow] = per_flow.get(r.flow, 0) + r.nbytes
        out.append(
            WindowStats(
                window=TimeWindow(lo, delta),
                volume_bytes=sum(per_flow.values()),
                flow_count=len(per_flow),
                per_flow_bytes=per_flow,
            )
        )
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# ---------------------------------------------------------------------------
# acceptance summary: one printed line per criterion at the end of the run
# ---------------------------------------------------------------------------

_ACCEPTANCE_RESULTS = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        _ACCEPTANCE_RESULTS[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name in sorted(_ACCEPTANCE_RESULTS):
        outcome = _ACCEPTANCE_RESULTS[name]
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{mark}  {name}")
