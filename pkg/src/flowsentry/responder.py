"""Response simulation: drop attack flows, throttle suspicious ones.

Throttling strength scales with how far the window's volume deviation
exceeded its threshold; a flow-count-only alert carries zero strength, so
suspicious flows pass unthrottled there.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .characterizer import Characterization
from .detector import DetectionOutcome, Thresholds
from .errors import ContractError
from .model import Trace, WindowStats


@dataclass(frozen=True)
class ResponsePolicy:
    """Throttle policy: factor 1 / (1 + strength) applied to suspicious flows."""

    strength: float
    throttle_factor: float = field(init=False)

    def __post_init__(self):
        if self.strength < 0:
            raise ValueError(f"strength must be >= 0, got {self.strength}")
        object.__setattr__(self, "throttle_factor", 1.0 / (1.0 + self.strength))


def attack_strength(outcome: DetectionOutcome, th: Thresholds, cap: float = 10.0) -> float:
    """Relative volume-threshold exceedance of an alerting window.

    Defined as max(0, dx - xi_th) / xi_th. Flow-count-only alerts (dx at or
    under the threshold) have strength 0. When xi_th is 0 the ratio is
    unbounded, so a positive exceedance returns ``cap`` instead.

    Raises ContractError if the outcome never alerted.
    """
    if not outcome.alert:
        raise ContractError("attack_strength is defined only for alerting windows")
    excess = outcome.dx - th.xi_th
    if excess <= 0:
        return 0.0
    if th.xi_th == 0:
        return cap
    return excess / th.xi_th


def apply_response(
    window: WindowStats,
    characterization: Characterization,
    policy: ResponsePolicy,
) -> WindowStats:
    """Produce the post-response view of one window.

    Attack flows are dropped, suspicious flows are scaled by the throttle
    factor with the result rounded down (flows throttled to 0 bytes are
    removed), normal flows pass through untouched.

    Raises ContractError if the characterization belongs to another window.
    """
    if characterization.window != window.window:
        raise ContractError(
            f"characterization window {characterization.window} does not match "
            f"{window.window}"
        )
    factor = policy.throttle_factor
    per_flow = {}
    for flow, nbytes in window.per_flow_bytes.items():
        if flow in characterization.attack_flows:
            continue
        if flow in characterization.suspicious_flows:
            nbytes = int(nbytes * factor)
            if nbytes == 0:
                continue
        per_flow[flow] = nbytes
    return WindowStats(
        window=window.window,
        volume_bytes=sum(per_flow.values()),
        flow_count=len(per_flow),
        per_flow_bytes=per_flow,
    )


def apply_response_trace(
    trace: Trace,
    delta: int,
    characterizations: dict,
    policies: dict,
    t0: int = 0,
) -> Trace:
    """Apply per-window responses to a whole trace, packet by packet.

    ``characterizations`` and ``policies`` map alerting window starts to
    their Characterization / ResponsePolicy. Packets of attack flows are
    dropped, packets of suspicious flows have their bytes scaled by the
    throttle factor (rounded down; zero-byte packets are dropped), all other
    packets pass through. Windows without an entry are untouched.

    Note per-packet rounding: a throttled flow's post-response window total
    can fall slightly below the window-level figure from ``apply_response``,
    never above it.
    """
    if len(trace) == 0 or not characterizations:
        return trace
    ts = trace.ts_us
    nbytes = trace.nbytes.copy()
    keep = np.ones(len(trace), dtype=bool)
    widx = (ts - t0) // delta
    flow_index = {key: fid for fid, key in enumerate(trace.flows)}
    for start, ch in characterizations.items():
        w = (start - t0) // delta
        lo, hi = np.searchsorted(widx, [w, w + 1])
        if lo == hi:
            continue
        policy = policies[start]
        fids = trace.flow_ids[lo:hi]
        if ch.attack_flows:
            drop_ids = [flow_index[k] for k in ch.attack_flows if k in flow_index]
            if drop_ids:
                keep[lo:hi] &= ~np.isin(fids, drop_ids)
        if ch.suspicious_flows and policy.throttle_factor < 1.0:
            slow_ids = [flow_index[k] for k in ch.suspicious_flows if k in flow_index]
            if slow_ids:
                mask = np.isin(fids, slow_ids)
                scaled = (nbytes[lo:hi][mask] * policy.throttle_factor).astype(np.int64)
                sl = nbytes[lo:hi]
                sl[mask] = scaled
                nbytes[lo:hi] = sl
    keep &= nbytes > 0
    return Trace(ts[keep], trace.flow_ids[keep], nbytes[keep], trace.flows)
