"""Per-flow characterization of alerting windows via six-sigma control bands.

Control limits come from the profile's pooled per-flow byte statistics:

    value > ucl_as or value < lcl_as          -> ATTACK
    lcl_ss <= value <= ucl_ss                 -> NORMAL
    otherwise (between the 3s and 6s bands)   -> SUSPICIOUS

with ucl/lcl_ss = mu +/- 3 sigma and ucl/lcl_as = mu +/- 6 sigma, lower
limits clamped at zero. One refinement on top of the raw bands: a flow that
was already active in the immediately preceding window cannot be a flood
flow that just started, so a would-be ATTACK flow is demoted to SUSPICIOUS.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import AbstractSet, Sequence

from .baseline import NormalProfile
from .errors import ContractError
from .model import TimeWindow, WindowStats


class FlowState(enum.Enum):
    NORMAL = "NORMAL"
    SUSPICIOUS = "SUSPICIOUS"
    ATTACK = "ATTACK"


@dataclass(frozen=True)
class ControlLimits:
    """Three- and six-sigma bands around the per-flow byte mean."""

    ucl_ss: float
    lcl_ss: float
    ucl_as: float
    lcl_as: float


@dataclass(frozen=True)
class Characterization:
    """Partition of one window's active flows into the three states."""

    window: TimeWindow
    attack_flows: frozenset
    suspicious_flows: frozenset
    normal_flows: frozenset

    def __post_init__(self):
        if (
            self.attack_flows & self.suspicious_flows
            or self.attack_flows & self.normal_flows
            or self.suspicious_flows & self.normal_flows
        ):
            raise ContractError("flow state sets must be disjoint")

    def state_of(self, flow) -> FlowState:
        if flow in self.attack_flows:
            return FlowState.ATTACK
        if flow in self.suspicious_flows:
            return FlowState.SUSPICIOUS
        if flow in self.normal_flows:
            return FlowState.NORMAL
        raise KeyError(f"flow {flow!r} not active in this window")


def control_limits(profile: NormalProfile) -> ControlLimits:
    """Derive the control bands from pooled per-flow statistics."""
    mu = profile.flow_mu
    sigma = profile.flow_sigma
    return ControlLimits(
        ucl_ss=mu + 3.0 * sigma,
        lcl_ss=max(0.0, mu - 3.0 * sigma),
        ucl_as=mu + 6.0 * sigma,
        lcl_as=max(0.0, mu - 6.0 * sigma),
    )


def classify_flow(bytes_in_window, limits: ControlLimits) -> FlowState:
    """Place one flow's window byte count into a state.

    Boundary values stay in the milder state: equal to a 3-sigma limit is
    NORMAL, equal to a 6-sigma limit is SUSPICIOUS.
    """
    if bytes_in_window > limits.ucl_as or bytes_in_window < limits.lcl_as:
        return FlowState.ATTACK
    if limits.lcl_ss <= bytes_in_window <= limits.ucl_ss:
        return FlowState.NORMAL
    return FlowState.SUSPICIOUS


def characterize(
    window: WindowStats,
    prev_active: AbstractSet,
    limits: ControlLimits,
) -> Characterization:
    """Classify every active flow of ``window``.

    ``prev_active`` is the active-flow set of the immediately preceding
    window (empty for the first window); flows found there are demoted from
    ATTACK to SUSPICIOUS. Iteration is in sorted flow order so results and
    downstream logs are identical across aggregation backends.
    """
    attack, suspicious, normal = [], [], []
    for flow in sorted(window.per_flow_bytes):
        state = classify_flow(window.per_flow_bytes[flow], limits)
        if state is FlowState.ATTACK and flow in prev_active:
            state = FlowState.SUSPICIOUS
        if state is FlowState.ATTACK:
            attack.append(flow)
        elif state is FlowState.SUSPICIOUS:
            suspicious.append(flow)
        else:
            normal.append(flow)
    return Characterization(
        window=window.window,
        attack_flows=frozenset(attack),
        suspicious_flows=frozenset(suspicious),
        normal_flows=frozenset(normal),
    )


def characterize_run(
    windows: Sequence[WindowStats],
    outcomes: Sequence,
    limits: ControlLimits,
) -> dict:
    """Characterize exactly the alerting windows of a detection run.

    Walks ``windows`` and the aligned detector ``outcomes``, tracking each
    window's active-flow set so the previous-window exclusion applies even
    when the preceding window itself did not alert. Returns
    ``{window start: Characterization}`` for alerting windows only.
    """
    if len(windows) != len(outcomes):
        raise ValueError(
            f"windows ({len(windows)}) and outcomes ({len(outcomes)}) differ in length"
        )
    results = {}
    prev_active: frozenset = frozenset()
    for stats, outcome in zip(windows, outcomes):
        if stats.window != outcome.window:
            raise ValueError(
                f"window mismatch: stats {stats.window} vs outcome {outcome.window}"
            )
        if outcome.alert:
            results[stats.window.start] = characterize(stats, prev_active, limits)
        prev_active = stats.active_flows
    return results
