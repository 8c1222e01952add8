"""Scoring detection runs against ground truth.

Detection rate r_d = d/n and false-positive rate r_fp = f/m are computed
per window, or per campaign where one alerting window anywhere inside the
attack counts as a detection. Degenerate denominators give ``None`` rather
than a made-up 0 or 1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .baseline import NormalProfile
from .detector import run_detector
from .errors import ContractError, InvalidParameterError
from .model import TraceLike, window_stream
from .trafficgen import GroundTruth


class Mode(enum.Enum):
    WINDOW = "window"
    CAMPAIGN = "campaign"


@dataclass(frozen=True)
class Metrics:
    """Confusion counts and rates of one detection run.

    d of n attack units detected (windows, or the single campaign), f false
    alarms over m normal windows. ``r_d``/``r_fp`` are None when their
    denominator is zero; ``latency_windows`` is None when the attack was
    never detected at or after onset.
    """

    mode: Mode
    d: int
    n: int
    f: int
    m: int
    r_d: Optional[float]
    r_fp: Optional[float]
    latency_windows: Optional[int]


@dataclass(frozen=True)
class RocPoint:
    r: int
    r_d: Optional[float]
    r_fp: Optional[float]


def evaluate_run(
    outcomes: Sequence,
    truth: GroundTruth,
    mode: Mode = Mode.WINDOW,
) -> Metrics:
    """Score detector outcomes against ground-truth labels.

    The outcomes must cover exactly the labeled windows (same starts, same
    order as the label span); anything else raises ContractError.
    """
    labels = truth.window_labels
    if len(outcomes) != len(labels):
        raise ContractError(
            f"outcomes cover {len(outcomes)} windows but truth labels {len(labels)}"
        )
    flags = []
    for o in outcomes:
        start = o.window.start
        if start not in labels:
            raise ContractError(f"outcome window start {start} is not labeled in truth")
        flags.append((labels[start], o.alert))

    n = sum(1 for lab, _ in flags if lab)
    m = len(flags) - n
    d_windows = sum(1 for lab, alert in flags if lab and alert)
    f = sum(1 for lab, alert in flags if alert and not lab)

    if mode is Mode.CAMPAIGN:
        n_units = 1 if n > 0 else 0
        d_units = 1 if d_windows > 0 else 0
    else:
        n_units, d_units = n, d_windows

    return Metrics(
        mode=mode,
        d=d_units,
        n=n_units,
        f=f,
        m=m,
        r_d=(d_units / n_units) if n_units else None,
        r_fp=(f / m) if m else None,
        latency_windows=_latency(outcomes, truth),
    )


def _latency(outcomes: Sequence, truth: GroundTruth) -> Optional[int]:
    """Windows from attack onset to the first alert at/after onset."""
    if truth.attack_interval_us is not None and outcomes:
        delta = outcomes[0].window.delta
        t0 = outcomes[0].window.start
        ta = truth.attack_interval_us[0]
        onset_start = t0 + ((ta - t0) // delta) * delta
    else:
        onset_start = next(
            (start for start, lab in truth.window_labels.items() if lab), None
        )
    if onset_start is None:
        return None
    onset_idx = None
    for i, o in enumerate(outcomes):
        if o.window.start == onset_start:
            onset_idx = i
            break
    if onset_idx is None:
        return None
    for i in range(onset_idx, len(outcomes)):
        if outcomes[i].alert:
            return i - onset_idx
    return None


def roc_sweep(
    scenario: Tuple[TraceLike, GroundTruth],
    profile: NormalProfile,
    r_values: Sequence[int],
    mode: Mode = Mode.WINDOW,
) -> list:
    """Evaluate the combined detector across tolerance factors.

    Windows are aggregated once and re-thresholded per r. Returns RocPoints
    sorted by r; r_values must be non-empty and distinct.
    """
    if not r_values:
        raise InvalidParameterError("r_values must be non-empty")
    if len(set(r_values)) != len(r_values):
        raise InvalidParameterError("r_values must be distinct")
    trace, truth = scenario
    windows = window_stream(trace, profile.delta_us)
    points = []
    for r in sorted(r_values):
        metrics = evaluate_run(run_detector(windows, profile, r), truth, mode)
        points.append(RocPoint(r=r, r_d=metrics.r_d, r_fp=metrics.r_fp))
    return points


def compare_vba(
    scenario: Tuple[TraceLike, GroundTruth],
    profile: NormalProfile,
    r: int,
    mode: Mode = Mode.WINDOW,
) -> Tuple[Metrics, Metrics]:
    """Score the combined detector and the volume-only baseline side by side
    on identical windows. Returns (combined, volume_only)."""
    trace, truth = scenario
    windows = window_stream(trace, profile.delta_us)
    combined = evaluate_run(run_detector(windows, profile, r), truth, mode)
    volume_only = evaluate_run(run_detector(windows, profile, r, vba=True), truth, mode)
    return combined, volume_only
