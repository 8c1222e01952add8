"""Window-level flood detection on two deviations: volume and flow count.

A window raises an alert when either observed metric exceeds its baseline
mean by more than the tolerance threshold (strictly; equality stays quiet):

    alert  iff  (x_in - x_star > xi_th)  or  (f_in - f_star > zeta_th)

with xi_th = r * sigma_v and zeta_th = r * sigma_f for an integer tolerance
factor r >= 1. The volume-only variant (``vba_detect``) exists as the
comparison baseline.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .baseline import NormalProfile
from .errors import InvalidParameterError
from .model import TimeWindow, WindowStats


class Trigger(enum.Enum):
    """Which deviation(s) crossed their threshold."""

    NONE = "NONE"
    VOLUME = "VOLUME"
    FLOW = "FLOW"
    BOTH = "BOTH"


@dataclass(frozen=True)
class Thresholds:
    """Alert thresholds derived from a profile at tolerance factor r."""

    xi_th: float
    zeta_th: float
    r: int


@dataclass(frozen=True)
class DetectionOutcome:
    """Per-window detector verdict with the deviations that produced it."""

    window: TimeWindow
    x_in: int
    f_in: int
    dx: float
    df: float
    alert: bool
    trigger: Trigger


def make_thresholds(profile: NormalProfile, r: int) -> Thresholds:
    """Build thresholds xi_th = r * sigma_v, zeta_th = r * sigma_f.

    Raises InvalidParameterError unless r is an integer >= 1.
    """
    if isinstance(r, bool) or not isinstance(r, int):
        raise InvalidParameterError(f"tolerance factor must be an integer, got {r!r}")
    if r < 1:
        raise InvalidParameterError(f"tolerance factor must be >= 1, got {r}")
    return Thresholds(xi_th=r * profile.sigma_v, zeta_th=r * profile.sigma_f, r=r)


def detect(window: WindowStats, profile: NormalProfile, th: Thresholds) -> DetectionOutcome:
    """Classify one window against thresholds built from ``profile``."""
    dx = window.volume_bytes - profile.x_star
    df = window.flow_count - profile.f_star
    vol = dx > th.xi_th
    flow = df > th.zeta_th
    if vol and flow:
        trigger = Trigger.BOTH
    elif vol:
        trigger = Trigger.VOLUME
    elif flow:
        trigger = Trigger.FLOW
    else:
        trigger = Trigger.NONE
    return DetectionOutcome(
        window=window.window,
        x_in=window.volume_bytes,
        f_in=window.flow_count,
        dx=dx,
        df=df,
        alert=vol or flow,
        trigger=trigger,
    )


def vba_detect(window: WindowStats, profile: NormalProfile, th: Thresholds) -> DetectionOutcome:
    """Volume-only baseline detector; the flow branch never fires."""
    dx = window.volume_bytes - profile.x_star
    df = window.flow_count - profile.f_star
    vol = dx > th.xi_th
    return DetectionOutcome(
        window=window.window,
        x_in=window.volume_bytes,
        f_in=window.flow_count,
        dx=dx,
        df=df,
        alert=vol,
        trigger=Trigger.VOLUME if vol else Trigger.NONE,
    )


def run_detector(
    windows: Sequence[WindowStats],
    profile: NormalProfile,
    r: int,
    *,
    vba: bool = False,
) -> list:
    """Run one detector over a window sequence and return its outcomes."""
    th = make_thresholds(profile, r)
    step = vba_detect if vba else detect
    return [step(w, profile, th) for w in windows]
