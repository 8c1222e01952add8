"""Baseline training: normal-traffic statistics that everything else keys off.

A profile captures window-level means and population standard deviations of
volume and flow count, plus pooled per-flow byte statistics used by the
characterizer's control limits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InsufficientDataError
from .model import WindowStats


@dataclass(frozen=True)
class NormalProfile:
    """Trained statistics of attack-free traffic.

    sigma_* are population standard deviations (ddof=0). flow_mu/flow_sigma
    are computed over the pooled multiset of per-flow byte counts from every
    training window; flows absent from a window contribute no sample. The
    window width the profile was trained at is kept so that later stages can
    refuse a mismatched re-windowing.
    """

    x_star: float
    f_star: float
    sigma_v: float
    sigma_f: float
    flow_mu: float
    flow_sigma: float
    n_windows: int
    delta_us: int


def train_profile(windows: Sequence[WindowStats]) -> NormalProfile:
    """Estimate a NormalProfile from attack-free windows.

    Args:
        windows: at least two WindowStats from the same windowing run
            (identical delta).

    Raises:
        InsufficientDataError: fewer than two windows.
        ContractError-like ValueError: windows disagree on delta.
    """
    if len(windows) < 2:
        raise InsufficientDataError(
            f"need at least 2 windows to train a profile, got {len(windows)}"
        )
    deltas = {w.window.delta for w in windows}
    if len(deltas) != 1:
        raise ValueError(f"training windows mix window widths: {sorted(deltas)}")

    volumes = np.array([w.volume_bytes for w in windows], dtype=np.float64)
    counts = np.array([w.flow_count for w in windows], dtype=np.float64)
    pooled = np.array(
        [b for w in windows for b in w.per_flow_bytes.values()], dtype=np.float64
    )

    if pooled.size:
        flow_mu = float(pooled.mean())
        flow_sigma = float(pooled.std())
    else:
        # degenerate all-empty training: no per-flow evidence at all
        flow_mu = 0.0
        flow_sigma = 0.0

    return NormalProfile(
        x_star=float(volumes.mean()),
        f_star=float(counts.mean()),
        sigma_v=float(volumes.std()),
        sigma_f=float(counts.std()),
        flow_mu=flow_mu,
        flow_sigma=flow_sigma,
        n_windows=len(windows),
        delta_us=int(deltas.pop()),
    )
