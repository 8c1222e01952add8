"""Synthetic scenario generation: Poisson clients plus constant-rate zombies.

Legitimate traffic is one TCP flow per client, each client an independent
Poisson request process; a request of ``client_request_bytes`` is emitted as
ceil(bytes / packet_bytes) records sharing the request epoch. Attack traffic
is one UDP flow per zombie sending fixed-size packets at a constant byte
rate, evenly spaced inside [t_a, t_b) only; the k-th packet appears once k
full packet-times have accrued, so a window holds floor-of-budget packets
with the remainder carried forward. Generation is deterministic in the
config seed, and every (trace, labels) pair is internally consistent: a
window is labeled attack exactly when an attack-flow packet falls in it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np

from .errors import ConfigError
from .model import FlowKey, Protocol, Trace

_SERVER = "192.168.100.1"


@dataclass(frozen=True)
class ScenarioConfig:
    """Parameters of one synthetic scenario.

    Rates are per client / per zombie. ``t_a == t_b`` is allowed and yields
    an empty attack (the zero-duration degenerate case).
    """

    duration_s: float = 60.0
    delta_ms: int = 200
    n_clients: int = 40
    client_request_rate: float = 400.0
    client_request_bytes: int = 360
    n_zombies: int = 0
    attack_rate_mbps: float = 0.0
    t_a: float = 25.0
    t_b: float = 50.0
    packet_bytes: int = 1000
    seed: int = 0

    def validate(self) -> None:
        """Raise ConfigError listing every violated field."""
        bad = []
        if not (math.isfinite(self.duration_s) and self.duration_s >= 0):
            bad.append("duration_s (must be finite and >= 0)")
        if not (isinstance(self.delta_ms, int) and self.delta_ms >= 1):
            bad.append("delta_ms (must be an integer >= 1)")
        if not (isinstance(self.n_clients, int) and self.n_clients >= 0):
            bad.append("n_clients (must be an integer >= 0)")
        if not (isinstance(self.n_zombies, int) and self.n_zombies >= 0):
            bad.append("n_zombies (must be an integer >= 0)")
        if self.n_clients > 0 and not self.client_request_rate > 0:
            bad.append("client_request_rate (must be > 0 when n_clients > 0)")
        if self.client_request_rate < 0:
            bad.append("client_request_rate (must be >= 0)")
        if self.n_clients > 0 and self.client_request_bytes < 1:
            bad.append("client_request_bytes (must be >= 1 when n_clients > 0)")
        if self.n_zombies > 0 and not self.attack_rate_mbps > 0:
            bad.append("attack_rate_mbps (must be > 0 when n_zombies > 0)")
        if self.attack_rate_mbps < 0:
            bad.append("attack_rate_mbps (must be >= 0)")
        if not (0 <= self.t_a <= self.t_b <= max(self.duration_s, 0)):
            bad.append("t_a/t_b (need 0 <= t_a <= t_b <= duration_s)")
        if not (isinstance(self.packet_bytes, int) and self.packet_bytes >= 1):
            bad.append("packet_bytes (must be an integer >= 1)")
        if not (isinstance(self.seed, int) and self.seed >= 0):
            bad.append("seed (must be an integer >= 0)")
        if bad:
            raise ConfigError("invalid scenario config: " + "; ".join(bad))

    @property
    def delta_us(self) -> int:
        return self.delta_ms * 1000

    @property
    def t_a_us(self) -> int:
        return int(round(self.t_a * 1e6))

    @property
    def t_b_us(self) -> int:
        return int(round(self.t_b * 1e6))


@dataclass(frozen=True)
class GroundTruth:
    """What actually happened in a generated scenario.

    window_labels maps every window start (microseconds) of the trace span to
    True when at least one attack-flow packet falls in that window.
    """

    attack_interval_us: Optional[Tuple[int, int]]
    attack_flow_keys: frozenset
    window_labels: dict

    def n_attack_windows(self) -> int:
        return sum(1 for v in self.window_labels.values() if v)


def _client_flow(i: int) -> FlowKey:
    return FlowKey(
        src=f"10.0.{i >> 8}.{i & 0xFF}",
        dst=_SERVER,
        proto=Protocol.TCP,
        sport=49152 + (i % 16000),
        dport=80,
    )


def _zombie_flow(j: int) -> FlowKey:
    return FlowKey(
        src=f"172.16.{j >> 8}.{j & 0xFF}",
        dst=_SERVER,
        proto=Protocol.UDP,
        sport=40000 + (j % 16000),
        dport=80,
    )


def _poisson_epochs(rng: np.random.Generator, rate: float, duration: float) -> np.ndarray:
    """Arrival epochs (seconds) of a Poisson process on [0, duration)."""
    mean_n = rate * duration
    est = max(16, int(mean_n + 8 * math.sqrt(mean_n) + 16))
    t = np.cumsum(rng.exponential(1.0 / rate, est))
    while t.size and t[-1] < duration:
        more = rng.exponential(1.0 / rate, max(16, est // 4))
        t = np.concatenate([t, t[-1] + np.cumsum(more)])
    return t[t < duration]


def gen_legitimate(cfg: ScenarioConfig) -> Trace:
    """Generate the legitimate side of a scenario.

    Each client is an independent Poisson request process over
    [0, duration_s); each request emits ceil(client_request_bytes /
    packet_bytes) records at the request epoch (full packets plus a
    remainder packet). Deterministic in cfg.seed; zero clients or zero
    duration yield an empty trace.
    """
    cfg.validate()
    if cfg.n_clients == 0 or cfg.duration_s <= 0:
        return Trace.empty()

    full, rem = divmod(cfg.client_request_bytes, cfg.packet_bytes)
    sizes = np.array([cfg.packet_bytes] * full + ([rem] if rem else []), dtype=np.int64)
    per_request = sizes.size

    ts_parts, fid_parts = [], []
    for i in range(cfg.n_clients):
        rng = np.random.default_rng([cfg.seed, 0, i])
        epochs = _poisson_epochs(rng, cfg.client_request_rate, cfg.duration_s)
        ts = np.floor(epochs * 1e6).astype(np.int64)
        if per_request > 1:
            ts = np.repeat(ts, per_request)
        ts_parts.append(ts)
        fid_parts.append(np.full(ts.size, i, dtype=np.int64))

    ts_all = np.concatenate(ts_parts)
    fid_all = np.concatenate(fid_parts)
    nb_all = np.tile(sizes, ts_all.size // per_request)
    order = np.argsort(ts_all, kind="stable")
    flows = tuple(_client_flow(i) for i in range(cfg.n_clients))
    return Trace(ts_all[order], fid_all[order], nb_all[order], flows)


def gen_attack(cfg: ScenarioConfig) -> Tuple[Trace, GroundTruth]:
    """Generate the attack side of a scenario.

    Every zombie sends packet_bytes-sized packets at attack_rate_mbps,
    evenly spaced strictly inside [t_a, t_b); the first packet lands one
    packet-time after onset. Zero zombies or t_a == t_b yield an empty trace
    with all-false labels. The returned labels cover the attack trace's own
    span; build_scenario re-labels over the merged span.
    """
    cfg.validate()
    interval = (cfg.t_a_us, cfg.t_b_us) if cfg.n_zombies > 0 else None
    keys = frozenset(_zombie_flow(j) for j in range(cfg.n_zombies))

    if cfg.n_zombies == 0 or cfg.t_a == cfg.t_b:
        return Trace.empty(), GroundTruth(interval, keys, {})

    rate_bps = cfg.attack_rate_mbps * 1e6 / 8.0
    spacing = cfg.packet_bytes / rate_bps
    k_hi = int((cfg.t_b - cfg.t_a) / spacing) + 2
    times = cfg.t_a + spacing * np.arange(1, k_hi, dtype=np.float64)
    times = times[times < cfg.t_b]
    ts_one = np.floor(times * 1e6).astype(np.int64)
    if ts_one.size == 0:
        return Trace.empty(), GroundTruth(interval, keys, {})

    ts_all = np.tile(ts_one, cfg.n_zombies)
    fid_all = np.repeat(np.arange(cfg.n_zombies, dtype=np.int64), ts_one.size)
    nb_all = np.full(ts_all.size, cfg.packet_bytes, dtype=np.int64)
    order = np.argsort(ts_all, kind="stable")
    flows = tuple(_zombie_flow(j) for j in range(cfg.n_zombies))
    trace = Trace(ts_all[order], fid_all[order], nb_all[order], flows)
    labels = _window_labels(ts_one, int(ts_one[-1]), cfg.delta_us)
    return trace, GroundTruth(interval, keys, labels)


def _window_labels(attack_ts: np.ndarray, span_last_us: int, delta_us: int) -> dict:
    n = span_last_us // delta_us + 1
    labels = {i * delta_us: False for i in range(n)}
    if attack_ts.size:
        for w in np.unique(attack_ts // delta_us).tolist():
            labels[w * delta_us] = True
    return labels


def build_scenario(cfg: ScenarioConfig) -> Tuple[Trace, GroundTruth]:
    """Generate and merge both sides; label windows over the merged span."""
    cfg.validate()
    legit = gen_legitimate(cfg)
    attack, truth = gen_attack(cfg)
    merged = Trace.concat(legit, attack)
    if len(merged) == 0:
        return merged, GroundTruth(truth.attack_interval_us, truth.attack_flow_keys, {})
    labels = _window_labels(attack.ts_us, int(merged.ts_us[-1]), cfg.delta_us)
    return merged, GroundTruth(truth.attack_interval_us, truth.attack_flow_keys, labels)


def normal_twin(cfg: ScenarioConfig, seed: int) -> ScenarioConfig:
    """Attack-free copy of a scenario, for training its baseline profile."""
    return replace(cfg, n_zombies=0, attack_rate_mbps=0.0, seed=seed)


# ---------------------------------------------------------------------------
# Presets.
#
# Calibration notes (40 steady clients at 400 req/s of 360 B => one client
# flow carries roughly 28.8 kB +/- 3.2 kB per 200 ms window, window volume
# roughly 1.152 MB +/- 20.4 kB, and every client is active in every window):
#   * per-flow six-sigma bands land near [9.5 kB, 48.1 kB], so a 0.1 Mbps
#     zombie (2-3 kB per window) sits far below the lower attack limit while
#     a >= 2.5 Mbps zombie (>= 62 kB) clears the upper one;
#   * 40 low-rate zombies add ~100 kB per window, under the r=6 volume
#     threshold (~122 kB), so the volume-only detector mostly misses them;
#   * 20 high-rate zombies add ~1.5 MB per window, ~74 sigma, so volume
#     flags every attack window.
# ---------------------------------------------------------------------------

_PRESETS = {
    # attack-free baseline twin of the standard load
    "normal": dict(n_zombies=0, attack_rate_mbps=0.0),
    # many slow zombies: invisible in volume, conspicuous in flow count
    "low_rate": dict(n_zombies=40, attack_rate_mbps=0.1),
    # few fast zombies: overwhelms the volume metric outright
    "high_rate": dict(n_zombies=20, attack_rate_mbps=3.0),
    # fixed mid-size pool meant for sweeping the rate knob across runs
    "varying_rate": dict(n_zombies=25, attack_rate_mbps=2.5),
    # heavier client load and a moderate attack at the same time
    "mixed_load": dict(n_zombies=30, attack_rate_mbps=2.5, client_request_rate=440.0),
    # long demo timeline: attack occupies [25 s, 50 s] of a 75 s run
    "timeline": dict(duration_s=75.0, n_zombies=20, attack_rate_mbps=3.0),
}

PRESET_NAMES = tuple(sorted(_PRESETS))


def preset_config(name: str, seed: int = 0, **overrides) -> ScenarioConfig:
    """Build a named preset ScenarioConfig, optionally overriding fields."""
    try:
        base = _PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}"
        ) from None
    cfg = ScenarioConfig(seed=seed, **base)
    if overrides:
        cfg = replace(cfg, **overrides)
    cfg.validate()
    return cfg
