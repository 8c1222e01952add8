"""Synthetic traffic generation: Poisson clients, constant-rate flooders."""

import numpy as np
import pytest

from flowsentry.errors import ConfigError
from flowsentry.model import Protocol, window_stream
from flowsentry.trafficgen import (
    PRESET_NAMES,
    ScenarioConfig,
    build_scenario,
    gen_attack,
    gen_legitimate,
    normal_twin,
    preset_config,
)


def small_cfg(**overrides):
    base = dict(
        duration_s=10.0,
        delta_ms=200,
        n_clients=3,
        client_request_rate=50.0,
        client_request_bytes=360,
        n_zombies=0,
        attack_rate_mbps=0.0,
        t_a=3.0,
        t_b=7.0,
        packet_bytes=1000,
        seed=7,
    )
    base.update(overrides)
    return ScenarioConfig(**base)


class TestConfigValidation:
    def test_valid_config_passes(self):
        small_cfg().validate()

    def test_violations_collected_into_one_error(self):
        cfg = small_cfg(duration_s=-1.0, n_clients=-5, packet_bytes=0)
        with pytest.raises(ConfigError) as exc:
            cfg.validate()
        msg = str(exc.value)
        assert "duration_s" in msg
        assert "n_clients" in msg
        assert "packet_bytes" in msg

    def test_attack_window_order_enforced(self):
        with pytest.raises(ConfigError, match="t_b"):
            small_cfg(t_a=5.0, t_b=2.0).validate()

    def test_attack_window_may_be_empty(self):
        small_cfg(t_a=5.0, t_b=5.0).validate()

    def test_zombies_require_positive_rate(self):
        with pytest.raises(ConfigError, match="attack_rate_mbps"):
            small_cfg(n_zombies=4, attack_rate_mbps=0.0).validate()


class TestGenLegitimate:
    def test_poisson_request_count_concentration(self):
        # rate 10 req/s for 100 s: count within 1000 +/- 4*sqrt(1000)
        cfg = small_cfg(
            duration_s=100.0, n_clients=1, client_request_rate=10.0,
            client_request_bytes=360,
        )
        trace = gen_legitimate(cfg)
        # 360 B request fits one 1000 B packet, so records == requests
        assert abs(len(trace) - 1000) <= 4 * np.sqrt(1000)

    def test_zero_duration_empty(self):
        assert len(gen_legitimate(small_cfg(duration_s=0.0, t_a=0.0, t_b=0.0))) == 0

    def test_deterministic_per_seed(self):
        a = gen_legitimate(small_cfg())
        b = gen_legitimate(small_cfg())
        assert np.array_equal(a.ts_us, b.ts_us)
        assert np.array_equal(a.nbytes, b.nbytes)
        assert a.flows == b.flows

    def test_different_seed_differs(self):
        a = gen_legitimate(small_cfg())
        b = gen_legitimate(small_cfg(seed=8))
        assert len(a) != len(b) or not np.array_equal(a.ts_us, b.ts_us)

    def test_one_tcp_flow_per_client(self):
        cfg = small_cfg(n_clients=5)
        trace = gen_legitimate(cfg)
        assert len(trace.flows) == 5
        assert len({f.src for f in trace.flows}) == 5
        assert all(f.proto is Protocol.TCP for f in trace.flows)

    def test_large_requests_split_into_packets(self):
        cfg = small_cfg(client_request_bytes=2500, packet_bytes=1000, n_clients=1)
        trace = gen_legitimate(cfg)
        sizes = sorted(set(trace.nbytes.tolist()))
        assert sizes == [500, 1000]
        # every request contributes exactly ceil(2500/1000) = 3 records
        assert len(trace) % 3 == 0
        assert trace.total_bytes() % 2500 == 0

    def test_sorted_timestamps(self):
        trace = gen_legitimate(small_cfg())
        assert np.all(np.diff(trace.ts_us) >= 0)


class TestGenAttack:
    def test_two_full_packets_per_window_at_low_rate(self):
        # 0.1 Mbps = 12500 B/s; one 200 ms window carries 2500 B -> 2 whole
        # 1000 B packets, remainder carried forward.
        cfg = small_cfg(n_zombies=1, attack_rate_mbps=0.1, t_a=2.0, t_b=2.2)
        trace, _ = gen_attack(cfg)
        assert len(trace) == 2
        assert trace.nbytes.tolist() == [1000, 1000]
        assert all(2_000_000 <= t < 2_200_000 for t in trace.ts_us.tolist())

    def test_empty_attack_interval(self):
        cfg = small_cfg(n_zombies=3, attack_rate_mbps=1.0, t_a=5.0, t_b=5.0)
        trace, truth = gen_attack(cfg)
        assert len(trace) == 0
        assert truth.n_attack_windows() == 0

    def test_byte_budget_within_one_packet_per_zombie(self):
        cfg = small_cfg(n_zombies=7, attack_rate_mbps=2.5, t_a=3.0, t_b=7.0)
        trace, _ = gen_attack(cfg)
        expected = 7 * (2.5e6 / 8) * 4.0
        assert abs(trace.total_bytes() - expected) <= 7 * cfg.packet_bytes

    def test_constant_spacing_within_zombie(self):
        cfg = small_cfg(n_zombies=1, attack_rate_mbps=1.0, t_a=3.0, t_b=4.0)
        trace, _ = gen_attack(cfg)
        gaps = np.diff(trace.ts_us)
        assert gaps.max() - gaps.min() <= 2  # microsecond floor jitter only

    def test_distinct_udp_flows(self):
        cfg = small_cfg(n_zombies=6, attack_rate_mbps=1.0)
        trace, truth = gen_attack(cfg)
        assert len(truth.attack_flow_keys) == 6
        assert all(f.proto is Protocol.UDP for f in truth.attack_flow_keys)

    def test_packets_confined_to_attack_interval(self):
        cfg = small_cfg(n_zombies=4, attack_rate_mbps=3.0, t_a=3.0, t_b=7.0)
        trace, _ = gen_attack(cfg)
        assert trace.ts_us.min() >= 3_000_000
        assert trace.ts_us.max() < 7_000_000


class TestBuildScenario:
    def test_merge_conserves_length(self):
        cfg = small_cfg(n_zombies=4, attack_rate_mbps=1.0)
        legit = gen_legitimate(cfg)
        attack, _ = gen_attack(cfg)
        merged, _ = build_scenario(cfg)
        assert len(merged) == len(legit) + len(attack)
        assert merged.total_bytes() == legit.total_bytes() + attack.total_bytes()

    def test_zero_zombies_all_labels_false(self):
        _, truth = build_scenario(small_cfg())
        assert truth.n_attack_windows() == 0
        assert truth.attack_flow_keys == frozenset()
        assert truth.attack_interval_us is None

    def test_labels_are_exactly_windows_intersecting_attack_interval(self):
        cfg = small_cfg(n_zombies=2, attack_rate_mbps=1.0, t_a=3.05, t_b=6.85)
        _, truth = build_scenario(cfg)
        for start, flag in truth.window_labels.items():
            overlaps = start < 6_850_000 and start + 200_000 > 3_050_000
            assert flag == overlaps, f"window {start}"

    def test_labels_cover_every_window_of_the_merged_trace(self):
        cfg = small_cfg(n_zombies=2, attack_rate_mbps=1.0)
        trace, truth = build_scenario(cfg)
        windows = window_stream(trace, cfg.delta_us)
        assert [w.window.start for w in windows] == sorted(truth.window_labels)

    def test_deterministic(self):
        cfg = small_cfg(n_zombies=3, attack_rate_mbps=0.5)
        t1, g1 = build_scenario(cfg)
        t2, g2 = build_scenario(cfg)
        assert np.array_equal(t1.ts_us, t2.ts_us)
        assert np.array_equal(t1.nbytes, t2.nbytes)
        assert g1.window_labels == g2.window_labels


class TestPresets:
    def test_known_names(self):
        assert set(PRESET_NAMES) == {
            "normal", "low_rate", "high_rate", "varying_rate",
            "mixed_load", "timeline",
        }

    def test_unknown_name_rejected(self):
        with pytest.raises(ConfigError, match="choose from"):
            preset_config("nope")

    def test_timeline_attack_interval(self):
        cfg = preset_config("timeline")
        assert cfg.t_a == 25.0
        assert cfg.t_b == 50.0
        assert cfg.duration_s > 50.0

    def test_timeline_attack_windows_match_interval(self):
        cfg = preset_config("timeline", seed=5)
        _, truth = build_scenario(cfg)
        attack_starts = sorted(s for s, v in truth.window_labels.items() if v)
        expected = [
            s for s in truth.window_labels
            if s < 50_000_000 and s + cfg.delta_us > 25_000_000
        ]
        assert attack_starts == sorted(expected)

    def test_normal_preset_has_no_attack(self):
        cfg = preset_config("normal")
        assert cfg.n_zombies == 0

    def test_normal_twin_strips_attack(self):
        cfg = preset_config("low_rate", seed=3)
        twin = normal_twin(cfg, seed=99)
        assert twin.n_zombies == 0
        assert twin.seed == 99
        assert twin.n_clients == cfg.n_clients
        assert twin.duration_s == cfg.duration_s

    def test_preset_overrides(self):
        cfg = preset_config("low_rate", seed=4, duration_s=12.0, t_a=4.0, t_b=8.0)
        assert cfg.duration_s == 12.0
        assert cfg.seed == 4
        assert cfg.n_zombies == 40

    def test_override_breaking_validation_rejected(self):
        # shrinking the duration under the preset attack interval must fail
        with pytest.raises(ConfigError):
            preset_config("low_rate", duration_s=12.0)

    def test_aggregate_rate_fidelity(self):
        # Legitimate load should land within 1% of its expectation:
        # n_clients * rate * duration * request_bytes.
        cfg = preset_config("normal", seed=2, duration_s=20.0, t_a=5.0, t_b=10.0)
        trace = gen_legitimate(cfg)
        expected = cfg.n_clients * cfg.client_request_rate * 20.0 * cfg.client_request_bytes
        assert abs(trace.total_bytes() - expected) / expected < 0.01
