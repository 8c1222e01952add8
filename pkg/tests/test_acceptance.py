"""Acceptance gates: nine end-to-end criteria over the packaged presets.

Each test prints its own PASS line when it completes; the terminal summary
block (see conftest) repeats one PASS/FAIL line per criterion at the end of
the run either way.
"""

import time

import numpy as np
import pytest

from flowsentry.baseline import NormalProfile, train_profile
from flowsentry.characterizer import (
    Characterization,
    ControlLimits,
    FlowState,
    characterize,
    characterize_run,
    classify_flow,
    control_limits,
)
from flowsentry.cli import main
from flowsentry.detector import detect, make_thresholds, run_detector, vba_detect
from flowsentry.evaluation import Mode, evaluate_run, roc_sweep
from flowsentry.model import Trace, window_stream
from flowsentry.responder import ResponsePolicy, apply_response
from flowsentry.trafficgen import build_scenario, normal_twin, preset_config

from conftest import brute_force_windows, make_flow, make_window_stats, random_trace

ATTACK_PRESETS = ("low_rate", "high_rate", "varying_rate", "mixed_load", "timeline")


def _passed(n, label):
    print(f"CRITERION {n} ({label}): PASS")


def _scenario_with_profile(name, seed, twin_seed):
    cfg = preset_config(name, seed=seed)
    trace, truth = build_scenario(cfg)
    twin, _ = build_scenario(normal_twin(cfg, seed=twin_seed))
    profile = train_profile(window_stream(twin, cfg.delta_us))
    windows = window_stream(trace, cfg.delta_us)
    return cfg, trace, truth, profile, windows


def test_c1_oracle_equivalence():
    started = time.perf_counter()
    rng = np.random.default_rng(2024)
    for case in range(100):
        if case < 90:
            n = int(rng.integers(1, 2500))
            span, delta = 2_000_000, int(rng.integers(120_000, 400_000))
        else:
            n = int(rng.integers(30_000, 50_001))
            span, delta = 3_000_000, 1_000_000
        trace = random_trace(rng, n, n_flows=int(rng.integers(1, 60)), span_us=span)
        got = window_stream(trace, delta)
        want = brute_force_windows(trace, delta)
        assert got == want, f"case {case}: streaming output diverged from oracle"
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0, f"oracle suite took {elapsed:.1f}s"
    _passed(1, "oracle equivalence")


def test_c2_decision_truth_table():
    profile = NormalProfile(
        x_star=1000.0, f_star=10.0, sigma_v=100.0, sigma_f=2.0,
        flow_mu=100.0, flow_sigma=10.0, n_windows=50, delta_us=200_000,
    )
    th = make_thresholds(profile, 3)  # xi_th 300, zeta_th 6
    assert th.xi_th == 300.0 and th.zeta_th == 6.0

    def window(volume, flows):
        per_flow = {}
        rest = volume
        for i in range(flows):
            share = rest if i == flows - 1 else max(1, volume // flows)
            per_flow[make_flow(i)] = share
            rest -= share
        return make_window_stats(0, 200_000, per_flow)

    # (volume, flow_count) -> (alert, trigger name)
    cases = [
        ((1200, 12), (False, "NONE")),    # neither exceeds
        ((1400, 12), (True, "VOLUME")),   # volume branch only
        ((1200, 17), (True, "FLOW")),     # flow branch only
        ((1800, 20), (True, "BOTH")),     # both branches
        ((1300, 12), (False, "NONE")),    # dx == xi_th exactly
        ((1200, 16), (False, "NONE")),    # df == zeta_th exactly
        ((1300, 16), (False, "NONE")),    # both at their boundaries
    ]
    for (volume, flows), (alert, trigger) in cases:
        out = detect(window(volume, flows), profile, th)
        assert out.alert is alert, (volume, flows)
        assert out.trigger.value == trigger, (volume, flows)
        vba = vba_detect(window(volume, flows), profile, th)
        assert vba.alert is (out.dx > th.xi_th)
    _passed(2, "decision truth table")


def test_c3_six_sigma_calibration():
    started = time.perf_counter()
    profile = NormalProfile(
        x_star=0.0, f_star=0.0, sigma_v=1.0, sigma_f=1.0,
        flow_mu=10_000.0, flow_sigma=500.0, n_windows=100, delta_us=200_000,
    )
    limits = control_limits(profile)
    rng = np.random.default_rng(7)
    samples = rng.normal(profile.flow_mu, profile.flow_sigma, 100_000)
    states = [classify_flow(float(v), limits) for v in samples]
    outside_ss = sum(1 for s in states if s is not FlowState.NORMAL) / len(states)
    outside_as = sum(1 for s in states if s is FlowState.ATTACK) / len(states)
    assert 0.001 <= outside_ss <= 0.01, f"outside 3-sigma band: {outside_ss:.4%}"
    assert outside_as <= 0.0001, f"outside 6-sigma band: {outside_as:.4%}"
    elapsed = time.perf_counter() - started
    assert elapsed < 5.0, f"calibration took {elapsed:.1f}s"
    _passed(3, "six-sigma calibration")


def test_c4_low_rate_superiority():
    for seed in range(10):
        cfg, trace, truth, profile, windows = _scenario_with_profile(
            "low_rate", seed, seed + 1000
        )
        combined = run_detector(windows, profile, 6)
        vba = run_detector(windows, profile, 6, vba=True)
        campaign = evaluate_run(combined, truth, Mode.CAMPAIGN)
        window_mode = evaluate_run(combined, truth, Mode.WINDOW)
        vba_window = evaluate_run(vba, truth, Mode.WINDOW)
        assert campaign.r_d == 1.0, f"seed {seed}: campaign r_d {campaign.r_d}"
        assert window_mode.r_d >= 0.9, f"seed {seed}: window r_d {window_mode.r_d}"
        assert vba_window.r_d <= 0.5, f"seed {seed}: volume-only r_d {vba_window.r_d}"
    _passed(4, "low-rate superiority over volume-only detection")


def test_c5_high_rate_parity():
    cfg, trace, truth, profile, windows = _scenario_with_profile("high_rate", 0, 1000)
    combined = run_detector(windows, profile, 6)
    vba = run_detector(windows, profile, 6, vba=True)
    assert evaluate_run(combined, truth, Mode.CAMPAIGN).r_d == 1.0
    assert evaluate_run(vba, truth, Mode.CAMPAIGN).r_d == 1.0
    gap = (
        evaluate_run(combined, truth, Mode.WINDOW).r_d
        - evaluate_run(vba, truth, Mode.WINDOW).r_d
    )
    assert gap <= 0.05, f"window-mode gap {gap}"
    _passed(5, "high-rate parity with volume-only detection")


def test_c6_roc_monotonicity_and_null_fp():
    cfg, trace, truth, profile, windows = _scenario_with_profile("mixed_load", 0, 1000)
    points = roc_sweep((trace, truth), profile, range(1, 11))
    assert [p.r for p in points] == list(range(1, 11))
    for a, b in zip(points, points[1:]):
        assert a.r_d >= b.r_d, f"r_d rose from r={a.r} to r={b.r}"
        assert a.r_fp >= b.r_fp, f"r_fp rose from r={a.r} to r={b.r}"

    # null scenario: no zombies anywhere, all alerts are false positives
    _, _, null_truth, null_profile, null_windows = _scenario_with_profile(
        "normal", 0, 1000
    )
    null_metrics = evaluate_run(
        run_detector(null_windows, null_profile, 6), null_truth, Mode.WINDOW
    )
    assert null_metrics.n == 0
    assert null_metrics.r_fp is not None and null_metrics.r_fp <= 0.05
    _passed(6, "ROC monotonicity and null false-positive rate")


def test_c7_characterization_soundness():
    for name in ATTACK_PRESETS:
        cfg, trace, truth, profile, windows = _scenario_with_profile(name, 0, 1000)
        outcomes = run_detector(windows, profile, 6)
        chars = characterize_run(windows, outcomes, control_limits(profile))
        attack_alerting = sorted(
            s for s in chars if truth.window_labels.get(s, False)
        )
        assert attack_alerting, f"{name}: no alerting attack window"
        first = chars[attack_alerting[0]]
        missing = truth.attack_flow_keys - set(first.attack_flows)
        assert not missing, f"{name}: {len(missing)} flooding flows not flagged"

        legit = frozenset(trace.flows) - truth.attack_flow_keys
        for start, ch in chars.items():
            leaked = set(ch.attack_flows) & legit
            assert not leaked, f"{name}: legitimate flows flagged at {start}: {leaked}"
    _passed(7, "characterization flags all flooders and no legitimate flows")


def test_c8_response_conservation():
    limits = ControlLimits(ucl_ss=1300.0, lcl_ss=700.0, ucl_as=1600.0, lcl_as=400.0)
    rng = np.random.default_rng(99)
    for case in range(1000):
        n_flows = int(rng.integers(1, 40))
        per_flow = {
            make_flow(i): int(b)
            for i, b in enumerate(rng.integers(1, 5000, n_flows))
        }
        w = make_window_stats(0, 200_000, per_flow)
        prev = frozenset(
            make_flow(int(i))
            for i in rng.choice(n_flows, int(rng.integers(0, n_flows + 1)), replace=False)
        )
        ch = characterize(w, prev, limits)
        policy = ResponsePolicy(float(rng.uniform(0.0, 5.0)))
        out = apply_response(w, ch, policy)

        assert out.volume_bytes <= w.volume_bytes, f"case {case}: volume grew"
        for flow in ch.normal_flows:
            assert out.per_flow_bytes[flow] == w.per_flow_bytes[flow], (
                f"case {case}: normal flow bytes changed"
            )
        assert not set(ch.attack_flows) & set(out.per_flow_bytes), (
            f"case {case}: attack flow survived"
        )

        # Same response again: same policy and attack set. Flows are not
        # re-classified within one window, so the already-throttled
        # suspicious flows are not acted on a second time.
        ch_again = Characterization(
            window=w.window,
            attack_flows=ch.attack_flows,
            suspicious_flows=frozenset(),
            normal_flows=frozenset(out.per_flow_bytes) - set(ch.attack_flows),
        )
        again = apply_response(out, ch_again, policy)
        assert again == out, f"case {case}: response not idempotent"
    _passed(8, "response conservation, preservation and idempotence")


ACCEPT_ATTACK_CFG = """\
duration_s=16.0
delta_ms=200
n_clients=8
client_request_rate=400.0
client_request_bytes=360
n_zombies=6
attack_rate_mbps=2.5
t_a=6.0
t_b=11.0
packet_bytes=1000
seed=77
"""

ACCEPT_NORMAL_CFG = ACCEPT_ATTACK_CFG.replace(
    "n_zombies=6", "n_zombies=0"
).replace("seed=77", "seed=78")


def _run_pipeline(d):
    (d / "attack.cfg").write_text(ACCEPT_ATTACK_CFG)
    (d / "normal.cfg").write_text(ACCEPT_NORMAL_CFG)
    steps = [
        ["generate", "--config", str(d / "attack.cfg"),
         "--out-trace", str(d / "live.csv"), "--out-truth", str(d / "truth.csv")],
        ["generate", "--config", str(d / "normal.cfg"),
         "--out-trace", str(d / "calm.csv"), "--out-truth", str(d / "calm_truth.csv")],
        ["train", "--trace", str(d / "calm.csv"), "--delta-ms", "200",
         "--out", str(d / "profile.csv")],
        ["detect", "--trace", str(d / "live.csv"), "--profile", str(d / "profile.csv"),
         "--r", "6", "--out", str(d / "alerts.csv")],
        ["characterize", "--trace", str(d / "live.csv"),
         "--profile", str(d / "profile.csv"), "--alerts", str(d / "alerts.csv"),
         "--r", "6", "--out", str(d / "chars.csv"),
         "--respond", "--out-trace", str(d / "clean.csv")],
        ["evaluate", "--alerts", str(d / "alerts.csv"),
         "--truth", str(d / "truth.csv"), "--mode", "window", "--r", "6",
         "--scenario", "determinism", "--out", str(d / "metrics.csv")],
        ["sweep", "--trace", str(d / "live.csv"), "--truth", str(d / "truth.csv"),
         "--profile", str(d / "profile.csv"), "--r-min", "1", "--r-max", "10",
         "--out", str(d / "roc.csv")],
    ]
    for argv in steps:
        assert main(argv) == 0, f"pipeline step failed: {argv[0]}"


def test_c9_pipeline_determinism(tmp_path):
    run1, run2 = tmp_path / "run1", tmp_path / "run2"
    run1.mkdir()
    run2.mkdir()
    _run_pipeline(run1)
    _run_pipeline(run2)
    artifacts = [
        "live.csv", "truth.csv", "truth.flows.csv", "calm.csv", "calm_truth.csv",
        "calm_truth.flows.csv", "profile.csv", "alerts.csv", "chars.csv",
        "clean.csv", "metrics.csv", "roc.csv",
    ]
    for name in artifacts:
        b1 = (run1 / name).read_bytes()
        b2 = (run2 / name).read_bytes()
        assert b1 == b2, f"{name} differs between identical runs"
    _passed(9, "byte-identical artifacts across repeated pipeline runs")
