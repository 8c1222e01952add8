"""Command-line pipeline: generate, train, detect, characterize, evaluate, sweep.

Each subcommand reads and writes the CSV artifacts defined in
``flowsentry.traceio``, so any stage can be rerun or swapped out. Exit
status is 0 on success and nonzero with a diagnostic on stderr otherwise.
The default generation seed can be set with the FLOWSENTRY_SEED environment
variable; an explicit config-file seed or --seed wins over it.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple

from . import traceio
from .characterizer import characterize_run, control_limits
from .detector import make_thresholds, run_detector
from .errors import ContractError, FlowSentryError, InvalidParameterError
from .evaluation import Mode, evaluate_run, roc_sweep
from .model import window_stream
from .baseline import train_profile
from .responder import ResponsePolicy, apply_response_trace, attack_strength
from .trafficgen import PRESET_NAMES, build_scenario, preset_config

SEED_ENV = "FLOWSENTRY_SEED"


@dataclass(frozen=True)
class RunManifest:
    """What one CLI invocation is about to touch.

    Validation enforces the two filesystem rules every subcommand shares:
    inputs must exist before execution, and outputs are never silently
    overwritten without force.
    """

    command: str
    inputs: Tuple[str, ...]
    outputs: Tuple[str, ...]
    params: dict = field(default_factory=dict)
    seed: Optional[int] = None

    def validate(self, force: bool = False) -> None:
        missing = [p for p in self.inputs if not os.path.exists(p)]
        if missing:
            raise ContractError(
                f"{self.command}: input files do not exist: {', '.join(missing)}"
            )
        if not force:
            existing = [p for p in self.outputs if os.path.exists(p)]
            if existing:
                raise ContractError(
                    f"{self.command}: output files already exist "
                    f"(pass --force to overwrite): {', '.join(existing)}"
                )


def _flows_path(truth_path: str) -> str:
    p = Path(truth_path)
    return str(p.with_name(p.stem + ".flows" + (p.suffix or ".csv")))


def _resolve_seed(arg_seed: Optional[int], cfg_seed: Optional[int]) -> int:
    """Precedence: --seed, then explicit config seed, then env, then 0."""
    if arg_seed is not None:
        return arg_seed
    if cfg_seed is not None:
        return cfg_seed
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise InvalidParameterError(
                f"{SEED_ENV} must be an integer, got {env!r}"
            ) from None
    return 0


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_generate(args) -> int:
    from dataclasses import replace

    if args.config:
        cfg, seed_explicit = traceio.read_scenario_config(args.config)
        seed = _resolve_seed(args.seed, cfg.seed if seed_explicit else None)
        cfg = replace(cfg, seed=seed)
    else:
        cfg = preset_config(args.preset, seed=_resolve_seed(args.seed, None))
    manifest = RunManifest(
        command="generate",
        inputs=(args.config,) if args.config else (),
        outputs=(args.out_trace, args.out_truth, _flows_path(args.out_truth)),
        params={"preset": args.preset, "config": args.config},
        seed=cfg.seed,
    )
    manifest.validate(args.force)
    trace, truth = build_scenario(cfg)
    traceio.write_trace(trace, args.out_trace)
    traceio.write_truth(truth, args.out_truth, _flows_path(args.out_truth))
    print(
        f"generated {len(trace)} records, {len(truth.window_labels)} windows "
        f"({truth.n_attack_windows()} attack) -> {args.out_trace}"
    )
    return 0


def _cmd_train(args) -> int:
    manifest = RunManifest(
        command="train", inputs=(args.trace,), outputs=(args.out,),
        params={"delta_ms": args.delta_ms},
    )
    manifest.validate(args.force)
    trace = traceio.read_trace(args.trace)
    windows = window_stream(trace, args.delta_ms * 1000)
    profile = train_profile(windows)
    traceio.write_profile(profile, args.out)
    print(
        f"trained on {profile.n_windows} windows: x*={profile.x_star:.1f} "
        f"f*={profile.f_star:.2f} sigma_v={profile.sigma_v:.1f} "
        f"sigma_f={profile.sigma_f:.3f} -> {args.out}"
    )
    return 0


def _check_delta(profile, delta_ms: Optional[int], stage: str) -> None:
    if delta_ms is not None and delta_ms * 1000 != profile.delta_us:
        raise ContractError(
            f"{stage}: window width mismatch: profile was trained at "
            f"{profile.delta_us} us windows but {delta_ms * 1000} us was requested; "
            "retrain the profile or drop the conflicting --delta-ms"
        )


def _cmd_detect(args) -> int:
    manifest = RunManifest(
        command="detect", inputs=(args.trace, args.profile), outputs=(args.out,),
        params={"r": args.r, "vba": args.vba},
    )
    manifest.validate(args.force)
    profile = traceio.read_profile(args.profile)
    _check_delta(profile, args.delta_ms, "detect")
    trace = traceio.read_trace(args.trace)
    windows = window_stream(trace, profile.delta_us)
    outcomes = run_detector(windows, profile, args.r, vba=args.vba)
    traceio.write_alert_log(outcomes, args.out)
    n_alerts = sum(1 for o in outcomes if o.alert)
    print(f"detected over {len(outcomes)} windows: {n_alerts} alerts -> {args.out}")
    return 0


def _cmd_characterize(args) -> int:
    outputs = [args.out]
    if args.respond:
        if not args.out_trace:
            raise InvalidParameterError("--respond requires --out-trace")
        outputs.append(args.out_trace)
    manifest = RunManifest(
        command="characterize",
        inputs=(args.trace, args.profile, args.alerts),
        outputs=tuple(outputs),
        params={"r": args.r, "respond": args.respond},
    )
    manifest.validate(args.force)
    profile = traceio.read_profile(args.profile)
    _check_delta(profile, args.delta_ms, "characterize")
    trace = traceio.read_trace(args.trace)
    logged = traceio.read_alert_log(args.alerts)
    windows = window_stream(trace, profile.delta_us)
    if [w.window.start for w in windows] != [o.window.start for o in logged]:
        raise ContractError(
            "characterize: alert log windows do not line up with the trace "
            "windowing; was the log produced from this trace and profile?"
        )
    outcomes = run_detector(windows, profile, args.r)
    for fresh, old in zip(outcomes, logged):
        if fresh.alert != old.alert:
            raise ContractError(
                f"characterize: recomputed alert at window {fresh.window.start} "
                f"disagrees with the log; was the log produced with r={args.r} "
                "and this profile?"
            )
    limits = control_limits(profile)
    chars = characterize_run(windows, outcomes, limits)
    by_start = {w.window.start: w for w in windows}
    traceio.write_characterization_log(
        [(by_start[s], ch) for s, ch in chars.items()], args.out
    )
    print(f"characterized {len(chars)} alerting windows -> {args.out}")
    if args.respond:
        th = make_thresholds(profile, args.r)
        policies = {
            o.window.start: ResponsePolicy(attack_strength(o, th))
            for o in outcomes
            if o.alert
        }
        responded = apply_response_trace(trace, profile.delta_us, chars, policies)
        traceio.write_trace(responded, args.out_trace)
        print(
            f"response dropped/throttled {len(trace) - len(responded)} records "
            f"-> {args.out_trace}"
        )
    return 0


def _cmd_evaluate(args) -> int:
    manifest = RunManifest(
        command="evaluate", inputs=(args.alerts, args.truth, _flows_path(args.truth)),
        outputs=(args.out,), params={"mode": args.mode, "r": args.r},
    )
    manifest.validate(args.force)
    outcomes = traceio.read_alert_log(args.alerts)
    truth = traceio.read_truth(args.truth, _flows_path(args.truth))
    metrics = evaluate_run(outcomes, truth, Mode(args.mode))
    scenario = args.scenario or Path(args.truth).stem
    traceio.write_metrics([(scenario, args.r, metrics)], args.out)
    r_d = "NA" if metrics.r_d is None else f"{metrics.r_d:.4f}"
    r_fp = "NA" if metrics.r_fp is None else f"{metrics.r_fp:.4f}"
    print(
        f"{scenario} [{args.mode}] r_d={r_d} r_fp={r_fp} "
        f"(d={metrics.d}/{metrics.n}, f={metrics.f}/{metrics.m}) -> {args.out}"
    )
    return 0


def _cmd_sweep(args) -> int:
    manifest = RunManifest(
        command="sweep",
        inputs=(args.trace, args.truth, _flows_path(args.truth), args.profile),
        outputs=(args.out,), params={"r_min": args.r_min, "r_max": args.r_max},
    )
    manifest.validate(args.force)
    if args.r_min > args.r_max:
        raise InvalidParameterError(
            f"sweep: --r-min {args.r_min} exceeds --r-max {args.r_max}"
        )
    profile = traceio.read_profile(args.profile)
    trace = traceio.read_trace(args.trace)
    truth = traceio.read_truth(args.truth, _flows_path(args.truth))
    points = roc_sweep((trace, truth), profile, range(args.r_min, args.r_max + 1))
    traceio.write_roc(points, args.out)
    print(f"swept r={args.r_min}..{args.r_max} ({len(points)} points) -> {args.out}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flowsentry",
        description="Flow-statistical flood detection pipeline.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="synthesize a scenario trace plus ground truth")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="scenario config file (key=value lines)")
    src.add_argument("--preset", choices=PRESET_NAMES, help="named scenario preset")
    p.add_argument("--seed", type=int, help=f"generation seed (default: ${SEED_ENV} or 0)")
    p.add_argument("--out-trace", required=True, help="output trace CSV")
    p.add_argument("--out-truth", required=True,
                   help="output truth CSV (flow list lands next to it)")
    p.add_argument("--force", action="store_true", help="overwrite existing outputs")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("train", help="train a normal-traffic profile from a trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--delta-ms", type=int, required=True, help="window width in ms")
    p.add_argument("--out", required=True, help="output profile CSV")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("detect", help="run the detector over a trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--profile", required=True)
    p.add_argument("--r", type=int, required=True, help="tolerance factor >= 1")
    p.add_argument("--vba", action="store_true", help="volume-only baseline detector")
    p.add_argument("--delta-ms", type=int,
                   help="must match the profile's window width when given")
    p.add_argument("--out", required=True, help="output alert log CSV")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("characterize", help="classify flows of alerting windows")
    p.add_argument("--trace", required=True)
    p.add_argument("--profile", required=True)
    p.add_argument("--alerts", required=True, help="alert log from detect")
    p.add_argument("--r", type=int, default=6,
                   help="tolerance factor the alert log was produced with")
    p.add_argument("--delta-ms", type=int,
                   help="must match the profile's window width when given")
    p.add_argument("--out", required=True, help="output characterization CSV")
    p.add_argument("--respond", action="store_true",
                   help="also apply drop/throttle response")
    p.add_argument("--out-trace", help="post-response trace CSV (with --respond)")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=_cmd_characterize)

    p = sub.add_parser("evaluate", help="score an alert log against ground truth")
    p.add_argument("--alerts", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.WINDOW.value)
    p.add_argument("--r", type=int, required=True,
                   help="tolerance factor recorded in the metrics row")
    p.add_argument("--scenario", help="scenario name for the metrics row")
    p.add_argument("--out", required=True, help="output metrics CSV")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("sweep", help="ROC sweep over a tolerance-factor range")
    p.add_argument("--trace", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--profile", required=True)
    p.add_argument("--r-min", type=int, required=True)
    p.add_argument("--r-max", type=int, required=True)
    p.add_argument("--out", required=True, help="output ROC CSV")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FlowSentryError as exc:
        print(f"flowsentry: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"flowsentry: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
