"""File formats: traces, profiles, alert logs, truth, metrics, configs.

Every artifact is CSV except the scenario config, which is flat key=value
text. Writers emit canonical, byte-stable output (rows sorted where the
in-memory form is unordered, floats via repr so values round-trip exactly);
readers validate and report the file, line, and field of the first problem.
"""

from __future__ import annotations

import csv
import io
from dataclasses import fields as dataclass_fields
from typing import List, Sequence, Tuple

import numpy as np
import pandas as pd

from .baseline import NormalProfile
from .characterizer import Characterization, FlowState
from .detector import DetectionOutcome, Trigger
from .errors import ConfigError, FileFormatError
from .evaluation import Metrics, Mode, RocPoint
from .model import FlowKey, Protocol, TimeWindow, Trace, WindowStats
from .trafficgen import GroundTruth, ScenarioConfig

TRACE_COLUMNS = ["ts_us", "src", "dst", "proto", "sport", "dport", "bytes"]
PROFILE_COLUMNS = [
    "x_star", "f_star", "sigma_v", "sigma_f", "flow_mu", "flow_sigma",
    "n_windows", "delta_us",
]
ALERT_COLUMNS = ["window_start_us", "x_in", "f_in", "dx", "df", "alert", "trigger"]
CHAR_COLUMNS = [
    "window_start_us", "flow_src", "flow_dst", "proto", "sport", "dport",
    "bytes", "state",
]
TRUTH_COLUMNS = ["window_start_us", "is_attack"]
FLOWS_COLUMNS = ["src", "dst", "proto", "sport", "dport"]
METRICS_COLUMNS = [
    "scenario", "r", "mode", "d", "n", "f", "m", "r_d", "r_fp", "latency_windows",
]
ROC_COLUMNS = ["r", "r_d", "r_fp"]

NA = "NA"  # explicit undefined-marker for rates without a denominator


def _fmt(value) -> str:
    if value is None:
        return NA
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_opt_float(text: str, path, line, field) -> float | None:
    if text == NA:
        return None
    try:
        return float(text)
    except ValueError:
        raise FileFormatError(path, line, field, f"not a number: {text!r}") from None


def _parse_bool(text: str, path, line, field) -> bool:
    norm = text.strip().lower()
    if norm in ("true", "1"):
        return True
    if norm in ("false", "0"):
        return False
    raise FileFormatError(path, line, field, f"not a boolean: {text!r}")


def _check_header(path, actual: Sequence[str], expected: Sequence[str]) -> None:
    if list(actual) != list(expected):
        raise FileFormatError(
            path, 1, "header",
            f"expected columns {','.join(expected)} but found {','.join(map(str, actual))}",
        )


# ---------------------------------------------------------------------------
# packet traces
# ---------------------------------------------------------------------------

def write_trace(trace: Trace, path) -> None:
    """Write a trace as ts_us,src,dst,proto,sport,dport,bytes."""
    if len(trace):
        src = np.array([k.src for k in trace.flows], dtype=object)
        dst = np.array([k.dst for k in trace.flows], dtype=object)
        proto = np.array([k.proto.name for k in trace.flows], dtype=object)
        sport = np.array([k.sport for k in trace.flows], dtype=np.int64)
        dport = np.array([k.dport for k in trace.flows], dtype=np.int64)
        fid = trace.flow_ids
        df = pd.DataFrame(
            {
                "ts_us": trace.ts_us,
                "src": src[fid],
                "dst": dst[fid],
                "proto": proto[fid],
                "sport": sport[fid],
                "dport": dport[fid],
                "bytes": trace.nbytes,
            }
        )
    else:
        df = pd.DataFrame({c: [] for c in TRACE_COLUMNS})
    df.to_csv(path, index=False, lineterminator="\n")


def read_trace(path) -> Trace:
    """Read and validate a trace CSV into columnar form."""
    try:
        df = pd.read_csv(
            path,
            dtype={
                "ts_us": "int64", "src": "str", "dst": "str", "proto": "str",
                "sport": "int64", "dport": "int64", "bytes": "int64",
            },
        )
    except pd.errors.EmptyDataError:
        raise FileFormatError(path, 1, "header", "file is empty") from None
    except (ValueError, pd.errors.ParserError):
        df = None
    if df is None:
        _locate_trace_error(path)  # always raises with a line number
    _check_header(path, df.columns, TRACE_COLUMNS)
    if not len(df):
        return Trace.empty()

    ts = df["ts_us"].to_numpy()
    if int(ts[0]) < 0:
        raise FileFormatError(path, 2, "ts_us", "timestamps must be >= 0")
    steps = np.diff(ts)
    if steps.size and int(steps.min()) < 0:
        bad = int(np.argmax(steps < 0)) + 1
        raise FileFormatError(path, bad + 2, "ts_us", "trace is not sorted by timestamp")
    nb = df["bytes"].to_numpy()
    if int(nb.min()) < 1:
        bad = int(np.argmax(nb < 1))
        raise FileFormatError(path, bad + 2, "bytes", "byte counts must be >= 1")
    for col in ("sport", "dport"):
        vals = df[col].to_numpy()
        off = (vals < 0) | (vals > 65535)
        if off.any():
            bad = int(np.argmax(off))
            raise FileFormatError(path, bad + 2, col, "port outside [0, 65535]")
    proto = df["proto"]
    known = proto.isin([p.name for p in Protocol])
    if not known.all():
        bad = int(np.argmax(~known.to_numpy()))
        raise FileFormatError(
            path, bad + 2, "proto", f"unknown protocol {proto.iloc[bad]!r}"
        )

    sep = "\x1f"
    key_str = (
        df["src"] + sep + df["dst"] + sep + df["proto"] + sep
        + df["sport"].astype(str) + sep + df["dport"].astype(str)
    )
    codes, uniques = pd.factorize(key_str)
    flows = []
    for combined in uniques:
        src, dst, proto_name, sport, dport = combined.split(sep)
        flows.append(FlowKey(src, dst, Protocol[proto_name], int(sport), int(dport)))
    return Trace(
        np.ascontiguousarray(ts, dtype=np.int64),
        np.ascontiguousarray(codes, dtype=np.int64),
        np.ascontiguousarray(nb, dtype=np.int64),
        tuple(flows),
    )


def _locate_trace_error(path):
    """Slow re-read after a typed parse failed, to name the offending cell."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise FileFormatError(path, 1, "header", "file is empty")
        _check_header(path, header, TRACE_COLUMNS)
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(TRACE_COLUMNS):
                raise FileFormatError(
                    path, lineno, "row", f"expected {len(TRACE_COLUMNS)} fields, got {len(row)}"
                )
            for col in ("ts_us", "sport", "dport", "bytes"):
                cell = row[TRACE_COLUMNS.index(col)]
                try:
                    int(cell)
                except ValueError:
                    raise FileFormatError(
                        path, lineno, col, f"not an integer: {cell!r}"
                    ) from None
    raise FileFormatError(path, 1, "header", "malformed CSV")


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------

def write_profile(profile: NormalProfile, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PROFILE_COLUMNS)
        writer.writerow(
            [
                _fmt(profile.x_star), _fmt(profile.f_star),
                _fmt(profile.sigma_v), _fmt(profile.sigma_f),
                _fmt(profile.flow_mu), _fmt(profile.flow_sigma),
                profile.n_windows, profile.delta_us,
            ]
        )


def read_profile(path) -> NormalProfile:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise FileFormatError(path, 1, "header", "file is empty")
        _check_header(path, header, PROFILE_COLUMNS)
        row = next(reader, None)
        if row is None or len(row) != len(PROFILE_COLUMNS):
            raise FileFormatError(path, 2, "row", "expected exactly one data row")
    vals = {}
    for field, cell in zip(PROFILE_COLUMNS, row):
        try:
            vals[field] = int(cell) if field in ("n_windows", "delta_us") else float(cell)
        except ValueError:
            raise FileFormatError(path, 2, field, f"not a number: {cell!r}") from None
    for field in ("sigma_v", "sigma_f", "flow_sigma"):
        if vals[field] < 0:
            raise FileFormatError(path, 2, field, "standard deviation must be >= 0")
    if vals["n_windows"] < 2:
        raise FileFormatError(path, 2, "n_windows", "profile needs >= 2 windows")
    if vals["delta_us"] < 1:
        raise FileFormatError(path, 2, "delta_us", "window width must be >= 1 us")
    return NormalProfile(**vals)


# ---------------------------------------------------------------------------
# alert logs
# ---------------------------------------------------------------------------

def write_alert_log(outcomes: Sequence[DetectionOutcome], path) -> None:
    """One row per window, alerting or not."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ALERT_COLUMNS)
        for o in outcomes:
            writer.writerow(
                [
                    o.window.start, _fmt(o.x_in), _fmt(o.f_in), _fmt(o.dx),
                    _fmt(o.df), "true" if o.alert else "false", o.trigger.value,
                ]
            )


def read_alert_log(path) -> List[DetectionOutcome]:
    outcomes = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise FileFormatError(path, 1, "header", "file is empty")
        _check_header(path, header, ALERT_COLUMNS)
        rows = list(reader)
    starts = []
    for lineno, row in enumerate(rows, start=2):
        if len(row) != len(ALERT_COLUMNS):
            raise FileFormatError(path, lineno, "row", "wrong field count")
        try:
            start = int(row[0])
        except ValueError:
            raise FileFormatError(path, lineno, "window_start_us", "not an integer") from None
        x_in = _parse_opt_float(row[1], path, lineno, "x_in")
        f_in = _parse_opt_float(row[2], path, lineno, "f_in")
        dx = _parse_opt_float(row[3], path, lineno, "dx")
        df = _parse_opt_float(row[4], path, lineno, "df")
        alert = _parse_bool(row[5], path, lineno, "alert")
        try:
            trigger = Trigger(row[6])
        except ValueError:
            raise FileFormatError(path, lineno, "trigger", f"unknown trigger {row[6]!r}") from None
        starts.append(start)
        outcomes.append((start, x_in, f_in, dx, df, alert, trigger))
    delta = starts[1] - starts[0] if len(starts) > 1 else 1
    return [
        DetectionOutcome(
            window=TimeWindow(start, delta), x_in=x_in, f_in=f_in,
            dx=dx, df=df, alert=alert, trigger=trigger,
        )
        for start, x_in, f_in, dx, df, alert, trigger in outcomes
    ]


# ---------------------------------------------------------------------------
# characterization logs
# ---------------------------------------------------------------------------

def write_characterization_log(
    entries: Sequence[Tuple[WindowStats, Characterization]], path
) -> None:
    """One row per (alerting window, active flow), sorted for stable output."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CHAR_COLUMNS)
        for stats, ch in sorted(entries, key=lambda e: e[0].window.start):
            for flow in sorted(stats.per_flow_bytes):
                writer.writerow(
                    [
                        stats.window.start, flow.src, flow.dst, flow.proto.name,
                        flow.sport, flow.dport, stats.per_flow_bytes[flow],
                        ch.state_of(flow).value,
                    ]
                )


def read_characterization_log(path) -> List[tuple]:
    """Rows as (window_start_us, FlowKey, bytes, FlowState)."""
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise FileFormatError(path, 1, "header", "file is empty")
        _check_header(path, header, CHAR_COLUMNS)
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(CHAR_COLUMNS):
                raise FileFormatError(path, lineno, "row", "wrong field count")
            try:
                start = int(row[0])
                key = FlowKey(row[1], row[2], Protocol[row[3]], int(row[4]), int(row[5]))
                nbytes = int(row[6])
                state = FlowState(row[7])
            except (ValueError, KeyError) as exc:
                raise FileFormatError(path, lineno, "row", str(exc)) from None
            out.append((start, key, nbytes, state))
    return out


# ---------------------------------------------------------------------------
# ground truth
# ---------------------------------------------------------------------------

def write_truth(truth: GroundTruth, labels_path, flows_path) -> None:
    with open(labels_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRUTH_COLUMNS)
        for start in sorted(truth.window_labels):
            writer.writerow([start, "true" if truth.window_labels[start] else "false"])
    with open(flows_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(FLOWS_COLUMNS)
        for key in sorted(truth.attack_flow_keys):
            writer.writerow([key.src, key.dst, key.proto.name, key.sport, key.dport])


def read_truth(labels_path, flows_path) -> GroundTruth:
    labels = {}
    with open(labels_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise FileFormatError(labels_path, 1, "header", "file is empty")
        _check_header(labels_path, header, TRUTH_COLUMNS)
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(TRUTH_COLUMNS):
                raise FileFormatError(labels_path, lineno, "row", "wrong field count")
            try:
                start = int(row[0])
            except ValueError:
                raise FileFormatError(
                    labels_path, lineno, "window_start_us", "not an integer"
                ) from None
            labels[start] = _parse_bool(row[1], labels_path, lineno, "is_attack")
    keys = set()
    with open(flows_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise FileFormatError(flows_path, 1, "header", "file is empty")
        _check_header(flows_path, header, FLOWS_COLUMNS)
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(FLOWS_COLUMNS):
                raise FileFormatError(flows_path, lineno, "row", "wrong field count")
            try:
                keys.add(FlowKey(row[0], row[1], Protocol[row[2]], int(row[3]), int(row[4])))
            except (ValueError, KeyError) as exc:
                raise FileFormatError(flows_path, lineno, "row", str(exc)) from None
    # the exact onset instant is not persisted; evaluation falls back to the
    # first attack-labeled window, which coincides for generated scenarios
    return GroundTruth(None, frozenset(keys), labels)


# ---------------------------------------------------------------------------
# metrics and ROC tables
# ---------------------------------------------------------------------------

def write_metrics(rows: Sequence[Tuple[str, int, Metrics]], path) -> None:
    """Rows are (scenario name, r, Metrics)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(METRICS_COLUMNS)
        for scenario, r, met in rows:
            writer.writerow(
                [
                    scenario, r, met.mode.value, met.d, met.n, met.f, met.m,
                    _fmt(met.r_d), _fmt(met.r_fp), _fmt(met.latency_windows),
                ]
            )


def read_metrics(path) -> List[tuple]:
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise FileFormatError(path, 1, "header", "file is empty")
        _check_header(path, header, METRICS_COLUMNS)
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(METRICS_COLUMNS):
                raise FileFormatError(path, lineno, "row", "wrong field count")
            try:
                met = Metrics(
                    mode=Mode(row[2]), d=int(row[3]), n=int(row[4]),
                    f=int(row[5]), m=int(row[6]),
                    r_d=_parse_opt_float(row[7], path, lineno, "r_d"),
                    r_fp=_parse_opt_float(row[8], path, lineno, "r_fp"),
                    latency_windows=None if row[9] == NA else int(row[9]),
                )
            except ValueError as exc:
                raise FileFormatError(path, lineno, "row", str(exc)) from None
            out.append((row[0], int(row[1]), met))
    return out


def write_roc(points: Sequence[RocPoint], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ROC_COLUMNS)
        for p in points:
            writer.writerow([p.r, _fmt(p.r_d), _fmt(p.r_fp)])


def read_roc(path) -> List[RocPoint]:
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise FileFormatError(path, 1, "header", "file is empty")
        _check_header(path, header, ROC_COLUMNS)
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(ROC_COLUMNS):
                raise FileFormatError(path, lineno, "row", "wrong field count")
            try:
                r = int(row[0])
            except ValueError:
                raise FileFormatError(path, lineno, "r", "not an integer") from None
            out.append(
                RocPoint(
                    r=r,
                    r_d=_parse_opt_float(row[1], path, lineno, "r_d"),
                    r_fp=_parse_opt_float(row[2], path, lineno, "r_fp"),
                )
            )
    return out


# ---------------------------------------------------------------------------
# scenario configs (flat key=value text)
# ---------------------------------------------------------------------------

_CONFIG_TYPES = {f.name: f.type for f in dataclass_fields(ScenarioConfig)}


def write_scenario_config(cfg: ScenarioConfig, path) -> None:
    with open(path, "w") as fh:
        for f in dataclass_fields(ScenarioConfig):
            fh.write(f"{f.name}={getattr(cfg, f.name)}\n")


def read_scenario_config(path) -> Tuple[ScenarioConfig, bool]:
    """Parse a config file; unknown keys are rejected, omitted keys take the
    ScenarioConfig defaults. Returns (config, seed_was_explicit)."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise FileFormatError(path, lineno, "line", "expected key=value")
            key, _, text = line.partition("=")
            key, text = key.strip(), text.strip()
            if key not in _CONFIG_TYPES:
                raise ConfigError(
                    f"{path}:{lineno}: unknown config key {key!r}; valid keys: "
                    + ", ".join(sorted(_CONFIG_TYPES))
                )
            if key in values:
                raise ConfigError(f"{path}:{lineno}: duplicate config key {key!r}")
            kind = _CONFIG_TYPES[key]
            try:
                values[key] = int(text) if kind in (int, "int") else float(text)
            except ValueError:
                raise FileFormatError(
                    path, lineno, key, f"expected {kind if isinstance(kind, str) else kind.__name__}, got {text!r}"
                ) from None
    cfg = ScenarioConfig(**values)
    cfg.validate()
    return cfg, "seed" in values
