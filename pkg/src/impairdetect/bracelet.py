"""Seeded simulation of the wrist-bracelet loop.

pulse waveform -> piezo trace -> band-pass noise cancellation -> windowed
pulse-rate estimate -> range check with debounce (or a help-sound event) ->
GPS-stamped alert line handed to a sink.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np
from scipy.signal import find_peaks, sosfilt, sosfilt_zi

from .rng import make_rng

SAMPLE_RATE = 100.0
BAND = (0.7, 4.0)
WANDER_HZ = 0.2
WANDER_AMPLITUDE = 0.15
REFRACTORY_S = 0.25
RISE, FALL = 0.06, 0.3  # beat-shape sd as fractions of the period

THRESHOLD = "THRESHOLD"
HELP_SOUND = "HELP_SOUND"

# per-window branches in the step log
NEGATIVE_FEEDBACK = "negative_feedback"
OUT_OF_RANGE = "out_of_range"
UNMEASURABLE = "unmeasurable"
ALERT_THRESHOLD = "alert_threshold"
ALERT_HELP = "alert_help_sound"


@dataclass(frozen=True)
class SignalTrace:
    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", s)
        if not self.sample_rate > 0:
            raise ValueError("sample_rate must be positive")
        if not np.all(np.isfinite(s)):
            raise ValueError("trace contains non-finite samples")

    def __len__(self):
        return len(self.samples)

    @property
    def duration(self):
        return len(self.samples) / self.sample_rate

    def times(self):
        return np.arange(len(self.samples)) / self.sample_rate

    def scaled(self, a) -> "SignalTrace":
        return SignalTrace(a * self.samples, self.sample_rate)


@dataclass(frozen=True)
class ScenarioConfig:
    true_bpm: float = 72.0
    duration_s: float = 60.0
    noise_rms: float = 0.1
    seed: int = 0
    help_sound_at: float | None = None
    gps: tuple[float, float] = (28.5355, 77.391)
    bpm_low: float = 50.0
    bpm_high: float = 120.0
    consecutive_windows: int = 3
    window_s: float = 5.0
    sample_rate: float = SAMPLE_RATE
    start_time: str = "2018-05-01T10:00:00Z"

    def __post_init__(self):
        object.__setattr__(self, "gps", tuple(float(v) for v in self.gps))
        self.validate()

    def validate(self):
        if not 20.0 <= self.true_bpm <= 250.0:
            raise ValueError(f"true_bpm must be in [20, 250], got {self.true_bpm}")
        if not self.duration_s > 0:
            raise ValueError("duration_s must be positive")
        if not self.noise_rms >= 0:
            raise ValueError("noise_rms must be >= 0")
        if not self.bpm_low < self.bpm_high:
            raise ValueError("bpm_low must be below bpm_high")
        if self.consecutive_windows < 1:
            raise ValueError("consecutive_windows must be >= 1")
        if self.window_s < 2:
            raise ValueError("window_s must be >= 2 s")
        if self.help_sound_at is not None and self.help_sound_at < 0:
            raise ValueError("help_sound_at must be >= 0")
        lat, lon = self.gps
        if not (-90 <= lat <= 90 and -180 <= lon <= 180):
            raise ValueError(f"gps out of range: {self.gps}")
        parse_timestamp(self.start_time)

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        d = dict(d)
        gps = d.pop("gps", None)
        if isinstance(gps, dict):
            d["gps"] = (gps["lat"], gps["lon"])
        elif gps is not None:
            d["gps"] = tuple(gps)
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown scenario keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["gps"] = {"lat": self.gps[0], "lon": self.gps[1]}
        return d


def load_scenario(path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: scenario must be a JSON object")
    return ScenarioConfig.from_dict(data)


@dataclass(frozen=True)
class AlertEvent:
    timestamp: datetime
    lat: float
    lon: float
    pulse_bpm: float
    reason: str

    def __post_init__(self):
        if self.reason not in (THRESHOLD, HELP_SOUND):
            raise ValueError(f"unknown alert reason {self.reason!r}")
        if self.timestamp.tzinfo is None:
            raise ValueError("alert timestamp must be timezone-aware")


def parse_timestamp(text: str) -> datetime:
    if not text.endswith("Z"):
        raise ValueError(f"timestamp must be UTC with a trailing Z: {text!r}")
    return datetime.fromisoformat(text[:-1]).replace(tzinfo=timezone.utc)


def format_timestamp(ts: datetime) -> str:
    ts = ts.astimezone(timezone.utc)
    base = ts.strftime("%Y-%m-%dT%H:%M:%S")
    if ts.microsecond:
        base += f".{ts.microsecond // 1000:03d}"
    return base + "Z"


def format_alert(ev: AlertEvent) -> str:
    return (f"ALERT|{format_timestamp(ev.timestamp)}|{ev.lat:.6f},{ev.lon:.6f}"
            f"|pulse={ev.pulse_bpm:.1f}|reason={ev.reason}")


def parse_alert(line: str) -> AlertEvent:
    parts = line.strip().split("|")
    if len(parts) != 5 or parts[0] != "ALERT":
        raise ValueError(f"not an alert line: {line!r}")
    _, ts, coords, pulse, reason = parts
    lat, lon = coords.split(",")
    if not pulse.startswith("pulse=") or not reason.startswith("reason="):
        raise ValueError(f"malformed alert line: {line!r}")
    return AlertEvent(parse_timestamp(ts), float(lat), float(lon),
                      float(pulse[len("pulse="):]), reason[len("reason="):])


# -- signal chain -----------------------------------------------------------

def generate_pulse_signal(cfg: ScenarioConfig) -> SignalTrace:
    """One systolic bump per beat, peaking at (k + 1/2) * period, plus wander and white noise.

    Each bump is a split Gaussian: a sharp upstroke (sd RISE * period) and a
    slower diastolic run-off (sd FALL * period).
    """
    fs = cfg.sample_rate
    n = int(round(cfg.duration_s * fs))
    t = np.arange(n) / fs
    period = 60.0 / cfg.true_bpm
    rise, fall = RISE * period, FALL * period
    beats = (np.arange(int(np.ceil(cfg.duration_s / period)) + 1) + 0.5) * period
    x = np.zeros(n)
    for b in beats:
        lo, hi = np.searchsorted(t, [b - 5 * rise, b + 5 * fall])
        d = t[lo:hi] - b
        x[lo:hi] += np.exp(-0.5 * (d / np.where(d < 0, rise, fall)) ** 2)
    x += WANDER_AMPLITUDE * np.sin(2 * np.pi * WANDER_HZ * t)
    if cfg.noise_rms > 0:
        x += make_rng(cfg.seed, "bracelet.noise").normal(0.0, cfg.noise_rms, n)
    return SignalTrace(x, fs)


def biquad(kind: str, f0: float, fs: float, q: float = 1 / math.sqrt(2)) -> np.ndarray:
    """One second-order section [b0, b1, b2, 1, a1, a2] from the audio-EQ cookbook."""
    w0 = 2 * math.pi * f0 / fs
    alpha = math.sin(w0) / (2 * q)
    c = math.cos(w0)
    if kind == "lowpass":
        b = [(1 - c) / 2, 1 - c, (1 - c) / 2]
    elif kind == "highpass":
        b = [(1 + c) / 2, -(1 + c), (1 + c) / 2]
    else:
        raise ValueError(f"unknown biquad kind {kind!r}")
    a0 = 1 + alpha
    return np.array([b[0] / a0, b[1] / a0, b[2] / a0, 1.0, -2 * c / a0, (1 - alpha) / a0])


def band_pass_sections(fs: float, band=BAND) -> np.ndarray:
    return np.stack([biquad("highpass", band[0], fs), biquad("lowpass", band[1], fs)])


def cancel_noise(raw: SignalTrace, band=BAND) -> SignalTrace:
    """High-pass then low-pass biquad, started in steady state for the first sample."""
    if raw.sample_rate < 20:
        raise ValueError(f"sample rate {raw.sample_rate} Hz too low for a {band[0]}-{band[1]} Hz band")
    if len(raw) == 0:
        return raw
    sos = band_pass_sections(raw.sample_rate, band)
    zi = sosfilt_zi(sos) * raw.samples[0]
    out, _ = sosfilt(sos, raw.samples, zi=zi)
    return SignalTrace(out, raw.sample_rate)


def detect_peaks(x: np.ndarray, fs: float) -> np.ndarray:
    """Local maxima above mean + 0.5 sd, at least REFRACTORY_S apart (taller peak wins)."""
    if len(x) < 3 or np.std(x) == 0:
        return np.empty(0, dtype=int)
    thr = np.mean(x) + 0.5 * np.std(x)
    peaks, _ = find_peaks(x, height=thr, distance=max(1, int(round(REFRACTORY_S * fs))))
    return peaks


def window_bpm(x: np.ndarray, fs: float) -> float | None:
    peaks = detect_peaks(x, fs)
    if len(peaks) < 2:
        return None
    return 60.0 * (len(peaks) - 1) * fs / (peaks[-1] - peaks[0])


def estimate_pulse_rate(clean: SignalTrace, window_s: float = 5.0) -> list[float | None]:
    """One estimate per full non-overlapping window; None marks an unmeasurable window."""
    if len(clean) == 0:
        raise ValueError("empty trace")
    if window_s < 2:
        raise ValueError("window_s must be >= 2 s")
    step = int(round(window_s * clean.sample_rate))
    n_windows = len(clean) // step
    return [window_bpm(clean.samples[i * step:(i + 1) * step], clean.sample_rate)
            for i in range(n_windows)]


# -- decision loop ----------------------------------------------------------

@dataclass(frozen=True)
class StepLog:
    window_index: int
    t_start_s: float
    bpm: float | None
    branch: str


@dataclass
class SimulationResult:
    alert: AlertEvent | None
    log: list = field(default_factory=list)
    alert_time_s: float | None = None

    def log_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["window_index", "t_start_s", "bpm", "branch"])
        for s in self.log:
            w.writerow([s.window_index, f"{s.t_start_s:g}", "" if s.bpm is None else f"{s.bpm:.3f}", s.branch])
        return buf.getvalue()


def run_decision_loop(cfg: ScenarioConfig, sink=None) -> SimulationResult:
    """Walk the windows in time order; the first trigger (help sound or debounced range breach) wins."""
    raw = generate_pulse_signal(cfg)
    clean = cancel_noise(raw)
    estimates = estimate_pulse_rate(clean, cfg.window_s)
    fs, ws = clean.sample_rate, cfg.window_s
    start = parse_timestamp(cfg.start_time)
    help_at = cfg.help_sound_at if cfg.help_sound_at is not None and cfg.help_sound_at <= cfg.duration_s else None

    log: list[StepLog] = []
    streak = 0
    last_bpm = None

    def fire(t, bpm, reason):
        ev = AlertEvent(start + timedelta(seconds=t), cfg.gps[0], cfg.gps[1],
                        float("nan") if bpm is None else bpm, reason)
        if sink is not None:
            sink(format_alert(ev))
        return SimulationResult(ev, log, t)

    def help_alert(window_index):
        lo = int(round(max(0.0, help_at - ws) * fs))
        hi = int(round(help_at * fs))
        bpm = window_bpm(clean.samples[lo:hi], fs) if hi - lo >= 2 * fs else None
        bpm = bpm if bpm is not None else last_bpm
        log.append(StepLog(window_index, help_at, bpm, ALERT_HELP))
        return fire(help_at, bpm, HELP_SOUND)

    for i, bpm in enumerate(estimates):
        t_end = (i + 1) * ws
        if help_at is not None and help_at <= t_end:
            return help_alert(i)
        if bpm is None:
            streak = 0
            branch = UNMEASURABLE
        elif cfg.bpm_low <= bpm <= cfg.bpm_high:
            streak = 0
            last_bpm = bpm
            branch = NEGATIVE_FEEDBACK
        else:
            streak += 1
            last_bpm = bpm
            branch = ALERT_THRESHOLD if streak >= cfg.consecutive_windows else OUT_OF_RANGE
        log.append(StepLog(i, i * ws, bpm, branch))
        if branch == ALERT_THRESHOLD:
            return fire(t_end, bpm, THRESHOLD)
    if help_at is not None:
        return help_alert(len(estimates))
    return SimulationResult(None, log, None)


class FileSink:
    """Appends one formatted alert per line."""

    def __init__(self, path):
        self.path = Path(path)

    def __call__(self, line: str):
        with self.path.open("a", encoding="utf-8", newline="\n") as fh:
            fh.write(line + "\n")
