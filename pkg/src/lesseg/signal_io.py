"""Signal loading, synthetic test signals and noise injection."""

from __future__ import annotations

import csv
import json
import wave
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np


class SignalError(ValueError):
    """Raised for unreadable, malformed or invalid signal input."""


@dataclass(frozen=True)
class TimeSeries:
    """A D-dimensional sampled signal stored as a ``(D, t)`` array."""

    samples: np.ndarray
    sample_rate_hz: float
    name: str = ""

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim == 1:
            samples = samples[np.newaxis, :]
        if samples.ndim != 2:
            raise SignalError(f"samples must be 1-D or 2-D, got shape {samples.shape}")
        if samples.shape[0] < 1 or samples.shape[1] < 2:
            raise SignalError(f"need D >= 1 and t >= 2, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise SignalError("samples must be finite")
        if not self.sample_rate_hz > 0:
            raise SignalError(f"sample rate must be positive, got {self.sample_rate_hz}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate_hz", float(self.sample_rate_hz))

    @property
    def dim(self) -> int:
        return self.samples.shape[0]

    @property
    def length(self) -> int:
        return self.samples.shape[1]

    @property
    def duration(self) -> float:
        return self.length / self.sample_rate_hz


def load_wav(path, normalize: bool = False, trim_silence: bool = False) -> TimeSeries:
    """Read an 8- or 16-bit PCM WAV file.

    Samples are scaled to [-1, 1): 16-bit by 1/32768, 8-bit (unsigned) as
    ``(v - 128) / 128``. Each channel becomes one dimension.

    ``normalize`` rescales to unit peak amplitude and ``trim_silence`` drops
    leading and trailing samples below 1% of peak; both are off by default.
    """
    path = Path(path)
    if not path.is_file():
        raise SignalError(f"no such file: {path}")
    try:
        with wave.open(str(path), "rb") as fh:
            n_channels = fh.getnchannels()
            width = fh.getsampwidth()
            rate = fh.getframerate()
            raw = fh.readframes(fh.getnframes())
    except (wave.Error, EOFError) as exc:
        # wave only understands PCM; float and compressed codecs land here
        raise SignalError(f"{path}: unsupported or malformed WAV ({exc})") from exc
    if width == 2:
        data = np.frombuffer(raw, dtype="<i2").astype(float) / 32768.0
    elif width == 1:
        data = (np.frombuffer(raw, dtype=np.uint8).astype(float) - 128.0) / 128.0
    else:
        raise SignalError(f"{path}: only 8/16-bit PCM supported, got {8 * width}-bit")
    if data.size == 0:
        raise SignalError(f"{path}: WAV has no samples")
    samples = data.reshape(-1, n_channels).T
    if trim_silence:
        samples = _trim(samples)
    if normalize:
        peak = np.max(np.abs(samples))
        if peak > 0:
            samples = samples / peak
    return TimeSeries(samples, rate, name=path.stem)


def _trim(samples: np.ndarray, rel: float = 0.01) -> np.ndarray:
    env = np.max(np.abs(samples), axis=0)
    loud = np.flatnonzero(env >= rel * env.max()) if env.max() > 0 else []
    if len(loud) < 2:
        return samples
    return samples[:, loud[0] : loud[-1] + 1]


def write_wav(ts: TimeSeries, path) -> None:
    """Write ``ts`` as 16-bit PCM, clipping to [-1, 1)."""
    clipped = np.clip(ts.samples, -1.0, 32767 / 32768)
    ints = np.round(clipped * 32768).astype("<i2")
    with wave.open(str(path), "wb") as fh:
        fh.setnchannels(ts.dim)
        fh.setsampwidth(2)
        fh.setframerate(round(ts.sample_rate_hz))
        fh.writeframes(ints.T.tobytes())


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def load_csv(path, sample_rate_hz: float) -> TimeSeries:
    """Read a numeric CSV with one column per dimension and one row per sample.

    A first row made entirely of non-numeric labels is treated as a header.
    """
    path = Path(path)
    if not path.is_file():
        raise SignalError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    if rows and not any(_is_number(c) for c in rows[0]):
        rows = rows[1:]
    if not rows:
        raise SignalError(f"{path}: empty CSV")
    width = len(rows[0])
    values = []
    for lineno, row in enumerate(rows, start=1):
        if len(row) != width:
            raise SignalError(f"{path}: ragged row {lineno} ({len(row)} != {width} columns)")
        try:
            values.append([float(c) for c in row])
        except ValueError as exc:
            raise SignalError(f"{path}: non-numeric cell in row {lineno}") from exc
    data = np.array(values, dtype=float)
    if not np.all(np.isfinite(data)):
        raise SignalError(f"{path}: non-finite value")
    return TimeSeries(data.T, sample_rate_hz, name=path.stem)


def write_csv(ts: TimeSeries, path, precision: int = 10, header: bool = False) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if header:
            writer.writerow([f"dim{d}" for d in range(ts.dim)])
        for row in ts.samples.T:
            writer.writerow([f"{v:.{precision}g}" for v in row])


def load_signal(path, sample_rate_hz: float | None = None) -> TimeSeries:
    """Dispatch on file extension (``.wav`` or ``.csv``)."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".wav":
        return load_wav(path)
    if suffix == ".csv":
        if sample_rate_hz is None:
            raise SignalError(f"{path}: CSV input needs a sample rate")
        return load_csv(path, sample_rate_hz)
    raise SignalError(f"{path}: unsupported extension {suffix!r} (use .wav or .csv)")


# --- synthetic signals -------------------------------------------------------

SEGMENT_KINDS = ("sine", "chirp", "noise", "silence")


@dataclass(frozen=True)
class Segment:
    kind: str
    duration: float
    params: dict = field(default_factory=dict)


def _as_segment(item) -> Segment:
    if isinstance(item, Segment):
        return item
    if isinstance(item, dict):
        item = dict(item)
        kind = item.pop("kind")
        duration = item.pop("duration")
        params = item.pop("params", {})
        params = {**params, **item}
        return Segment(kind, float(duration), params)
    kind, duration, *rest = item
    return Segment(kind, float(duration), dict(rest[0]) if rest else {})


def synth_composite(
    segment_spec: Sequence,
    sample_rate_hz: float,
    trend_slope: float = 0.0,
    seed: int = 0,
    name: str = "composite",
) -> TimeSeries:
    """Concatenate sine / chirp / noise / silence segments.

    ``segment_spec`` items are ``(kind, duration_s, params)`` tuples or dicts
    with ``kind``, ``duration`` and the params inline. Parameters:
    ``sine``: ``freq``, ``amp`` (1.0), ``phase`` (0.0);
    ``chirp``: ``f0``, ``f1``, ``amp`` (linear sweep);
    ``noise``: ``sigma``. A global linear trend of ``trend_slope`` units per
    second is added afterwards.
    """
    segments = [_as_segment(s) for s in segment_spec]
    if not segments:
        raise SignalError("empty segment spec")
    if sample_rate_hz <= 0:
        raise SignalError("sample rate must be positive")
    rng = np.random.default_rng(seed)
    parts = []
    for seg in segments:
        if not seg.duration > 0:
            raise SignalError(f"segment duration must be positive, got {seg.duration}")
        n = round(seg.duration * sample_rate_hz)
        if n < 1:
            raise SignalError(f"segment of {seg.duration}s is shorter than one sample")
        tt = np.arange(n) / sample_rate_hz
        p = seg.params
        amp = float(p.get("amp", 1.0))
        if seg.kind == "sine":
            part = amp * np.sin(2 * np.pi * float(p["freq"]) * tt + float(p.get("phase", 0.0)))
        elif seg.kind == "chirp":
            f0, f1 = float(p["f0"]), float(p["f1"])
            rate = (f1 - f0) / seg.duration
            part = amp * np.sin(2 * np.pi * (f0 * tt + 0.5 * rate * tt**2) + float(p.get("phase", 0.0)))
        elif seg.kind == "noise":
            part = rng.normal(0.0, float(p.get("sigma", 1.0)), n)
        elif seg.kind == "silence":
            part = np.zeros(n)
        else:
            raise SignalError(f"unknown segment kind {seg.kind!r}; expected one of {SEGMENT_KINDS}")
        parts.append(part)
    x = np.concatenate(parts)
    if trend_slope:
        x = x + trend_slope * np.arange(x.size) / sample_rate_hz
    return TimeSeries(x, sample_rate_hz, name=name)


# (relative position in the cycle, amplitude, width in seconds)
_ECG_BUMPS = (
    (0.20, 0.20, 0.025),  # P
    (0.40, 1.00, 0.010),  # QRS
    (0.70, 0.35, 0.040),  # T
)


def synth_ecg(n_beats: int, beat_rate_hz: float, sample_rate_hz: float, name: str = "ecg") -> TimeSeries:
    """Periodic ECG-like waveform built from P, QRS and T Gaussian bumps.

    The stretch between the QRS and T bumps stays flat (ST segment). Each
    bump is wrapped periodically so the waveform is exactly periodic with
    period ``1 / beat_rate_hz``.
    """
    if n_beats < 1:
        raise SignalError("n_beats must be >= 1")
    if beat_rate_hz <= 0:
        raise SignalError("beat rate must be positive")
    if sample_rate_hz < 20 * beat_rate_hz:
        raise SignalError(
            f"sample rate {sample_rate_hz} Hz cannot resolve the QRS complex (need >= {20 * beat_rate_hz} Hz)"
        )
    period = 1.0 / beat_rate_hz
    n = round(n_beats * period * sample_rate_hz)
    phase = (np.arange(n) / sample_rate_hz) % period
    x = np.zeros(n)
    for pos, amp, width in _ECG_BUMPS:
        width = min(width, 0.1 * period)
        d = phase - pos * period
        d = (d + period / 2) % period - period / 2
        x += amp * np.exp(-0.5 * (d / width) ** 2)
    return TimeSeries(x, sample_rate_hz, name=name)


def add_gaussian_noise(ts: TimeSeries, sigma: float, seed: int = 0) -> TimeSeries:
    """Add i.i.d. N(0, sigma^2) noise; ``sigma`` is a standard deviation."""
    if sigma < 0:
        raise SignalError(f"sigma must be non-negative, got {sigma}")
    if sigma == 0:
        return ts
    rng = np.random.default_rng(seed)
    noisy = ts.samples + rng.normal(0.0, sigma, ts.samples.shape)
    return TimeSeries(noisy, ts.sample_rate_hz, name=f"{ts.name}+noise{sigma:g}")


def synth_from_spec(spec: dict[str, Any]) -> TimeSeries:
    """Build a signal from a JSON-style document.

    ``{"type": "composite", "sample_rate_hz": ..., "segments": [...],
    "trend_slope": 0, "seed": 0, "noise_sigma": 0}`` or
    ``{"type": "ecg", "n_beats": ..., "beat_rate_hz": ..., "sample_rate_hz": ...}``.
    """
    if not isinstance(spec, dict):
        raise SignalError("synthesis spec must be a JSON object")
    kind = spec.get("type", "composite")
    seed = int(spec.get("seed", 0))
    try:
        if kind == "composite":
            ts = synth_composite(
                spec["segments"],
                float(spec["sample_rate_hz"]),
                trend_slope=float(spec.get("trend_slope", 0.0)),
                seed=seed,
                name=spec.get("name", "composite"),
            )
        elif kind == "ecg":
            ts = synth_ecg(int(spec["n_beats"]), float(spec["beat_rate_hz"]), float(spec["sample_rate_hz"]))
        else:
            raise SignalError(f"unknown synthesis type {kind!r}")
    except (KeyError, TypeError) as exc:
        raise SignalError(f"invalid synthesis spec: {exc!r}") from exc
    sigma = float(spec.get("noise_sigma", 0.0))
    return add_gaussian_noise(ts, sigma, seed=seed + 1) if sigma else ts


def load_synth_spec(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SignalError(f"cannot read spec {path}: {exc}") from exc


def count_peaks(x: np.ndarray, rel_height: float = 0.8) -> int:
    """Number of strict local maxima above ``rel_height`` times the global max."""
    x = np.asarray(x, dtype=float)
    thresh = rel_height * x.max()
    interior = (x[1:-1] > x[:-2]) & (x[1:-1] >= x[2:]) & (x[1:-1] > thresh)
    return int(np.count_nonzero(interior)) + int(x[0] > thresh and x[0] > x[1]) + int(x[-1] > thresh and x[-1] > x[-2])


__all__ = [
    "Segment",
    "SignalError",
    "TimeSeries",
    "add_gaussian_noise",
    "count_peaks",
    "load_csv",
    "load_signal",
    "load_synth_spec",
    "load_wav",
    "synth_composite",
    "synth_ecg",
    "synth_from_spec",
    "write_csv",
    "write_wav",
]
