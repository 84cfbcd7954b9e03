"""Run configuration and the end-to-end signal -> event sequence pipeline."""

from __future__ import annotations

import dataclasses
import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path

from .baselines import SaxParams
from .events import EventSequence, to_event_sequence
from .scattering import (
    NORMALIZE_MODES,
    ScatterParams,
    ScatterRepresentation,
    normalize_rep,
    scatter_multivariate,
)
from .signal_io import TimeSeries
from .spectral import FrameLabels, SegmentConfig, segment

log = logging.getLogger(__name__)

METRICS = ("less-levenshtein", "dtw-raw", "dtw-wavelet", "sax-levenshtein", "sax-mindist")


def _default_seed() -> int:
    return int(os.environ.get("LESS_SEED", "42"))


@dataclass(frozen=True)
class RunConfig:
    J: int = 6
    Q: int = 2
    num_low_freq: int = 16
    max_order: int = 2
    normalize_mode: str = "per-channel-max"
    sigma_omega: float = 0.45
    C: int = 7
    gamma: int = 3
    k: int = 7
    seed: int = dataclasses.field(default_factory=_default_seed)
    restarts: int = 10
    metric: str = "less-levenshtein"
    radius: int = 10
    word_length: int = 100
    alphabet_size: int = 10
    sample_rate_hz: float = 8000.0

    def __post_init__(self):
        if self.normalize_mode not in NORMALIZE_MODES:
            raise ValueError(f"normalize_mode must be one of {NORMALIZE_MODES}")
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric {self.metric!r}; expected one of {METRICS}")

    @property
    def scatter_params(self) -> ScatterParams:
        # num_low_freq is capped at the J*Q filters the bank actually has
        p = min(self.num_low_freq, self.J * self.Q)
        if p < self.num_low_freq:
            log.debug("num_low_freq=%d capped to %d filters for J=%d, Q=%d", self.num_low_freq, p, self.J, self.Q)
        return ScatterParams(self.J, self.Q, p, self.max_order)

    @property
    def segment_config(self) -> SegmentConfig:
        return SegmentConfig(self.sigma_omega, self.C, self.gamma, self.k, self.seed, self.restarts)

    @property
    def sax_params(self) -> SaxParams:
        return SaxParams(self.word_length, self.alphabet_size)

    def replace(self, **changes) -> RunConfig:
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2), encoding="utf-8")

    @classmethod
    def from_dict(cls, data: dict) -> RunConfig:
        names = {f.name for f in dataclasses.fields(cls)}
        data = {k.replace("-", "_"): v for k, v in data.items()}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> RunConfig:
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True, eq=False)
class LessResult:
    events: EventSequence
    labels: FrameLabels
    z: ScatterRepresentation


def represent(ts: TimeSeries, cfg: RunConfig) -> ScatterRepresentation:
    """Normalised scattering representation of ``ts``."""
    return normalize_rep(scatter_multivariate(ts, cfg.scatter_params), cfg.normalize_mode)


def less(ts: TimeSeries, cfg: RunConfig | None = None) -> LessResult:
    """Segment one signal into an event sequence."""
    cfg = cfg or RunConfig()
    z = represent(ts, cfg)
    labels = segment(z, cfg.segment_config)
    return LessResult(to_event_sequence(labels, z.subsample), labels, z)


__all__ = ["METRICS", "LessResult", "RunConfig", "less", "represent"]
