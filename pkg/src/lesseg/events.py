"""Event sequences: run-length collapsed motif labels and their comparison."""

from __future__ import annotations

import csv
import json
import math
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class EventSequence:
    tokens: tuple
    frame_runs: tuple  # (token, start_frame, end_frame), end exclusive
    k: int
    subsample: int

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(int(t) for t in self.tokens))
        object.__setattr__(self, "frame_runs", tuple(tuple(int(v) for v in r) for r in self.frame_runs))

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def n_frames(self) -> int:
        return self.frame_runs[-1][2] if self.frame_runs else 0

    def frame_labels(self) -> np.ndarray:
        out = np.empty(self.n_frames, dtype=int)
        for tok, a, b in self.frame_runs:
            out[a:b] = tok
        return out

    def to_json(self) -> str:
        return json.dumps(
            {
                "k": self.k,
                "subsample": self.subsample,
                "tokens": list(self.tokens),
                "frame_runs": [list(r) for r in self.frame_runs],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> EventSequence:
        d = json.loads(text)
        return cls(tuple(d["tokens"]), tuple(tuple(r) for r in d["frame_runs"]), int(d["k"]), int(d["subsample"]))

    def to_compact(self) -> str:
        """``k:J:tokens`` where ``J`` is the log2 of the subsampling factor."""
        exponent = round(math.log2(self.subsample)) if self.subsample > 0 else 0
        return f"{self.k}:{exponent}:" + " ".join(str(t) for t in self.tokens)


def parse_compact(text: str) -> tuple[int, int, list]:
    """Inverse of :meth:`EventSequence.to_compact`: ``(k, subsample, tokens)``."""
    k, exponent, body = text.strip().split(":", 2)
    return int(k), 2 ** int(exponent), [int(t) for t in body.split()]


def to_event_sequence(labels, subsample: int = 1, k: int | None = None) -> EventSequence:
    """Collapse consecutive repeats of a per-frame label vector.

    ``labels`` is a FrameLabels or any integer sequence.
    """
    if k is None:
        k = getattr(labels, "k", None)
    arr = np.asarray(getattr(labels, "labels", labels), dtype=int)
    if arr.size == 0:
        raise ValueError("labels must be non-empty")
    if k is None:
        k = int(arr.max())
    starts = np.concatenate(([0], np.flatnonzero(np.diff(arr)) + 1))
    ends = np.concatenate((starts[1:], [arr.size]))
    runs = tuple((int(arr[a]), int(a), int(b)) for a, b in zip(starts, ends))
    return EventSequence(tuple(r[0] for r in runs), runs, int(k), int(subsample))


def annotate_signal(e: EventSequence, t: int) -> np.ndarray:
    """Per-sample token: sample ``s`` takes the token of frame ``s // subsample``."""
    n = e.n_frames
    step = e.subsample
    if not (n - 1) * step < t <= (n + 1) * step:
        raise ValueError(f"{n} frames of {step} samples do not cover a signal of {t} samples")
    frames = np.minimum(np.arange(t) // step, n - 1)
    return e.frame_labels()[frames]


def write_annotation_csv(annotation: np.ndarray, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["sample", "token"])
        writer.writerows(enumerate(int(v) for v in annotation))


def write_frame_labels_csv(labels, path) -> None:
    arr = np.asarray(getattr(labels, "labels", labels), dtype=int)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["frame", "label"])
        writer.writerows(enumerate(int(v) for v in arr))


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Unit-cost edit distance, two-row dynamic program."""
    a, b = list(a), list(b)
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        for j, y in enumerate(b, start=1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y))
        prev = cur
    return prev[-1]


__all__ = [
    "EventSequence",
    "annotate_signal",
    "levenshtein",
    "parse_compact",
    "to_event_sequence",
    "write_annotation_csv",
    "write_frame_labels_csv",
]
