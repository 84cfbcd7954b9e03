"""Batch experiments: shared-motif segmentation, distance matrices, benchmarks."""

from __future__ import annotations

import csv
import gc
import math
import time
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sklearn.metrics import adjusted_rand_score

from .baselines import dtw_wavelet, fastdtw, sax_mindist, sax_word
from .events import levenshtein, to_event_sequence
from .graph import build_graph, write_pgm
from .pipeline import METRICS, RunConfig
from .scattering import (
    ScatterParams,
    ScatterRepresentation,
    concat_frames,
    get_filter_bank,
    normalize_rep,
    scatter_1d,
    scatter_multivariate,
)
from .signal_io import TimeSeries
from .spectral import embed, kmeans, normalized_laplacian, segment


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    values: np.ndarray
    labels: list
    metric_name: str

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow([""] + [str(lab) for lab in self.labels])
            for lab, row in zip(self.labels, self.values):
                writer.writerow([str(lab)] + [f"{v:.10g}" for v in row])

    def to_pgm(self, path) -> None:
        # dark = close, as in the usual distance-matrix figures
        write_pgm(self.values, path)


@dataclass(frozen=True)
class Separation:
    within_mean: float
    between_mean: float
    ratio: float
    infinite: bool = False


def _check_batch(collection: Sequence[TimeSeries]) -> None:
    if not collection:
        raise ValueError("empty collection")
    rates = {ts.sample_rate_hz for ts in collection}
    if len(rates) > 1:
        raise ValueError(f"mixed sample rates in batch: {sorted(rates)}")


def batch_represent(collection: Sequence[TimeSeries], cfg: RunConfig) -> list:
    """Scatter each observation, normalise jointly, return per-observation parts."""
    _check_batch(collection)
    params = cfg.scatter_params
    raw = [scatter_multivariate(ts, params) for ts in collection]
    joint = normalize_rep(concat_frames(raw), cfg.normalize_mode)
    parts, start = [], 0
    for r in raw:
        parts.append(r.with_coeffs(joint.coeffs[:, start : start + r.n]))
        start += r.n
    return parts


def batch_segment(collection: Sequence[TimeSeries], cfg: RunConfig | None = None) -> list:
    """One spectral clustering over the concatenated frames of every observation.

    Token identities are shared across the batch. Observations are joined
    without separator frames.
    """
    cfg = cfg or RunConfig()
    parts = batch_represent(collection, cfg)
    labels = segment(concat_frames(parts), cfg.segment_config).labels
    out, start = [], 0
    for part in parts:
        chunk = labels[start : start + part.n]
        out.append(to_event_sequence(chunk, part.subsample, k=cfg.k))
        start += part.n
    return out


def _pairwise(items: list, fn) -> np.ndarray:
    m = len(items)
    values = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            values[i, j] = values[j, i] = fn(items[i], items[j])
    return values


def _sax_words(ts: TimeSeries, cfg: RunConfig) -> list:
    # multivariate series: one word per dimension, concatenated
    words = []
    for row in ts.samples:
        words.extend(sax_word(row, cfg.sax_params))
    return words


def distance_matrix(
    collection: Sequence[TimeSeries],
    metric: str,
    cfg: RunConfig | None = None,
    labels: Sequence | None = None,
) -> DistanceMatrix:
    cfg = cfg or RunConfig()
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
    _check_batch(collection)
    labels = list(labels) if labels is not None else [ts.name for ts in collection]
    if metric == "less-levenshtein":
        seqs = [e.tokens for e in batch_segment(collection, cfg)]
        values = _pairwise(seqs, levenshtein)
    elif metric == "dtw-raw":
        values = _pairwise([ts.samples.T for ts in collection], lambda a, b: fastdtw(a, b, cfg.radius)[0])
    elif metric == "dtw-wavelet":
        values = _pairwise(batch_represent(collection, cfg), lambda a, b: dtw_wavelet(a, b, cfg.radius))
    elif metric == "sax-levenshtein":
        values = _pairwise([_sax_words(ts, cfg) for ts in collection], levenshtein)
    else:
        lengths = {ts.length for ts in collection}
        if len(lengths) > 1:
            raise ValueError("sax-mindist needs equal-length observations")
        n = lengths.pop()
        per_dim = [[sax_word(row, cfg.sax_params) for row in ts.samples] for ts in collection]

        def mindist(a, b):
            return math.sqrt(sum(sax_mindist(wa, wb, n, cfg.alphabet_size) ** 2 for wa, wb in zip(a, b)))

        values = _pairwise(per_dim, mindist)
    return DistanceMatrix(values, labels, metric)


def class_separation(dm: DistanceMatrix) -> Separation:
    """Mean same-class vs cross-class distance (off-diagonal pairs only)."""
    labels = np.asarray(dm.labels)
    classes, counts = np.unique(labels, return_counts=True)
    if classes.size < 2 or counts.min() < 2:
        raise ValueError("need at least 2 classes with at least 2 members each")
    same = labels[:, None] == labels[None, :]
    iu = np.triu_indices(len(labels), k=1)
    vals = dm.values[iu]
    within = float(vals[same[iu]].mean())
    between = float(vals[~same[iu]].mean())
    if within == 0:
        return Separation(within, between, math.inf, infinite=True)
    return Separation(within, between, between / within)


def label_agreement(a, b) -> float:
    """Adjusted Rand index between two labelings of the same frames."""
    a = np.asarray(getattr(a, "labels", a))
    b = np.asarray(getattr(b, "labels", b))
    if a.shape != b.shape:
        raise ValueError(f"label vectors differ in length: {a.size} vs {b.size}")
    return float(adjusted_rand_score(a, b))


# --- scaling benchmarks ------------------------------------------------------

BENCH_KINDS = ("scatter-vs-t", "scatter-vs-D", "spectral-vs-n")


@dataclass(frozen=True)
class BenchReport:
    kind: str
    sizes: list
    seconds: list
    slope: float

    @property
    def ratios(self) -> list:
        return [b / a for a, b in zip(self.seconds, self.seconds[1:])]

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["kind", "size", "median_seconds", "loglog_slope"])
            for s, sec in zip(self.sizes, self.seconds):
                writer.writerow([self.kind, s, f"{sec:.6g}", f"{self.slope:.4f}"])


def _median_times(jobs: list, repeats: int) -> list:
    """Median wall time of each job over ``repeats`` runs.

    Runs are interleaved round-robin across jobs so a slow spell on a busy
    machine hits every size alike instead of skewing one median; the garbage
    collector is paused while timing, as ``timeit`` does.
    """
    for fn in jobs:
        fn()  # warm-up: filter banks, allocator
    times = [[] for _ in jobs]
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(repeats):
            for fn, bucket in zip(jobs, times):
                start = time.perf_counter()
                fn()
                bucket.append(time.perf_counter() - start)
    finally:
        if gc_was_enabled:
            gc.enable()
    return [float(np.median(b)) for b in times]


def bench_scaling(
    kind: str,
    sizes: Sequence[int],
    repeats: int = 5,
    params: ScatterParams | None = None,
    seed: int = 0,
) -> BenchReport:
    """Median-of-``repeats`` wall time per size and the log-log slope.

    ``scatter-vs-t``: signal length; ``scatter-vs-D``: ambient dimension at
    t = 2**14; ``spectral-vs-n``: frame count of a random representation.
    """
    if kind not in BENCH_KINDS:
        raise ValueError(f"unknown benchmark {kind!r}; expected one of {BENCH_KINDS}")
    sizes = [int(s) for s in sizes]
    if sizes != sorted(sizes):
        raise ValueError("sizes must be ascending")
    params = params or ScatterParams()
    rng = np.random.default_rng(seed)
    jobs = []
    for size in sizes:
        if kind == "scatter-vs-t":
            x = rng.normal(size=size)
            bank = get_filter_bank(params, size)
            jobs.append(lambda x=x, bank=bank: scatter_1d(x, bank, params))
        elif kind == "scatter-vs-D":
            ts = TimeSeries(rng.normal(size=(size, 2**14)), 8000.0)
            jobs.append(lambda ts=ts: scatter_multivariate(ts, params))
        else:
            z = ScatterRepresentation(rng.random((params.rows_per_dim(), size)), params.subsample)

            def run(z=z):
                g = build_graph(z)
                kmeans(embed(normalized_laplacian(g.W), 3), 7, seed=seed, restarts=1)

            jobs.append(run)
    seconds = _median_times(jobs, repeats)
    slope = float(np.polyfit(np.log(sizes), np.log(seconds), 1)[0]) if len(sizes) > 1 else float("nan")
    return BenchReport(kind, sizes, seconds, slope)


__all__ = [
    "BENCH_KINDS",
    "BenchReport",
    "DistanceMatrix",
    "Separation",
    "batch_represent",
    "batch_segment",
    "bench_scaling",
    "class_separation",
    "distance_matrix",
    "label_agreement",
]
