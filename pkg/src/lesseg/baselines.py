"""Comparison methods: PAA/SAX symbolisation and (Fast)DTW alignment."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.stats import norm

# --- PAA / SAX ---------------------------------------------------------------


@dataclass(frozen=True)
class SaxParams:
    word_length: int = 100
    alphabet_size: int = 10

    def __post_init__(self):
        if self.word_length < 1:
            raise ValueError("word_length must be positive")
        if not 2 <= self.alphabet_size <= 26:
            raise ValueError(f"alphabet_size must be in [2, 26], got {self.alphabet_size}")


def paa(x, L: int) -> np.ndarray:
    """Frame means over ``L`` near-equal frames; leading frames take the remainder."""
    x = np.asarray(x, dtype=float).ravel()
    if not 1 <= L <= x.size:
        raise ValueError(f"PAA length must be in [1, {x.size}], got {L}")
    return np.array([chunk.mean() for chunk in np.array_split(x, L)])


def sax_breakpoints(alphabet_size: int) -> np.ndarray:
    """Equiprobable N(0, 1) cut points (``alphabet_size - 1`` of them)."""
    return norm.ppf(np.arange(1, alphabet_size) / alphabet_size)


def znormalize(x, eps: float = 1e-12) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    sd = x.std()
    if sd <= eps * max(1.0, np.abs(x).max()):
        return np.zeros_like(x)
    return (x - x.mean()) / sd


def sax_word(x, params: SaxParams) -> list:
    """Symbols ``1..alphabet_size`` for the PAA of the z-normalised series."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size < params.word_length:
        raise ValueError(f"series of length {x.size} is shorter than word_length={params.word_length}")
    coeffs = paa(znormalize(x), params.word_length)
    symbols = np.searchsorted(sax_breakpoints(params.alphabet_size), coeffs, side="right") + 1
    return symbols.tolist()


def sax_mindist(word_a, word_b, n: int, alphabet_size: int) -> float:
    """Lower-bounding SAX distance for words of equal length from length-``n`` series."""
    a, b = np.asarray(word_a), np.asarray(word_b)
    if a.shape != b.shape:
        raise ValueError("SAX words must have equal length")
    bp = sax_breakpoints(alphabet_size)
    hi, lo = np.maximum(a, b), np.minimum(a, b)
    cell = np.where(hi - lo <= 1, 0.0, bp[np.maximum(hi - 2, 0)] - bp[np.maximum(lo - 1, 0)])
    return float(np.sqrt(n / a.size) * np.sqrt(np.sum(cell**2)))


# --- DTW ---------------------------------------------------------------------


@dataclass(frozen=True)
class WarpPath:
    pairs: list
    cost: float

    def __len__(self) -> int:
        return len(self.pairs)


def _as_points(seq) -> np.ndarray:
    arr = np.asarray(seq, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValueError("DTW input must be a non-empty sequence of points")
    return arr


@njit(cache=True)
def _window_costs(a, b, lo, hi, offsets):
    out = np.empty(offsets[-1])
    for i in range(a.shape[0]):
        for j in range(lo[i], hi[i] + 1):
            s = 0.0
            for d in range(a.shape[1]):
                diff = a[i, d] - b[j, d]
                s += diff * diff
            out[offsets[i] + j - lo[i]] = np.sqrt(s)
    return out


@njit(cache=True)
def _window_dp(cost, lo, hi, offsets):
    n = lo.shape[0]
    acc = np.full(offsets[-1], np.inf)
    for i in range(n):
        for j in range(lo[i], hi[i] + 1):
            c = cost[offsets[i] + j - lo[i]]
            if i == 0 and j == 0:
                acc[0] = c
                continue
            best = np.inf
            if i > 0 and lo[i - 1] <= j - 1 <= hi[i - 1]:
                best = acc[offsets[i - 1] + j - 1 - lo[i - 1]]
            if i > 0 and lo[i - 1] <= j <= hi[i - 1]:
                v = acc[offsets[i - 1] + j - lo[i - 1]]
                best = min(best, v)
            if j - 1 >= lo[i]:
                v = acc[offsets[i] + j - 1 - lo[i]]
                best = min(best, v)
            acc[offsets[i] + j - lo[i]] = c + best
    # backtrack; ties prefer the diagonal step, then (1, 0), then (0, 1)
    m_last = hi[n - 1]
    path_i = np.empty(n + m_last + 1, dtype=np.int64)
    path_j = np.empty(n + m_last + 1, dtype=np.int64)
    i, j, p = n - 1, m_last, 0
    while True:
        path_i[p] = i
        path_j[p] = j
        p += 1
        if i == 0 and j == 0:
            break
        best = np.inf
        step = -1
        if i > 0 and j > 0 and lo[i - 1] <= j - 1 <= hi[i - 1]:
            best = acc[offsets[i - 1] + j - 1 - lo[i - 1]]
            step = 0
        if i > 0 and lo[i - 1] <= j <= hi[i - 1]:
            v = acc[offsets[i - 1] + j - lo[i - 1]]
            if v < best:
                best = v
                step = 1
        if j > 0 and j - 1 >= lo[i]:
            v = acc[offsets[i] + j - 1 - lo[i]]
            if v < best:
                best = v
                step = 2
        if step == 0:
            i -= 1
            j -= 1
        elif step == 1:
            i -= 1
        else:
            j -= 1
    return acc[offsets[n - 1] + m_last - lo[n - 1]], path_i[:p][::-1], path_j[:p][::-1]


def _offsets(lo, hi) -> np.ndarray:
    return np.concatenate(([0], np.cumsum(hi - lo + 1))).astype(np.int64)


def _windowed_dtw(a, b, lo, hi, metric):
    lo = np.ascontiguousarray(lo, dtype=np.int64)
    hi = np.ascontiguousarray(hi, dtype=np.int64)
    offsets = _offsets(lo, hi)
    if metric is None:
        cost = _window_costs(a, b, lo, hi, offsets)
    else:
        cost = np.empty(offsets[-1])
        for i in range(a.shape[0]):
            for j in range(lo[i], hi[i] + 1):
                cost[offsets[i] + j - lo[i]] = metric(a[i], b[j])
    total, pi, pj = _window_dp(cost, lo, hi, offsets)
    pairs = list(zip(pi.tolist(), pj.tolist()))
    return float(total), WarpPath(pairs, float(total))


def _resolve_metric(metric):
    if metric is None or metric == "euclidean":
        return None
    if metric in ("abs", "absolute"):
        return None  # identical to Euclidean for scalar points
    if callable(metric):
        return metric
    raise ValueError(f"unknown metric {metric!r}")


def dtw(a, b, metric: Callable | str | None = None) -> tuple[float, WarpPath]:
    """Exact DTW with unit-weight steps (1,0), (0,1), (1,1).

    Points are compared with Euclidean distance (absolute difference for
    scalar series) unless ``metric(p, q)`` is given.
    """
    A, B = _as_points(a), _as_points(b)
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"point dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    n, m = len(A), len(B)
    return _windowed_dtw(A, B, np.zeros(n), np.full(n, m - 1), _resolve_metric(metric))


def _coarsen(x: np.ndarray) -> np.ndarray:
    n = len(x)
    half = x[: n - n % 2].reshape(n // 2, 2, -1).mean(axis=1)
    return np.vstack([half, x[-1:]]) if n % 2 else half


def _expand_window(pairs, n: int, m: int, radius: int):
    lo = np.full(n, m, dtype=np.int64)
    hi = np.full(n, -1, dtype=np.int64)
    for i, j in pairs:
        for fi in (2 * i, 2 * i + 1):
            if fi < n:
                lo[fi] = min(lo[fi], 2 * j)
                hi[fi] = max(hi[fi], min(2 * j + 1, m - 1))
    if radius > 0:
        lo_r, hi_r = lo.copy(), hi.copy()
        for i in range(n):
            a, b = max(0, i - radius), min(n, i + radius + 1)
            lo_r[i] = lo[a:b].min() - radius
            hi_r[i] = hi[a:b].max() + radius
        lo, hi = lo_r, hi_r
    return np.clip(lo, 0, m - 1), np.clip(hi, 0, m - 1)


def _fastdtw(A, B, radius, metric):
    min_size = radius + 2
    if len(A) <= min_size or len(B) <= min_size:
        return _windowed_dtw(A, B, np.zeros(len(A)), np.full(len(A), len(B) - 1), metric)
    _, coarse = _fastdtw(_coarsen(A), _coarsen(B), radius, metric)
    lo, hi = _expand_window(coarse.pairs, len(A), len(B), radius)
    return _windowed_dtw(A, B, lo, hi, metric)


def fastdtw(a, b, radius: int = 10, metric: Callable | str | None = None) -> tuple[float, WarpPath]:
    """Multi-resolution approximate DTW.

    Series are halved by pairwise averaging until short, aligned exactly,
    and the path is projected back up and searched within ``radius`` cells.
    The returned cost is never below the exact DTW cost.
    """
    if radius < 0:
        raise ValueError("radius must be non-negative")
    A, B = _as_points(a), _as_points(b)
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"point dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    return _fastdtw(A, B, int(radius), _resolve_metric(metric))


def dtw_wavelet(za, zb, radius: int = 10) -> float:
    """FastDTW between the frame columns of two scattering representations."""
    ca = np.asarray(getattr(za, "coeffs", za), dtype=float)
    cb = np.asarray(getattr(zb, "coeffs", zb), dtype=float)
    if ca.shape[0] != cb.shape[0]:
        raise ValueError(f"channel mismatch: {ca.shape[0]} vs {cb.shape[0]}")
    cost, _ = fastdtw(ca.T, cb.T, radius)
    return cost


__all__ = [
    "SaxParams",
    "WarpPath",
    "dtw",
    "dtw_wavelet",
    "fastdtw",
    "paa",
    "sax_breakpoints",
    "sax_mindist",
    "sax_word",
    "znormalize",
]
