"""Laplacian embedding of the trajectory graph and k-means motif assignment."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import build_graph


@dataclass(frozen=True, eq=False)
class LaplacianEmbedding:
    coords: np.ndarray  # (n, gamma)
    eigenvalues: np.ndarray  # ascending
    gamma: int


@dataclass(frozen=True, eq=False)
class FrameLabels:
    labels: np.ndarray  # values in 1..k, canonical first-occurrence order
    k: int
    inertia: float

    @property
    def n(self) -> int:
        return self.labels.size


@dataclass(frozen=True)
class SegmentConfig:
    sigma_omega: float = 0.45
    C: int = 7
    gamma: int = 3
    k: int = 7
    seed: int = 42
    restarts: int = 10
    normalize_distances: bool = True
    row_normalize: bool = False


def normalized_laplacian(W: np.ndarray) -> np.ndarray:
    """``I - D^{-1/2} W D^{-1/2}`` with ``D`` the row sums of ``W``."""
    W = np.asarray(W, dtype=float)
    deg = W.sum(axis=1)
    if np.any(deg <= 0):
        raise ValueError("affinity matrix has a vertex with zero degree")
    inv_sqrt = 1.0 / np.sqrt(deg)
    L = np.eye(W.shape[0]) - inv_sqrt[:, None] * W * inv_sqrt[None, :]
    return 0.5 * (L + L.T)


def embed(L: np.ndarray, gamma: int = 3) -> LaplacianEmbedding:
    """Eigenvectors of the ``gamma`` smallest eigenvalues as frame coordinates.

    Each eigenvector is flipped so its largest-magnitude entry is positive.
    """
    n = L.shape[0]
    if not 1 <= gamma <= n:
        raise ValueError(f"gamma must be in [1, {n}], got {gamma}")
    if not np.all(np.isfinite(L)):
        raise np.linalg.LinAlgError("Laplacian has non-finite entries")
    vals, vecs = np.linalg.eigh(L)
    vals, vecs = vals[:gamma], vecs[:, :gamma].copy()
    # first index of the max-magnitude entry (ties resolved by position)
    pivot = np.argmax(np.abs(vecs) > np.abs(vecs).max(axis=0) * (1 - 1e-9), axis=0)
    signs = np.sign(vecs[pivot, np.arange(gamma)])
    signs[signs == 0] = 1.0
    return LaplacianEmbedding(vecs * signs, vals, gamma)


def canonicalize(labels) -> np.ndarray:
    """Relabel to 1..k in order of first appearance."""
    labels = np.asarray(labels)
    mapping: dict = {}
    out = np.empty(labels.size, dtype=int)
    for i, lab in enumerate(labels.tolist()):
        if lab not in mapping:
            mapping[lab] = len(mapping) + 1
        out[i] = mapping[lab]
    return out


def _kmeans_pp(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centers = [X[rng.integers(n)]]
    d2 = np.sum((X - centers[0]) ** 2, axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total <= 0:
            idx = rng.integers(n)
        else:
            idx = int(np.searchsorted(np.cumsum(d2), rng.random() * total, side="right"))
            idx = min(idx, n - 1)
        centers.append(X[idx])
        d2 = np.minimum(d2, np.sum((X - X[idx]) ** 2, axis=1))
    return np.array(centers)


def _lloyd(X, centers, tol=1e-10, max_iter=300):
    k = centers.shape[0]
    for _ in range(max_iter):
        d2 = np.sum((X[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        assign = np.argmin(d2, axis=1)
        new = centers.copy()
        for c in range(k):
            members = assign == c
            if np.any(members):
                new[c] = X[members].mean(axis=0)
            else:
                # reseed an empty cluster at the point farthest from its centre
                far = int(np.argmax(d2[np.arange(X.shape[0]), assign]))
                new[c] = X[far]
                assign[far] = c
                d2[far, :] = 0.0
        shift = np.max(np.sum((new - centers) ** 2, axis=1))
        centers = new
        if shift < tol**2:
            break
    d2 = np.sum((X[:, None, :] - centers[None, :, :]) ** 2, axis=2)
    assign = np.argmin(d2, axis=1)
    inertia = float(d2[np.arange(X.shape[0]), assign].sum())
    return assign, inertia


def kmeans(embedding, k: int, seed: int = 42, restarts: int = 10) -> FrameLabels:
    """k-means++ seeded Lloyd iterations; the lowest-inertia restart wins.

    ``embedding`` is a LaplacianEmbedding or an (n, d) array. Ties in inertia
    go to the earliest restart.
    """
    X = np.asarray(getattr(embedding, "coords", embedding), dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    n_distinct = np.unique(X, axis=0).shape[0]
    if k > n_distinct:
        raise ValueError(f"k={k} exceeds the {n_distinct} distinct embedding rows")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(max(1, restarts)):
        assign, inertia = _lloyd(X, _kmeans_pp(X, k, rng))
        if best is None or inertia < best[1] - 1e-12 * max(1.0, abs(best[1])):
            best = (assign, inertia)
    return FrameLabels(canonicalize(best[0]), k, best[1])


def segment(z, cfg: SegmentConfig | None = None, **overrides) -> FrameLabels:
    """Graph -> normalised Laplacian -> embedding -> k-means over the frames of ``z``."""
    cfg = cfg or SegmentConfig()
    if overrides:
        cfg = SegmentConfig(**{**cfg.__dict__, **overrides})
    graph = build_graph(z, cfg.sigma_omega, cfg.C, normalize=cfg.normalize_distances)
    n = graph.n
    if cfg.k > n:
        raise ValueError(f"k={cfg.k} exceeds the number of frames ({n})")
    emb = embed(normalized_laplacian(graph.W), min(cfg.gamma, n))
    if cfg.row_normalize:
        norms = np.linalg.norm(emb.coords, axis=1, keepdims=True)
        coords = np.divide(emb.coords, norms, out=np.zeros_like(emb.coords), where=norms > 0)
        emb = LaplacianEmbedding(coords, emb.eigenvalues, emb.gamma)
    return kmeans(emb, cfg.k, cfg.seed, cfg.restarts)


__all__ = [
    "FrameLabels",
    "LaplacianEmbedding",
    "SegmentConfig",
    "canonicalize",
    "embed",
    "kmeans",
    "normalized_laplacian",
    "segment",
]
