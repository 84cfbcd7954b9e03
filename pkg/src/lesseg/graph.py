"""Trajectory graph on the time frames of a scattering representation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform


class DegenerateSignalError(ValueError):
    """The representation has no spread: every frame is the same point."""


@dataclass(frozen=True, eq=False)
class AffinityGraph:
    W: np.ndarray
    dist: np.ndarray
    sigma_omega: float
    C: int
    N: np.ndarray

    @property
    def n(self) -> int:
        return self.W.shape[0]


def _frames(z) -> np.ndarray:
    coeffs = getattr(z, "coeffs", z)
    return np.asarray(coeffs, dtype=float).T


def pairwise_distances(z) -> np.ndarray:
    """Euclidean distances between frame columns of ``z`` (an n x n matrix).

    ``z`` is a ScatterRepresentation or a (channels, n) array. Each upper
    triangle entry is computed once and mirrored.
    """
    pts = _frames(z)
    n = pts.shape[0]
    if n < 2:
        raise ValueError(f"need at least 2 frames, got {n}")
    return squareform(pdist(pts, metric="euclidean"))


def normalize_distances(dist: np.ndarray) -> np.ndarray:
    top = float(np.max(dist))
    if not top > 0:
        raise DegenerateSignalError("all pairwise distances are zero: the signal consists of a single trivial event")
    return dist / top


def adaptive_kernel_sizes(dist: np.ndarray, C: int) -> np.ndarray:
    """Mean distance from each frame to its ``C`` nearest other frames."""
    n = dist.shape[0]
    if not 1 <= C <= n - 1:
        raise ValueError(f"C must be in [1, {n - 1}], got {C}")
    off = dist.copy()
    np.fill_diagonal(off, np.inf)
    nearest = np.partition(off, C - 1, axis=1)[:, :C]
    return nearest.mean(axis=1)


def affinity(dist: np.ndarray, N: np.ndarray, sigma_omega: float, C: int = 0) -> AffinityGraph:
    """``W = exp(-d^2 / (sigma_omega * s))`` with ``s = (N_a + N_b + d) / 3``."""
    if not sigma_omega > 0:
        raise ValueError(f"sigma_omega must be positive, got {sigma_omega}")
    N = np.asarray(N, dtype=float)
    if N.shape != (dist.shape[0],):
        raise ValueError("kernel sizes do not match the distance matrix")
    local = (N[:, None] + N[None, :] + dist) / 3.0
    expo = np.divide(dist**2, sigma_omega * local, out=np.zeros_like(dist), where=local > 0)
    W = np.exp(-expo)
    # local == 0 with dist == 0 is the coincident-points limit (W = 1); local
    # == 0 forces dist == 0 since dist >= 0 contributes to it.
    np.fill_diagonal(W, 1.0)
    W = 0.5 * (W + W.T)
    return AffinityGraph(W, dist, float(sigma_omega), int(C), N)


def build_graph(z, sigma_omega: float = 0.45, C: int = 7, normalize: bool = True) -> AffinityGraph:
    """Distances, optional max-normalisation, kernel sizes and affinity in one go."""
    dist = pairwise_distances(z)
    if normalize:
        dist = normalize_distances(dist)
    C_eff = min(C, dist.shape[0] - 1)
    return affinity(dist, adaptive_kernel_sizes(dist, C_eff), sigma_omega, C_eff)


def write_pgm(matrix: np.ndarray, path, invert: bool = False) -> None:
    """Write a matrix as an 8-bit binary PGM image scaled to its range."""
    m = np.asarray(matrix, dtype=float)
    lo, hi = float(np.min(m)), float(np.max(m))
    scaled = np.zeros_like(m) if hi == lo else (m - lo) / (hi - lo)
    if invert:
        scaled = 1.0 - scaled
    pixels = np.round(scaled * 255).astype(np.uint8)
    h, w = pixels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(pixels.tobytes())


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    fields, pos = [], 0
    while len(fields) < 4:
        while data[pos : pos + 1].isspace():
            pos += 1
        start = pos
        while not data[pos : pos + 1].isspace():
            pos += 1
        fields.append(data[start:pos])
    if fields[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM")
    w, h = int(fields[1]), int(fields[2])
    # exactly one whitespace byte separates the header from the pixels
    return np.frombuffer(data, dtype=np.uint8, count=w * h, offset=pos + 1).reshape(h, w)


def write_matrix_csv(matrix: np.ndarray, path) -> None:
    np.savetxt(path, matrix, delimiter=",", fmt="%.12g")


__all__ = [
    "AffinityGraph",
    "DegenerateSignalError",
    "adaptive_kernel_sizes",
    "affinity",
    "build_graph",
    "normalize_distances",
    "pairwise_distances",
    "read_pgm",
    "write_matrix_csv",
    "write_pgm",
]
