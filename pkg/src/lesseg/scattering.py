"""Depth-2 wavelet scattering with a constant-Q Morlet filter bank.

Filters live in the frequency domain on the padded FFT grid ``w in [-pi, pi)``.
Band-pass filter ``j`` (``j = 0 .. J*Q - 1``) is a Morlet centred at
``xi_j = 0.85 pi * 2**(-j/Q)``, so filters are ordered by descending centre
frequency. Outputs are low-passed by a Gaussian ``phi`` and sampled every
``2**J`` samples.
"""

from __future__ import annotations

import json
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import fft as sp_fft

from .signal_io import TimeSeries

MOTHER_XI = 0.85 * np.pi
# Morlet width relative to the constant-Q spacing; keeps the Littlewood-Paley
# sum >= 0.7 over [xi_min, xi_0] for Q in {1, 2, 4}.
BANDWIDTH_FACTOR = 1.4
# low-pass width is LOWPASS_SIGMA / 2**J rad/sample (time std ~1.6 * 2**J)
LOWPASS_SIGMA = 0.2 * np.pi

NORMALIZE_MODES = ("per-channel-max", "log1p-standardize", "none")


class ScatterError(ValueError):
    pass


@dataclass(frozen=True)
class ScatterParams:
    J: int = 6
    Q: int = 2
    num_low_freq: int = 12
    max_order: int = 2

    def __post_init__(self):
        if self.J < 1:
            raise ScatterError(f"J must be >= 1, got {self.J}")
        if self.Q < 1:
            raise ScatterError(f"Q must be >= 1, got {self.Q}")
        if self.max_order not in (1, 2):
            raise ScatterError(f"max_order must be 1 or 2, got {self.max_order}")
        if not 1 <= self.num_low_freq <= self.n_filters:
            raise ScatterError(
                f"num_low_freq must be in [1, {self.n_filters}] for J={self.J}, Q={self.Q}; got {self.num_low_freq}"
            )

    @property
    def n_filters(self) -> int:
        return self.J * self.Q

    @property
    def subsample(self) -> int:
        return 2**self.J

    @property
    def min_length(self) -> int:
        return 2 ** (self.J + 2)

    def rows_per_dim(self) -> int:
        p = self.num_low_freq
        return 1 + p + (p * (p - 1) // 2 if self.max_order == 2 else 0)


@dataclass(frozen=True, eq=False)
class FilterBank:
    """Frequency-domain filters on an ``signal_len``-point grid."""

    psi: np.ndarray  # (J*Q, N), real
    phi: np.ndarray  # (N,)
    xi: np.ndarray  # centre frequencies, rad/sample, descending
    sigma: np.ndarray  # frequency-domain Gaussian widths
    scale: np.ndarray  # j / Q, in octaves
    signal_len: int
    t: int
    params: ScatterParams

    @property
    def omega(self) -> np.ndarray:
        return np.fft.fftfreq(self.signal_len) * 2 * np.pi

    def littlewood_paley(self) -> np.ndarray:
        return self.phi**2 + np.sum(self.psi**2, axis=0)

    def passband(self) -> np.ndarray:
        """Mask of grid frequencies between the lowest and highest centres."""
        w = self.omega
        return (w >= self.xi[-1]) & (w <= self.xi[0])

    @property
    def retained(self) -> np.ndarray:
        """Indices of the ``num_low_freq`` lowest-frequency band-pass filters."""
        n = self.params.n_filters
        return np.arange(n - self.params.num_low_freq, n)


def padded_length(t: int, J: int) -> int:
    """FFT length: a multiple of ``2**J`` with room for ``2**(J+3)`` padding per side.

    The low-pass has a time-domain std of about ``1.6 * 2**J`` samples, so
    this keeps the circular wrap point ~5 std away from the signal.
    """
    step = 2**J
    return step * sp_fft.next_fast_len(-(-(t + 2 ** (J + 4)) // step))


def _morlet_hat(omega: np.ndarray, xi: float, sigma: float) -> np.ndarray:
    gauss = np.exp(-((omega - xi) ** 2) / (2 * sigma**2))
    envelope = np.exp(-(omega**2) / (2 * sigma**2))
    # zero-mean correction: remove the Gaussian-weighted DC component
    kappa = np.exp(-(xi**2) / (2 * sigma**2))
    return gauss - kappa * envelope


def build_filter_bank(params: ScatterParams, t: int) -> FilterBank:
    if t < params.min_length:
        raise ScatterError(f"signal of {t} samples is too short for J={params.J} (need >= {params.min_length})")
    N = padded_length(t, params.J)
    omega = np.fft.fftfreq(N) * 2 * np.pi
    ratio = 2.0 ** (-1.0 / params.Q)
    j = np.arange(params.n_filters)
    xi = MOTHER_XI * ratio**j
    sigma = xi * (1 - ratio) / (1 + ratio) * BANDWIDTH_FACTOR
    psi = np.stack([_morlet_hat(omega, x, s) for x, s in zip(xi, sigma)])

    sigma_phi = LOWPASS_SIGMA / 2**params.J
    phi = np.exp(-(omega**2) / (2 * sigma_phi**2))

    # scale the band-pass family so |phi|^2 + sum |psi|^2 <= 1 everywhere
    energy = np.sum(psi**2, axis=0)
    room = 1.0 - phi**2
    mask = room > 1e-3
    psi = psi / np.sqrt(np.max(energy[mask] / room[mask]))

    for arr in (psi, phi, xi, sigma):
        arr.setflags(write=False)
    return FilterBank(psi, phi, xi, sigma, j / params.Q, N, int(t), params)


# --- convolution primitives --------------------------------------------------


def fft_convolve(x: np.ndarray, filt_hat: np.ndarray) -> np.ndarray:
    """Circular convolution of ``x`` with the filter whose DFT is ``filt_hat``."""
    return sp_fft.ifft(sp_fft.fft(x) * filt_hat)


def lowpass_subsample(u_hat: np.ndarray, phi: np.ndarray, step: int) -> np.ndarray:
    """Samples ``0, step, 2*step, ...`` of ``ifft(u_hat * phi)``.

    Folding the spectrum into ``N / step`` bins before the inverse FFT is
    the frequency-domain equivalent of subsampling in time.
    """
    N = u_hat.shape[-1]
    folded = (u_hat * phi).reshape(*u_hat.shape[:-1], step, N // step).sum(axis=-2)
    return sp_fft.ifft(folded, axis=-1) / step


def _pad(x: np.ndarray, N: int, step: int) -> tuple[np.ndarray, int]:
    t = x.size
    # left pad kept a multiple of step so output frames align with samples i*step
    left = ((N - t) // 2 // step) * step
    right = N - t - left
    # even mirror: keeps the local mean, unlike odd reflection which adds a
    # 2 * x[edge] offset whenever the signal does not end on its mean
    return np.pad(x, (left, right), mode="reflect"), left


# --- scattering --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ScatterRepresentation:
    """Scattering coefficients ``coeffs`` of shape (channels, n frames)."""

    coeffs: np.ndarray
    subsample: int
    channel_index: list = field(default_factory=list)  # (order, path) per row
    source_dim: np.ndarray = None
    t: int = 0

    @property
    def n(self) -> int:
        return self.coeffs.shape[1]

    @property
    def n_channels(self) -> int:
        return self.coeffs.shape[0]

    def with_coeffs(self, coeffs: np.ndarray) -> ScatterRepresentation:
        return ScatterRepresentation(coeffs, self.subsample, self.channel_index, self.source_dim, self.t)

    def to_csv(self, path) -> None:
        """Write coefficients (rows = channels) plus a ``.channels.json`` sidecar."""
        path = Path(path)
        np.savetxt(path, self.coeffs, delimiter=",", fmt="%.10g")
        sidecar = {
            "subsample": self.subsample,
            "t": self.t,
            "channels": [
                {"order": order, "path": list(p), "source_dim": int(d)}
                for (order, p), d in zip(self.channel_index, self.source_dim)
            ],
        }
        path.with_suffix(".channels.json").write_text(json.dumps(sidecar, indent=1), encoding="utf-8")

    @classmethod
    def from_csv(cls, path) -> ScatterRepresentation:
        path = Path(path)
        coeffs = np.atleast_2d(np.loadtxt(path, delimiter=","))
        meta = json.loads(path.with_suffix(".channels.json").read_text(encoding="utf-8"))
        index = [(c["order"], tuple(c["path"])) for c in meta["channels"]]
        dims = np.array([c["source_dim"] for c in meta["channels"]], dtype=int)
        return cls(coeffs, int(meta["subsample"]), index, dims, int(meta["t"]))


def channel_layout(params: ScatterParams, retained: Sequence[int]) -> list:
    index = [(0, ())]
    index += [(1, (int(j1),)) for j1 in retained]
    if params.max_order == 2:
        index += [(2, (int(j1), int(j2))) for j1 in retained for j2 in retained if j2 > j1]
    return index


def scatter_1d(x, bank: FilterBank, params: ScatterParams | None = None) -> ScatterRepresentation:
    """Scattering coefficients of a single channel.

    Row 0 is the modulus of the low-passed signal; then one row per retained
    first-order filter; then, for ``max_order=2``, one row per pair
    ``(j1, j2)`` of retained filters where ``j2`` has lower centre frequency
    than ``j1``.
    """
    params = params or bank.params
    if params != bank.params:
        raise ScatterError("params do not match the filter bank")
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ScatterError("scatter_1d expects a 1-D signal")
    t = x.size
    step = params.subsample
    if t > bank.t or t < params.min_length:
        raise ScatterError(f"signal length {t} does not fit a bank built for t={bank.t}")
    if not np.all(np.isfinite(x)):
        raise ScatterError("signal contains non-finite values")

    N = bank.signal_len
    padded, left = _pad(x, N, step)
    first = left // step
    n = -(-t // step)
    frames = slice(first, first + n)
    retained = bank.retained

    x_hat = sp_fft.fft(padded)
    rows = [np.abs(lowpass_subsample(x_hat, bank.phi, step))[frames]]

    u1 = np.abs(sp_fft.ifft(x_hat * bank.psi[retained], axis=-1))
    u1_hat = sp_fft.fft(u1, axis=-1)
    s1 = lowpass_subsample(u1_hat, bank.phi, step).real[:, frames]
    rows.extend(s1)

    if params.max_order == 2:
        # one path at a time: a batched (paths x N) array falls out of cache at
        # long t and makes the cost grow faster than N log N
        buf = np.empty(N, dtype=complex)
        for a in range(retained.size - 1):
            for j2 in retained[a + 1 :]:
                np.multiply(u1_hat[a], bank.psi[j2], out=buf)
                u2 = np.abs(sp_fft.ifft(buf, overwrite_x=True))
                rows.append(lowpass_subsample(sp_fft.fft(u2), bank.phi, step).real[frames])

    coeffs = np.maximum(np.vstack(rows), 0.0)  # clears round-off below zero
    index = channel_layout(params, retained)
    return ScatterRepresentation(coeffs, step, index, np.zeros(len(index), dtype=int), t)


_BANK_CACHE: dict = {}


def get_filter_bank(params: ScatterParams, t: int) -> FilterBank:
    """Filter bank for ``(params, t)``, memoised; banks are immutable."""
    key = (params, padded_length(t, params.J), t)
    bank = _BANK_CACHE.get(key)
    if bank is None:
        if len(_BANK_CACHE) > 32:
            _BANK_CACHE.clear()
        bank = _BANK_CACHE[key] = build_filter_bank(params, t)
    return bank


def scatter_multivariate(ts: TimeSeries, params: ScatterParams) -> ScatterRepresentation:
    """Scatter each dimension with one shared bank and stack the row blocks."""
    bank = get_filter_bank(params, ts.length)
    per_dim = params.rows_per_dim()
    coeffs = np.empty((ts.dim * per_dim, -(-ts.length // params.subsample)))
    index: list = []
    for d in range(ts.dim):
        rep = scatter_1d(ts.samples[d], bank, params)
        coeffs[d * per_dim : (d + 1) * per_dim] = rep.coeffs
        index.extend(rep.channel_index)
    source = np.repeat(np.arange(ts.dim), per_dim)
    return ScatterRepresentation(coeffs, params.subsample, index, source, ts.length)


def normalize_rep(z: ScatterRepresentation, mode: str = "per-channel-max") -> ScatterRepresentation:
    if mode == "none":
        return z
    c = z.coeffs
    if mode == "per-channel-max":
        peak = c.max(axis=1, keepdims=True)
        out = np.divide(c, peak, out=np.zeros_like(c), where=peak > 0)
    elif mode == "log1p-standardize":
        v = np.log1p(c)
        mu = v.mean(axis=1, keepdims=True)
        sd = v.std(axis=1, keepdims=True)
        out = np.divide(v - mu, sd, out=np.zeros_like(v), where=sd > 0)
    else:
        raise ScatterError(f"unknown normalize mode {mode!r}; expected one of {NORMALIZE_MODES}")
    return z.with_coeffs(out)


def concat_frames(reps: Sequence[ScatterRepresentation]) -> ScatterRepresentation:
    """Join representations along the frame axis (no separator frames)."""
    first = reps[0]
    for r in reps[1:]:
        if r.n_channels != first.n_channels or r.subsample != first.subsample:
            raise ScatterError("cannot concatenate representations with different layouts")
    coeffs = np.hstack([r.coeffs for r in reps])
    return ScatterRepresentation(coeffs, first.subsample, first.channel_index, first.source_dim, sum(r.t for r in reps))


__all__ = [
    "NORMALIZE_MODES",
    "FilterBank",
    "ScatterError",
    "ScatterParams",
    "ScatterRepresentation",
    "build_filter_bank",
    "concat_frames",
    "fft_convolve",
    "get_filter_bank",
    "lowpass_subsample",
    "normalize_rep",
    "scatter_1d",
    "scatter_multivariate",
]
