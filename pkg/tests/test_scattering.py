import numpy as np
import pytest

from lesseg.scattering import (
    ScatterError,
    ScatterParams,
    ScatterRepresentation,
    build_filter_bank,
    concat_frames,
    fft_convolve,
    get_filter_bank,
    lowpass_subsample,
    normalize_rep,
    scatter_1d,
    scatter_multivariate,
)
from lesseg.signal_io import TimeSeries


def test_params_validation():
    with pytest.raises(ScatterError):
        ScatterParams(J=0)
    with pytest.raises(ScatterError):
        ScatterParams(J=2, Q=2, num_low_freq=5)
    with pytest.raises(ScatterError):
        ScatterParams(max_order=3)
    assert ScatterParams(J=6, Q=2, num_low_freq=12).rows_per_dim() == 1 + 12 + 66


def test_short_signal_rejected():
    with pytest.raises(ScatterError):
        build_filter_bank(ScatterParams(J=6), 2**8 - 1)
    build_filter_bank(ScatterParams(J=6), 2**8)


def test_centre_frequencies_geometric():
    bank = build_filter_bank(ScatterParams(J=6, Q=2), 4096)
    assert bank.psi.shape[0] == 12
    assert np.all(np.diff(bank.xi) < 0)
    np.testing.assert_allclose(bank.xi[1:] / bank.xi[:-1], 2**-0.5, rtol=1e-12)
    assert bank.xi[0] == pytest.approx(0.85 * np.pi)


@pytest.mark.parametrize("J,Q", [(3, 1), (6, 2), (8, 1), (5, 4)])
def test_admissibility(J, Q):
    bank = build_filter_bank(ScatterParams(J=J, Q=Q, num_low_freq=1), 2 ** (J + 3))
    assert bank.phi[0] == pytest.approx(1.0)
    assert np.max(np.abs(bank.psi[:, 0])) <= 1e-6


@pytest.mark.parametrize("J,Q,t", [(8, 1, 4096), (6, 2, 4096), (5, 4, 2048)])
def test_littlewood_paley_passband(J, Q, t):
    bank = build_filter_bank(ScatterParams(J=J, Q=Q, num_low_freq=1), t)
    lp = bank.littlewood_paley()
    band = bank.passband()
    assert band.sum() > 10
    assert lp[band].min() >= 0.5
    assert lp.max() <= 1.05


def test_fft_convolution_matches_direct(rng):
    # direct circular convolution with the time-domain filter is the oracle
    bank = build_filter_bank(ScatterParams(J=3, Q=2, num_low_freq=6), 256)
    N = bank.signal_len
    idx = (np.arange(N)[:, None] - np.arange(N)[None, :]) % N
    for filt in (bank.psi[0], bank.psi[-1], bank.phi):
        h = np.fft.ifft(filt)
        x = rng.normal(size=N)
        direct = (h[idx] * x[None, :]).sum(axis=1)
        fast = fft_convolve(x, filt)
        assert np.linalg.norm(fast - direct) / np.linalg.norm(direct) < 1e-9


def test_lowpass_subsample_matches_time_domain(rng):
    N, step = 512, 8
    u = rng.normal(size=N)
    phi = np.exp(-((np.fft.fftfreq(N) * 2 * np.pi) ** 2) / (2 * 0.05**2))
    full = np.fft.ifft(np.fft.fft(u) * phi)
    np.testing.assert_allclose(lowpass_subsample(np.fft.fft(u), phi, step), full[::step], atol=1e-12)


def test_zero_input_gives_zero_output():
    params = ScatterParams(J=6, Q=2, num_low_freq=12)
    rep = scatter_1d(np.zeros(4096), get_filter_bank(params, 4096))
    assert np.all(rep.coeffs == 0.0)


def test_shape_and_layout():
    params = ScatterParams(J=6, Q=2, num_low_freq=5)
    t = 4000
    rep = scatter_1d(np.random.default_rng(0).normal(size=t), get_filter_bank(params, t))
    assert rep.coeffs.shape == (params.rows_per_dim(), -(-t // 64))
    assert rep.subsample == 64
    orders = [o for o, _ in rep.channel_index]
    assert orders == [0] + [1] * 5 + [2] * 10
    # second-order paths descend in frequency: larger filter index = lower frequency
    assert all(p[1] > p[0] for o, p in rep.channel_index if o == 2)


def test_nonnegative(rng):
    params = ScatterParams(J=5, Q=2, num_low_freq=8)
    for _ in range(5):
        x = rng.normal(size=3000) * rng.uniform(0.1, 10)
        assert scatter_1d(x, get_filter_bank(params, 3000)).coeffs.min() >= 0.0


@pytest.mark.parametrize("J,Q", [(6, 2), (5, 1), (4, 4)])
def test_frequency_selection_all_retained_filters(J, Q):
    # a tone at a filter's centre frequency lights up that filter's order-1 row most
    params = ScatterParams(J=J, Q=Q, num_low_freq=J * Q, max_order=1)
    t = 2**13
    bank = get_filter_bank(params, t)
    n = np.arange(t)
    for pos, j in enumerate(bank.retained):
        rep = scatter_1d(np.cos(bank.xi[j] * n), bank)
        means = rep.coeffs[1:].mean(axis=1)
        assert int(np.argmax(means)) == pos


def _bandlimited(rng, bank, t, n_tones=4, at=None):
    # periodic over t so a circular shift keeps the signal smooth; ``at`` gives
    # the (possibly warped) sample times, so deformations are exact
    lo, hi = bank.xi[bank.retained[-1]], bank.xi[bank.retained[0]]
    k = rng.integers(int(np.ceil(lo * t / (2 * np.pi))), int(hi * t / (2 * np.pi)), n_tones)
    amps = rng.uniform(0.5, 1.5, n_tones)
    phases = rng.uniform(0, 2 * np.pi, n_tones)
    n = np.arange(t) if at is None else at
    return sum(a * np.cos(2 * np.pi * kk * n / t + p) for a, kk, p in zip(amps, k, phases))


def test_shift_stability(rng):
    params = ScatterParams(J=6, Q=2, num_low_freq=12)
    t = 2**13
    bank = get_filter_bank(params, t)
    for _ in range(10):
        x = _bandlimited(rng, bank, t)
        a = scatter_1d(x, bank).coeffs
        b = scatter_1d(np.roll(x, 2**params.J), bank).coeffs
        assert np.linalg.norm(a - b) / np.linalg.norm(a) <= 0.1


def test_deformation_stability(rng):
    # ||S x_tau - S x|| / (||x|| sup|tau'|) stays within 2x of a reference ratio
    params = ScatterParams(J=6, Q=2, num_low_freq=12)
    t = 2**13
    bank = get_filter_bank(params, t)
    n = np.arange(t, dtype=float)

    def ratio(seed, eps, period):
        # tau(u) = eps * period / 2pi * sin(2 pi u / period), so sup|tau'| = eps
        tau = eps * period / (2 * np.pi) * np.sin(2 * np.pi * n / period)
        x = _bandlimited(np.random.default_rng(seed), bank, t)
        x_tau = _bandlimited(np.random.default_rng(seed), bank, t, at=n - tau)
        diff = np.linalg.norm(scatter_1d(x_tau, bank).coeffs - scatter_1d(x, bank).coeffs)
        return diff / (np.linalg.norm(x) * eps)

    reference = ratio(1, 0.01, 2048)
    trials = [
        ratio(int(rng.integers(1 << 30)), rng.uniform(0.002, 0.02), int(rng.choice([1024, 2048, 4096])))
        for _ in range(20)
    ]
    assert max(trials) <= 2 * reference


def test_multivariate_duplicate_dims():
    rng = np.random.default_rng(3)
    x = rng.normal(size=2048)
    params = ScatterParams(J=5, Q=2, num_low_freq=4)
    rep = scatter_multivariate(TimeSeries(np.vstack([x, x]), 1000.0), params)
    per = params.rows_per_dim()
    assert np.array_equal(rep.coeffs[:per], rep.coeffs[per:])
    assert list(rep.source_dim) == [0] * per + [1] * per
    single = scatter_multivariate(TimeSeries(x, 1000.0), params)
    assert np.array_equal(single.coeffs, scatter_1d(x, get_filter_bank(params, 2048)).coeffs)


def test_multivariate_shape_arithmetic():
    params = ScatterParams(J=7, Q=2, num_low_freq=12, max_order=1)
    ts = TimeSeries(np.random.default_rng(0).normal(size=(3, 2**14)), 8000.0)
    assert scatter_multivariate(ts, params).coeffs.shape == (39, 128)


def test_bank_mismatch_rejected():
    bank = get_filter_bank(ScatterParams(J=5, num_low_freq=6), 1024)
    with pytest.raises(ScatterError):
        scatter_1d(np.zeros(2048), bank)
    with pytest.raises(ScatterError):
        scatter_1d(np.zeros(1024), bank, ScatterParams(J=5, num_low_freq=3))


@pytest.mark.parametrize("mode", ["per-channel-max", "log1p-standardize", "none"])
def test_normalize_zero_stays_zero(mode):
    z = ScatterRepresentation(np.zeros((4, 10)), 8)
    assert np.all(normalize_rep(z, mode).coeffs == 0)


def test_normalize_modes(rng):
    c = rng.random((5, 20))
    c[2] = 0
    z = ScatterRepresentation(c, 8)
    out = normalize_rep(z, "per-channel-max").coeffs
    for row in out:
        assert row.max() == 1.0 or not row.any()
    assert normalize_rep(z, "none") is z
    ls = normalize_rep(z, "log1p-standardize").coeffs
    np.testing.assert_allclose(ls[[0, 1, 3, 4]].mean(axis=1), 0, atol=1e-12)
    np.testing.assert_allclose(ls[[0, 1, 3, 4]].std(axis=1), 1, atol=1e-12)
    with pytest.raises(ScatterError):
        normalize_rep(z, "bogus")


def test_csv_round_trip(tmp_path, rng):
    params = ScatterParams(J=4, Q=1, num_low_freq=3)
    rep = scatter_multivariate(TimeSeries(rng.normal(size=(2, 300)), 100.0), params)
    rep.to_csv(tmp_path / "z.csv")
    back = ScatterRepresentation.from_csv(tmp_path / "z.csv")
    np.testing.assert_allclose(back.coeffs, rep.coeffs, rtol=1e-9)
    assert back.channel_index == rep.channel_index
    assert list(back.source_dim) == list(rep.source_dim)
    assert (back.subsample, back.t) == (rep.subsample, rep.t)


def test_concat_frames():
    a = ScatterRepresentation(np.ones((3, 4)), 8, t=32)
    b = ScatterRepresentation(np.zeros((3, 2)), 8, t=16)
    c = concat_frames([a, b])
    assert c.coeffs.shape == (3, 6) and c.t == 48
    with pytest.raises(ScatterError):
        concat_frames([a, ScatterRepresentation(np.ones((2, 4)), 8)])
