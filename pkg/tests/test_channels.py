import math

import numpy as np
import pytest

from frfdm import (
    ChannelRealization,
    apply_awgn,
    apply_ltv,
    apply_static,
    draw_rayleigh,
    frequency_response,
    ici_power,
    make_ltv_channel,
    make_params,
)

from oracles import circular_convolve


def random_signal(n, seed=0):
    rng = np.random.default_rng(seed)
    return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2.0)


class TestChannelRealization:
    def test_validation(self):
        with pytest.raises(ValueError):
            ChannelRealization(np.ones(2), [1, 0], np.zeros(2), "static")
        with pytest.raises(ValueError):
            ChannelRealization(np.ones(2), [-1, 0], np.zeros(2), "static")
        with pytest.raises(ValueError):
            ChannelRealization(np.ones(1), [0], np.ones(1), "static")
        with pytest.raises(ValueError):
            ChannelRealization(np.ones(1), [0], np.zeros(1), "fading")

    def test_single_tap_draw(self):
        ch = draw_rayleigh(1, np.random.default_rng(0))
        assert ch.delays.tolist() == [0]
        assert ch.kind == "static"

    def test_unit_total_average_power(self):
        rng = np.random.default_rng(1)
        total = 0.0
        for _ in range(10_000):
            total += float(np.sum(np.abs(draw_rayleigh(6, rng).gains) ** 2))
        assert total / 10_000 == pytest.approx(1.0, abs=0.05)

    def test_exponential_profile(self):
        rng = np.random.default_rng(2)
        draws = [draw_rayleigh(4, rng, profile="exponential") for _ in range(4000)]
        powers = np.mean([np.abs(d.gains) ** 2 for d in draws], axis=0)
        assert powers.sum() == pytest.approx(1.0, abs=0.05)
        assert np.all(np.diff(powers) < 0)

    def test_six_tap_reference_configuration(self):
        ch = draw_rayleigh(6, np.random.default_rng(3))
        assert ch.gains.size == 6
        assert ch.delays.tolist() == list(range(6))


class TestApplyStatic:
    def test_identity_tap(self):
        ch = ChannelRealization(np.array([1.0 + 0j]), [0], [0.0], "static")
        x = random_signal(50, 4)
        assert np.array_equal(apply_static(x, ch), x)

    def test_single_gain(self):
        ch = ChannelRealization(np.array([0.3 - 0.4j]), [0], [0.0], "static")
        x = random_signal(20, 5)
        assert np.max(np.abs(apply_static(x, ch) - (0.3 - 0.4j) * x)) == 0.0

    def test_cp_yields_circular_convolution(self):
        # after CP stripping, the body equals the circular convolution
        body = random_signal(8, 6)
        frame = np.concatenate([body[-2:], body])
        taps = np.array([0.9 + 0.1j, -0.2 + 0.4j])
        ch = ChannelRealization(taps, [0, 1], [0.0, 0.0], "static")
        y = apply_static(frame, ch)[2:]
        assert np.max(np.abs(y - circular_convolve(body, taps))) <= 1e-12

    def test_energy_preserved_within_edge_effects(self):
        taps = np.array([0.8, 0.6j])  # unit energy
        ch = ChannelRealization(taps, [0, 1], [0.0, 0.0], "static")
        x = random_signal(4000, 7)
        e_in = float(np.sum(np.abs(x) ** 2))
        e_out = float(np.sum(np.abs(apply_static(x, ch)) ** 2))
        assert abs(e_out - e_in) <= 0.02 * e_in

    def test_oversampled_delays(self):
        x = random_signal(32, 8)
        ch = ChannelRealization(np.array([1.0 + 0j, 0.5 + 0j]), [0, 2], [0.0, 0.0], "static")
        y = apply_static(x, ch, oversample=4)
        ref = x.copy()
        ref[8:] += 0.5 * x[:-8]
        assert np.max(np.abs(y - ref)) == 0.0


class TestApplyAwgn:
    def test_infinite_snr_passthrough(self):
        x = random_signal(64, 9)
        assert np.array_equal(apply_awgn(x, math.inf, np.random.default_rng(0)), x)

    def test_empirical_snr(self):
        x = random_signal(10**6, 10)
        y = apply_awgn(x, 10.0, np.random.default_rng(11))
        noise_power = float(np.mean(np.abs(y - x) ** 2))
        measured_db = 10 * math.log10(float(np.mean(np.abs(x) ** 2)) / noise_power)
        assert abs(measured_db - 10.0) <= 0.1

    def test_zero_db_noise_equals_signal_power(self):
        x = random_signal(10**6, 12)
        y = apply_awgn(x, 0.0, np.random.default_rng(13))
        assert float(np.mean(np.abs(y - x) ** 2)) == pytest.approx(
            float(np.mean(np.abs(x) ** 2)), rel=0.02
        )

    def test_oversampling_scales_noise_band(self):
        x = random_signal(10**5, 14)
        y = apply_awgn(x, 0.0, np.random.default_rng(15), oversample=4)
        assert float(np.mean(np.abs(y - x) ** 2)) == pytest.approx(
            4.0 * float(np.mean(np.abs(x) ** 2)), rel=0.05
        )


class TestApplyLtv:
    def test_zero_doppler_matches_static(self):
        gains = np.array([0.7 + 0.1j, 0.2 - 0.3j])
        ltv = ChannelRealization(gains, [0, 1], [0.0, 0.0], "ltv")
        static = ChannelRealization(gains, [0, 1], [0.0, 0.0], "static")
        x = random_signal(64, 16)
        assert np.array_equal(apply_ltv(x, ltv, 1e6), apply_static(x, static))

    def test_single_path_frequency_shift(self):
        ch = ChannelRealization(np.array([1.0 + 0j]), [0], [500.0], "ltv")
        x = random_signal(256, 17)
        fs = 1e5
        y = apply_ltv(x, ch, fs)
        i = np.arange(256)
        assert np.max(np.abs(y - x * np.exp(2j * np.pi * 500.0 * i / fs))) <= 1e-12
        assert float(np.sum(np.abs(y) ** 2)) == pytest.approx(float(np.sum(np.abs(x) ** 2)))

    def test_reference_four_path_build(self):
        ch = make_ltv_channel(
            [0.0, -4.0, -5.0, -8.0],
            [0, 5, 10, 20],
            [500.0, 1600.0, 2200.0, 3800.0],
            np.random.default_rng(18),
        )
        assert ch.kind == "ltv"
        assert np.abs(ch.gains[0]) == pytest.approx(1.0)
        assert np.abs(ch.gains[1]) == pytest.approx(10 ** (-4 / 20))
        # reproducible phases
        ch2 = make_ltv_channel(
            [0.0, -4.0, -5.0, -8.0],
            [0, 5, 10, 20],
            [500.0, 1600.0, 2200.0, 3800.0],
            np.random.default_rng(18),
        )
        assert np.array_equal(ch.gains, ch2.gains)


class TestIciPower:
    def test_static_channel_is_interference_free(self):
        params = make_params(16, 2, 1e-3, 0.31)
        ch = make_ltv_channel([0.0, -3.0], [0, 2], [0.0, 0.0], np.random.default_rng(19))
        report = ici_power(params, ch, 4)
        assert report.ici_power <= 1e-18 * (report.signal_power + report.ici_power)

    def test_plain_ofdm_angle_same_code_path(self):
        params = make_params(16, 2, 1e-3, 0.0)
        ch = make_ltv_channel([0.0, -4.0], [0, 1], [300.0, 900.0], np.random.default_rng(20))
        a = ici_power(params, ch, 4)
        b = ici_power(params, ch, 4)
        assert (a.alpha_offset, a.signal_power, a.ici_power) == (
            b.alpha_offset,
            b.signal_power,
            b.ici_power,
        )
        assert a.ici_power > 0.0

    def test_block_papr_included(self):
        params = make_params(16, 2, 1e-3, 0.0)
        ch = make_ltv_channel([0.0], [0], [100.0], np.random.default_rng(21))
        s = random_signal(16, 22)
        report = ici_power(params, ch, 4, block=s)
        assert math.isfinite(report.papr_db)
        assert math.isnan(ici_power(params, ch, 4).papr_db)

    def test_matrix_agrees_with_random_probing(self):
        # unit-vector probing vs least-squares identification of the map
        from frfdm.chain import receive_raw, transmit
        from frfdm.channels import apply_ltv as ltv_fn

        params = make_params(8, 2, 1e-3, 0.42)
        ch = make_ltv_channel([0.0, -4.0], [0, 1], [400.0, 1300.0], np.random.default_rng(23))
        n_cp = 3
        fs = params.n_time_samples / params.block_duration

        probes = np.eye(8, dtype=complex)
        out = receive_raw(
            params, ltv_fn(transmit(params, probes, n_cp).samples, ch, fs, 2), n_cp
        )
        m_unit = out.T

        rng = np.random.default_rng(24)
        inputs = rng.standard_normal((32, 8)) + 1j * rng.standard_normal((32, 8))
        outputs = receive_raw(
            params, ltv_fn(transmit(params, inputs, n_cp).samples, ch, fs, 2), n_cp
        )
        m_lstsq = np.linalg.lstsq(inputs, outputs, rcond=None)[0].T
        assert np.max(np.abs(m_unit - m_lstsq)) <= 1e-9

    def test_delay_beyond_cp_rejected(self):
        params = make_params(16, 1, 1e-3, 0.0)
        ch = make_ltv_channel([0.0], [8], [100.0], np.random.default_rng(25))
        with pytest.raises(ValueError):
            ici_power(params, ch, 4)

    def test_requires_ltv_kind(self):
        params = make_params(16, 1, 1e-3, 0.0)
        ch = draw_rayleigh(2, np.random.default_rng(26))
        with pytest.raises(ValueError):
            ici_power(params, ch, 4)


def test_frequency_response_identity():
    ch = ChannelRealization(np.array([1.0 + 0j]), [0], [0.0], "static")
    assert np.array_equal(frequency_response(ch, 8), np.ones(8, complex))
