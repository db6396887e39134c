"""Channel models and inter-carrier-interference measurement.

Static block-fading multipath (Rayleigh taps at symbol-rate delays), AWGN
with symbol-rate SNR accounting, linear time-varying multipath with per-path
Doppler shifts, and a probe-based measurement of the end-to-end subcarrier
coupling matrix from which the ICI power is read off.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .frft import FrfdmParams
from .chain import receive_raw, transmit
from .papr import papr_db

__all__ = [
    "ChannelRealization",
    "IciReport",
    "draw_rayleigh",
    "make_ltv_channel",
    "frequency_response",
    "apply_static",
    "apply_awgn",
    "apply_ltv",
    "ici_power",
]


@dataclass(frozen=True)
class ChannelRealization:
    """A set of complex taps at integer symbol-rate delays.

    ``kind`` is ``"static"`` (all Doppler shifts zero) or ``"ltv"``.
    Delays must be non-negative and strictly increasing; whether they fit
    inside a cyclic prefix is checked by the consumer that knows the CP
    length.
    """

    gains: np.ndarray
    delays: np.ndarray
    dopplers_hz: np.ndarray
    kind: str

    def __post_init__(self):
        object.__setattr__(self, "gains", np.asarray(self.gains, dtype=np.complex128))
        object.__setattr__(self, "delays", np.asarray(self.delays, dtype=np.int64))
        object.__setattr__(self, "dopplers_hz", np.asarray(self.dopplers_hz, dtype=np.float64))
        if not (self.gains.size == self.delays.size == self.dopplers_hz.size):
            raise ValueError("gains, delays and dopplers must have equal length")
        if self.gains.size == 0:
            raise ValueError("channel needs at least one tap")
        if self.delays[0] < 0 or np.any(np.diff(self.delays) <= 0):
            raise ValueError("delays must be non-negative and strictly increasing")
        if self.kind not in ("static", "ltv"):
            raise ValueError("kind must be 'static' or 'ltv'")
        if self.kind == "static" and np.any(self.dopplers_hz != 0.0):
            raise ValueError("static channels cannot carry Doppler shifts")

    @property
    def max_delay(self) -> int:
        return int(self.delays[-1])


def draw_rayleigh(
    n_taps: int,
    rng: np.random.Generator,
    profile: str = "uniform",
    decay_db_per_tap: float = 3.0,
) -> ChannelRealization:
    """One block-fading multipath realization with i.i.d. Rayleigh taps.

    Tap powers follow the chosen delay profile (uniform by default,
    ``"exponential"`` with the given per-tap decay otherwise), normalized to
    unit total average power; delays are 0 .. n_taps-1 symbol periods.
    """
    if n_taps < 1:
        raise ValueError("n_taps must be at least 1")
    if profile == "uniform":
        powers = np.full(n_taps, 1.0 / n_taps)
    elif profile == "exponential":
        powers = 10.0 ** (-decay_db_per_tap * np.arange(n_taps) / 10.0)
        powers /= powers.sum()
    else:
        raise ValueError("profile must be 'uniform' or 'exponential'")
    gains = np.sqrt(powers / 2.0) * (rng.standard_normal(n_taps) + 1j * rng.standard_normal(n_taps))
    return ChannelRealization(
        gains=gains, delays=np.arange(n_taps), dopplers_hz=np.zeros(n_taps), kind="static"
    )


def make_ltv_channel(
    gains_db,
    delays,
    dopplers_hz,
    rng: np.random.Generator,
) -> ChannelRealization:
    """Time-varying multipath with fixed tap magnitudes from dB levels.

    Path phases are drawn once per realization from ``rng`` so a seeded
    generator reproduces the channel exactly.
    """
    gains_db = np.asarray(gains_db, dtype=np.float64)
    mags = 10.0 ** (gains_db / 20.0)
    phases = np.exp(2j * np.pi * rng.random(gains_db.size))
    return ChannelRealization(
        gains=mags * phases,
        delays=np.asarray(delays, dtype=np.int64),
        dopplers_hz=np.asarray(dopplers_hz, dtype=np.float64),
        kind="ltv",
    )


def frequency_response(ch: ChannelRealization, n: int) -> np.ndarray:
    """N-point frequency response of the symbol-rate taps.

    Plain DFT of the zero-padded tap sequence, so the identity channel
    (single unit tap at delay 0) maps to the all-ones response.
    """
    if ch.kind != "static":
        raise ValueError("frequency response is defined for static channels")
    if ch.max_delay >= n:
        raise ValueError("tap delays must be shorter than the block")
    taps = np.zeros(n, dtype=np.complex128)
    taps[ch.delays] = ch.gains
    return np.fft.fft(taps)


def _delayed_sum(frame: np.ndarray, ch: ChannelRealization, oversample: int) -> np.ndarray:
    out = np.zeros_like(frame, dtype=np.complex128)
    for gain, delay in zip(ch.gains, ch.delays):
        d = int(delay) * oversample
        if d == 0:
            out += gain * frame
        elif d < frame.shape[-1]:
            out[..., d:] += gain * frame[..., :-d]
    return out


def apply_static(frame: np.ndarray, ch: ChannelRealization, oversample: int = 1) -> np.ndarray:
    """Linear convolution with the taps on the oversampled grid.

    Output length equals input length: the tail beyond the frame is
    dropped and the leading transient is absorbed by the cyclic prefix.
    """
    if ch.kind != "static":
        raise ValueError("use apply_ltv for time-varying channels")
    return _delayed_sum(np.asarray(frame, dtype=np.complex128), ch, oversample)


def apply_ltv(
    frame: np.ndarray,
    ch: ChannelRealization,
    sample_rate_hz: float,
    oversample: int = 1,
) -> np.ndarray:
    """Time-varying multipath: per-path Doppler rotation plus delay.

    ``y[i] = sum_p gain_p exp(j 2 pi f_p i / fs) frame[i - delay_p * L]``
    with time origin at the first frame sample.  All Doppler shifts zero
    reproduces `apply_static` exactly.
    """
    frame = np.asarray(frame, dtype=np.complex128)
    out = np.zeros_like(frame)
    i = np.arange(frame.shape[-1], dtype=np.float64)
    for gain, delay, doppler in zip(ch.gains, ch.delays, ch.dopplers_hz):
        d = int(delay) * oversample
        if d >= frame.shape[-1]:
            continue
        shifted = np.zeros_like(frame)
        if d == 0:
            shifted[...] = frame
        else:
            shifted[..., d:] = frame[..., :-d]
        if doppler == 0.0:
            out += gain * shifted
        else:
            out += gain * np.exp(2j * np.pi * doppler * i / sample_rate_hz) * shifted
    return out


def apply_awgn(
    frame: np.ndarray,
    es_n0_db: float,
    rng: np.random.Generator,
    oversample: int = 1,
) -> np.ndarray:
    """Add circular complex Gaussian noise at the requested symbol SNR.

    Noise variance is set from the measured mean sample power of ``frame``;
    with oversampling the per-sample variance is scaled up by L so that the
    post-transform per-symbol SNR equals the requested Es/N0 (only 1/L of
    the sample-rate noise band overlaps the signal).  ``es_n0_db = inf``
    returns the frame unchanged.
    """
    frame = np.asarray(frame, dtype=np.complex128)
    if math.isinf(es_n0_db) and es_n0_db > 0:
        return frame.copy()
    power = float(np.mean(np.abs(frame) ** 2))
    noise_var = power * oversample / 10.0 ** (es_n0_db / 10.0)
    noise = math.sqrt(noise_var / 2.0) * (
        rng.standard_normal(frame.shape) + 1j * rng.standard_normal(frame.shape)
    )
    return frame + noise


@dataclass(frozen=True)
class IciReport:
    """Diagonal and off-diagonal energy of the end-to-end coupling matrix."""

    alpha_offset: float
    signal_power: float
    ici_power: float
    papr_db: float

    @property
    def ici_to_signal(self) -> float:
        return self.ici_power / self.signal_power


def ici_power(
    params: FrfdmParams,
    ch: ChannelRealization,
    n_cp: int,
    block: np.ndarray | None = None,
) -> IciReport:
    """Measure subcarrier coupling through the unequalized chain.

    Probes the transmit -> channel -> receive (no equalizer) map with unit
    vectors to build the N x N coupling matrix M; reports the per-subcarrier
    diagonal energy and off-diagonal (ICI) energy.  When ``block`` is given
    its PAPR at this angle is included for trade-off curves.
    """
    if ch.kind != "ltv":
        raise ValueError("ici_power expects an 'ltv' channel (zero Doppler is allowed)")
    if ch.max_delay > n_cp:
        raise ValueError(
            f"tap delay {ch.max_delay} exceeds the cyclic prefix ({n_cp} symbol periods)"
        )
    n = params.n_subcarriers
    sample_rate = params.n_time_samples / params.block_duration
    probes = np.eye(n, dtype=np.complex128)
    frame = transmit(params, probes, n_cp)
    received = apply_ltv(frame.samples, ch, sample_rate, params.oversample)
    m_matrix = receive_raw(params, received, n_cp).T
    signal = float(np.sum(np.abs(np.diagonal(m_matrix)) ** 2) / n)
    off_diag = m_matrix - np.diag(np.diagonal(m_matrix))
    return IciReport(
        alpha_offset=params.angle_offset,
        signal_power=signal,
        ici_power=float(np.sum(np.abs(off_diag) ** 2) / n),
        papr_db=float("nan") if block is None else papr_db(params, block),
    )
