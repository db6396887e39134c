"""Transmit/receive chain: modulation, quadratic phase, CP, equalization.

The transmitter maps symbols to the time grid with the inverse fractional
transform, multiplies by the quadratic phase ``exp(j theta(i))`` and
prepends a cyclic prefix.  The phase cancels the transform's own time-grid
chirp, which turns any in-CP multipath channel into a single complex gain
per fractional-domain bin: the receiver strips the CP, removes the phase,
applies the forward transform and divides by the ordinary frequency-domain
channel response, whatever the fractional angle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .frft import FrfdmParams, dfrft, idfrft

__all__ = [
    "MODULATION_KINDS",
    "bits_per_symbol",
    "constellation",
    "modulate",
    "demodulate",
    "phase_theta",
    "TxFrame",
    "transmit",
    "receive",
    "receive_raw",
    "UnequalizableChannelError",
]

MODULATION_KINDS = ("complex-gaussian", "qam64", "qam128")

_BITS = {"qam64": 6, "qam128": 7}


def bits_per_symbol(kind: str) -> int:
    """Bits carried per symbol (0 for the continuous Gaussian alphabet)."""
    _check_kind(kind)
    return _BITS.get(kind, 0)


def _check_kind(kind: str):
    if kind not in MODULATION_KINDS:
        raise ValueError(f"unknown modulation kind {kind!r}; choose from {MODULATION_KINDS}")


def _gray_to_index(width: int) -> np.ndarray:
    # lookup: gray code -> level position, for one axis
    idx = np.arange(1 << width)
    gray = idx ^ (idx >> 1)
    table = np.empty_like(idx)
    table[gray] = idx
    return table


@lru_cache(maxsize=8)
def _square_qam(order: int) -> np.ndarray:
    side = int(round(math.sqrt(order)))
    width = side.bit_length() - 1
    levels = 2.0 * np.arange(side) - (side - 1)
    pos = _gray_to_index(width)
    labels = np.arange(order)
    i_level = levels[pos[labels >> width]]
    q_level = levels[pos[labels & (side - 1)]]
    points = i_level + 1j * q_level
    return points / math.sqrt(float(np.mean(np.abs(points) ** 2)))


@lru_cache(maxsize=1)
def _cross_qam_128() -> np.ndarray:
    # Gray-labelled 16x8 rectangle folded into the standard 128-point cross:
    # the two outermost columns on each side move into the top/bottom wings.
    # The fold keeps labels of neighbouring points one bit apart except along
    # the fold seam (quasi-Gray).
    i_pos = _gray_to_index(4)
    q_pos = _gray_to_index(3)
    labels = np.arange(128)
    i_level = 2.0 * i_pos[labels >> 3] - 15.0
    q_level = 2.0 * q_pos[labels & 7] - 7.0
    outer = np.abs(i_level) > 11.0
    new_i = np.where(outer, np.sign(i_level) * np.abs(q_level), i_level)
    new_q = np.where(outer, np.sign(q_level) * (np.abs(i_level) - 4.0), q_level)
    points = new_i + 1j * new_q
    return points / math.sqrt(float(np.mean(np.abs(points) ** 2)))


def constellation(kind: str) -> np.ndarray:
    """Unit-average-energy constellation points indexed by integer label."""
    _check_kind(kind)
    if kind == "qam64":
        return _square_qam(64)
    if kind == "qam128":
        return _cross_qam_128()
    raise ValueError("the complex Gaussian alphabet has no finite constellation")


def modulate(kind: str, source, n: int) -> np.ndarray:
    """Produce a block of ``n`` unit-average-energy symbols.

    For QAM kinds ``source`` is a bit array (at least ``n * bits_per_symbol``
    entries, consumed most significant bit first); for the Gaussian kind it
    is a ``numpy.random.Generator``.
    """
    _check_kind(kind)
    if kind == "complex-gaussian":
        rng = source
        return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2.0)
    bps = _BITS[kind]
    bits = np.asarray(source, dtype=np.int64).ravel()
    if bits.size < n * bps:
        raise ValueError(f"need {n * bps} bits for {n} {kind} symbols, got {bits.size}")
    groups = bits[: n * bps].reshape(n, bps)
    labels = groups @ (1 << np.arange(bps - 1, -1, -1, dtype=np.int64))
    return constellation(kind)[labels]


def demodulate(kind: str, symbols: np.ndarray):
    """Hard decisions: QAM kinds return bits, Gaussian returns the symbols.

    QAM slicing is a nearest-point decision over the full constellation;
    exact ties resolve to the smaller bit label.
    """
    _check_kind(kind)
    symbols = np.asarray(symbols, dtype=np.complex128).ravel()
    if kind == "complex-gaussian":
        return symbols
    points = constellation(kind)
    bps = _BITS[kind]
    labels = np.empty(symbols.size, dtype=np.int64)
    chunk = 1 << 14
    for start in range(0, symbols.size, chunk):
        block = symbols[start : start + chunk, None]
        d2 = np.abs(block - points[None, :]) ** 2
        labels[start : start + block.shape[0]] = np.argmin(d2, axis=1)
    shifts = np.arange(bps - 1, -1, -1, dtype=np.int64)
    return ((labels[:, None] >> shifts) & 1).ravel()


# -- chirp phase and framing ------------------------------------------------


def phase_theta(params: FrfdmParams, i) -> np.ndarray | float:
    """Quadratic phase ``theta(i) = i^2 cot(alpha) ts_os^2 / 2``.

    ``ts_os`` is the oversampled-grid time spacing fixed by the transform
    convention, so the phase exactly cancels the transform's time-grid
    chirp; at L = 1 it reduces to ``n^2 cot(alpha) ts^2 / 2``.
    """
    i = np.asarray(i, dtype=np.float64)
    out = 0.5 * i**2 * params.cot_alpha * params.ts_os**2
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class TxFrame:
    """One CP-prefixed transmit frame on the oversampled time grid."""

    samples: np.ndarray
    alpha_offset: float
    n_cp: int
    oversample: int
    meta: dict = field(default_factory=dict)

    @property
    def body(self) -> np.ndarray:
        return self.samples[..., self.n_cp * self.oversample :]


def transmit(params: FrfdmParams, s: np.ndarray, n_cp: int, meta: dict | None = None) -> TxFrame:
    """Transform, apply the quadratic phase and prepend ``n_cp * L`` samples."""
    if n_cp < 0:
        raise ValueError("n_cp must be non-negative")
    body = transmit_body(params, s)
    cp_len = n_cp * params.oversample
    frame = np.concatenate([body[..., body.shape[-1] - cp_len :], body], axis=-1)
    return TxFrame(
        samples=frame,
        alpha_offset=params.angle_offset,
        n_cp=n_cp,
        oversample=params.oversample,
        meta=meta or {},
    )


def transmit_body(params: FrfdmParams, s: np.ndarray) -> np.ndarray:
    """Phase-applied time-domain body (no CP); batched over leading axes."""
    x = idfrft(params, s)
    theta = phase_theta(params, np.arange(x.shape[-1]))
    return x * np.exp(1j * theta)


class UnequalizableChannelError(ValueError):
    """Raised when a frequency bin's channel response is numerically zero."""

    def __init__(self, bins):
        self.bins = np.asarray(bins)
        super().__init__(f"channel response vanishes on bins {self.bins.tolist()}")


def receive_raw(params: FrfdmParams, samples: np.ndarray, n_cp: int) -> np.ndarray:
    """CP strip, phase removal and forward transform; no equalization."""
    samples = np.asarray(samples, dtype=np.complex128)
    m = params.n_time_samples
    cp_len = n_cp * params.oversample
    if samples.shape[-1] != m + cp_len:
        raise ValueError(f"expected {m + cp_len} samples, got {samples.shape[-1]}")
    body = samples[..., cp_len:]
    theta = phase_theta(params, np.arange(m))
    return dfrft(params, body * np.exp(-1j * theta))


def receive(
    params: FrfdmParams,
    samples: np.ndarray,
    h_f: np.ndarray,
    n_cp: int,
    equalizer: str = "zf",
    noise_var: float | None = None,
) -> np.ndarray:
    """Recover equalized fractional-domain symbols from a received frame.

    ``h_f`` is the N-point frequency response of the symbol-rate channel
    taps (identity channel -> all ones).  The default zero-forcing
    equalizer divides each bin by its response; ``equalizer="mmse"``
    additionally needs the per-sample ``noise_var``.
    """
    shat = receive_raw(params, samples, n_cp)
    h_f = np.asarray(h_f, dtype=np.complex128)
    if h_f.shape[-1] != params.n_subcarriers:
        raise ValueError("h_f must have one entry per subcarrier")
    if equalizer == "zf":
        bad = np.flatnonzero(np.abs(h_f) < 1e-12)
        if bad.size:
            raise UnequalizableChannelError(bad)
        return shat / h_f
    if equalizer == "mmse":
        if noise_var is None:
            raise ValueError("mmse equalizer requires noise_var")
        return shat * np.conj(h_f) / (np.abs(h_f) ** 2 + noise_var)
    raise ValueError(f"unknown equalizer {equalizer!r}")
