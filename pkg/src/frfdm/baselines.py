"""Reference PAPR reducers for the plain-OFDM configuration.

Clipping (amplitude limiting at a multiple of the block RMS), selected
mapping over random sign sequences, and partial transmit sequences with
exhaustive sign search over disjoint subblocks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .frft import FrfdmParams, idfrft

__all__ = [
    "BaselineConfig",
    "clip",
    "slm_phase_table",
    "slm",
    "pts_partition_masks",
    "pts",
]


@dataclass(frozen=True)
class BaselineConfig:
    """Default baseline settings: 128 SLM candidates, 8 PTS subblocks
    (2^7 = 128 sign combinations), clipping ratio 2."""

    slm_candidates: int = 128
    pts_subblocks: int = 8
    clip_ratio: float = 2.0
    pts_partition: str = "adjacent"

    def __post_init__(self):
        if self.slm_candidates < 1:
            raise ValueError("slm_candidates must be at least 1")
        if self.pts_subblocks < 1:
            raise ValueError("pts_subblocks must be at least 1")
        if not self.clip_ratio > 0:
            raise ValueError("clip_ratio must be positive")
        if self.pts_partition not in ("adjacent", "interleaved"):
            raise ValueError("pts_partition must be 'adjacent' or 'interleaved'")


def clip(x: np.ndarray, clip_ratio: float) -> np.ndarray:
    """Limit sample magnitudes to ``clip_ratio`` times the block RMS.

    Samples below the threshold pass through; samples above are scaled to
    the threshold magnitude with their phase preserved.  An all-zero block
    is returned unchanged.
    """
    x = np.asarray(x, dtype=np.complex128)
    rms = math.sqrt(float(np.mean(np.abs(x) ** 2)))
    if rms == 0.0:
        return x.copy()
    limit = clip_ratio * rms
    mag = np.abs(x)
    over = mag > limit
    out = x.copy()
    out[over] = x[over] / mag[over] * limit
    return out


def _row_papr(x: np.ndarray) -> np.ndarray:
    p = np.abs(x) ** 2
    return p.max(axis=-1) / p.mean(axis=-1)


def slm_phase_table(n: int, n_candidates: int, rng: np.random.Generator) -> np.ndarray:
    """Candidate sign sequences in {-1, +1}^N, the first being all ones so
    the unmodified block always competes."""
    table = np.ones((n_candidates, n))
    if n_candidates > 1:
        table[1:] = 1.0 - 2.0 * rng.integers(0, 2, size=(n_candidates - 1, n))
    return table


def slm(
    s: np.ndarray,
    params: FrfdmParams,
    n_candidates: int,
    rng: np.random.Generator,
):
    """Selected mapping: transmit the sign-masked candidate of least PAPR.

    Returns ``(time_signal, selected_index)``; exactly ``n_candidates``
    PAPR evaluations.  The index is the side information a receiver needs
    to undo the mapping.
    """
    s = np.asarray(s, dtype=np.complex128)
    table = slm_phase_table(s.size, n_candidates, rng)
    candidates = idfrft(params, s * table)
    best = int(np.argmin(_row_papr(candidates)))
    return candidates[best], best


def pts_partition_masks(n: int, n_subblocks: int, partition: str = "adjacent") -> np.ndarray:
    """Boolean masks of the disjoint subcarrier subblocks."""
    if n % n_subblocks:
        raise ValueError(f"n_subblocks={n_subblocks} must divide N={n}")
    masks = np.zeros((n_subblocks, n), dtype=bool)
    if partition == "adjacent":
        width = n // n_subblocks
        for v in range(n_subblocks):
            masks[v, v * width : (v + 1) * width] = True
    elif partition == "interleaved":
        for v in range(n_subblocks):
            masks[v, v::n_subblocks] = True
    else:
        raise ValueError("partition must be 'adjacent' or 'interleaved'")
    return masks


def pts_sign_table(n_subblocks: int) -> np.ndarray:
    """All sign vectors in {-1,+1}^V with the first entry pinned to +1."""
    count = 1 << (n_subblocks - 1)
    bits = (np.arange(count)[:, None] >> np.arange(n_subblocks - 1)) & 1
    table = np.ones((count, n_subblocks))
    table[:, 1:] = 1.0 - 2.0 * bits
    return table


def pts(
    s: np.ndarray,
    params: FrfdmParams,
    n_subblocks: int,
    partition: str = "adjacent",
):
    """Partial transmit sequences with exhaustive sign optimization.

    The block is split into ``n_subblocks`` disjoint subblocks whose partial
    transforms are computed once (V transforms); every sign combination
    with the first sign fixed to +1 is then formed by linear combination
    (2^(V-1) PAPR evaluations).  Returns ``(time_signal, sign_vector)``.
    """
    s = np.asarray(s, dtype=np.complex128)
    masks = pts_partition_masks(s.size, n_subblocks, partition)
    partials = idfrft(params, s * masks)
    signs = pts_sign_table(n_subblocks)
    candidates = signs @ partials
    best = int(np.argmin(_row_papr(candidates)))
    return candidates[best], signs[best]
