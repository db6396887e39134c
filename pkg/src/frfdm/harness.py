"""Experiment orchestration: configs, seeded Monte Carlo runs, CSV output.

Every run is a pure function of (config, master seed): per-block random
streams are derived from a splittable seed construction, results are
aggregated in block order regardless of the worker count, and each output
file comes with a JSON sidecar holding the fully resolved configuration.
"""
from __future__ import annotations

import dataclasses
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .angle_search import (
    AngleSearchConfig,
    angle_span,
    brute_sweep_eigen,
    default_search_config,
    find_optimal_angle,
)
from .baselines import clip, pts_partition_masks, pts_sign_table, slm_phase_table
from .chain import (
    MODULATION_KINDS,
    bits_per_symbol,
    demodulate,
    modulate,
    receive,
    transmit,
    transmit_body,
)
from .channels import (
    apply_awgn,
    apply_static,
    draw_rayleigh,
    frequency_response,
    ici_power,
    make_ltv_channel,
)
from .frft import FrfdmParams, idfrft
from .papr import sample_papr_db

__all__ = [
    "SCHEMES",
    "ExperimentConfig",
    "load_config",
    "seed_stream",
    "CcdfCurve",
    "BerCurve",
    "MseCurve",
    "IciTable",
    "run_ccdf",
    "run_ber",
    "run_mse",
    "run_ici_tradeoff",
    "write_curve",
]

SCHEMES = ("ofdm", "da-frfdm", "da-frfdm-eigen", "slm", "pts", "clipping")

# independent per-block random streams
STREAM_DATA, STREAM_CHANNEL, STREAM_NOISE, STREAM_SCHEME = range(4)


@dataclass
class ExperimentConfig:
    """Runner settings; the defaults reproduce the reference configuration
    (N=64, CP 10, oversampling 10, T=128 us, coarse step = span/80, fine
    step = coarse/39, SLM 128, PTS 8 subblocks, clipping ratio 2)."""

    scheme: str = "ofdm"
    modulation: str = "complex-gaussian"
    n_subcarriers: int = 64
    oversample: int = 10
    block_duration: float = 128e-6
    n_cp: int = 10
    n_blocks: int = 10000
    snr_db: tuple = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    channel_taps: int = 6
    channel_profile: str = "uniform"
    master_seed: int = 0
    coarse_divisor: float = 80.0
    fine_ratio: int = 39
    papr_grid_points: int = 0  # 0 = use the N*L time grid
    slm_candidates: int = 128
    pts_subblocks: int = 8
    pts_partition: str = "adjacent"
    clip_ratio: float = 2.0
    eigen_sweep_step: float = math.pi * 1e-3
    ltv_gains_db: tuple = (0.0, -4.0, -5.0, -8.0)
    ltv_dopplers_hz: tuple = (500.0, 1600.0, 2200.0, 3800.0)
    ltv_delays_us: tuple = (0.0, 10.0, 20.0, 40.0)
    ici_sweep_points: int = 41
    threads: int = 1
    out: str = ""

    def validate(self) -> "ExperimentConfig":
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme: unknown scheme {self.scheme!r}; choose from {SCHEMES}")
        if self.modulation not in MODULATION_KINDS:
            raise ValueError(
                f"modulation: unknown kind {self.modulation!r}; choose from {MODULATION_KINDS}"
            )
        if self.n_subcarriers < 2:
            raise ValueError("n_subcarriers: must be at least 2")
        if self.oversample < 1:
            raise ValueError("oversample: must be at least 1")
        if not self.block_duration > 0:
            raise ValueError("block_duration: must be positive")
        if self.block_duration**2 / math.pi > 1.0:
            raise ValueError("block_duration: T^2/pi must not exceed 1")
        if self.n_cp < 0:
            raise ValueError("n_cp: must be non-negative")
        if self.n_blocks < 1:
            raise ValueError("n_blocks: must be at least 1")
        if self.channel_taps < 1:
            raise ValueError("channel_taps: must be at least 1")
        if self.channel_profile not in ("uniform", "exponential"):
            raise ValueError("channel_profile: must be 'uniform' or 'exponential'")
        if self.coarse_divisor < 2.0:
            raise ValueError("coarse_divisor: must be at least 2 (coarse step <= half span)")
        if self.fine_ratio < 1:
            raise ValueError("fine_ratio: must be at least 1")
        if self.slm_candidates < 1:
            raise ValueError("slm_candidates: must be at least 1")
        if self.pts_subblocks < 1 or self.n_subcarriers % self.pts_subblocks:
            raise ValueError("pts_subblocks: must divide n_subcarriers")
        if self.pts_partition not in ("adjacent", "interleaved"):
            raise ValueError("pts_partition: must be 'adjacent' or 'interleaved'")
        if not self.clip_ratio > 0:
            raise ValueError("clip_ratio: must be positive")
        if not self.eigen_sweep_step > 0:
            raise ValueError("eigen_sweep_step: must be positive")
        if self.ici_sweep_points < 2:
            raise ValueError("ici_sweep_points: must be at least 2")
        if self.threads < 1:
            raise ValueError("threads: must be at least 1")
        if len(self.ltv_gains_db) != len(self.ltv_dopplers_hz) or len(self.ltv_gains_db) != len(
            self.ltv_delays_us
        ):
            raise ValueError("ltv_gains_db/ltv_dopplers_hz/ltv_delays_us: lengths must match")
        return self

    def params(self, angle_offset: float = 0.0) -> FrfdmParams:
        return FrfdmParams(
            self.n_subcarriers, self.oversample, self.block_duration, angle_offset
        )

    def search_config(self) -> AngleSearchConfig:
        return default_search_config(
            self.block_duration,
            self.coarse_divisor,
            self.fine_ratio,
            self.papr_grid_points or None,
        )

    def resolved(self) -> dict:
        out = dataclasses.asdict(self)
        # execution details, not experiment identity
        out.pop("threads")
        out.pop("out")
        return out


def load_config(path) -> ExperimentConfig:
    """Parse a ``key = value`` config file (``#`` comments, JSON-style
    values for lists); unknown keys and invalid values fail with the key
    named.  An empty file yields the reference defaults."""
    known = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
    kwargs = {}
    for line_no, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{line_no}: expected 'key = value', got {raw!r}")
        key, _, text = line.partition("=")
        key = key.strip()
        if key not in known:
            raise ValueError(f"{path}:{line_no}: unknown config key {key!r}")
        text = text.strip()
        try:
            value = json.loads(text)
        except json.JSONDecodeError:
            value = text
        default = getattr(ExperimentConfig, key, known[key].default)
        try:
            if isinstance(default, bool):
                value = bool(value)
            elif isinstance(default, int):
                value = int(value)
            elif isinstance(default, float):
                value = float(value)
            elif isinstance(default, tuple):
                value = tuple(value)
        except (TypeError, ValueError) as exc:
            raise ValueError(f"{path}:{line_no}: bad value for {key!r}: {exc}") from exc
        kwargs[key] = value
    cfg = ExperimentConfig(**kwargs)
    try:
        return cfg.validate()
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc


def seed_stream(
    master_seed: int, block_id: int, stream: int = 0, substream: int = 0
) -> np.random.Generator:
    """Independent per-(block, stream) generator from a splittable seed;
    results never depend on the order blocks are executed in."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(stream, block_id, substream))
    return np.random.default_rng(ss)


def _draw_block(cfg: ExperimentConfig, block_id: int, substream: int = 0):
    rng = seed_stream(cfg.master_seed, block_id, STREAM_DATA, substream)
    if cfg.modulation == "complex-gaussian":
        return modulate(cfg.modulation, rng, cfg.n_subcarriers), None
    bps = bits_per_symbol(cfg.modulation)
    bits = rng.integers(0, 2, size=cfg.n_subcarriers * bps)
    return modulate(cfg.modulation, bits, cfg.n_subcarriers), bits


def _map_blocks(fn, n_blocks: int, threads: int) -> list:
    if threads <= 1:
        return [fn(b) for b in range(n_blocks)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n_blocks)))


def _add_cp(body: np.ndarray, cp_len: int) -> np.ndarray:
    return np.concatenate([body[..., body.shape[-1] - cp_len :], body], axis=-1)


# -- CCDF -------------------------------------------------------------------


@dataclass(frozen=True)
class CcdfCurve:
    scheme: str
    modulation: str
    thresholds_db: np.ndarray
    ccdf: np.ndarray
    n_blocks: int
    mean_evaluations: float
    seed: int


def _ccdf_block(cfg: ExperimentConfig, base, search_cfg, block_id: int):
    s, _ = _draw_block(cfg, block_id)
    scheme = cfg.scheme
    if scheme == "ofdm":
        return float(sample_papr_db(idfrft(base, s))), 1
    if scheme == "da-frfdm":
        res = find_optimal_angle(s, base, search_cfg)
        return res.papr_db, res.evaluations
    if scheme == "da-frfdm-eigen":
        res = brute_sweep_eigen(s, cfg.n_subcarriers, cfg.eigen_sweep_step)
        return res.papr_db, res.evaluations
    if scheme == "slm":
        rng = seed_stream(cfg.master_seed, block_id, STREAM_SCHEME)
        table = slm_phase_table(cfg.n_subcarriers, cfg.slm_candidates, rng)
        papr = sample_papr_db(idfrft(base, s * table))
        return float(np.min(papr)), cfg.slm_candidates
    if scheme == "pts":
        masks = pts_partition_masks(cfg.n_subcarriers, cfg.pts_subblocks, cfg.pts_partition)
        partials = idfrft(base, s * masks)
        papr = sample_papr_db(pts_sign_table(cfg.pts_subblocks) @ partials)
        return float(np.min(papr)), 1 << (cfg.pts_subblocks - 1)
    if scheme == "clipping":
        return float(sample_papr_db(clip(idfrft(base, s), cfg.clip_ratio))), 1
    raise ValueError(f"unknown scheme {scheme!r}")


def run_ccdf(cfg: ExperimentConfig) -> CcdfCurve:
    """Empirical complementary CDF of per-block PAPR on a 0.1 dB grid."""
    cfg.validate()
    if cfg.n_blocks < 100:
        raise ValueError("n_blocks: CCDF estimation needs at least 100 blocks")
    base = cfg.params()
    search_cfg = cfg.search_config() if cfg.scheme == "da-frfdm" else None
    rows = _map_blocks(
        lambda b: _ccdf_block(cfg, base, search_cfg, b), cfg.n_blocks, cfg.threads
    )
    papr = np.array([r[0] for r in rows])
    evals = np.array([r[1] for r in rows], dtype=np.float64)
    lo = math.floor(papr.min() * 10.0) / 10.0 - 0.1
    hi = math.ceil(papr.max() * 10.0) / 10.0
    thresholds = np.round(lo + 0.1 * np.arange(int(round((hi - lo) / 0.1)) + 1), 9)
    ccdf = (papr[None, :] > thresholds[:, None]).mean(axis=1)
    return CcdfCurve(
        scheme=cfg.scheme,
        modulation=cfg.modulation,
        thresholds_db=thresholds,
        ccdf=ccdf,
        n_blocks=cfg.n_blocks,
        mean_evaluations=float(evals.mean()),
        seed=cfg.master_seed,
    )


# -- BER / MSE ----------------------------------------------------------------


@dataclass(frozen=True)
class BerCurve:
    scheme: str
    modulation: str
    snr_db: tuple
    ber: np.ndarray
    n_bits_per_point: int
    n_blocks: int
    mean_evaluations: float
    seed: int


@dataclass(frozen=True)
class MseCurve:
    scheme: str
    modulation: str
    snr_db: tuple
    mse: np.ndarray
    n_blocks: int
    mean_evaluations: float
    seed: int


def _scheme_tx(cfg: ExperimentConfig, base, search_cfg, s, block_id: int, substream: int):
    """Per-scheme transmit preparation.

    Returns ``(params_tx, s_tx, invert, clip_body, evaluations)`` where
    ``invert`` maps equalized symbols back to estimates of the original
    block using genie side information (identity for schemes without one).
    """
    scheme = cfg.scheme
    if scheme == "ofdm":
        return base, s, None, False, 1
    if scheme == "clipping":
        return base, s, None, True, 1
    if scheme == "da-frfdm":
        res = find_optimal_angle(s, base, search_cfg)
        return base.with_offset(res.delta_star), s, None, False, res.evaluations
    if scheme == "slm":
        rng = seed_stream(cfg.master_seed, block_id, STREAM_SCHEME, substream)
        table = slm_phase_table(cfg.n_subcarriers, cfg.slm_candidates, rng)
        papr = sample_papr_db(idfrft(base, s * table))
        best = table[int(np.argmin(papr))]
        return base, s * best, (lambda shat: shat * best), False, cfg.slm_candidates
    if scheme == "pts":
        masks = pts_partition_masks(cfg.n_subcarriers, cfg.pts_subblocks, cfg.pts_partition)
        partials = idfrft(base, s * masks)
        signs = pts_sign_table(cfg.pts_subblocks)
        papr = sample_papr_db(signs @ partials)
        best = signs[int(np.argmin(papr))] @ masks  # per-subcarrier signs
        return base, s * best, (lambda shat: shat * best), False, 1 << (cfg.pts_subblocks - 1)
    raise ValueError(f"scheme {scheme!r} does not support link simulation")


def _link_block(cfg, base, search_cfg, snr_idx, snr_db, block_id, want):
    s, bits = _draw_block(cfg, block_id, substream=snr_idx)
    rng_chan = seed_stream(cfg.master_seed, block_id, STREAM_CHANNEL, snr_idx)
    rng_noise = seed_stream(cfg.master_seed, block_id, STREAM_NOISE, snr_idx)
    ch = draw_rayleigh(cfg.channel_taps, rng_chan, cfg.channel_profile)
    h_f = frequency_response(ch, cfg.n_subcarriers)

    params_tx, s_tx, invert, clip_body, evals = _scheme_tx(
        cfg, base, search_cfg, s, block_id, snr_idx
    )
    cp_len = cfg.n_cp * cfg.oversample
    body = transmit_body(params_tx, s_tx)
    if clip_body:
        body = clip(body, cfg.clip_ratio)
    frame = _add_cp(body, cp_len)

    y = apply_static(frame, ch, cfg.oversample)
    y = apply_awgn(y, snr_db, rng_noise, cfg.oversample)
    shat = receive(params_tx, y, h_f, cfg.n_cp)
    if invert is not None:
        shat = invert(shat)

    if want == "ber":
        bits_hat = demodulate(cfg.modulation, shat)
        return int(np.count_nonzero(bits_hat != bits)), evals
    return float(np.mean(np.abs(shat - s) ** 2)), evals


def _run_link(cfg: ExperimentConfig, want: str):
    cfg.validate()
    if want == "ber" and bits_per_symbol(cfg.modulation) == 0:
        raise ValueError("modulation: BER runs need a QAM modulation")
    if want == "mse" and cfg.modulation != "complex-gaussian":
        raise ValueError("modulation: MSE runs use complex-gaussian symbols")
    if cfg.scheme == "da-frfdm-eigen":
        raise ValueError(
            "scheme: the eigendecomposition transform has no chirp factorization, "
            "so one-tap equalization (and hence link simulation) is undefined for it"
        )
    if cfg.channel_taps - 1 > cfg.n_cp:
        raise ValueError("channel_taps: delay spread must fit inside the cyclic prefix")
    base = cfg.params()
    search_cfg = cfg.search_config() if cfg.scheme == "da-frfdm" else None

    values = []
    all_evals = []
    for j, snr in enumerate(cfg.snr_db):
        rows = _map_blocks(
            lambda b: _link_block(cfg, base, search_cfg, j, float(snr), b, want),
            cfg.n_blocks,
            cfg.threads,
        )
        point = [r[0] for r in rows]
        all_evals.extend(r[1] for r in rows)
        if want == "ber":
            n_bits = cfg.n_blocks * cfg.n_subcarriers * bits_per_symbol(cfg.modulation)
            values.append(sum(point) / n_bits)
        else:
            values.append(float(np.mean(point)))
    mean_evals = float(np.mean(all_evals))

    if want == "ber":
        return BerCurve(
            scheme=cfg.scheme,
            modulation=cfg.modulation,
            snr_db=tuple(float(v) for v in cfg.snr_db),
            ber=np.array(values),
            n_bits_per_point=cfg.n_blocks * cfg.n_subcarriers * bits_per_symbol(cfg.modulation),
            n_blocks=cfg.n_blocks,
            mean_evaluations=mean_evals,
            seed=cfg.master_seed,
        )
    return MseCurve(
        scheme=cfg.scheme,
        modulation=cfg.modulation,
        snr_db=tuple(float(v) for v in cfg.snr_db),
        mse=np.array(values),
        n_blocks=cfg.n_blocks,
        mean_evaluations=mean_evals,
        seed=cfg.master_seed,
    )


def run_ber(cfg: ExperimentConfig) -> BerCurve:
    """Bit error rate over the block-fading multipath channel, per SNR."""
    return _run_link(cfg, "ber")


def run_mse(cfg: ExperimentConfig) -> MseCurve:
    """Mean squared symbol error for Gaussian blocks, per SNR."""
    return _run_link(cfg, "mse")


# -- ICI sweep ----------------------------------------------------------------


@dataclass(frozen=True)
class IciTable:
    modulation: str
    deltas: np.ndarray
    papr_db: np.ndarray
    ici_power: np.ndarray
    signal_power: np.ndarray
    seed: int

    @property
    def ici_to_signal(self) -> np.ndarray:
        return self.ici_power / self.signal_power


def run_ici_tradeoff(cfg: ExperimentConfig) -> IciTable:
    """PAPR vs ICI over the angle sweep for one fixed Gaussian block.

    The time-varying channel is built from the configured per-path gains,
    Doppler shifts and delays (delays snap to the symbol-rate grid and must
    fit inside the cyclic prefix)."""
    cfg.validate()
    ts = cfg.block_duration / cfg.n_subcarriers
    delays = np.rint(np.asarray(cfg.ltv_delays_us) * 1e-6 / ts).astype(np.int64)
    if delays[-1] > cfg.n_cp:
        raise ValueError(
            f"ltv_delays_us: longest delay spans {int(delays[-1])} symbol periods but the "
            f"cyclic prefix covers only {cfg.n_cp}; raise n_cp (e.g. n_cp = {int(delays[-1])})"
        )
    s = modulate("complex-gaussian", seed_stream(cfg.master_seed, 0, STREAM_DATA), cfg.n_subcarriers)
    ch = make_ltv_channel(
        cfg.ltv_gains_db,
        delays,
        cfg.ltv_dopplers_hz,
        seed_stream(cfg.master_seed, 0, STREAM_CHANNEL),
    )
    span = angle_span(cfg.block_duration)
    deltas = np.arange(cfg.ici_sweep_points) * (span / 2.0 / cfg.ici_sweep_points)
    reports = [ici_power(cfg.params(float(d)), ch, cfg.n_cp, block=s) for d in deltas]
    return IciTable(
        modulation="complex-gaussian",
        deltas=deltas,
        papr_db=np.array([r.papr_db for r in reports]),
        ici_power=np.array([r.ici_power for r in reports]),
        signal_power=np.array([r.signal_power for r in reports]),
        seed=cfg.master_seed,
    )


# -- output -------------------------------------------------------------------


def _fmt(v) -> str:
    return f"{float(v):.12g}"


def write_curve(curve, out_path, config: ExperimentConfig | None = None):
    """Write a curve as CSV plus a JSON sidecar with full provenance.

    Returns ``(csv_path, sidecar_path)``.  Output bytes depend only on the
    curve and resolved config, never on thread count or wall clock."""
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    meta = {"seed": curve.seed}
    if isinstance(curve, CcdfCurve):
        header = "threshold_db,ccdf"
        rows = zip(curve.thresholds_db, curve.ccdf)
        meta.update(
            kind="ccdf",
            scheme=curve.scheme,
            modulation=curve.modulation,
            n_blocks=curve.n_blocks,
            mean_evaluations=curve.mean_evaluations,
        )
    elif isinstance(curve, BerCurve):
        header = "snr_db,ber"
        rows = zip(curve.snr_db, curve.ber)
        meta.update(
            kind="ber",
            scheme=curve.scheme,
            modulation=curve.modulation,
            n_blocks=curve.n_blocks,
            n_bits_per_point=curve.n_bits_per_point,
            mean_evaluations=curve.mean_evaluations,
        )
    elif isinstance(curve, MseCurve):
        header = "snr_db,mse"
        rows = zip(curve.snr_db, curve.mse)
        meta.update(
            kind="mse",
            scheme=curve.scheme,
            modulation=curve.modulation,
            n_blocks=curve.n_blocks,
            mean_evaluations=curve.mean_evaluations,
        )
    elif isinstance(curve, IciTable):
        header = "delta_rad,papr_db,ici_power,signal_power,ici_to_signal"
        rows = zip(
            curve.deltas, curve.papr_db, curve.ici_power, curve.signal_power, curve.ici_to_signal
        )
        meta.update(kind="ici", modulation=curve.modulation)
    else:
        raise TypeError(f"cannot serialize {type(curve).__name__}")

    lines = [header] + [",".join(_fmt(v) for v in row) for row in rows]
    out_path.write_text("\n".join(lines) + "\n")
    if config is not None:
        meta["config"] = config.resolved()
    sidecar = out_path.with_suffix(out_path.suffix + ".json")
    sidecar.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")
    return out_path, sidecar
