"""Fractional-Fourier-domain multi-carrier simulation library.

Transforms (sampling-based with oversampling, eigendecomposition-based),
per-block dynamic-angle PAPR minimization, chirp-phase one-tap
equalization, baseline PAPR reducers (clipping, SLM, PTS), channel models
(block-fading multipath, AWGN, doubly dispersive) and seeded Monte Carlo
experiment runners.
"""

from .frft import (
    FrfdmParams,
    make_params,
    idfrft,
    dfrft,
    eigen_dfrft_matrix,
    dft_eigenbasis,
)
from .papr import (
    EnvelopeCoeffs,
    HarmonicCoeffs,
    envelope_coeffs,
    harmonic_coeffs,
    g_max,
    papr_db,
    sample_papr_db,
    surrogate_I,
    surrogate_I_prime,
    quad_trig_integral,
)
from .angle_search import (
    AngleSearchConfig,
    AngleSearchResult,
    angle_span,
    default_search_config,
    initial_set,
    find_optimal_angle,
    brute_sweep_eigen,
)
from .chain import (
    MODULATION_KINDS,
    bits_per_symbol,
    constellation,
    modulate,
    demodulate,
    phase_theta,
    TxFrame,
    transmit,
    transmit_body,
    receive,
    receive_raw,
    UnequalizableChannelError,
)
from .channels import (
    ChannelRealization,
    IciReport,
    draw_rayleigh,
    make_ltv_channel,
    frequency_response,
    apply_static,
    apply_awgn,
    apply_ltv,
    ici_power,
)
from .baselines import (
    BaselineConfig,
    clip,
    slm,
    slm_phase_table,
    pts,
    pts_partition_masks,
)
from .harness import (
    SCHEMES,
    ExperimentConfig,
    load_config,
    seed_stream,
    CcdfCurve,
    BerCurve,
    MseCurve,
    IciTable,
    run_ccdf,
    run_ber,
    run_mse,
    run_ici_tradeoff,
    write_curve,
)

__version__ = "0.1.0"
