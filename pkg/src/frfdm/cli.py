"""Command-line harness: ccdf / ber / mse / ici runners and a selftest."""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import harness
from .chain import receive, transmit
from .channels import apply_static, draw_rayleigh, frequency_response
from .frft import dfrft, idfrft, make_params
from .papr import envelope_coeffs, quad_trig_integral, surrogate_I, surrogate_I_prime, harmonic_coeffs

_RUNNERS = {
    "ccdf": harness.run_ccdf,
    "ber": harness.run_ber,
    "mse": harness.run_mse,
    "ici": harness.run_ici_tradeoff,
}


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key = value config file (defaults used when omitted)")
    p.add_argument("--seed", type=int, help="override master_seed")
    p.add_argument("--out", help="output CSV path (JSON sidecar written next to it)")
    p.add_argument("--scheme", help="override scheme")
    p.add_argument("--blocks", type=int, help="override n_blocks")
    p.add_argument("--threads", type=int, help="override worker thread count")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="frfdm",
        description="Fractional-Fourier-domain multi-carrier experiment runner",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("selftest", help="run quick internal consistency checks")
    helps = {
        "ccdf": "PAPR complementary CDF over random blocks",
        "ber": "bit error rate over the block-fading multipath channel",
        "mse": "mean squared symbol error for Gaussian blocks",
        "ici": "PAPR vs inter-carrier interference over the angle sweep",
    }
    for name, runner_help in helps.items():
        _add_common(sub.add_parser(name, help=runner_help))
    args = parser.parse_args(argv)

    if args.command == "selftest":
        return selftest()

    cfg = harness.load_config(args.config) if args.config else harness.ExperimentConfig()
    if args.seed is not None:
        cfg.master_seed = args.seed
    if args.scheme is not None:
        cfg.scheme = args.scheme
    if args.blocks is not None:
        cfg.n_blocks = args.blocks
    if args.threads is not None:
        cfg.threads = args.threads
    if args.out:
        cfg.out = args.out
    cfg.validate()

    curve = _RUNNERS[args.command](cfg)
    out = cfg.out or f"{args.command}_{cfg.scheme}.csv"
    csv_path, sidecar = harness.write_curve(curve, out, cfg)
    print(f"wrote {csv_path} and {sidecar}")
    if hasattr(curve, "mean_evaluations"):
        print(f"mean PAPR evaluations per block: {curve.mean_evaluations:.3f}")
    return 0


def _check(name: str, ok: bool, detail: str = "") -> bool:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f" ({detail})" if detail else ""))
    return ok


def selftest() -> int:
    """Fast deterministic consistency checks of the core machinery."""
    rng = np.random.default_rng(7)
    ok = True

    params = make_params(16, 4, 1e-3, 0.37)
    s = (rng.standard_normal(16) + 1j * rng.standard_normal(16)) / math.sqrt(2)
    x = idfrft(params, s)
    loop = dfrft(params, x)
    ok &= _check("transform loopback", np.max(np.abs(loop - s)) < 1e-10)
    ok &= _check(
        "transform energy conservation",
        abs(np.sum(np.abs(x) ** 2) - np.sum(np.abs(s) ** 2)) < 1e-10 * np.sum(np.abs(s) ** 2),
    )

    flat = make_params(16, 1, 1e-3, 0.0)
    ok &= _check(
        "plain-OFDM degeneration",
        np.max(np.abs(idfrft(flat, s) - np.fft.ifft(s) * 4.0)) < 1e-12,
    )

    ch = draw_rayleigh(6, rng)
    h_f = frequency_response(ch, 16)
    n_cp = 8
    frame = transmit(params, s, n_cp)
    y = apply_static(frame.samples, ch, params.oversample)
    shat = receive(params, y, h_f, n_cp)
    ok &= _check("one-tap equalization over multipath", np.max(np.abs(shat - s)) < 1e-9)

    t_grid = np.linspace(0.0, 2 * math.pi, 16384, endpoint=False)
    fn = {"cos": np.cos, "sin": np.sin}
    worst = 0.0
    for kinds in (("cos",) * 4, ("sin",) * 4, ("cos", "sin", "sin", "cos")):
        for idx in ((2, 4, 1, 5), (1, 1, 1, 1), (3, 2, 4, 1)):
            num = np.prod([fn[k](i * t_grid) for k, i in zip(kinds, idx)], axis=0)
            approx = float(num.sum() * 2 * math.pi / t_grid.size)
            worst = max(worst, abs(approx - quad_trig_integral(kinds, *idx)))
    ok &= _check("quadruple product integrals", worst < 1e-9, f"max err {worst:.2e}")

    env = envelope_coeffs(s)
    p2 = make_params(16, 4, 1.5, 0.21)
    h = 1e-6
    num = (
        surrogate_I(harmonic_coeffs(env, p2.with_offset(0.21 + h).a_alpha), 1.5)
        - surrogate_I(harmonic_coeffs(env, p2.with_offset(0.21 - h).a_alpha), 1.5)
    ) / (2 * h)
    ana = surrogate_I_prime(env, p2)
    ok &= _check(
        "surrogate derivative vs finite difference",
        abs(num - ana) < 1e-4 * max(abs(ana), 1e-12),
    )

    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
