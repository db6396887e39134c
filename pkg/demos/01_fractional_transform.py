"""Tour of the fractional-domain transforms.

Shows how the sampling-based transform interpolates between the plain
inverse DFT (offset 0) and heavily chirped waveforms, checks its unitarity,
and exercises the eigendecomposition variant's group property.
"""
import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from frfdm import dfrft, eigen_dfrft_matrix, idfrft, make_params

rng = np.random.default_rng(0)

# One 64QAM-ish random block on a 16-subcarrier grid, oversampled 8x.
n, oversample = 16, 8
s = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2)

print("sampling-based transform")
print("------------------------")
fig, axes = plt.subplots(3, 1, figsize=(8, 7), sharex=True)
for ax, delta in zip(axes, (0.0, 0.4, 1.1)):
    params = make_params(n, oversample, 1e-3, delta)
    x = idfrft(params, s)
    err = np.max(np.abs(dfrft(params, x) - s))
    print(f"  offset {delta:+.1f} rad: loopback error {err:.2e}, "
          f"peak/mean power {np.max(np.abs(x)**2)/np.mean(np.abs(x)**2):.2f}")
    ax.plot(np.abs(x), lw=1)
    ax.set_ylabel(f"|x|, delta={delta:+.1f}")
axes[-1].set_xlabel("time sample")
fig.suptitle("same symbol block through three fractional angles")
fig.savefig("01_envelopes.png", dpi=120)
print("  wrote 01_envelopes.png")

# At offset 0 the transform is exactly the unitary inverse DFT.
params0 = make_params(n, 1, 1e-3, 0.0)
ref = np.fft.ifft(s) * math.sqrt(n)
print(f"  offset 0, L=1 vs unitary IDFT: {np.max(np.abs(idfrft(params0, s) - ref)):.2e}")

print()
print("eigendecomposition-based transform")
print("----------------------------------")
f_a = eigen_dfrft_matrix(n, 0.3)
f_b = eigen_dfrft_matrix(n, 0.5)
f_ab = eigen_dfrft_matrix(n, 0.8)
print(f"  angle additivity F(0.3) F(0.5) = F(0.8): "
      f"{np.max(np.abs(f_a @ f_b - f_ab)):.2e}")
w = np.exp(-2j * np.pi * np.outer(np.arange(n), np.arange(n)) / n) / math.sqrt(n)
print(f"  quarter turn equals the DFT matrix:      "
      f"{np.max(np.abs(eigen_dfrft_matrix(n, math.pi / 2) - w)):.2e}")
gram = f_a.conj().T @ f_a
print(f"  unitarity:                               "
      f"{np.max(np.abs(gram - np.eye(n))):.2e}")
