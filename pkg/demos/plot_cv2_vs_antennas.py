"""
Channel hardening saturates with few rays
=========================================

We simulate the coefficient of variation of the channel gain for square
arrays of growing size.  With only P rays the curve flattens at 1/P
rather than decaying to zero.
"""

import numpy as np

from hardening import RayDistribution, make_ula, simulate_cv2
from hardening.montecarlo import SeedSpec

sizes = [1, 2, 4, 8, 16, 32]
rays = [2, 4, 6]

rows = []
for p in rays:
    for k, n in enumerate(sizes):
        arr = make_ula(n, 0.5)
        est = simulate_cv2(RayDistribution(), p, arr, arr, 50_000, SeedSpec(7, 10 * p + k))
        rows.append((p, n, est.mean, est.ci_half_width))
        print(f"P={p} N={n:2d}  CV2={est.mean:.4f} +/- {est.ci_half_width:.4f}  floor 1/P={1 / p:.4f}")

# %%
# Optional figure, log axis on N.
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    data = np.array(rows)
    fig, ax = plt.subplots()
    for p in rays:
        sel = data[data[:, 0] == p]
        ax.errorbar(sel[:, 1], sel[:, 2], yerr=sel[:, 3], marker="o", label=f"P={p}")
        ax.axhline(1 / p, color="k", ls="--", lw=0.8)
    ax.set_xscale("log", base=2)
    ax.set_yscale("log")
    ax.set_xlabel("antennas per side")
    ax.set_ylabel("CV^2 of ||H||^2")
    ax.legend()
    fig.savefig("cv2_vs_antennas.svg")
