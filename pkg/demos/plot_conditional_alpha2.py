"""
Fixed ray powers and alpha^2
============================

If the ray powers are known, only the phases and directions remain
random.  The large-scale term disappears and what is left is
E2_tx * E2_rx * alpha^2, where alpha^2 measures how evenly the power
is spread over the rays.
"""

import numpy as np

from hardening import (
    FixedAmplitudeGains,
    RayDistribution,
    alpha2,
    cv2_conditional_closed_form,
    e2_uniform_sphere,
    make_ula,
    simulate_cv2,
)
from hardening.montecarlo import SeedSpec

# %%
# alpha^2 runs from 0 (one dominant ray) to 1 - 1/P (equal powers).
for amps in ([1.0], [1.0, 0.01], [1.0, 1.0, 2.0], [1.0] * 4, [1.0] * 16):
    print(f"{amps if len(amps) < 5 else f'{len(amps)} equal rays'}: alpha2={alpha2(amps):.4f}")

# %%
# Conditional prediction against simulation on 4-element ULAs.
arr = make_ula(4, 0.5)
e2 = e2_uniform_sphere(arr)
for k, amps in enumerate([(1.0,), (1.0, 1.0, 1.0, 1.0), (1.0, 1.0, 2.0), tuple(np.geomspace(1, 0.1, 5))]):
    mc = simulate_cv2(RayDistribution(FixedAmplitudeGains(amps)), len(amps), arr, arr, 100_000, SeedSpec(5, k))
    pred = cv2_conditional_closed_form(e2, e2, amps)
    print(f"P={len(amps)}: predicted {pred:.5f}  mc {mc.mean:.5f} +/- {mc.ci_half_width:.5f}")
