"""
Steering vectors and the pair correlation E^2
=============================================

Two arrays with the same number of antennas do not decorrelate
directions equally well.  Here we measure the mean squared steering
correlation between two random directions and compare it with 1/N.
"""

# %%
# A steering vector has unit norm whatever the geometry.
import numpy as np

from hardening import e2_estimate, e2_uniform_sphere, make_array, steering_vector
from hardening.montecarlo import SeedSpec

arr = make_array("uca", 8, 0.5)
e = steering_vector(arr, [0.0, 0.6, 0.8])
print("||e|| =", np.linalg.norm(e))

# %%
# The Monte-Carlo estimate agrees with the exact pair average, which for
# directions uniform on the sphere reduces to a double sum of sinc^2 terms
# over antenna distances.
for kind in ("ula", "uca", "upa"):
    for n in (8, 16, 64):
        arr = make_array(kind, n, 0.5)
        est = e2_estimate(arr, trials=200_000, seed=SeedSpec(1, n))
        print(f"{kind} N={n:2d}  N*E2 mc={n * est.mean:.3f} +/- {n * est.ci_half_width:.3f}"
              f"  exact={n * e2_uniform_sphere(arr):.3f}")

# %%
# The ULA hits exactly 1/N at half a wavelength, because sinc^2 vanishes at
# every multiple of lambda/2.  Square planar arrays stay above the law: the
# diagonal neighbours are not half a wavelength apart.

# %%
# Squeezing the antennas together correlates them.  At lambda/100 the
# whole array is a small fraction of a wavelength across.
for spacing in (0.01, 0.1, 0.5, 2.0):
    arr = make_array("ula", 16, spacing)
    print(f"spacing {spacing:4.2f} lambda: N*E2 = {16 * e2_uniform_sphere(arr):.2f}")
