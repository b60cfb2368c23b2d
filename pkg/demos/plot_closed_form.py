"""
Closed form against simulation
==============================

For i.i.d. uniform directions the CV^2 splits into a small-scale part,
scaled by the array correlations, and a large-scale part that only
depends on the ray powers.  This script evaluates both and checks the
sum against Monte-Carlo.
"""

from hardening import (
    RayDistribution,
    cv2_closed_form,
    cv2_illustration,
    e2_uniform_sphere,
    iid_gaussian_moments,
    make_array,
    simulate_cv2,
)
from hardening.montecarlo import SeedSpec

# %%
# Mixed geometries on purpose; the decomposition does not care.
tx = make_array("uca", 6, 0.5)
rx = make_array("upa", 9, 0.4)

for p in (1, 2, 4, 8):
    rep = cv2_closed_form(e2_uniform_sphere(tx), e2_uniform_sphere(rx), iid_gaussian_moments(p))
    mc = simulate_cv2(RayDistribution(), p, tx, rx, 100_000, SeedSpec(3, p))
    print(
        f"P={p}: small={rep.cv2_small_scale:.4f} large={rep.cv2_large_scale:.4f} "
        f"total={rep.cv2_total:.4f}  mc={mc.mean:.4f} +/- {mc.ci_half_width:.4f}"
    )

# %%
# With E^2 replaced by 1/N the total becomes the short illustration
# formula (1/(Nt Nr))(1 - 1/P) + 1/P.
for n in (2, 8, 32):
    print(n, [round(cv2_illustration(n, n, p), 4) for p in (2, 4, 6)])
