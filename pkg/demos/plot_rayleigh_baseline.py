"""
Correlated Rayleigh baseline
============================

In a rich scattering channel h ~ CN(0, R) the CV^2 of ||h||^2 is
Tr(R^2) / Tr(R)^2.  Correlation between antennas slows down hardening.
"""

from hardening.stats import rayleigh_cv2, rayleigh_gain_samples
from hardening.experiments import exponential_correlation
from hardening.montecarlo import SeedSpec, run_blocks

for rho in (0.0, 0.5, 0.9):
    for n in (4, 16, 64):
        r = exponential_correlation(n, rho)
        acc = run_blocks(lambda rng, count: rayleigh_gain_samples(r, rng, count), 50_000, SeedSpec(11, n))
        est = acc[0].cv2_estimate()
        print(f"rho={rho} N={n:2d}: exact {rayleigh_cv2(r):.4f}  mc {est.mean:.4f} +/- {est.ci_half_width:.4f}")

# %%
# With rho = 0 the exact value is 1/N: the best a ray channel can do when
# every ray is resolvable.
