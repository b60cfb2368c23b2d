"""Acceptance criteria, one test each, at their stated tolerances.

Each test records a PASS/FAIL line through the ``criterion`` fixture; the
lines are printed in the ``acceptance criteria`` section of the pytest
summary.
"""

import time

import numpy as np
import pytest

from hardening.cli import main
from hardening.geometry import make_array, make_ula
from hardening.montecarlo import SeedSpec, run_blocks
from hardening.rays import (
    FixedAmplitudeGains,
    RayDistribution,
    batch_channel_gains,
)
from hardening.stats import (
    alpha2,
    closed_form_ci,
    cv2_closed_form,
    cv2_conditional_closed_form,
    cv2_illustration,
    e2_estimate,
    fourth_moment_oracle,
    gain_moments,
    large_scale_term,
    rayleigh_cv2,
    rayleigh_gain_samples,
    simulate_cv2,
)

pytestmark = pytest.mark.slow

SEED = 20240601


def test_c1_iid_rayleigh_limit(criterion):
    t0 = time.perf_counter()
    exact = all(rayleigh_cv2(np.eye(n)) == 1.0 / n for n in range(1, 65))
    acc = run_blocks(lambda rng, count: rayleigh_gain_samples(np.eye(8), rng, count), 10**5, SeedSpec(SEED, 1))
    est = acc[0].cv2_estimate()
    elapsed = time.perf_counter() - t0
    ok = exact and est.agrees_with(1 / 8) and elapsed < 10
    detail = f"exact={exact} mc={est.mean:.5f}+/-{est.ci_half_width:.5f} vs 0.125 ({elapsed:.1f}s)"
    criterion("1 iid Rayleigh limit", ok, detail)
    assert ok, detail


def test_c2_illustration_formula(criterion):
    t0 = time.perf_counter()
    worst, failures = 0.0, []
    k = 0
    for n in (2, 4, 8, 16):
        arr = make_ula(n, 0.5)
        for p in (2, 4, 5, 6):
            est = simulate_cv2(RayDistribution(), p, arr, arr, 10**5, SeedSpec(SEED, 100 + k))
            k += 1
            formula = cv2_illustration(n, n, p)
            gap = abs(est.mean - formula)
            tol = max(3 * est.ci_half_width, 0.1 * formula)
            worst = max(worst, gap / tol)
            if gap > tol:
                failures.append(f"N={n} P={p}: {est.mean:.4f} vs {formula:.4f}")
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 300
    detail = f"16 points, worst gap/tol={worst:.2f} ({elapsed:.1f}s) {'; '.join(failures)}"
    criterion("2 illustration formula", ok, detail)
    assert ok, detail


# Trial counts give roughly a 4 sigma margin over 1/P: the gap
# (1 - 1/P)/1024 is tiny next to the single-trial spread.
C3_TRIALS = {2: 50_000_000, 4: 6_000_000, 5: 4_000_000, 6: 3_000_000}


def test_c3_large_scale_floor(criterion):
    arr = make_ula(32, 0.5)
    parts, ok = [], True
    for p, trials in C3_TRIALS.items():
        est = simulate_cv2(RayDistribution(), p, arr, arr, trials, SeedSpec(SEED, 200 + p))
        inside = 1 / p < est.mean < 1 / p + 2 / 1024
        ok &= inside
        parts.append(f"P={p}: {est.mean:.6f} (floor {1 / p:.6f}, z={(est.mean - 1 / p) / (est.ci_half_width / 1.96):.1f})")
    detail = "; ".join(parts)
    criterion("3 large-scale floor", ok, detail)
    assert ok, detail


def test_c4_e2_asymptote(criterion):
    t0 = time.perf_counter()
    parts, failures = [], []
    k = 0
    for kind in ("ula", "uca", "upa"):
        for n in (8, 16, 64):
            est = e2_estimate(make_array(kind, n, 0.5), trials=10**6, seed=SeedSpec(SEED, 300 + k))
            k += 1
            value = n * est.mean
            parts.append(f"{kind}{n}={value:.3f}")
            if not 0.9 <= value <= 1.1:
                failures.append(f"{kind} N={n}: N*E2={value:.4f}")
        est = e2_estimate(make_array(kind, 16, 0.01), trials=10**6, seed=SeedSpec(SEED, 300 + k))
        k += 1
        parts.append(f"{kind}16@0.01={16 * est.mean:.2f}")
        if not 16 * est.mean >= 5:
            failures.append(f"{kind} N=16 lambda/100: {16 * est.mean:.3f}")
    elapsed = time.perf_counter() - t0
    if elapsed >= 60:
        failures.append(f"runtime {elapsed:.1f}s")
    ok = not failures
    detail = f"{' '.join(parts)} ({elapsed:.1f}s)" + (f" | out of band: {'; '.join(failures)}" if failures else "")
    criterion("4 E2 asymptote", ok, detail)
    assert ok, detail


def test_c5_alpha2_bounds(criterion):
    rng = np.random.default_rng(SEED)
    violations = 0
    for i in range(10_000):
        p = int(rng.integers(1, 17))
        style = i % 4
        if style == 0:
            a = rng.exponential(size=p)
        elif style == 1:
            a = rng.uniform(size=p) * (rng.uniform(size=p) < 0.5)
        elif style == 2:
            a = rng.pareto(1.2, size=p)
        else:
            a = np.abs(rng.standard_normal(p)) * 10.0 ** rng.uniform(-6, 6)
        if not a.any():
            a[int(rng.integers(p))] = 1.0
        value = alpha2(a)
        violations += not (0.0 <= value <= 1.0 - 1.0 / p)
    single = all(alpha2(np.eye(p)[int(j)] * s) == 0.0 for p in range(1, 17) for j, s in [(0, 1.0), (p - 1, 3.7)])
    equal = all(alpha2(np.full(p, s)) == 1.0 - 1.0 / p for p in range(1, 17) for s in (1.0, 0.3, 1e3))
    ok = violations == 0 and single and equal
    detail = f"violations={violations}/10000 single-ray-zero={single} equal-power-max={equal}"
    criterion("5 alpha2 bounds", ok, detail)
    assert ok, detail


def test_c6_large_scale_toy(criterion):
    parts, ok = [], True
    for p in (1, 2, 4, 8):
        powers = RayDistribution().sample_batch(SeedSpec(SEED, 600 + p).generator(0), 100_000, p).amplitudes ** 2
        est = large_scale_term(powers)
        ok &= est.agrees_with(1 / p)
        parts.append(f"P={p}: {est.mean:.4f}+/-{est.ci_half_width:.4f}")
    detail = "; ".join(parts)
    criterion("6 large-scale toy formula", ok, detail)
    assert ok, detail


def test_c7_conditional_model(criterion):
    arr = make_ula(4, 0.5)
    e2t = e2_estimate(arr, trials=10**6, seed=SeedSpec(SEED, 700))
    e2r = e2_estimate(arr, trials=10**6, seed=SeedSpec(SEED, 701))
    parts, ok = [], True
    for k, amps in enumerate([(1.0,), (1.0, 1.0, 1.0, 1.0), (1.0, 1.0, 2.0)]):
        law = FixedAmplitudeGains(amps)
        mc = simulate_cv2(RayDistribution(law), len(amps), arr, arr, 10**5, SeedSpec(SEED, 710 + k))
        predicted = cv2_conditional_closed_form(e2t.mean, e2r.mean, amps)
        report = cv2_closed_form(e2t.mean, e2r.mean, gain_moments(law, len(amps)))
        ci = closed_form_ci(report, e2t.ci_half_width, e2r.ci_half_width)
        hit = mc.agrees_with(predicted, other_ci=ci)
        ok &= hit
        parts.append(f"{list(amps)}: mc {mc.mean:.5f}+/-{mc.ci_half_width:.5f} vs {predicted:.5f}+/-{ci:.5f}")
    detail = "; ".join(parts)
    criterion("7 conditional model", ok, detail)
    assert ok, detail


def test_c8_fourth_moment_oracle(criterion):
    parts, ok = [], True
    for k, (nt, nr, p) in enumerate([(2, 2, 2), (2, 4, 3), (4, 4, 5)]):
        direct, decomposed = fourth_moment_oracle(
            RayDistribution(), p, make_ula(nt, 0.5), make_ula(nr, 0.5), 10**5, SeedSpec(SEED, 800 + 2 * k)
        )
        hit = direct.agrees_with(decomposed.mean, other_ci=decomposed.ci_half_width)
        ok &= hit
        parts.append(f"({nt},{nr},{p}): {direct.mean:.1f} vs {decomposed.mean:.1f}")
    detail = "; ".join(parts)
    criterion("8 fourth-moment oracle", ok, detail)
    assert ok, detail


def test_c9_mean_gain_law(criterion):
    parts, ok = [], True
    dist = RayDistribution()
    for k, (kind, nt, nr, p) in enumerate([("ula", 4, 8, 3), ("uca", 6, 5, 4), ("upa", 9, 16, 2)]):
        tx, rx = make_array(kind, nt, 0.5), make_array(kind, nr, 0.5)

        def block(rng, count, tx=tx, rx=rx, p=p):
            return batch_channel_gains(dist.sample_batch(rng, count, p), tx, rx) / (tx.n * rx.n * p)

        est = run_blocks(block, 10**5, SeedSpec(SEED, 900 + k))[0].mean_estimate()
        ok &= est.agrees_with(1.0)
        parts.append(f"{kind} {nt}x{nr} P={p}: {est.mean:.4f}+/-{est.ci_half_width:.4f}")
    detail = "; ".join(parts)
    criterion("9 mean-gain law", ok, detail)
    assert ok, detail


def test_c10_determinism(criterion, tmp_path):
    runs = {
        "fig1": ["--trials", "20000", "--set", "n_antennas=1,4,16"],
        "fig2": ["--trials", "20000", "--set", "spacings=0.1,0.5,1.0"],
        "fig3": ["--trials", "20000", "--set", "n_antennas=1,8,16"],
        "fig4": ["--trials", "20000", "--set", "n_antennas=2,4", "--set", "p_rays=1,5"],
    }
    same = {}
    for cmd, extra in runs.items():
        blobs = []
        for tag, workers in (("a", 1), ("b", 4), ("c", 4)):
            out = tmp_path / f"{cmd}-{tag}"
            assert main([cmd, "--seed", "77", "--out", str(out), "--workers", str(workers), *extra]) == 0
            blobs.append((out / f"{cmd}.csv").read_bytes())
        same[cmd] = len(set(blobs)) == 1
    ok = all(same.values())
    detail = " ".join(f"{k}={'identical' if v else 'DIFFERENT'}" for k, v in same.items()) + " (workers 1,4,4)"
    criterion("10 determinism", ok, detail)
    assert ok, detail
