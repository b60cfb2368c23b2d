"""Property checks run by ``hardening validate``.

Each check takes a master seed and returns ``(passed, detail)``.  Trial
counts are reduced so the whole suite runs in well under a minute; the
report lists the seed so that any failure can be replayed exactly.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import geometry, montecarlo, rays, stats
from .montecarlo import SeedSpec

TRIALS = 20_000

Check = Callable[[int], "tuple[bool, str]"]
CHECKS: dict[str, Check] = {}


def check(fn: Check) -> Check:
    CHECKS[fn.__name__] = fn
    return fn


def _rng(seed: int, salt: int) -> np.random.Generator:
    return SeedSpec(seed, 10_000 + salt).generator(0)


def _random_arrays(rng, count=6):
    out = []
    for _ in range(count):
        kind = ("ula", "uca", "upa")[int(rng.integers(3))]
        n = int(rng.integers(2, 17))
        out.append(geometry.make_array(kind, n, float(rng.uniform(0.1, 2.0)), float(rng.uniform(0.5, 2.0))))
    return out


def _rotation(rng) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q * np.sign(np.diag(r))
    return q if np.linalg.det(q) > 0 else -q


@check
def steering_unit_norm(seed):
    rng = _rng(seed, 1)
    worst = 0.0
    for arr in _random_arrays(rng):
        for d in rays.sample_uniform_sphere(rng, (8,)):
            e = geometry.steering_vector(arr, d)
            worst = max(worst, abs(np.linalg.norm(e) - 1.0))
    return worst <= 1e-12, f"max | ||e|| - 1 | = {worst:.3g}"


@check
def correlation_symmetry_translation(seed):
    rng = _rng(seed, 2)
    worst = 0.0
    for arr in _random_arrays(rng):
        moved = arr.translated(rng.normal(size=3) * 5)
        d1, d2 = rays.sample_uniform_sphere(rng, (2,))
        g = geometry.steering_correlation(arr, d1, d2)
        worst = max(worst, abs(g - geometry.steering_correlation(arr, d2, d1)))
        worst = max(worst, abs(g - geometry.steering_correlation(moved, d1, d2)))
    return worst <= 1e-10, f"max deviation {worst:.3g}"


@check
def correlation_rotation_invariance(seed):
    rng = _rng(seed, 3)
    worst = 0.0
    for arr in _random_arrays(rng):
        rot = _rotation(rng)
        d1, d2 = rays.sample_uniform_sphere(rng, (2,))
        g = geometry.steering_correlation(arr, d1, d2)
        worst = max(worst, abs(g - geometry.steering_correlation(arr.rotated(rot), rot @ d1, rot @ d2)))
    return worst <= 1e-10, f"max deviation {worst:.3g}"


@check
def ula_axis_projection(seed):
    rng = _rng(seed, 4)
    arr = geometry.make_ula(8, 0.5)
    worst = 0.0
    for _ in range(20):
        d1, d2 = rays.sample_uniform_sphere(rng, (2,))
        # Rotating both directions about the array axis keeps (d1 - d2).x fixed.
        t = rng.uniform(0, 2 * np.pi)
        rot = np.array([[1, 0, 0], [0, math.cos(t), -math.sin(t)], [0, math.sin(t), math.cos(t)]])
        worst = max(
            worst,
            abs(geometry.steering_correlation(arr, d1, d2) - geometry.steering_correlation(arr, rot @ d1, rot @ d2)),
        )
    return worst <= 1e-10, f"max deviation {worst:.3g}"


@check
def mean_gain_law(seed):
    dist = rays.RayDistribution()
    bad = []
    for k, kind in enumerate(("ula", "uca", "upa")):
        tx = geometry.make_array(kind, 4, 0.5)
        rx = geometry.make_array(kind, 6, 0.5)
        p = 3

        def block(rng, count):
            return rays.batch_channel_gains(dist.sample_batch(rng, count, p), tx, rx) / (tx.n * rx.n * p)

        est = montecarlo.run_blocks(block, TRIALS, SeedSpec(seed, 100 + k))[0].mean_estimate()
        if not est.agrees_with(1.0):
            bad.append(f"{kind}: {est.mean:.4f} +/- {est.ci_half_width:.4f}")
    return not bad, "; ".join(bad) or "all array types within 3 CI"


@check
def gain_phase_invariance(seed):
    rng = _rng(seed, 5)
    tx, rx = geometry.make_ula(4, 0.5), geometry.make_upa(6, 0.5)
    worst = 0.0
    for _ in range(10):
        rs = rays.sample_rayset(rays.RayDistribution(), 4, rng)
        g0 = rays.channel_gain(rays.assemble_channel(rs, tx, rx))
        turned = rays.RaySet(rs.gains * np.exp(1j * rng.uniform(0, 2 * np.pi)), rs.dods, rs.doas)
        worst = max(worst, abs(rays.channel_gain(rays.assemble_channel(turned, tx, rx)) - g0) / g0)
    return worst <= 1e-10, f"max relative deviation {worst:.3g}"


@check
def rank_bound(seed):
    rng = _rng(seed, 6)
    tx, rx = geometry.make_ula(6, 0.5), geometry.make_uca(5, 0.5)
    for p in (1, 2, 3, 7):
        for _ in range(5):
            h = rays.assemble_channel(rays.sample_rayset(rays.RayDistribution(), p, rng), tx, rx).matrix
            r = np.linalg.matrix_rank(h, tol=1e-9 * np.linalg.norm(h))
            if r > min(p, tx.n, rx.n):
                return False, f"rank {r} > min(P={p}, {tx.n}, {rx.n})"
    return True, "rank(H) <= min(P, Nt, Nr)"


def _unitary(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


@check
def capacity_unitary_invariance(seed):
    rng = _rng(seed, 7)
    worst = 0.0
    for _ in range(10):
        h = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
        c0 = rays.capacity_equal_power(h, 5.0)
        c1 = rays.capacity_equal_power(_unitary(rng, 4) @ h @ _unitary(rng, 3), 5.0)
        worst = max(worst, abs(c1 - c0))
    return worst <= 1e-9, f"max deviation {worst:.3g} bit/s/Hz"


@check
def alpha2_bounds(seed):
    rng = _rng(seed, 8)
    for _ in range(2000):
        p = int(rng.integers(1, 17))
        a = rng.exponential(size=p) * (rng.random(p) < 0.8)
        if not a.any():
            a[0] = 1.0
        w = a**2
        n2, n4 = w.sum() ** 2, (w * w).sum()
        val = stats.alpha2(a)
        if not 0.0 <= val <= 1.0 - 1.0 / p:
            return False, f"alpha2={val} outside [0, 1-1/{p}]"
        if not (n2 / p <= n4 * (1 + 1e-12) and n4 <= n2 * (1 + 1e-12)):
            return False, "4-norm chain violated"
    for p in range(1, 17):
        if stats.alpha2(np.full(p, 0.7)) != 1.0 - 1.0 / p:
            return False, f"equal-power P={p} not exactly 1-1/P"
    if stats.alpha2([0, 3.0, 0]) != 0.0:
        return False, "single contributing ray not exactly 0"
    return True, "bounds and equality cases hold"


@check
def decomposition_consistency(seed):
    dist = rays.RayDistribution()
    bad = []
    for k, (nt, nr, p) in enumerate(((2, 2, 2), (4, 2, 3), (4, 4, 4))):
        tx, rx = geometry.make_ula(nt, 0.5), geometry.make_ula(nr, 0.5)
        mc = stats.simulate_cv2(dist, p, tx, rx, TRIALS, SeedSpec(seed, 200 + k))
        et = stats.e2_estimate(tx, trials=TRIALS, seed=SeedSpec(seed, 300 + k))
        er = stats.e2_estimate(rx, trials=TRIALS, seed=SeedSpec(seed, 400 + k))
        rep = stats.cv2_closed_form(et.mean, er.mean, stats.iid_gaussian_moments(p))
        ci = stats.closed_form_ci(rep, et.ci_half_width, er.ci_half_width)
        if not mc.agrees_with(rep.cv2_total, other_ci=ci):
            bad.append(f"({nt},{nr},{p}): MC {mc.mean:.4f} vs {rep.cv2_total:.4f}")
    return not bad, "; ".join(bad) or "MC CV^2 matches the decomposition"


@check
def conditional_consistency(seed):
    bad = []
    arr = geometry.make_ula(4, 0.5)
    for k, amps in enumerate(((1.0,), (1.0, 1.0, 1.0, 1.0), (1.0, 1.0, 2.0))):
        dist = rays.RayDistribution(rays.FixedAmplitudeGains(amps))
        mc = stats.simulate_cv2(dist, len(amps), arr, arr, TRIALS, SeedSpec(seed, 500 + k))
        e2 = stats.e2_estimate(arr, trials=TRIALS, seed=SeedSpec(seed, 600 + k))
        pred = stats.cv2_conditional_closed_form(e2.mean, e2.mean, amps)
        ci = 2 * e2.mean * e2.ci_half_width * stats.alpha2(amps)
        if not mc.agrees_with(pred, other_ci=ci):
            bad.append(f"{amps}: MC {mc.mean:.4g} vs {pred:.4g}")
    return not bad, "; ".join(bad) or "conditional model matches"


@check
def rayleigh_baseline(seed):
    for n in range(1, 17):
        if stats.rayleigh_cv2(np.eye(n)) != 1.0 / n:
            return False, f"rayleigh_cv2(I_{n}) != 1/{n}"
    rng = _rng(seed, 9)
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    r = g @ g.conj().T
    acc = montecarlo.run_blocks(lambda q, c: stats.rayleigh_gain_samples(r, q, c), TRIALS, SeedSpec(seed, 700))
    est = acc[0].cv2_estimate()
    ok = est.agrees_with(stats.rayleigh_cv2(r))
    return ok, f"MC {est.mean:.4f} +/- {est.ci_half_width:.4f} vs {stats.rayleigh_cv2(r):.4f}"


@check
def determinism_across_workers(seed):
    def block(rng, count):
        return rng.random(count)

    a = montecarlo.run_blocks(block, 50_000, SeedSpec(seed, 800), workers=1)[0]
    b = montecarlo.run_blocks(block, 50_000, SeedSpec(seed, 800), workers=4)[0]
    return a == b, "identical accumulators" if a == b else f"{a} != {b}"


@check
def merge_associativity(seed):
    rng = _rng(seed, 10)
    x = rng.exponential(size=10_000)
    parts = np.array_split(x, 7)
    accs = [montecarlo.MomentAccumulator.from_array(p) for p in parts]
    whole = montecarlo.MomentAccumulator.from_array(x)
    forward = montecarlo.merge_all(accs)
    shuffled = montecarlo.merge_all([accs[i] for i in rng.permutation(len(accs))])
    worst = 0.0
    for attr in ("mean", "m2", "m3", "m4"):
        ref = getattr(whole, attr)
        for cand in (forward, shuffled):
            worst = max(worst, abs(getattr(cand, attr) - ref) / abs(ref))
    return worst <= 1e-9, f"max relative deviation {worst:.3g}"


@check
def variance_stability(seed):
    def block(rng, count):
        return 1e6 + rng.random(count)

    var = montecarlo.run_blocks(block, 1_000_000, SeedSpec(seed, 900))[0].variance
    return abs(var * 12 - 1.0) <= 0.01, f"variance {var:.6g} vs 1/12"


@check
def fourth_moment_agreement(seed):
    tx, rx = geometry.make_ula(2, 0.5), geometry.make_ula(4, 0.5)
    a, b = stats.fourth_moment_oracle(rays.RayDistribution(), 3, tx, rx, TRIALS, SeedSpec(seed, 1000))
    ok = a.agrees_with(b.mean, other_ci=b.ci_half_width)
    return ok, f"direct {a.mean:.2f} +/- {a.ci_half_width:.2f}, decomposed {b.mean:.2f} +/- {b.ci_half_width:.2f}"


def run_validate(seed: int = 0, only: list[str] | None = None) -> dict:
    """Run the checks; returns a JSON-serialisable report."""
    names = list(CHECKS) if not only else only
    results = []
    for name in names:
        if name not in CHECKS:
            raise KeyError(f"unknown check {name!r}")
        try:
            ok, detail = CHECKS[name](seed)
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append({"name": name, "passed": bool(ok), "detail": detail, "seed": seed})
    return {"seed": seed, "passed": all(r["passed"] for r in results), "checks": results}
