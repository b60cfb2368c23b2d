"""Channel hardening measures.

The coefficient of variation of the channel gain splits into a small-scale
term ``E2_tx * E2_rx * (E||c||^4 - E||c||_4^4) / E||c||^2^2`` driven by how
well each array separates two rays, plus the CV^2 of the aggregated ray
power ``||c||^2`` (large-scale term).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import ArrayTopology, pair_correlations
from .montecarlo import (
    MomentAccumulator,
    MomentEstimate,
    SeedSpec,
    run_blocks,
)
from .rays import (
    ComplexGaussianGains,
    EqualPowerGains,
    FixedAmplitudeGains,
    RayDistribution,
    UniformSphere,
    assemble_channels,
    batch_channel_gains,
    ray_coupling,
)

__all__ = [
    "HardeningReport",
    "GainMoments",
    "validate_covariance",
    "cv2_from_samples",
    "rayleigh_cv2",
    "rayleigh_gain_samples",
    "e2_estimate",
    "e2_uniform_sphere",
    "alpha2",
    "large_scale_term",
    "gain_moments",
    "iid_gaussian_moments",
    "cv2_closed_form",
    "cv2_conditional_closed_form",
    "cv2_illustration",
    "closed_form_ci",
    "simulate_cv2",
    "fourth_moment_oracle",
]


@dataclass(frozen=True)
class HardeningReport:
    cv2_total: float
    cv2_small_scale: float
    cv2_large_scale: float
    e2_tx: float
    e2_rx: float
    alpha2: float

    def __post_init__(self):
        for name in ("e2_tx", "e2_rx"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0 + 1e-12:
                raise ValueError(f"{name} must lie in (0, 1], got {v}")
        if self.alpha2 < 0 or self.cv2_large_scale < 0:
            raise ValueError("hardening terms must be nonnegative")
        expected = self.e2_tx * self.e2_rx * self.alpha2
        if abs(self.cv2_small_scale - expected) > 1e-12 * max(1.0, abs(expected)):
            raise ValueError("small-scale term must equal e2_tx * e2_rx * alpha2")


@dataclass(frozen=True)
class GainMoments:
    """Moments of the ray amplitudes: ``E||c||^2``, ``E||c||^4``, ``E||c||_4^4``."""

    p_rays: int
    power: float
    power_sq: float
    fourth_norm: float


def cv2_from_samples(gains) -> MomentEstimate:
    """Var{g} / E{g}^2 of a gain sample, unbiased variance, delta-method CI.

    Identical samples give an exact zero with ``variance == 0``.
    """
    g = np.asarray(gains, dtype=float).ravel()
    if g.size < 2:
        raise ValueError("need at least 2 samples")
    if np.any(g < 0):
        raise ValueError("gains must be nonnegative")
    return MomentAccumulator.from_array(g).cv2_estimate()


def validate_covariance(r, tol: float = 1e-9) -> np.ndarray:
    r = np.atleast_2d(np.asarray(r, dtype=complex))
    if r.shape[0] != r.shape[1]:
        raise ValueError("covariance must be square")
    scale = max(1.0, float(np.max(np.abs(r))))
    if np.max(np.abs(r - r.conj().T)) > tol * scale:
        raise ValueError("covariance must be Hermitian")
    r = 0.5 * (r + r.conj().T)
    trace = float(np.trace(r).real)
    if np.linalg.eigvalsh(r).min() < -tol * max(abs(trace), 1.0):
        raise ValueError("covariance must be positive semi-definite")
    return r


def rayleigh_cv2(r) -> float:
    """``Tr(R^2) / Tr(R)^2`` for ``h ~ CN(0, R)``."""
    r = validate_covariance(r)
    trace = float(np.trace(r).real)
    if trace <= 0.0:
        raise ValueError("covariance trace must be positive")
    return float(np.sum(np.abs(r) ** 2)) / trace**2


def rayleigh_gain_samples(r, rng: np.random.Generator, count: int) -> np.ndarray:
    """``||h||^2`` for ``count`` draws of ``h ~ CN(0, R)``."""
    r = validate_covariance(r)
    w, u = np.linalg.eigh(r)
    root = u * np.sqrt(np.clip(w, 0.0, None))
    n = r.shape[0]
    z = (rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))) / math.sqrt(2.0)
    h = z @ root.T
    return np.sum(h.real**2 + h.imag**2, axis=-1)


def e2_estimate(
    topology: ArrayTopology,
    dir_law=None,
    trials: int = 10**6,
    seed: SeedSpec | int = 0,
    workers: int | None = None,
) -> MomentEstimate:
    """Monte-Carlo mean of ``|<e(u), e(u')>|^2`` over i.i.d. direction pairs."""
    dir_law = UniformSphere() if dir_law is None else dir_law
    seed = SeedSpec(seed) if isinstance(seed, int) else seed
    if topology.n == 1:
        return MomentEstimate(int(trials), 1.0, 0.0, 0.0)

    def block(rng, count):
        d1 = dir_law.sample(rng, (count,))
        d2 = dir_law.sample(rng, (count,))
        return pair_correlations(topology, d1, d2)

    return run_blocks(block, trials, seed, workers)[0].mean_estimate()


def e2_uniform_sphere(topology: ArrayTopology) -> float:
    """Exact E^2 for directions uniform on the sphere.

    Averaging ``exp(j k . u)`` over the sphere gives ``sin|k| / |k|``, so
    ``E^2 = N^-2 sum_{i,k} sinc^2(2 pi |a_i - a_k| / lambda)``.
    """
    x = 2.0 * topology.pairwise_distances() / topology.wavelength
    return float(np.sum(np.sinc(x) ** 2)) / topology.n**2


def alpha2(amplitudes) -> float:
    """Propagation factor ``1 - ||c||_4^4 / ||c||_2^4`` for fixed amplitudes.

    Lies in ``[0, 1 - 1/P]``: zero for a single contributing ray and the
    upper bound for ``P`` rays of equal power.
    """
    a = np.asarray(amplitudes, dtype=float).ravel()
    if a.size == 0 or np.any(a < 0) or not np.all(np.isfinite(a)):
        raise ValueError("amplitudes must be finite and nonnegative")
    p = a.size
    w = a * a
    peak = w.max()
    if peak == 0.0:
        raise ValueError("at least one amplitude must be nonzero")
    if p == 1:
        return 0.0
    # Normalising by the strongest ray keeps the extreme cases exact.
    w = w / peak
    value = 1.0 - float(np.sum(w * w)) / float(np.sum(w)) ** 2
    return min(max(value, 0.0), 1.0 - 1.0 / p)


def large_scale_term(power_samples) -> MomentEstimate:
    """CV^2 of the aggregated ray power.

    ``power_samples`` is either a 1-D array of ``||c||^2`` values or a
    ``(trials, P)`` array of per-ray powers ``|c_p|^2``, summed per row.
    """
    s = np.asarray(power_samples, dtype=float)
    if s.ndim == 2:
        s = s.sum(axis=1)
    return cv2_from_samples(s)


def iid_gaussian_moments(p_rays: int, variance: float = 1.0) -> GainMoments:
    """Moments for i.i.d. ``CN(0, v)`` gains; ``|c_p|^2`` is exponential."""
    p = int(p_rays)
    v = float(variance)
    return GainMoments(p, p * v, (p * p + p) * v * v, 2.0 * p * v * v)


def gain_moments(law, p_rays: int) -> GainMoments:
    """Analytic amplitude moments for the built-in gain laws."""
    if isinstance(law, ComplexGaussianGains):
        return iid_gaussian_moments(p_rays, law.variance)
    if isinstance(law, EqualPowerGains):
        s = p_rays * law.power
        return GainMoments(p_rays, s, s * s, p_rays * law.power**2)
    if isinstance(law, FixedAmplitudeGains):
        if len(law.amplitudes) != p_rays:
            raise ValueError("amplitude count does not match p_rays")
        w = np.asarray(law.amplitudes) ** 2
        s = float(w.sum())
        return GainMoments(p_rays, s, s * s, float(np.sum(w * w)))
    raise TypeError(f"no analytic moments for {type(law).__name__}")


def cv2_closed_form(e2_tx: float, e2_rx: float, moments: GainMoments) -> HardeningReport:
    """Small-scale plus large-scale decomposition of CV^2.

    Valid for i.i.d. ray directions; for a direction law that is not i.i.d.
    across rays the pairwise weights differ and this form does not apply.
    """
    m2, m4, q4 = moments.power, moments.power_sq, moments.fourth_norm
    tol = 1e-12 * max(1.0, m4)
    if m2 <= 0:
        raise ValueError("E||c||^2 must be positive")
    if m4 < m2 * m2 - tol:
        raise ValueError("inconsistent moments: E||c||^4 < E||c||^2^2")
    if q4 > m4 + tol or q4 < m4 / moments.p_rays - tol:
        raise ValueError("inconsistent moments: need E||c||^4/P <= E||c||_4^4 <= E||c||^4")
    if moments.p_rays == 1:
        a2 = 0.0
    else:
        a2 = max(m4 - q4, 0.0) / (m2 * m2)
    small = e2_tx * e2_rx * a2
    large = max(m4 - m2 * m2, 0.0) / (m2 * m2)
    return HardeningReport(small + large, small, large, e2_tx, e2_rx, a2)


def cv2_conditional_closed_form(e2_tx: float, e2_rx: float, amplitudes) -> float:
    """Small-scale CV^2 when ray amplitudes are held fixed."""
    return e2_tx * e2_rx * alpha2(amplitudes)


def cv2_illustration(n_t: int, n_r: int, p_rays: int) -> float:
    """``(1 - 1/P) / (Nt Nr) + 1/P``: CN(0,1) rays and ``E^2 = 1/N``."""
    return (1.0 - 1.0 / p_rays) / (n_t * n_r) + 1.0 / p_rays


def closed_form_ci(report: HardeningReport, ci_tx: float, ci_rx: float) -> float:
    """Half-width of the closed form propagated from the E^2 intervals."""
    return report.alpha2 * math.hypot(report.e2_rx * ci_tx, report.e2_tx * ci_rx)


def simulate_cv2(
    dist: RayDistribution,
    p_rays: int,
    tx: ArrayTopology,
    rx: ArrayTopology,
    trials: int,
    seed: SeedSpec | int = 0,
    workers: int | None = None,
) -> MomentEstimate:
    """Monte-Carlo CV^2 of ``||H||_F^2``."""
    seed = SeedSpec(seed) if isinstance(seed, int) else seed

    def block(rng, count):
        return batch_channel_gains(dist.sample_batch(rng, count, p_rays), tx, rx)

    return run_blocks(block, trials, seed, workers)[0].cv2_estimate()


def fourth_moment_oracle(
    dist: RayDistribution,
    p_rays: int,
    tx: ArrayTopology,
    rx: ArrayTopology,
    trials: int,
    seed: SeedSpec | int = 0,
    workers: int | None = None,
) -> tuple[MomentEstimate, MomentEstimate]:
    """``E||H||_F^4`` two ways.

    The direct route assembles each channel matrix.  The second route writes
    ``||H||^2 / (Nt Nr) = ||c||^2 + c^T J c`` with
    ``J[p, q] = |gamma_pq| cos(arg(c_p^* c_q gamma_pq))`` off the diagonal,
    and averages ``(Nt Nr)^2 (||c||^4 + (c^T J c)^2)``, dropping the cross
    term whose expectation vanishes under uniform phases.  The two routes
    use independent streams.
    """
    if trials < 2:
        raise ValueError("trials must be >= 2")
    seed = SeedSpec(seed) if isinstance(seed, int) else seed
    scale = float(tx.n * rx.n)

    def direct(rng, count):
        b = dist.sample_batch(rng, count, p_rays)
        h = assemble_channels(b.gains, b.dods, b.doas, tx, rx)
        g = np.sum(h.real**2 + h.imag**2, axis=(-2, -1))
        return g * g

    def decomposed(rng, count):
        b = dist.sample_batch(rng, count, p_rays)
        power = b.powers
        if p_rays == 1:
            return scale**2 * power**2
        gamma = ray_coupling(b.dods, b.doas, tx, rx)
        c = b.gains
        phi = np.angle(c.conj()[..., :, None] * c[..., None, :] * gamma)
        j = np.abs(gamma) * np.cos(phi)
        idx = np.arange(p_rays)
        j[..., idx, idx] = 0.0
        a = b.amplitudes
        q = np.einsum("...p,...pq,...q->...", a, j, a)
        return scale**2 * (power**2 + q**2)

    est_direct = run_blocks(direct, trials, seed, workers)[0].mean_estimate()
    est_decomp = run_blocks(decomposed, trials, seed.child(seed.stream_id + 1), workers)[0].mean_estimate()
    return est_direct, est_decomp
