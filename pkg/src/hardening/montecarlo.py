"""Reproducible Monte-Carlo driver.

Random streams are counter based: the pair ``(master_seed, stream_id)`` is
hashed into a Philox key and the trial (or block) index is written into the
Philox counter.  Any trial can therefore be replayed on its own, and the
result of a run does not depend on how the work was split between workers.

Sample statistics are accumulated as central moment sums up to order four
and merged with the pairwise update formulas of Chan et al. / Pebay, so
block estimates can be computed independently and folded together.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Z95",
    "BLOCK_SIZE",
    "MomentEstimate",
    "MomentAccumulator",
    "SeedSpec",
    "NonFiniteTrialError",
    "default_workers",
    "run_trials",
    "run_blocks",
    "merge_all",
]

Z95 = 1.96

#: Trials per vectorised block.  Part of the reproducibility contract: the
#: block partition, not the worker count, fixes which stream feeds a trial.
BLOCK_SIZE = 8192


class NonFiniteTrialError(RuntimeError):
    """A trial produced NaN or inf.  Carries enough to replay it."""

    def __init__(self, trial_index: int, seed: "SeedSpec", value: float):
        self.trial_index = trial_index
        self.seed = seed
        self.value = value
        super().__init__(
            f"non-finite trial value {value!r} at trial_index={trial_index} "
            f"(master_seed={seed.master_seed}, stream_id={seed.stream_id})"
        )


@dataclass(frozen=True)
class MomentEstimate:
    """Monte-Carlo estimate of a scalar.

    ``variance`` is the per-sample variance of the quantity being averaged
    (for derived estimators such as CV^2 it is the variance of the influence
    function), so that ``ci_half_width = 1.96 * sqrt(variance / n)`` always.
    """

    n: int
    mean: float
    variance: float
    ci_half_width: float

    @classmethod
    def from_stats(cls, n: int, mean: float, variance: float) -> "MomentEstimate":
        variance = max(float(variance), 0.0)
        return cls(int(n), float(mean), variance, Z95 * math.sqrt(variance / n))

    @property
    def is_degenerate(self) -> bool:
        """True when the samples carried no spread at all."""
        return self.variance == 0.0

    def agrees_with(self, value: float, k: float = 3.0, other_ci: float = 0.0) -> bool:
        """``|mean - value| <= k`` combined (root-sum-square) half-widths."""
        tol = k * math.hypot(self.ci_half_width, other_ci)
        return abs(self.mean - value) <= tol


@dataclass(frozen=True)
class MomentAccumulator:
    """Count, mean and central moment sums ``M_k = sum (x - mean)^k``."""

    n: int = 0
    mean: float = 0.0
    m2: float = 0.0
    m3: float = 0.0
    m4: float = 0.0

    @classmethod
    def from_array(cls, x) -> "MomentAccumulator":
        x = np.asarray(x, dtype=float).ravel()
        n = x.size
        if n == 0:
            return cls()
        if np.all(x == x[0]):
            return cls(n, float(x[0]))
        mean = float(x.mean())
        d = x - mean
        d2 = d * d
        return cls(n, mean, float(d2.sum()), float((d2 * d).sum()), float((d2 * d2).sum()))

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        na, nb = self.n, other.n
        if na == 0:
            return other
        if nb == 0:
            return self
        n = na + nb
        delta = other.mean - self.mean
        if delta == 0.0:
            return MomentAccumulator(
                n, self.mean, self.m2 + other.m2, self.m3 + other.m3, self.m4 + other.m4
            )
        dn = delta / n
        mean = self.mean + dn * nb
        m2 = self.m2 + other.m2 + delta * dn * na * nb
        m3 = (
            self.m3
            + other.m3
            + delta * dn * dn * na * nb * (na - nb)
            + 3.0 * dn * (na * other.m2 - nb * self.m2)
        )
        m4 = (
            self.m4
            + other.m4
            + delta * dn**3 * na * nb * (na * na - na * nb + nb * nb)
            + 6.0 * dn * dn * (na * na * other.m2 + nb * nb * self.m2)
            + 4.0 * dn * (na * other.m3 - nb * self.m3)
        )
        return MomentAccumulator(n, mean, m2, m3, m4)

    __add__ = merge

    @property
    def variance(self) -> float:
        """Unbiased sample variance."""
        return self.m2 / (self.n - 1) if self.n > 1 else 0.0

    def mean_estimate(self) -> MomentEstimate:
        if self.n < 1:
            raise ValueError("no samples")
        return MomentEstimate.from_stats(self.n, self.mean, self.variance)

    def cv2_estimate(self) -> MomentEstimate:
        """Squared coefficient of variation with a delta-method interval.

        The influence function of ``s^2 / m^2`` is
        ``((x-m)^2 - s^2)/m^2 - 2 s^2 (x-m)/m^3``; its variance is expressed
        through the central moments kept by the accumulator.
        """
        if self.n < 2:
            raise ValueError("CV^2 needs at least 2 samples")
        mu = self.mean
        if mu == 0.0:
            raise ValueError("CV^2 undefined for zero-mean samples")
        if self.m2 == 0.0:
            return MomentEstimate(self.n, 0.0, 0.0, 0.0)
        s2 = self.m2 / self.n
        c3 = self.m3 / self.n
        c4 = self.m4 / self.n
        var_if = (c4 - s2 * s2) / mu**4 - 4.0 * s2 * c3 / mu**5 + 4.0 * s2**3 / mu**6
        return MomentEstimate.from_stats(self.n, self.variance / mu**2, var_if)


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if self.stream_id < 0:
            raise ValueError("stream_id must be nonnegative")

    def _key(self) -> np.ndarray:
        ss = np.random.SeedSequence([self.master_seed, self.stream_id])
        return ss.generate_state(2, dtype=np.uint64)

    def generator(self, counter: int) -> np.random.Generator:
        """Independent generator for trial/block ``counter`` of this stream."""
        if counter < 0:
            raise ValueError("counter must be nonnegative")
        # Word 0-1 are consumed by the draws themselves; the index sits above.
        ctr = np.array([0, 0, counter & 0xFFFFFFFFFFFFFFFF, counter >> 64], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=self._key(), counter=ctr))

    def child(self, stream_id: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, stream_id)


def default_workers() -> int:
    env = os.environ.get("HARDENING_WORKERS")
    if env:
        workers = int(env)
        if workers < 1:
            raise ValueError("HARDENING_WORKERS must be a positive integer")
        return workers
    return os.cpu_count() or 1


def _map(fn, items, workers: int):
    if workers <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _check_finite(values: np.ndarray, offset: int, seed: SeedSpec):
    flat = values.reshape(values.shape[0], -1)
    bad = ~np.isfinite(flat).all(axis=1)
    if bad.any():
        row = int(np.argmax(bad))
        value = flat[row][~np.isfinite(flat[row])][0]
        raise NonFiniteTrialError(offset + row, seed, float(value))


def run_trials(
    trial_fn: Callable[[int, np.random.Generator], float],
    trials: int,
    seed: SeedSpec,
    workers: int | None = None,
) -> MomentEstimate:
    """Mean of ``trial_fn(i, rng_i)`` over ``i < trials``.

    ``rng_i`` is keyed on ``(seed, i)`` only, so results are bit-identical
    for any ``workers``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    workers = default_workers() if workers is None else workers
    starts = list(range(0, trials, BLOCK_SIZE))

    def chunk(start):
        stop = min(start + BLOCK_SIZE, trials)
        return np.array([trial_fn(i, seed.generator(i)) for i in range(start, stop)], dtype=float)

    acc = MomentAccumulator()
    for start, values in zip(starts, _map(chunk, starts, workers)):
        _check_finite(values, start, seed)
        acc = acc.merge(MomentAccumulator.from_array(values))
    return acc.mean_estimate()


def run_blocks(
    block_fn: Callable[[np.random.Generator, int], np.ndarray],
    trials: int,
    seed: SeedSpec,
    workers: int | None = None,
    block_size: int = BLOCK_SIZE,
) -> list[MomentAccumulator]:
    """Vectorised variant of :func:`run_trials`.

    ``block_fn(rng, count)`` returns ``count`` trial values, either shape
    ``(count,)`` or ``(count, k)`` for ``k`` statistics per trial.  Block
    ``b`` draws from ``seed.generator(b)``.  One accumulator per column is
    returned, folded in block order.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    workers = default_workers() if workers is None else workers
    starts = list(range(0, trials, block_size))

    def block(start):
        count = min(block_size, trials - start)
        values = np.asarray(block_fn(seed.generator(start // block_size), count), dtype=float)
        if values.shape[0] != count:
            raise ValueError(f"block_fn returned {values.shape[0]} values, expected {count}")
        _check_finite(values, start, seed)
        values = values.reshape(count, -1)
        return [MomentAccumulator.from_array(values[:, j]) for j in range(values.shape[1])]

    parts = _map(block, starts, workers)
    accs = parts[0]
    for part in parts[1:]:
        accs = [a.merge(b) for a, b in zip(accs, part)]
    return accs


def merge_all(accs: Sequence[MomentAccumulator]) -> MomentAccumulator:
    out = MomentAccumulator()
    for a in accs:
        out = out.merge(a)
    return out
