"""Ray sampling and channel assembly for the planar-wavefront ray model.

A channel is ``H = sqrt(Nt Nr) sum_p c_p e_r(doa_p) e_t(dod_p)^H``.  Gains are
drawn as amplitude and phase separately so that laws with fixed amplitudes
keep their ray powers exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

import numpy as np

from .geometry import ArrayTopology, array_factor, check_unit, steering_vectors

__all__ = [
    "ComplexGaussianGains",
    "FixedAmplitudeGains",
    "EqualPowerGains",
    "UniformSphere",
    "FixedDirections",
    "RayDistribution",
    "Ray",
    "RaySet",
    "RayBatch",
    "ChannelRealization",
    "sample_uniform_sphere",
    "sample_rayset",
    "assemble_channel",
    "assemble_channels",
    "channel_gain",
    "ray_coupling",
    "batch_channel_gains",
    "capacity_equal_power",
]


# -- gain laws ---------------------------------------------------------------


@dataclass(frozen=True)
class ComplexGaussianGains:
    """``c_p ~ CN(0, variance)``: real and imaginary parts each ``N(0, variance/2)``."""

    variance: float = 1.0

    def __post_init__(self):
        if not self.variance > 0:
            raise ValueError("variance must be positive")

    def sample(self, rng: np.random.Generator, shape: tuple[int, int]):
        z = rng.standard_normal(shape + (2,)) * math.sqrt(self.variance / 2.0)
        return np.hypot(z[..., 0], z[..., 1]), np.arctan2(z[..., 1], z[..., 0])


@dataclass(frozen=True)
class FixedAmplitudeGains:
    """Given ray amplitudes with i.i.d. uniform phases (conditional model)."""

    amplitudes: tuple[float, ...]

    def __post_init__(self):
        amps = tuple(float(a) for a in self.amplitudes)
        if not amps or any(a < 0 or not math.isfinite(a) for a in amps):
            raise ValueError("amplitudes must be a non-empty sequence of finite nonnegative reals")
        object.__setattr__(self, "amplitudes", amps)

    def sample(self, rng: np.random.Generator, shape: tuple[int, int]):
        if shape[-1] != len(self.amplitudes):
            raise ValueError(f"law fixes P={len(self.amplitudes)} rays, asked for {shape[-1]}")
        amps = np.broadcast_to(np.asarray(self.amplitudes), shape)
        return amps, rng.uniform(0.0, 2.0 * np.pi, shape)


@dataclass(frozen=True)
class EqualPowerGains:
    """Every ray has power ``power``; phases i.i.d. uniform."""

    power: float = 1.0

    def __post_init__(self):
        if not self.power > 0:
            raise ValueError("power must be positive")

    def sample(self, rng: np.random.Generator, shape: tuple[int, int]):
        amps = np.full(shape, math.sqrt(self.power))
        return amps, rng.uniform(0.0, 2.0 * np.pi, shape)


GainLaw = Union[ComplexGaussianGains, FixedAmplitudeGains, EqualPowerGains]


# -- direction laws ----------------------------------------------------------


def sample_uniform_sphere(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    """Uniform points on S^2 by normalising standard normal 3-vectors."""
    v = rng.standard_normal(tuple(shape) + (3,))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


@dataclass(frozen=True)
class UniformSphere:
    def sample(self, rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
        return sample_uniform_sphere(rng, shape)


@dataclass(frozen=True, eq=False)
class FixedDirections:
    """Each ray picks one of the listed directions, i.i.d. and uniformly."""

    directions: np.ndarray

    def __post_init__(self):
        d = check_unit(np.atleast_2d(np.asarray(self.directions, dtype=float)))
        d.setflags(write=False)
        object.__setattr__(self, "directions", d)

    def sample(self, rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
        if len(self.directions) == 1:
            return np.broadcast_to(self.directions[0], tuple(shape) + (3,)).copy()
        return self.directions[rng.integers(0, len(self.directions), size=shape)]


DirectionLaw = Union[UniformSphere, FixedDirections]


@dataclass(frozen=True)
class RayDistribution:
    """Independent gain, DoD and DoA laws; rays are i.i.d."""

    gain_law: GainLaw = field(default_factory=ComplexGaussianGains)
    dod_law: DirectionLaw = field(default_factory=UniformSphere)
    doa_law: DirectionLaw = field(default_factory=UniformSphere)

    def sample_batch(self, rng: np.random.Generator, batch: int, p_count: int) -> "RayBatch":
        if p_count < 1:
            raise ValueError("p_count must be >= 1")
        shape = (batch, p_count)
        amps, phases = self.gain_law.sample(rng, shape)
        dods = self.dod_law.sample(rng, shape)
        doas = self.doa_law.sample(rng, shape)
        return RayBatch(np.asarray(amps, float), np.asarray(phases, float), dods, doas)


# -- realizations ------------------------------------------------------------


@dataclass(frozen=True)
class Ray:
    gain: complex
    dod: np.ndarray
    doa: np.ndarray


@dataclass(frozen=True, eq=False)
class RaySet:
    """``P`` rays stored column-wise."""

    gains: np.ndarray
    dods: np.ndarray
    doas: np.ndarray

    def __post_init__(self):
        gains = np.atleast_1d(np.asarray(self.gains, dtype=complex))
        if gains.ndim != 1 or gains.size < 1:
            raise ValueError("a ray set needs at least one ray")
        if not np.all(np.isfinite(gains)):
            raise ValueError("ray gains must be finite")
        dods = check_unit(np.asarray(self.dods, float).reshape(-1, 3))
        doas = check_unit(np.asarray(self.doas, float).reshape(-1, 3))
        if not len(dods) == len(doas) == gains.size:
            raise ValueError("gains, DoDs and DoAs must have the same length")
        object.__setattr__(self, "gains", gains)
        object.__setattr__(self, "dods", dods)
        object.__setattr__(self, "doas", doas)

    @classmethod
    def from_rays(cls, rays: Sequence[Ray]) -> "RaySet":
        return cls([r.gain for r in rays], [r.dod for r in rays], [r.doa for r in rays])

    @property
    def p_count(self) -> int:
        return self.gains.size

    @property
    def aggregated_power(self) -> float:
        return float(np.sum(np.abs(self.gains) ** 2))

    def __len__(self) -> int:
        return self.p_count

    def __iter__(self) -> Iterator[Ray]:
        for c, u, v in zip(self.gains, self.dods, self.doas):
            yield Ray(complex(c), u, v)


@dataclass(frozen=True)
class RayBatch:
    """``B`` independent ray sets of ``P`` rays, arrays of shape ``(B, P[, 3])``."""

    amplitudes: np.ndarray
    phases: np.ndarray
    dods: np.ndarray
    doas: np.ndarray

    @property
    def gains(self) -> np.ndarray:
        return self.amplitudes * np.exp(1j * self.phases)

    @property
    def powers(self) -> np.ndarray:
        """Aggregated ray power ``||c||^2`` per realization."""
        return np.sum(self.amplitudes**2, axis=-1)

    def __getitem__(self, b: int) -> RaySet:
        return RaySet(self.gains[b], self.dods[b], self.doas[b])


def sample_rayset(dist: RayDistribution, p_count: int, rng: np.random.Generator) -> RaySet:
    return dist.sample_batch(rng, 1, p_count)[0]


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.atleast_2d(np.asarray(self.matrix, dtype=complex))
        if m.ndim != 2:
            raise ValueError("channel matrix must be 2-D")
        if not np.all(np.isfinite(m)):
            raise ValueError("channel entries must be finite")
        object.__setattr__(self, "matrix", m)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


def assemble_channels(
    gains: np.ndarray, dods: np.ndarray, doas: np.ndarray, tx: ArrayTopology, rx: ArrayTopology
) -> np.ndarray:
    """Channel matrices ``(..., Nr, Nt)`` for batched rays ``(..., P)``."""
    et = steering_vectors(tx, dods)
    er = steering_vectors(rx, doas)
    scale = math.sqrt(tx.n * rx.n)
    return scale * np.einsum("...p,...pr,...pt->...rt", gains, er, et.conj())


def assemble_channel(rays: RaySet, tx: ArrayTopology, rx: ArrayTopology) -> ChannelRealization:
    return ChannelRealization(assemble_channels(rays.gains, rays.dods, rays.doas, tx, rx))


def channel_gain(h: ChannelRealization | np.ndarray) -> float:
    """Squared Frobenius norm ``||H||_F^2``."""
    m = h.matrix if isinstance(h, ChannelRealization) else np.asarray(h)
    return float(np.sum(m.real**2 + m.imag**2))


def ray_coupling(dods: np.ndarray, doas: np.ndarray, tx: ArrayTopology, rx: ArrayTopology) -> np.ndarray:
    """Pairwise ray coupling ``gamma[p, q] = <e_r,p, e_r,q> <e_t,p, e_t,q>^*``.

    Shape ``(..., P, P)``; the diagonal is set to exactly 1.
    """
    et = steering_vectors(tx, dods)
    er = steering_vectors(rx, doas)
    gr = np.einsum("...pn,...qn->...pq", er.conj(), er)
    gt = np.einsum("...pn,...qn->...pq", et.conj(), et)
    gamma = gr * gt.conj()
    p = gamma.shape[-1]
    idx = np.arange(p)
    gamma[..., idx, idx] = 1.0
    return gamma


def batch_channel_gains(batch: RayBatch, tx: ArrayTopology, rx: ArrayTopology) -> np.ndarray:
    """``||H||_F^2`` per realization via the ray-coupling expansion.

    ``||H||^2 = Nt Nr (sum_p |c_p|^2 + 2 sum_{p<q} Re(c_p^* c_q gamma_pq))``
    with ``gamma_pq`` evaluated from array factors of direction differences,
    which avoids forming ``H`` or the steering vectors.
    """
    scale = tx.n * rx.n
    power = batch.powers
    p = batch.amplitudes.shape[-1]
    if p == 1:
        return scale * power
    iu, ju = np.triu_indices(p, k=1)
    af_r = array_factor(rx, batch.doas[..., ju, :] - batch.doas[..., iu, :])
    af_t = array_factor(tx, batch.dods[..., ju, :] - batch.dods[..., iu, :])
    c = batch.gains
    pair = c[..., iu].conj() * c[..., ju]
    if np.iscomplexobj(af_r) or np.iscomplexobj(af_t):
        cross = (pair * af_r * np.conj(af_t)).real
    else:
        cross = pair.real * (af_r * af_t)
    return scale * power + 2.0 * cross.sum(axis=-1)


def capacity_equal_power(h: ChannelRealization | np.ndarray, snr: float) -> float:
    """``log2 det(I + snr/Nt Hn^H Hn)`` with ``Hn = H / ||H||_F``, in bit/s/Hz."""
    m = h.matrix if isinstance(h, ChannelRealization) else np.atleast_2d(np.asarray(h, complex))
    if snr < 0:
        raise ValueError("snr must be nonnegative")
    norm2 = channel_gain(m)
    if norm2 == 0.0:
        raise ValueError("capacity undefined for an all-zero channel")
    hn = m / math.sqrt(norm2)
    nt = m.shape[1]
    gram = np.eye(nt) + (snr / nt) * (hn.conj().T @ hn)
    gram = 0.5 * (gram + gram.conj().T)
    chol = np.linalg.cholesky(gram)
    return float(2.0 * np.sum(np.log2(np.abs(np.diag(chol)))))
