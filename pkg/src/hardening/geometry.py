"""Antenna array topologies and plane-wave steering vectors."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ArrayTopology",
    "make_ula",
    "make_uca",
    "make_upa",
    "make_array",
    "ARRAY_TYPES",
    "steering_vector",
    "steering_vectors",
    "steering_correlation",
    "pair_correlations",
    "array_factor",
    "check_unit",
]

UNIT_TOL = 1e-9


def check_unit(direction, tol: float = UNIT_TOL) -> np.ndarray:
    """Return ``direction`` as a float array, raising if any row is not unit norm."""
    d = np.asarray(direction, dtype=float)
    if d.shape[-1] != 3:
        raise ValueError(f"directions must be 3-vectors, got shape {d.shape}")
    norms = np.linalg.norm(d, axis=-1)
    if not np.all(np.abs(norms - 1.0) <= tol):
        raise ValueError("direction vectors must have unit norm")
    return d


@dataclass(frozen=True, eq=False)
class ArrayTopology:
    """Antenna positions (meters, shape ``(N, 3)``) and carrier wavelength."""

    positions: np.ndarray
    wavelength: float
    kind: str = "custom"
    #: ``(spacing, (nx, ny))`` when the positions form a centred grid on the
    #: x/y axes; enables closed-form array factors.
    lattice: tuple | None = None

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float, copy=True).reshape(-1, 3)
        if pos.shape[0] < 1:
            raise ValueError("an array needs at least one antenna")
        if not np.all(np.isfinite(pos)):
            raise ValueError("antenna positions must be finite")
        if not (self.wavelength > 0 and math.isfinite(self.wavelength)):
            raise ValueError("wavelength must be positive")
        if pos.shape[0] > 1:
            diff = pos[:, None, :] - pos[None, :, :]
            dist = np.linalg.norm(diff, axis=-1)
            np.fill_diagonal(dist, np.inf)
            if dist.min() <= 0.0:
                raise ValueError("antenna positions must be distinct")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "wavelength", float(self.wavelength))

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    def translated(self, offset) -> "ArrayTopology":
        return ArrayTopology(self.positions + np.asarray(offset, float), self.wavelength, self.kind)

    def rotated(self, rotation) -> "ArrayTopology":
        return ArrayTopology(self.positions @ np.asarray(rotation, float).T, self.wavelength, self.kind)

    def generic(self) -> "ArrayTopology":
        """Same positions without the grid shortcut."""
        return ArrayTopology(self.positions, self.wavelength, self.kind)

    def pairwise_distances(self) -> np.ndarray:
        diff = self.positions[:, None, :] - self.positions[None, :, :]
        return np.linalg.norm(diff, axis=-1)


def _check_args(n, spacing, wavelength, n_min=1):
    if int(n) != n or n < n_min:
        raise ValueError(f"antenna count must be an integer >= {n_min}, got {n}")
    if not spacing > 0:
        raise ValueError("spacing must be positive")
    if not wavelength > 0:
        raise ValueError("wavelength must be positive")


def _centered(pos: np.ndarray) -> np.ndarray:
    return pos - pos.mean(axis=0)


def make_ula(n: int, spacing: float, wavelength: float = 1.0) -> ArrayTopology:
    """Uniform linear array along the x axis, centred on the origin."""
    _check_args(n, spacing, wavelength)
    x = (np.arange(n) - (n - 1) / 2.0) * spacing
    pos = np.column_stack([x, np.zeros(n), np.zeros(n)])
    return ArrayTopology(pos, wavelength, "ula", (float(spacing), (int(n), 1)))


def make_uca(n: int, spacing: float, wavelength: float = 1.0) -> ArrayTopology:
    """Uniform circular array in the xy plane.

    ``spacing`` is the chord between neighbouring elements, so the radius is
    ``spacing / (2 sin(pi/n))``.
    """
    _check_args(n, spacing, wavelength, n_min=2)
    radius = spacing / (2.0 * math.sin(math.pi / n))
    theta = 2.0 * np.pi * np.arange(n) / n
    pos = np.column_stack([radius * np.cos(theta), radius * np.sin(theta), np.zeros(n)])
    return ArrayTopology(pos, wavelength, "uca")


def upa_shape(n: int) -> tuple[int, int]:
    """Near-square ``(rows, cols)`` with ``rows`` the largest divisor <= sqrt(n)."""
    rows = max(d for d in range(1, math.isqrt(n) + 1) if n % d == 0)
    return rows, n // rows


def make_upa(n: int, spacing: float, wavelength: float = 1.0) -> ArrayTopology:
    """Uniform planar array in the xy plane; prime ``n`` gives a 1 x n line."""
    _check_args(n, spacing, wavelength)
    rows, cols = upa_shape(n)
    yy, xx = np.meshgrid(np.arange(rows) * spacing, np.arange(cols) * spacing, indexing="ij")
    pos = np.column_stack([xx.ravel(), yy.ravel(), np.zeros(n)])
    return ArrayTopology(_centered(pos), wavelength, "upa", (float(spacing), (cols, rows)))


ARRAY_TYPES = {"ula": make_ula, "uca": make_uca, "upa": make_upa}


def make_array(kind: str, n: int, spacing: float, wavelength: float = 1.0) -> ArrayTopology:
    """Dispatch on ``kind`` in ``{"ula", "uca", "upa"}``.

    A one-element "uca" is returned as a single antenna at the origin.
    """
    kind = kind.lower()
    if kind not in ARRAY_TYPES:
        raise ValueError(f"unknown array type {kind!r}, expected one of {sorted(ARRAY_TYPES)}")
    if kind == "uca" and n == 1:
        _check_args(n, spacing, wavelength)
        return ArrayTopology(np.zeros((1, 3)), wavelength, "uca")
    return ARRAY_TYPES[kind](n, spacing, wavelength)


def steering_vectors(topology: ArrayTopology, directions: np.ndarray) -> np.ndarray:
    """Steering vectors for a batch of unit directions.

    ``directions`` has shape ``(..., 3)``; the result has shape ``(..., N)``
    with entries ``exp(2j pi a_i . u / lambda) / sqrt(N)``.  Directions are
    not re-validated here; use :func:`steering_vector` for checked input.
    """
    phase = (2.0 * np.pi / topology.wavelength) * (directions @ topology.positions.T)
    return np.exp(1j * phase) / math.sqrt(topology.n)


def steering_vector(topology: ArrayTopology, direction) -> np.ndarray:
    d = check_unit(direction)
    if d.shape != (3,):
        raise ValueError("steering_vector takes a single direction")
    return steering_vectors(topology, d)


def steering_correlation(topology: ArrayTopology, d1, d2) -> float:
    """``|<e(d1), e(d2)>|^2``, in ``[0, 1]``."""
    e1 = steering_vector(topology, d1)
    e2 = steering_vector(topology, d2)
    return float(abs(np.vdot(e1, e2)) ** 2)


def _dirichlet(psi: np.ndarray, n: int) -> np.ndarray:
    """``sum_{i<n} exp(j psi (i - (n-1)/2)) = sin(n psi/2) / sin(psi/2)``."""
    if n == 1:
        return np.ones_like(psi)
    half = 0.5 * psi
    s = np.sin(half)
    small = np.abs(s) < 1e-6
    out = np.sin(n * half) / np.where(small, 1.0, s)
    if small.any():
        out = np.where(small, n * np.cos(n * half) / np.cos(half), out)
    return out


def array_factor(topology: ArrayTopology, delta: np.ndarray) -> np.ndarray:
    """``sum_i exp(2j pi a_i . delta / lambda)`` over rows of ``delta``.

    Grid arrays use a product of Dirichlet kernels (real valued since the
    grid is centred); other arrays sum over the elements.
    """
    k = 2.0 * np.pi / topology.wavelength
    if topology.lattice is not None:
        spacing, (nx, ny) = topology.lattice
        out = _dirichlet(k * spacing * delta[..., 0], nx)
        if ny > 1:
            out = out * _dirichlet(k * spacing * delta[..., 1], ny)
        return out
    return np.exp(1j * k * (delta @ topology.positions.T)).sum(axis=-1)


def pair_correlations(topology: ArrayTopology, d1: np.ndarray, d2: np.ndarray) -> np.ndarray:
    """Vectorised ``|<e(d1), e(d2)>|^2`` over rows of ``d1``, ``d2``.

    Evaluated through the phase of the direction difference, so identical
    directions give exactly 1.
    """
    s = array_factor(topology, d1 - d2)
    if np.iscomplexobj(s):
        return (s.real**2 + s.imag**2) / topology.n**2
    return s * s / topology.n**2
