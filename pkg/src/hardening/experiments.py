"""Parameter sweeps behind the ``fig1``..``fig4`` commands.

Every sweep point draws from its own stream ``SeedSpec(seed, k)`` where
``k`` is the point's position in the sweep, so tables are reproducible
point by point.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from . import __version__
from .config import SweepConfig
from .geometry import make_array
from .montecarlo import SeedSpec, run_blocks
from .rays import ComplexGaussianGains, EqualPowerGains, RayDistribution
from .stats import cv2_illustration, e2_estimate, rayleigh_cv2, rayleigh_gain_samples, simulate_cv2

__all__ = [
    "ResultTable",
    "COLUMNS",
    "run_fig1",
    "run_fig2",
    "run_fig3",
    "run_fig4",
    "run_rayleigh",
    "run_experiment",
]

COLUMNS = {
    "cv2-vs-antennas": ("n_antennas", "p_rays", "cv2_mc", "ci_half", "asymptote"),
    "e2-vs-spacing": ("array_type", "spacing_over_lambda", "n_e2", "ci_half"),
    "e2-vs-antennas": ("array_type", "n_antennas", "e2", "ci_half", "inv_n"),
    "cv2-vs-formula": ("n_antennas", "p_rays", "cv2_mc", "ci_half", "cv2_formula", "rel_gap"),
    "rayleigh-baseline": ("n_antennas", "correlation", "cv2_mc", "ci_half", "cv2_exact"),
}


@dataclass
class ResultTable:
    config: SweepConfig
    columns: tuple[str, ...]
    rows: list[tuple]

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def header_lines(self) -> list[str]:
        cfg = self.config
        return [
            "# hardening experiment output",
            f"# artifact_version: {__version__}",
            f"# experiment: {cfg.experiment}",
            f"# config_hash: {cfg.config_hash()}",
            f"# master_seed: {cfg.seed}",
            f"# trials: {cfg.trials}",
            "# config: " + ";".join(cfg.canonical().splitlines()),
        ]

    def to_csv(self) -> str:
        out = io.StringIO()
        for line in self.header_lines():
            out.write(line + "\n")
        out.write(",".join(self.columns) + "\n")
        for row in self.rows:
            out.write(",".join(_cell(v) for v in row) + "\n")
        return out.getvalue()


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _distribution(cfg: SweepConfig) -> RayDistribution:
    if cfg.gain_law == "equal-power":
        return RayDistribution(EqualPowerGains(cfg.gain_variance))
    return RayDistribution(ComplexGaussianGains(cfg.gain_variance))


def _array(cfg: SweepConfig, kind: str, n: int, spacing_over_lambda: float):
    return make_array(kind, n, spacing_over_lambda * cfg.wavelength, cfg.wavelength)


def _cv2_points(cfg: SweepConfig, workers):
    dist = _distribution(cfg)
    kind = cfg.array_types[0]
    k = 0
    for n in cfg.n_antennas:
        arr = _array(cfg, kind, n, cfg.spacing)
        for p in cfg.p_rays:
            est = simulate_cv2(dist, p, arr, arr, cfg.trials, SeedSpec(cfg.seed, k), workers)
            k += 1
            yield n, p, est


def run_fig1(cfg: SweepConfig, workers: int | None = None) -> ResultTable:
    """Monte-Carlo CV^2 against square array size, one curve per ray count."""
    _expect(cfg, "cv2-vs-antennas")
    rows = [(n, p, est.mean, est.ci_half_width, 1.0 / p) for n, p, est in _cv2_points(cfg, workers)]
    return ResultTable(cfg, COLUMNS[cfg.experiment], rows)


def run_fig4(cfg: SweepConfig, workers: int | None = None) -> ResultTable:
    """Monte-Carlo CV^2 next to ``(1 - 1/P)/(Nt Nr) + 1/P``."""
    _expect(cfg, "cv2-vs-formula")
    rows = []
    for n, p, est in _cv2_points(cfg, workers):
        formula = cv2_illustration(n, n, p)
        rows.append((n, p, est.mean, est.ci_half_width, formula, (est.mean - formula) / formula))
    return ResultTable(cfg, COLUMNS[cfg.experiment], rows)


def run_fig2(cfg: SweepConfig, workers: int | None = None) -> ResultTable:
    """``N * E^2`` against element spacing (asymptote 1)."""
    _expect(cfg, "e2-vs-spacing")
    n = cfg.n_antennas[0]
    rows = []
    k = 0
    for kind in cfg.array_types:
        for s in cfg.spacings:
            est = e2_estimate(_array(cfg, kind, n, s), trials=cfg.trials, seed=SeedSpec(cfg.seed, k), workers=workers)
            k += 1
            rows.append((kind, s, n * est.mean, n * est.ci_half_width))
    return ResultTable(cfg, COLUMNS[cfg.experiment], rows)


def run_fig3(cfg: SweepConfig, workers: int | None = None) -> ResultTable:
    """``E^2`` against array size at fixed spacing, with the ``1/N`` law."""
    _expect(cfg, "e2-vs-antennas")
    rows = []
    k = 0
    for kind in cfg.array_types:
        for n in cfg.n_antennas:
            est = e2_estimate(
                _array(cfg, kind, n, cfg.spacing), trials=cfg.trials, seed=SeedSpec(cfg.seed, k), workers=workers
            )
            k += 1
            rows.append((kind, n, est.mean, est.ci_half_width, 1.0 / n))
    return ResultTable(cfg, COLUMNS[cfg.experiment], rows)


def exponential_correlation(n: int, rho: float) -> np.ndarray:
    idx = np.arange(n)
    return rho ** np.abs(idx[:, None] - idx[None, :]).astype(float)


def run_rayleigh(cfg: SweepConfig, workers: int | None = None) -> ResultTable:
    """Correlated Rayleigh baseline ``R[i, k] = rho^|i-k|``: MC against ``Tr(R^2)/Tr(R)^2``."""
    _expect(cfg, "rayleigh-baseline")
    rows = []
    for k, n in enumerate(cfg.n_antennas):
        r = cfg.gain_variance * exponential_correlation(n, cfg.correlation)
        acc = run_blocks(lambda rng, count: rayleigh_gain_samples(r, rng, count), cfg.trials, SeedSpec(cfg.seed, k), workers)
        est = acc[0].cv2_estimate()
        rows.append((n, cfg.correlation, est.mean, est.ci_half_width, rayleigh_cv2(r)))
    return ResultTable(cfg, COLUMNS[cfg.experiment], rows)


RUNNERS = {
    "cv2-vs-antennas": run_fig1,
    "e2-vs-spacing": run_fig2,
    "e2-vs-antennas": run_fig3,
    "cv2-vs-formula": run_fig4,
    "rayleigh-baseline": run_rayleigh,
}


def run_experiment(cfg: SweepConfig, workers: int | None = None) -> ResultTable:
    return RUNNERS[cfg.experiment](cfg, workers)


def _expect(cfg: SweepConfig, experiment: str):
    if cfg.experiment != experiment:
        raise ValueError(f"expected a {experiment!r} config, got {cfg.experiment!r}")
