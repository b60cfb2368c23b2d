"""Flat ``key = value`` experiment configuration files."""

from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass

__all__ = ["ConfigError", "SweepConfig", "EXPERIMENTS", "parse_config", "load_config", "default_config"]

#: CLI subcommand -> experiment name.
EXPERIMENTS = {
    "fig1": "cv2-vs-antennas",
    "fig2": "e2-vs-spacing",
    "fig3": "e2-vs-antennas",
    "fig4": "cv2-vs-formula",
    "rayleigh": "rayleigh-baseline",
}

GAIN_LAWS = ("gaussian", "equal-power")
DIRECTION_LAWS = ("uniform-sphere",)
ARRAY_KINDS = ("ula", "uca", "upa")

_DEFAULTS = {
    "cv2-vs-antennas": dict(trials=100_000, n_antennas=(1, 2, 4, 8, 16, 32, 64), p_rays=(2, 4, 5, 6)),
    "e2-vs-spacing": dict(
        trials=1_000_000,
        n_antennas=(16,),
        array_types=ARRAY_KINDS,
        spacings=(0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.75, 1.0, 1.5, 2.0),
    ),
    "e2-vs-antennas": dict(trials=1_000_000, n_antennas=(1, 2, 4, 8, 16, 32, 64), array_types=ARRAY_KINDS),
    "cv2-vs-formula": dict(trials=100_000, n_antennas=(1, 2, 4, 8, 16), p_rays=(1, 2, 4, 5, 6)),
    "rayleigh-baseline": dict(trials=100_000, n_antennas=(1, 2, 4, 8, 16, 32, 64)),
}

#: Which field each experiment sweeps.
SWEPT_AXIS = {
    "cv2-vs-antennas": "n_antennas",
    "e2-vs-spacing": "spacings",
    "e2-vs-antennas": "n_antennas",
    "cv2-vs-formula": "n_antennas",
    "rayleigh-baseline": "n_antennas",
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    experiment: str
    trials: int
    seed: int = 0
    n_antennas: tuple[int, ...] = (16,)
    p_rays: tuple[int, ...] = (2,)
    array_types: tuple[str, ...] = ("ula",)
    spacing: float = 0.5
    spacings: tuple[float, ...] = (0.5,)
    wavelength: float = 1.0
    gain_law: str = "gaussian"
    gain_variance: float = 1.0
    direction_law: str = "uniform-sphere"
    correlation: float = 0.0

    def __post_init__(self):
        validate(self)

    @property
    def swept_axis(self) -> str:
        return SWEPT_AXIS[self.experiment]

    def replace(self, **changes) -> "SweepConfig":
        return dataclasses.replace(self, **changes)

    def canonical(self) -> str:
        """Sorted ``key=value`` lines; the hash and file headers use this."""
        lines = []
        for f in sorted(dataclasses.fields(self), key=lambda f: f.name):
            lines.append(f"{f.name}={_format(getattr(self, f.name))}")
        return "\n".join(lines)

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]


def _format(value) -> str:
    if isinstance(value, tuple):
        return ",".join(_format(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def validate(cfg: SweepConfig) -> None:
    if cfg.experiment not in _DEFAULTS:
        raise ConfigError(f"experiment: unknown experiment {cfg.experiment!r}")
    if cfg.trials < 2:
        raise ConfigError("trials: must be >= 2")
    if not 0 <= cfg.seed < 2**64:
        raise ConfigError("seed: must be a 64-bit unsigned integer")
    if not cfg.n_antennas or any(n < 1 for n in cfg.n_antennas):
        raise ConfigError("n_antennas: values must be positive integers")
    if not cfg.p_rays or any(p < 1 for p in cfg.p_rays):
        raise ConfigError("p_rays: values must be positive integers")
    for kind in cfg.array_types:
        if kind not in ARRAY_KINDS:
            raise ConfigError(f"array_types: unknown array type {kind!r}")
    if not cfg.array_types:
        raise ConfigError("array_types: at least one array type required")
    if not cfg.spacing > 0 or any(not s > 0 for s in cfg.spacings):
        raise ConfigError("spacing: values must be positive")
    if not cfg.wavelength > 0:
        raise ConfigError("wavelength: must be positive")
    if cfg.gain_law not in GAIN_LAWS:
        raise ConfigError(f"gain_law: expected one of {GAIN_LAWS}")
    if not cfg.gain_variance > 0:
        raise ConfigError("gain_variance: must be positive")
    if cfg.direction_law not in DIRECTION_LAWS:
        raise ConfigError(f"direction_law: expected one of {DIRECTION_LAWS}")
    if not 0.0 <= cfg.correlation < 1.0:
        raise ConfigError("correlation: must lie in [0, 1)")
    axis = getattr(cfg, SWEPT_AXIS[cfg.experiment])
    if any(b <= a for a, b in zip(axis, axis[1:])):
        raise ConfigError(f"{SWEPT_AXIS[cfg.experiment]}: swept values must be strictly increasing")
    if cfg.experiment == "e2-vs-spacing" and len(cfg.n_antennas) != 1:
        raise ConfigError("n_antennas: e2-vs-spacing takes a single antenna count")
    if cfg.experiment in ("cv2-vs-antennas", "cv2-vs-formula") and len(cfg.array_types) != 1:
        raise ConfigError("array_types: CV^2 sweeps take a single array type")


_FIELDS = {f.name: f for f in dataclasses.fields(SweepConfig)}


def _convert(name: str, raw: str):
    kind = _FIELDS[name].type
    raw = raw.strip()
    try:
        if kind == "tuple[int, ...]":
            return tuple(int(v) for v in raw.split(",") if v.strip())
        if kind == "tuple[float, ...]":
            return tuple(float(v) for v in raw.split(",") if v.strip())
        if kind == "tuple[str, ...]":
            return tuple(v.strip().lower() for v in raw.split(",") if v.strip())
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{name}: cannot parse {raw!r} ({exc})") from None
    return raw


def default_config(experiment: str) -> SweepConfig:
    experiment = EXPERIMENTS.get(experiment, experiment)
    if experiment not in _DEFAULTS:
        raise ConfigError(f"experiment: unknown experiment {experiment!r}")
    return SweepConfig(experiment=experiment, **_DEFAULTS[experiment])


def parse_config(text: str, experiment: str | None = None, overrides: dict | None = None) -> SweepConfig:
    """Parse ``key = value`` lines (``#`` starts a comment) over the defaults.

    ``overrides`` maps field names to raw strings and is applied last.
    """
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _FIELDS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = _convert(key, raw)
        except ConfigError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
    for key, raw in (overrides or {}).items():
        if key not in _FIELDS:
            raise ConfigError(f"override: unknown key {key!r}")
        values[key] = _convert(key, raw) if isinstance(raw, str) else raw

    chosen = values.pop("experiment", None)
    if experiment is not None:
        experiment = EXPERIMENTS.get(experiment, experiment)
        if chosen is not None and chosen != experiment:
            raise ConfigError(f"experiment: file declares {chosen!r} but {experiment!r} was requested")
        chosen = experiment
    if chosen is None:
        raise ConfigError("experiment: not specified")
    base = default_config(str(chosen))
    try:
        return base.replace(**values)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path, experiment: str | None = None, overrides: dict | None = None) -> SweepConfig:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return parse_config(text, experiment, overrides)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
