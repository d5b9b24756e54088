"""Scenario configuration.

One JSON document per scenario.  Physical inputs are SI with the unit in the
field name (``fsr_hz`` is an ordinary frequency, ``tau_min_s`` a time);
everything is converted to normalized units (fsr = 2 pi) at this boundary.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, is_dataclass, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .gkp import CombParams
from .units import UnitSystem

KINDS = ("wigner", "gkp-state", "jsa", "jti", "hom-scan", "visibility-sweep", "ec-mc", "selftest")


@dataclass(frozen=True)
class CombConfig:
    fsr_hz: float = 19.2e9
    band_hz: float = 10.9e12
    tooth_width_hz: float = 19.2e9 / 20
    pump_linewidth_hz: float = 0.0
    peak_count: int = 20


@dataclass(frozen=True)
class CavityConfig:
    kind: str = "fabry_perot"
    reflectivity: float = 0.3
    beta2_s2: float | None = None        # None -> calibrated default
    birefringence_hz: float | None = None  # None -> calibrated default


@dataclass(frozen=True)
class FilterConfig:
    bandwidth_hz: float
    center_hz: float = 0.0
    shape: str = "rect"


@dataclass(frozen=True)
class GkpConfig:
    label: str = "+"
    envelope_band_hz: float = 8 * 19.2e9
    tooth_width_hz: float = 19.2e9 / 50
    order: str = "time_after_frequency"


@dataclass(frozen=True)
class NoiseConfig:
    kind: str = "gaussian"
    time_width_signal_s: float = 0.06 / 19.2e9
    time_width_idler_s: float = 0.09 / 19.2e9
    freq_width_hz: float = 0.0
    offsets: tuple = (0.0, 0.0, 0.0, 0.0)  # (t_s, t'_s, w_hz, w'_hz)
    uniform_window: float | None = None


@dataclass(frozen=True)
class ScanConfig:
    tau_min_s: float = -0.6 / 19.2e9
    tau_max_s: float = 0.6 / 19.2e9
    n_tau: int = 2401
    points_per_line: int = 16
    grid_points: int = 64      # per axis for 2-D grids (jsa, jti, wigner)
    reflectivities: tuple = (0.0, 0.3, 0.5, 0.7, 0.8, 0.9, 0.95)
    filters: tuple = ()


@dataclass(frozen=True)
class ScenarioConfig:
    kind: str = "hom-scan"
    comb: CombConfig = field(default_factory=CombConfig)
    cavity: CavityConfig = field(default_factory=CavityConfig)
    gkp: GkpConfig = field(default_factory=GkpConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    scan: ScanConfig = field(default_factory=ScanConfig)
    output: str = "out.csv"
    format: str = "csv"
    master_seed: int = 0
    trials: int = 10000
    workers: int = 1

    def validate(self) -> "ScenarioConfig":
        if self.kind not in KINDS:
            raise ConfigError(f"kind: unknown scenario {self.kind!r}")
        for path, v in _walk(self):
            positive = path.endswith(("fsr_hz", "band_hz", "tooth_width_hz", "bandwidth_hz",
                                      "n_tau", "points_per_line", "grid_points"))
            if positive and not (isinstance(v, (int, float)) and v > 0):
                raise ConfigError(f"{path}: must be positive (got {v!r})")
        if not 0 <= self.cavity.reflectivity < 1:
            raise ConfigError("cavity.reflectivity: must lie in [0, 1)")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format: unknown output format {self.format!r}")
        if self.trials < 1 or self.workers < 1:
            raise ConfigError("trials and workers must be >= 1")
        return self

    # conversions -------------------------------------------------------
    @property
    def units(self) -> UnitSystem:
        return UnitSystem(self.comb.fsr_hz)

    def comb_params(self) -> CombParams:
        u = self.units
        c = self.comb
        return CombParams(
            fsr=2 * np.pi,
            tooth_width=float(u.hz_to_norm(c.tooth_width_hz)),
            pump_width=float(u.hz_to_norm(c.pump_linewidth_hz)),
            phasematch_width=float(u.hz_to_norm(c.band_hz)) / (2 * np.sqrt(2)),
            peak_count=int(c.peak_count),
        )

    def cavity_model(self):
        from .biphoton import CavityModel
        from .hom import DEVICE_BETA2, DEVICE_BIREFRINGENCE

        c, u = self.cavity, self.units
        beta2 = DEVICE_BETA2 if c.beta2_s2 is None else c.beta2_s2 * self.comb.fsr_hz**2
        biref = (DEVICE_BIREFRINGENCE if c.birefringence_hz is None
                 else float(u.hz_to_norm(c.birefringence_hz)))
        return CavityModel(c.kind, c.reflectivity, beta2, biref)

    def filter_specs(self):
        from .hom import FilterSpec

        u = self.units
        return [FilterSpec(float(u.hz_to_norm(f.center_hz)), float(u.hz_to_norm(f.bandwidth_hz)),
                           f.shape) for f in self.scan.filters]

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1, sort_keys=True)

    def result_json(self) -> str:
        """Canonical JSON of the fields that can change results (hashed into provenance).

        Output location and worker count are run-time knobs and are left out,
        so identical physics gives byte-identical files.
        """
        return replace(self, output="", workers=1).to_json()


def _walk(obj, prefix=""):
    for f in fields(obj):
        v = getattr(obj, f.name)
        path = f"{prefix}{f.name}"
        if is_dataclass(v):
            yield from _walk(v, path + ".")
        elif isinstance(v, tuple) and v and is_dataclass(v[0]):
            for i, item in enumerate(v):
                yield from _walk(item, f"{path}[{i}].")
        else:
            yield path, v


_NESTED = {"comb": CombConfig, "cavity": CavityConfig, "gkp": GkpConfig,
           "noise": NoiseConfig, "scan": ScanConfig}


def _build(cls, data: dict, path: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{path or 'config'}: expected an object")
    known = {f.name: f for f in fields(cls)}
    unknown = set(data) - set(known)
    if unknown:
        raise ConfigError(f"{path or 'config'}: unknown field(s) {sorted(unknown)}")
    kw = {}
    for k, v in data.items():
        sub = f"{path}.{k}" if path else k
        if cls is ScenarioConfig and k in _NESTED:
            kw[k] = _build(_NESTED[k], v, sub)
        elif cls is ScanConfig and k == "filters":
            kw[k] = tuple(_build(FilterConfig, x, f"{sub}[{i}]") for i, x in enumerate(v))
        elif isinstance(v, list):
            kw[k] = tuple(v)
        else:
            kw[k] = v
    try:
        return cls(**kw)
    except TypeError as exc:
        raise ConfigError(f"{path or 'config'}: {exc}") from exc


def parse_config(text: str) -> ScenarioConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return _build(ScenarioConfig, data, "").validate()


def load_config(path) -> ScenarioConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return parse_config(text)


def with_overrides(cfg: ScenarioConfig, overrides: dict) -> ScenarioConfig:
    """Apply dotted-path overrides such as ``{"cavity.reflectivity": 0.5}``."""
    for key, value in overrides.items():
        if value is None:
            continue
        head, _, rest = key.partition(".")
        if rest:
            inner = getattr(cfg, head)
            cfg = replace(cfg, **{head: replace(inner, **{rest: value})})
        else:
            cfg = replace(cfg, **{head: value})
    return cfg.validate()
