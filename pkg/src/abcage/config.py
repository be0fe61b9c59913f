"""Run configurations: JSON (de)serialisation and the figure presets.

Complex numbers are written as ``[re, im]`` pairs, so a link variable is a
2x2 nested list of pairs.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .dynamics import DEFAULT_STEP, NoiseConfig, state_from_sites
from .errors import ConfigError
from .gauge_algebra import GaugeConfig
from .lattice import IonSpec, parse_site
from .lattice.encoding import SiteIndex

LINK_NAMES = ("u1", "u2", "u3", "u4")


@dataclass(frozen=True)
class RunConfig:
    gauge: GaugeConfig
    ion: IonSpec = field(default_factory=IonSpec)
    initial_state: tuple = ((SiteIndex(2, "A", "up"), 1 + 0j),)
    t_start: float = 0.0
    t_stop: float = 1.0
    samples: int = 201
    noise: Optional[NoiseConfig] = None
    step: float = DEFAULT_STEP
    name: str = "custom"
    trajectory_file: str = "trajectory.csv"
    report_file: str = "report.json"
    heatmap_file: Optional[str] = None

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_stop, self.samples)

    @property
    def lindblad(self) -> bool:
        return self.noise is not None and not self.noise.is_silent

    def initial_ket(self) -> np.ndarray:
        return state_from_sites(dict(self.initial_state), self.ion.n_max)

    def initial_spinor(self):
        """``(cell, spinor)`` when the initial state sits on one cell's A site,
        else None."""
        cells = {s.cell for s, _ in self.initial_state}
        if len(cells) != 1 or any(s.letter != "A" for s, _ in self.initial_state):
            return None
        chi = np.zeros(2, dtype=complex)
        for s, amp in self.initial_state:
            chi[0 if s.spin == "up" else 1] += amp
        return cells.pop(), chi / np.linalg.norm(chi)


def _complex(value, where: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(isinstance(v, (int, float)) for v in value):
        return complex(value[0], value[1])
    raise ConfigError(f"{where}: expected a number or [re, im] pair, got {value!r}", where)


def _pair(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def _matrix(value, where: str) -> np.ndarray:
    if not isinstance(value, (list, tuple)) or len(value) != 2 or any(len(row) != 2 for row in value):
        raise ConfigError(f"{where}: link must be a 2x2 array of [re, im] pairs", where)
    return np.array([[_complex(v, where) for v in row] for row in value])


def _number(section: dict, key: str, where: str, default=None, kind=float):
    if key not in section:
        if default is None:
            raise ConfigError(f"{where}.{key}: missing", f"{where}.{key}")
        return default
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key}: expected a number, got {value!r}", f"{where}.{key}")
    if kind is int and value != int(value):
        raise ConfigError(f"{where}.{key}: expected an integer, got {value!r}", f"{where}.{key}")
    return kind(value)


def config_from_dict(data: dict) -> RunConfig:
    """Parse a JSON-style mapping. Raises :class:`ConfigError` naming the field."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    g = data.get("gauge")
    if not isinstance(g, dict):
        raise ConfigError("gauge: missing section", "gauge")
    links = [_matrix(g.get(k), f"gauge.{k}") for k in LINK_NAMES]
    try:
        gauge = GaugeConfig(
            *links,
            hopping_J_over_h=_number(g, "hopping_J_over_h", "gauge", 2.5),
            mode=g.get("mode", "ion"),
        )
    except ValueError as exc:
        raise ConfigError(f"gauge: {exc}", "gauge") from exc

    i = data.get("ion", {})
    try:
        ion = IonSpec(
            eta=_number(i, "eta", "ion", 0.1),
            omega_trap=_number(i, "omega_trap", "ion", IonSpec.omega_trap),
            n_max=_number(i, "n_max", "ion", 15, int),
            n_detect=_number(i, "n_detect", "ion", 7, int),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"ion: {exc}", "ion") from exc

    raw_state = data.get("initial_state")
    if not isinstance(raw_state, list) or not raw_state:
        raise ConfigError("initial_state: expected a non-empty list of [site, amplitude]", "initial_state")
    state = []
    for k, entry in enumerate(raw_state):
        where = f"initial_state[{k}]"
        if not isinstance(entry, (list, tuple)) or len(entry) != 2 or not isinstance(entry[0], str):
            raise ConfigError(f"{where}: expected [site label, amplitude]", where)
        try:
            site = parse_site(entry[0])
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}", where) from exc
        state.append((site, _complex(entry[1], where)))

    t = data.get("time", {})
    noise = data.get("noise")
    if noise is not None:
        try:
            noise = NoiseConfig(
                nbar_dot=_number(noise, "nbar_dot", "noise", 0.0),
                t2_motion=_number(noise, "t2_motion", "noise", 0.0),
                t2_spin=_number(noise, "t2_spin", "noise", 0.0),
            )
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"noise: {exc}", "noise") from exc

    out = data.get("outputs", {})
    cfg = RunConfig(
        gauge=gauge,
        ion=ion,
        initial_state=tuple(state),
        t_start=_number(t, "start", "time", 0.0),
        t_stop=_number(t, "stop", "time", 1.0),
        samples=_number(t, "samples", "time", 201, int),
        noise=noise,
        step=_number(data, "step", "config", DEFAULT_STEP),
        name=str(data.get("name", "custom")),
        trajectory_file=out.get("trajectory", "trajectory.csv"),
        report_file=out.get("report", "report.json"),
        heatmap_file=out.get("heatmap"),
    )
    if cfg.samples < 2 or not cfg.t_stop > cfg.t_start:
        raise ConfigError("time: need stop > start and at least 2 samples", "time")
    if cfg.step <= 0:
        raise ConfigError("step: must be positive", "step")
    return cfg


def config_to_dict(cfg: RunConfig) -> dict:
    g = cfg.gauge
    out = {
        "name": cfg.name,
        "gauge": {k: [[_pair(z) for z in row] for row in getattr(g, k)] for k in LINK_NAMES},
        "ion": {
            "eta": cfg.ion.eta,
            "omega_trap": cfg.ion.omega_trap,
            "n_max": cfg.ion.n_max,
            "n_detect": cfg.ion.n_detect,
        },
        "initial_state": [[s.label, _pair(a)] for s, a in cfg.initial_state],
        "time": {"start": cfg.t_start, "stop": cfg.t_stop, "samples": cfg.samples},
        "noise": None
        if cfg.noise is None
        else {"nbar_dot": cfg.noise.nbar_dot, "t2_motion": cfg.noise.t2_motion, "t2_spin": cfg.noise.t2_spin},
        "step": cfg.step,
        "outputs": {"trajectory": cfg.trajectory_file, "report": cfg.report_file, "heatmap": cfg.heatmap_file},
    }
    out["gauge"].update(hopping_J_over_h=g.hopping_J_over_h, mode=g.mode)
    return out


def load_config(path) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}", "config") from exc
    return config_from_dict(data)


# --- presets -----------------------------------------------------------------

_I = np.eye(2)
_X = np.array([[0, 1], [1, 0]])
_IX = np.array([[0, 1j], [1j, 0]])
_ROT = np.array([[0, 1], [-1, 0]])
_Z = np.diag([1, -1])

FIG5_NOISE = NoiseConfig(nbar_dot=0.2, t2_motion=35.0, t2_spin=40.0)

_LINKS = {
    "nilpotent": (_I, _X, _ROT, _I),
    "spreading": (_I, _IX, _ROT, _I),
    "asymmetric": (_I, _IX, _Z, _I),
    "kernel": (_I, _I, _Z, _I),
}

_UP2 = SiteIndex(2, "A", "up")
_DN2 = SiteIndex(2, "A", "down")
_R2 = 1 / math.sqrt(2)

_PRESET_TABLE = {
    "fig2a": ("nilpotent", ((_UP2, 1),), None),
    "fig2b": ("spreading", ((_UP2, 1),), None),
    "fig3a": ("asymmetric", ((_DN2, _R2), (_UP2, 1j * _R2)), None),
    "fig3b": ("asymmetric", ((_DN2, _R2), (_UP2, -1j * _R2)), None),
    "fig4a": ("kernel", ((_UP2, 1),), None),
    "fig4b": ("kernel", ((_DN2, 1),), None),
    "fig5a": ("nilpotent", ((_UP2, 1),), FIG5_NOISE),
    "fig5b": ("spreading", ((_UP2, 1),), FIG5_NOISE),
}

PRESET_NAMES = tuple(_PRESET_TABLE)


def preset(name: str, mode: str = "ion") -> RunConfig:
    """Expand a named figure preset. All use J/h = 2.5 kHz, eta = 0.1 and a
    2 MHz trap, over 0-1 ms."""
    if name not in _PRESET_TABLE:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}", "preset")
    links, state, noise = _PRESET_TABLE[name]
    gauge = GaugeConfig(*_LINKS[links], hopping_J_over_h=2.5, mode=mode)
    return RunConfig(
        gauge=gauge,
        ion=IonSpec(eta=0.1, omega_trap=2 * math.pi * 2e6, n_max=15, n_detect=7),
        initial_state=tuple((s, complex(a)) for s, a in state),
        noise=noise,
        name=name,
    )


def with_overrides(cfg: RunConfig, mode: str | None = None, no_noise: bool = False, svg: bool = False) -> RunConfig:
    if mode is not None:
        cfg = replace(cfg, gauge=cfg.gauge.with_mode(mode))
    if no_noise:
        cfg = replace(cfg, noise=None)
    if svg and cfg.heatmap_file is None:
        cfg = replace(cfg, heatmap_file="heatmap.svg")
    return cfg
