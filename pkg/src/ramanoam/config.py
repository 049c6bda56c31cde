"""Flat ``key = value unit`` run configuration.

Every dimensioned value carries a unit tag. Frequencies accept ``Gamma`` or
``MHz`` (read as Δ/2π and converted with Γ/2π = 5.2 MHz), lengths ``mm``,
``um`` or ``nm``, angles ``deg`` or ``rad``, times ``/Gamma``. Values are
stored canonically (Γ units, mm, degrees) and echoed the same way, so the
echo parses back to an identical configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ramanoam.bloch import GAMMA_MHZ, LambdaSystem
from ramanoam.errors import ConfigError, RamanOAMError

MODES = ("steady-state", "spectrum", "beam-gain", "tilted-lens", "full-pipeline")

_UNITS = {
    "freq": {"Gamma": lambda v: v, "MHz": lambda v: v / GAMMA_MHZ},
    "length": {"mm": lambda v: v, "um": lambda v: v / 1e3, "nm": lambda v: v / 1e6},
    "angle": {"deg": lambda v: v, "rad": math.degrees},
    "time": {"/Gamma": lambda v: v},
}
_CANONICAL = {"freq": "Gamma", "length": "mm", "angle": "deg", "time": "/Gamma"}


@dataclass(frozen=True)
class Key:
    kind: str  # freq, length, angle, time, real, int, choice
    default: object
    choices: tuple = ()
    auto: bool = False  # accepts the literal "auto" (stored as None)


SCHEMA = {
    "atomic.gamma_p": Key("freq", 0.05),
    "atomic.omega_c": Key("freq", 0.1),
    "atomic.omega_s": Key("freq", 0.02),
    "atomic.omega_s_phase": Key("angle", 0.0),
    "atomic.delta_c": Key("freq", 0.0),
    "atomic.delta": Key("freq", 0.0),
    "atomic.gamma_ba": Key("freq", 0.5),
    "medium.optical_density": Key("real", 3.0),
    "medium.coupling_waist": Key("length", 3.0),
    "medium.length": Key("length", 2.0),
    "spectrum.delta_min": Key("freq", -2.0),
    "spectrum.delta_max": Key("freq", 2.0),
    "spectrum.n_points": Key("int", 401),
    "spectrum.workers": Key("int", 1),
    "steady.rho0": Key("choice", "c", choices=("a", "b", "c")),
    "steady.t_end": Key("time", 1e6),
    "steady.tol": Key("real", 1e-10),
    "beam.ell": Key("int", 1),
    "beam.p": Key("int", 0),
    "beam.waist": Key("length", 0.5),
    "beam.power": Key("real", 1.0),
    "beam.wavelength": Key("length", 852e-6),
    "grid.n": Key("int", 512),
    "grid.window": Key("length", 12.0),
    "diagnostic.tilt": Key("angle", 10.0),
    "diagnostic.focal": Key("length", None, auto=True),
    "diagnostic.observe_z": Key("length", None, auto=True),
    "diagnostic.lens_distance": Key("length", 0.0),
    "diagnostic.threshold": Key("real", 0.1),
    "diagnostic.prominence": Key("real", 0.05),
    "decomposition.max_ell": Key("int", 6),
    "decomposition.max_p": Key("int", 8),
}


@dataclass
class RunConfig:
    mode: str
    values: dict
    defaulted: tuple = field(default_factory=tuple)

    def __getitem__(self, key):
        return self.values[key]

    def system(self) -> LambdaSystem:
        """Atomic parameters at the configured two-photon detuning."""
        v = self.values
        omega_s = v["atomic.omega_s"] * complex(
            math.cos(math.radians(v["atomic.omega_s_phase"])),
            math.sin(math.radians(v["atomic.omega_s_phase"])),
        )
        return LambdaSystem.from_two_photon(
            delta_c=v["atomic.delta_c"], delta=v["atomic.delta"],
            gamma_p=v["atomic.gamma_p"], omega_c=v["atomic.omega_c"],
            omega_s=omega_s, gamma_ba=v["atomic.gamma_ba"],
        )

    def echo(self) -> dict:
        """Canonical ``key -> "value unit"`` strings."""
        return {k: format_value(k, self.values[k]) for k in SCHEMA}

    def to_text(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in self.echo().items())


def format_value(key, value):
    spec = SCHEMA[key]
    if value is None:
        return "auto"
    if spec.kind in _CANONICAL:
        return f"{value!r} {_CANONICAL[spec.kind]}"
    if spec.kind == "real":
        return repr(float(value))
    return str(value)


def _parse_value(key, raw, line):
    spec = SCHEMA[key]
    text = raw.strip()
    if spec.auto and text == "auto":
        return None
    if spec.kind == "choice":
        if text not in spec.choices:
            raise ConfigError(f"expected one of {', '.join(spec.choices)}, got {text!r}",
                              line=line, key=key)
        return text
    if spec.kind == "int":
        try:
            return int(text)
        except ValueError:
            raise ConfigError(f"expected an integer, got {text!r}", line=line, key=key) from None
    if spec.kind == "real":
        parts = text.split()
        if len(parts) != 1:
            raise ConfigError(f"dimensionless value takes no unit, got {text!r}",
                              line=line, key=key)
        return _number(parts[0], key, line)
    parts = text.split()
    units = _UNITS[spec.kind]
    if len(parts) != 2:
        raise ConfigError(
            f"expected '<number> <unit>' with unit in {sorted(units)}, got {text!r}",
            line=line, key=key,
        )
    if parts[1] not in units:
        raise ConfigError(f"unit {parts[1]!r} not in {sorted(units)}", line=line, key=key)
    return units[parts[1]](_number(parts[0], key, line))


def _number(text, key, line):
    try:
        v = float(text)
    except ValueError:
        raise ConfigError(f"not a number: {text!r}", line=line, key=key) from None
    if not math.isfinite(v):
        raise ConfigError("value must be finite", line=line, key=key)
    return v


def _split_lines(text):
    entries = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected 'key = value', got {body!r}", line=lineno)
        key, raw = (s.strip() for s in body.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError("unknown key", line=lineno, key=key)
        if key in entries:
            raise ConfigError("duplicate key", line=lineno, key=key)
        entries[key] = (raw, lineno)
    return entries


def parse_config(text: str, mode: str = "full-pipeline", overrides=()) -> RunConfig:
    """Parse and validate configuration text.

    ``overrides`` are ``key=value`` strings that replace file entries.
    """
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    entries = _split_lines(text)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must be key=value, got {item!r}")
        key, raw = (s.strip() for s in item.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError("unknown key in override", key=key)
        entries[key] = (raw, None)
    values, defaulted = {}, []
    for key, spec in SCHEMA.items():
        if key in entries:
            raw, line = entries[key]
            values[key] = _parse_value(key, raw, line)
        else:
            values[key] = spec.default
            defaulted.append(key)
    cfg = RunConfig(mode, values, tuple(defaulted))
    validate(cfg, {k: ln for k, (_, ln) in entries.items()})
    return cfg


def _require(cond, key, msg, lines):
    if not cond:
        raise ConfigError(msg, line=lines.get(key), key=key)


def validate(cfg: RunConfig, lines=None):
    """Re-check module invariants, naming the offending key."""
    lines = lines or {}
    v = cfg.values
    for key in ("atomic.gamma_p", "atomic.omega_c", "atomic.omega_s"):
        _require(v[key] >= 0, key, "must be >= 0", lines)
    _require(0 <= v["atomic.gamma_ba"] <= 1, "atomic.gamma_ba", "must lie in [0, 1] Gamma", lines)
    _require(v["medium.optical_density"] >= 0, "medium.optical_density", "must be >= 0", lines)
    for key in ("medium.coupling_waist", "medium.length", "beam.waist", "beam.power",
                "beam.wavelength", "grid.window", "steady.t_end", "steady.tol"):
        _require(v[key] > 0, key, "must be > 0", lines)
    _require(v["spectrum.delta_max"] >= v["spectrum.delta_min"], "spectrum.delta_max",
             "must be >= spectrum.delta_min", lines)
    _require(v["spectrum.n_points"] >= 2, "spectrum.n_points", "must be >= 2", lines)
    _require(v["spectrum.workers"] >= 1, "spectrum.workers", "must be >= 1", lines)
    _require(v["beam.p"] >= 0, "beam.p", "must be >= 0", lines)
    n = v["grid.n"]
    _require(n >= 64 and n & (n - 1) == 0, "grid.n", "must be a power of two >= 64", lines)
    _require(v["grid.window"] >= 6 * v["beam.waist"], "grid.window",
             "must span at least 6x beam.waist", lines)
    _require(2 * v["beam.waist"] >= 8 * v["grid.window"] / n, "beam.waist",
             "must span at least 8 grid samples", lines)
    _require(0 < v["diagnostic.tilt"] < 45, "diagnostic.tilt", "must lie in (0, 45) deg", lines)
    for key in ("diagnostic.focal", "diagnostic.observe_z"):
        _require(v[key] is None or v[key] > 0, key, "must be > 0 or auto", lines)
    _require(v["diagnostic.lens_distance"] >= 0, "diagnostic.lens_distance", "must be >= 0", lines)
    for key in ("diagnostic.threshold", "diagnostic.prominence"):
        _require(0 < v[key] < 1, key, "must lie in (0, 1)", lines)
    _require(v["decomposition.max_ell"] >= 0, "decomposition.max_ell", "must be >= 0", lines)
    _require(v["decomposition.max_p"] >= 0, "decomposition.max_p", "must be >= 0", lines)
    _require(abs(v["beam.ell"]) <= v["decomposition.max_ell"], "decomposition.max_ell",
             "must cover |beam.ell|", lines)
    try:
        cfg.system()
    except RamanOAMError as exc:
        raise ConfigError(str(exc), key="atomic") from None
    return cfg
