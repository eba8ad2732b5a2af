"""Plain-text experiment configs.

Grammar (one statement per line)::

    # comment, also allowed after a value
    [section]
    key = value

Values are numbers (``1``, ``2.5e-3``), booleans (``true``/``false``),
strings (bare words or ``"quoted"``), or flat lists ``[v1, v2, ...]``.
Keys before the first section header belong to ``[experiment]``. Sections:
``experiment``, ``initial_data``, ``integrator``, ``checks``. Every key and
default is listed in the ``_SCHEMA`` table below.

Parsing collects every problem (unknown key, bad value, missing required
key) with its line number and raises :class:`ConfigError` once.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, fields, replace

from .initial import KINDS, InitialData
from .integrate import SCHEMES
from .rhs import RHS_FORMS


class ConfigError(ValueError):
    def __init__(self, errors: list[str]):
        self.errors = errors
        super().__init__("\n".join(errors))


@dataclass(frozen=True)
class IntegratorSettings:
    scheme: str = "rk4"
    adaptive: bool = False
    cfl_safety: float = 0.5
    dealias: bool = True
    form: str = "convective"
    blowup_growth: float = 10.0
    blowup_norm_threshold: float | None = None
    dt_floor: float = 1e-10


@dataclass(frozen=True)
class Checks:
    momentum_tol: float = 1e-9
    energy_tol: float = 1e-6
    trip_margin: float = 0.1
    envelope_tol: float = 1e-3
    symmetry_tol: float = 1e-10
    slope_min: float = 0.85
    slope_max: float = 1.15
    speed_tol: float = 0.02
    shape_tol: float = 0.05


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    dim: int
    points: int
    t_end: float
    dt: float
    alpha: float | tuple[float, ...] = 1.0
    length: float = 2 * math.pi
    output_dir: str = "runs"
    sample_stride: int = 1
    initial_data: InitialData = field(default_factory=InitialData)
    integrator: IntegratorSettings = field(default_factory=IntegratorSettings)
    checks: Checks = field(default_factory=Checks)

    @property
    def is_sweep(self) -> bool:
        return isinstance(self.alpha, tuple)


REQUIRED = ("name", "dim", "points", "t_end", "dt")

# section -> key -> (type, check or None, message)
_pos = (lambda v: v > 0, "must be > 0")
_nonneg = (lambda v: v >= 0, "must be >= 0")
_SCHEMA: dict[str, dict[str, tuple]] = {
    "experiment": {
        "name": (str, None),
        "dim": (int, (lambda v: v in (1, 2), "must be 1 or 2")),
        "points": (int, (lambda v: v >= 8 and v & (v - 1) == 0, "must be a power of two >= 8")),
        "length": (float, _pos),
        "alpha": ("alpha", _nonneg),
        "t_end": (float, _pos),
        "dt": (float, _pos),
        "output_dir": (str, None),
        "sample_stride": (int, (lambda v: v >= 1, "must be >= 1")),
    },
    "initial_data": {
        "kind": (str, (lambda v: v in KINDS, f"must be one of {', '.join(KINDS)}")),
        "amplitude": (float, _nonneg),
        "sigma": (float, _pos),
        "seed": (int, (lambda v: 0 <= v < 2**64, "must be an unsigned 64-bit integer")),
        "band": (int, (lambda v: v >= 1, "must be >= 1")),
        "speed": (float, _nonneg),
        "smoothing": (float, _pos),
    },
    "integrator": {
        "scheme": (str, (lambda v: v in SCHEMES, f"must be one of {', '.join(SCHEMES)}")),
        "adaptive": (bool, None),
        "cfl_safety": (float, (lambda v: 0 < v <= 1, "must lie in (0, 1]")),
        "dealias": (bool, None),
        "form": (str, (lambda v: v in RHS_FORMS, f"must be one of {', '.join(RHS_FORMS)}")),
        "blowup_growth": (float, (lambda v: v > 1, "must be > 1")),
        "blowup_norm_threshold": (float, _pos),
        "dt_floor": (float, _pos),
    },
    "checks": {f.name: (float, _pos) for f in fields(Checks)},
}

_NUM = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$|^[+-]?(inf|nan)$")


def _strip_comment(line: str) -> str:
    out, quoted = [], False
    for ch in line:
        if ch == '"':
            quoted = not quoted
        elif ch == "#" and not quoted:
            break
        out.append(ch)
    return "".join(out).strip()


def _atom(text: str):
    text = text.strip()
    if text.startswith('"') and text.endswith('"') and len(text) >= 2:
        return text[1:-1]
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    if _NUM.match(text):
        if re.fullmatch(r"[+-]?\d+", text):
            return int(text)
        return float(text)
    return text


def _value(text: str):
    text = text.strip()
    if text.startswith("["):
        if not text.endswith("]"):
            raise ValueError("unterminated list")
        body = text[1:-1].strip()
        return [] if not body else [_atom(t) for t in body.split(",")]
    return _atom(text)


def _coerce(kind, raw):
    if kind == "alpha":
        if isinstance(raw, list):
            if not raw:
                raise ValueError("empty list")
            return tuple(_coerce(float, v) for v in raw)
        return _coerce(float, raw)
    if isinstance(raw, list):
        raise ValueError("a list is not allowed here")
    if kind is bool:
        if not isinstance(raw, bool):
            raise ValueError("expected true or false")
        return raw
    if kind is int:
        if isinstance(raw, bool) or not isinstance(raw, int):
            raise ValueError("expected an integer")
        return raw
    if kind is float:
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise ValueError("expected a number")
        if not math.isfinite(raw):
            raise ValueError("expected a finite number")
        return float(raw)
    return str(raw)


def _check(check, value) -> bool:
    values = value if isinstance(value, tuple) else (value,)
    return all(check[0](v) for v in values)


def parse_config(text: str) -> ExperimentConfig:
    errors: list[str] = []
    found: dict[str, dict[str, object]] = {s: {} for s in _SCHEMA}
    section = "experiment"
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw_line)
        if not line:
            continue
        if line.startswith("["):
            name = line.strip("[]").strip()
            if not line.endswith("]") or name not in _SCHEMA:
                errors.append(f"line {lineno}: unknown section {line!r}")
                section = None
            else:
                section = name
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected 'key = value'")
            continue
        key, _, rhs = (p.strip() for p in line.partition("="))
        if section is None:
            continue
        entry = _SCHEMA[section].get(key)
        if entry is None:
            errors.append(f"line {lineno}: unknown key '{key}' in [{section}]")
            continue
        if key in found[section]:
            errors.append(f"line {lineno}: duplicate key '{key}'")
            continue
        kind, check = entry
        try:
            value = _coerce(kind, _value(rhs))
        except ValueError as exc:
            errors.append(f"line {lineno}: bad value for '{key}': {exc}")
            continue
        if check is not None and not _check(check, value):
            errors.append(f"line {lineno}: '{key}' out of range ({rhs}): {check[1]}")
            continue
        found[section][key] = value

    for key in REQUIRED:
        if key not in found["experiment"]:
            errors.append(f"missing required key '{key}' in [experiment]")
    if errors:
        raise ConfigError(errors)

    exp = found["experiment"]
    cfg = ExperimentConfig(
        **exp,
        initial_data=InitialData(**found["initial_data"]),
        integrator=IntegratorSettings(**found["integrator"]),
        checks=Checks(**found["checks"]),
    )
    late = []
    if cfg.dt > cfg.t_end:
        late.append(f"dt={cfg.dt} exceeds t_end={cfg.t_end}")
    if late:
        raise ConfigError(late)
    return cfg


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, int):
        return str(value)
    return f'"{value}"'


def format_config(cfg: ExperimentConfig) -> str:
    """Canonical text form; ``parse_config(format_config(c)) == c``."""
    lines = ["[experiment]"]
    for f in fields(ExperimentConfig):
        if f.name in ("initial_data", "integrator", "checks"):
            continue
        lines.append(f"{f.name} = {_fmt(getattr(cfg, f.name))}")
    for section, obj in (
        ("initial_data", cfg.initial_data),
        ("integrator", cfg.integrator),
        ("checks", cfg.checks),
    ):
        lines.append("")
        lines.append(f"[{section}]")
        for f in fields(obj):
            value = getattr(obj, f.name)
            if value is None:
                continue
            lines.append(f"{f.name} = {_fmt(value)}")
    return "\n".join(lines) + "\n"


def with_overrides(cfg: ExperimentConfig, **changes) -> ExperimentConfig:
    return replace(cfg, **changes)
