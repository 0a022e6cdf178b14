"""
Run configs: flat TOML documents naming one command and its parameters.

Package defaults are a TOML table too; a run config only overrides what it
sets. Every violation is collected before anything is reported.
"""

import math
import tomllib
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Literal, get_args

from zaremba.geometry import Curve, Partition, PartitionError, make_disk, make_kite, make_trig_curve, pure_dirichlet, pure_neumann
from zaremba.types import Point
from zaremba.utils.inflect import inflect
from zaremba.validation import MAX_NODES_PER_ARC, MIN_CONTOUR_POINTS, MIN_NODES_PER_ARC, ValidationError

Command = Literal["eig-scan", "field-grid", "zaremba-eval", "optimize", "validate"]
CurveName = Literal["disk", "kite", "trig"]

DEFAULTS_TOML = """
curve = "disk"
radius = 1.0
nodes_per_arc = 64
grid_step = 0.01
grid_resolution = 101
max_iterations = 500
arcs = 1
derivative = "forward"
contour_points = 32
full_neumann = false
output_dir = "out"
"""
DEFAULTS: dict[str, Any] = tomllib.loads(DEFAULTS_TOML)


class ConfigError(Exception):
    """A run config with one or more problems."""

    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__(
            inflect(f"no('violation', {len(violations)}) in run config:\n")
            + "\n".join(f"  - {v}" for v in violations)
        )


@dataclass(frozen=True)
class RunConfig:
    command: Command
    curve: CurveName = "disk"
    radius: float = 1.0
    trig_x: tuple[float, ...] = ()
    trig_y: tuple[float, ...] = ()
    neumann_arcs: tuple[tuple[float, float], ...] = ()
    """(center arclength, half-length) of every Neumann arc"""

    full_neumann: bool = False
    k: float | None = None
    k_lo: float | None = None
    k_hi: float | None = None
    k_star: float | None = None
    c_tol: float | None = None
    eps0: float | None = None
    source: Point | None = None
    receiver: Point | None = None
    receiver_radii: tuple[float, ...] = ()
    """Table mode of optimize: receivers at (0, r) for every r"""

    nodes_per_arc: int = 64
    grid_step: float = 0.01
    grid_resolution: int = 101
    max_iterations: int = 500
    arcs: int = 1
    derivative: Literal["forward", "richardson", "analytic"] = "forward"
    contour_points: int = 32
    output_dir: str = "out"

    def build_curve(self) -> Curve:
        if self.curve == "disk":
            return make_disk(self.radius)
        if self.curve == "kite":
            return make_kite()
        return make_trig_curve(self.trig_x, self.trig_y)

    def build_partition(self, curve: Curve | None = None) -> Partition:
        curve = curve or self.build_curve()
        if self.full_neumann:
            return pure_neumann(curve)
        partition = pure_dirichlet(curve)
        for center_s, half_length in self.neumann_arcs:
            partition = partition.nucleate(center_s, half_length)
        return partition


REQUIRED: dict[str, tuple[str, ...]] = {
    "eig-scan": ("k_lo", "k_hi"),
    "field-grid": ("k", "source"),
    "zaremba-eval": ("k", "source", "receiver"),
    "optimize": ("k_star", "c_tol", "eps0", "source"),
    "validate": (),
}

_POSITIVE = ("radius", "k", "k_lo", "k_hi", "k_star", "c_tol", "eps0", "grid_step")
_POINTS = ("source", "receiver")
_INTEGERS = {
    "nodes_per_arc": (MIN_NODES_PER_ARC, MAX_NODES_PER_ARC),
    "grid_resolution": (2, 2001),
    "max_iterations": (1, 100_000),
    "arcs": (1, 16),
    "contour_points": (MIN_CONTOUR_POINTS, 1024),
}
_CHOICES: dict[str, tuple[str, ...]] = {
    "command": get_args(Command),
    "curve": get_args(CurveName),
    "derivative": ("forward", "richardson", "analytic"),
}


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _point(name: str, value: Any, violations: list[str]) -> Point | None:
    if isinstance(value, list) and len(value) == 2 and all(_is_number(v) for v in value):  # pyright: ignore[reportUnknownArgumentType, reportUnknownVariableType]
        return (float(value[0]), float(value[1]))
    violations.append(f"{name} must be a pair of numbers [x, y], got {value!r}")
    return None


def _numbers(name: str, value: Any, violations: list[str]) -> tuple[float, ...]:
    if isinstance(value, list) and all(_is_number(v) for v in value):  # pyright: ignore[reportUnknownVariableType]
        return tuple(float(v) for v in value)  # pyright: ignore[reportUnknownVariableType, reportUnknownArgumentType]
    violations.append(f"{name} must be an array of numbers, got {value!r}")
    return ()


def _arcs(value: Any, violations: list[str]) -> tuple[tuple[float, float], ...]:
    arcs: list[tuple[float, float]] = []
    if not isinstance(value, list):
        violations.append(f"neumann_arcs must be an array of [center_s, half_length] pairs, got {value!r}")
        return ()
    for i, item in enumerate(value):  # pyright: ignore[reportUnknownVariableType, reportUnknownArgumentType]
        pair = _point(f"neumann_arcs[{i}]", item, violations)
        if pair is None:
            continue
        if not pair[1] > 0:
            violations.append(f"neumann_arcs[{i}] needs a positive half-length, got {pair[1]}")
            continue
        arcs.append(pair)
    return tuple(arcs)


def parse_config(text: str) -> RunConfig:
    """
    Parse and validate a run config.

    Raises:
        ConfigError: Listing every problem found, not just the first

    Examples:
        >>> parse_config('command = "eig-scan"\\nk_lo = 2.0\\nk_hi = 6.0').nodes_per_arc
        64
        >>> parse_config('command = "optimize"\\nc_tol = -1.0')  # doctest: +IGNORE_EXCEPTION_DETAIL
        Traceback (most recent call last):
        ConfigError: 5 violations in run config: ...
    """
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError([f"not valid TOML: {e}"]) from e

    violations: list[str] = []
    known = {f.name for f in fields(RunConfig)}
    for key in sorted(raw.keys() - known):
        violations.append(f"unknown key {key!r}")
    values: dict[str, Any] = {**DEFAULTS, **{k: v for k, v in raw.items() if k in known}}

    for name, choices in _CHOICES.items():
        if name in values and values[name] not in choices:
            violations.append(f"{name} must be one of {', '.join(choices)}; got {values[name]!r}")
    if "command" not in values:
        violations.append("command is required")

    for name in _POSITIVE:
        value = values.get(name)
        if value is None:
            continue
        if not _is_number(value) or not math.isfinite(value) or value <= 0:
            violations.append(f"{name} must be a positive number, got {value!r}")
        else:
            values[name] = float(value)
    for name, (lo, hi) in _INTEGERS.items():
        value = values[name]
        if not isinstance(value, int) or isinstance(value, bool) or not lo <= value <= hi:
            violations.append(f"{name} must be an integer in [{lo}, {hi}], got {value!r}")
    if not isinstance(values["full_neumann"], bool):
        violations.append(f"full_neumann must be true or false, got {values['full_neumann']!r}")
    if not isinstance(values["output_dir"], str) or not values["output_dir"]:
        violations.append(f"output_dir must be a non-empty string, got {values['output_dir']!r}")

    for name in _POINTS:
        if name in values:
            values[name] = _point(name, values[name], violations)
    for name in ("trig_x", "trig_y", "receiver_radii"):
        if name in values:
            values[name] = _numbers(name, values[name], violations)
    if "neumann_arcs" in values:
        values["neumann_arcs"] = _arcs(values["neumann_arcs"], violations)

    command = values.get("command")
    for name in REQUIRED.get(command, ()) if isinstance(command, str) else ():
        if name not in raw:
            violations.append(f"{name} is required by the {command} command")
    if command == "optimize" and "receiver" not in raw and not raw.get("receiver_radii"):
        violations.append("optimize needs a receiver or receiver_radii")
    k_lo, k_hi = values.get("k_lo"), values.get("k_hi")
    if isinstance(k_lo, float) and isinstance(k_hi, float) and k_lo >= k_hi:
        violations.append(f"k_lo must be below k_hi, got [{k_lo}, {k_hi}]")
    if values.get("curve") == "trig" and not (values.get("trig_x") and values.get("trig_y")):
        violations.append("curve = \"trig\" needs trig_x and trig_y coefficients")
    if values.get("full_neumann") is True and values.get("neumann_arcs"):
        violations.append("full_neumann cannot be combined with neumann_arcs")

    if violations:
        raise ConfigError(violations)
    config = RunConfig(**values)
    _check_geometry(config)
    return config


def _check_geometry(config: RunConfig):
    """Checks that need the curve itself."""
    violations: list[str] = []
    try:
        curve = config.build_curve()
        config.build_partition(curve)
    except (ValidationError, PartitionError) as e:
        raise ConfigError([str(e)]) from e
    for name in _POINTS:
        point = getattr(config, name)
        if point is not None and not bool(curve.contains(complex(*point))):
            violations.append(f"{name} {point} is not inside the {curve.name}")
    for r in config.receiver_radii:
        if not bool(curve.contains(complex(0.0, r))):
            violations.append(f"receiver (0, {r:g}) from receiver_radii is not inside the {curve.name}")
    if config.eps0 is not None and config.eps0 >= curve.length / 20:
        violations.append(f"eps0 must stay below 1/20 of the boundary length ({curve.length:.6g})")
    if violations:
        raise ConfigError(violations)


def load_config(path: Path) -> RunConfig:
    """Read and parse a run config file."""
    return parse_config(path.read_text(encoding="utf-8"))


def _toml_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    return "[" + ", ".join(_toml_value(v) for v in value) + "]"


def format_config(config: RunConfig) -> str:
    """
    Write a config back as TOML; parse_config(format_config(c)) == c.

    Unset optional parameters are left out.
    """
    lines: list[str] = []
    for f in fields(RunConfig):
        value = getattr(config, f.name)
        if value is None:
            continue
        if isinstance(value, tuple) and not value:
            continue
        lines.append(f"{f.name} = {_toml_value(value)}")
    return "\n".join(lines) + "\n"

