"""Scenario configuration files.

One INI-style file describes one scenario::

    [scenario]
    model = parabolic          ; adiabatic | constant_speed | roller | parabolic

    [materials]
    K_steel = 17

    [stiffness]
    variant = quadratic

    [roller]
    radius_m = 0.2
    line_speed_m_s = 6
    compression_ratio = 0.8

Every key is optional. A file that also carries a ``[sweep]`` section is a
sweep config; its ``base`` key may point at another scenario file whose
settings are loaded first.
"""

from __future__ import annotations

import configparser
import dataclasses
import io
import os
from dataclasses import dataclass, field, fields

from .errors import ValidationError
from .integrators import StepControl
from .kinematics import RollerSetup
from .lumped import DEFAULT_POINTS, LumpedScenario, Mode
from .materials import MaterialParams, default_params
from .parabolic import Grid, ParabolicControl
from .stiffness import StiffnessModel, Variant

MODELS = ("adiabatic", "constant_speed", "roller", "parabolic")
SWEEP_MODELS = ("roller", "parabolic")


class ConfigError(ValidationError):
    pass


@dataclass(frozen=True)
class SweepGrid:
    r_values: tuple[float, ...]
    v_values: tuple[float, ...]
    model: str = "parabolic"
    bond_threshold: float = 150.0

    def validate(self, materials: MaterialParams) -> None:
        if not self.r_values:
            raise ValidationError("sweep.r_values", "must not be empty")
        if not self.v_values:
            raise ValidationError("sweep.v_values", "must not be empty")
        for r in self.r_values:
            if not 0.5 < r < 1:
                raise ValidationError("sweep.r_values", f"r = {r!r} violates 0.5 < r < 1")
        for v in self.v_values:
            if not v > 0:
                raise ValidationError("sweep.v_values", f"line speed {v!r} must be positive")
        if self.model not in SWEEP_MODELS:
            raise ValidationError("sweep.model", f"must be one of {SWEEP_MODELS}, got {self.model!r}")
        if not self.bond_threshold <= materials.T_max_quadratic:
            raise ValidationError("sweep.bond_threshold", "must not exceed T_max_quadratic")


@dataclass(frozen=True)
class ScenarioConfig:
    name: str = "scenario"
    model: str = "parabolic"
    materials: MaterialParams = field(default_factory=default_params)
    variant: Variant = Variant.QUADRATIC
    radius_m: float = 0.2
    line_speed_m_s: float = 6.0
    compression_ratio: float = 0.8
    compression_time_s: float = 1e-3
    strain_end: float = 0.4
    heating: bool = True
    flux: bool = True
    points: int = DEFAULT_POINTS
    grid_n: int = 100
    tau_end: float = 5.0
    dtau: float = 1e-3
    rel_tol: float = 1e-8
    abs_tol: float = 1e-8
    max_steps: int = 1_000_000
    sweep: SweepGrid | None = None

    def validate(self) -> None:
        """Build every model object once so all module rules run."""
        if self.model not in MODELS:
            raise ValidationError("scenario.model", f"must be one of {MODELS}, got {self.model!r}")
        if self.points < 2:
            raise ValidationError("lumped.points", "need at least two output points")
        self.step_control()
        if self.model == "parabolic":
            self.roller_setup()
            self.grid()
            self.parabolic_control()
            if not self.tau_end > 0:
                raise ValidationError("parabolic.tau_end", "must be positive")
        else:
            self.lumped_scenario()
        if self.sweep is not None:
            self.sweep.validate(self.materials)

    def stiffness(self) -> StiffnessModel:
        return StiffnessModel.from_materials(self.variant, self.materials)

    def roller_setup(self, r: float | None = None, v: float | None = None) -> RollerSetup:
        try:
            return RollerSetup(
                self.radius_m,
                self.line_speed_m_s if v is None else v,
                self.compression_ratio if r is None else r,
                self.materials.h_min,
            )
        except ValidationError as exc:
            raise ValidationError(f"roller.{_ROLLER_KEYS.get(exc.field, exc.field)}", exc.message) from None

    def lumped_scenario(self, r: float | None = None, v: float | None = None) -> LumpedScenario:
        mode = Mode(self.model)
        kw = dict(
            materials=self.materials,
            stiffness=self.stiffness(),
            mode=mode,
            strain_end=self.strain_end,
            heating=self.heating,
            flux=self.flux,
        )
        if mode is Mode.CONSTANT_SPEED:
            kw.update(r=self.compression_ratio if r is None else r, compression_time=self.compression_time_s)
        elif mode is Mode.ROLLER:
            kw.update(roller=self.roller_setup(r, v))
        try:
            return LumpedScenario(**kw)
        except ValidationError as exc:
            if "." in exc.field:
                raise
            key = {"r": "roller.compression_ratio", "compression_time": "lumped.compression_time_s"}
            raise ValidationError(key.get(exc.field, f"lumped.{exc.field}"), exc.message) from None

    def grid(self) -> Grid:
        try:
            return Grid(self.grid_n)
        except ValidationError as exc:
            raise ValidationError("parabolic.grid_n", exc.message) from None

    def parabolic_control(self) -> ParabolicControl:
        try:
            return ParabolicControl(dtau=self.dtau)
        except ValidationError as exc:
            raise ValidationError("parabolic.dtau", exc.message) from None

    def step_control(self) -> StepControl:
        try:
            return StepControl(self.rel_tol, self.abs_tol, self.max_steps)
        except ValidationError as exc:
            raise ValidationError(f"solver.{exc.field}", exc.message) from None

    def echo(self) -> dict:
        data = dataclasses.asdict(self)
        data["variant"] = self.variant.value
        return data


_ROLLER_KEYS = {"R": "radius_m", "v_fabric": "line_speed_m_s", "r": "compression_ratio"}

# section -> {key: (attribute, parser)}
_SCHEMA = {
    "scenario": {"name": ("name", str), "model": ("model", str)},
    "stiffness": {"variant": ("variant", Variant)},
    "roller": {
        "radius_m": ("radius_m", float),
        "line_speed_m_s": ("line_speed_m_s", float),
        "compression_ratio": ("compression_ratio", float),
    },
    "lumped": {
        "compression_time_s": ("compression_time_s", float),
        "strain_end": ("strain_end", float),
        "heating": ("heating", "bool"),
        "flux": ("flux", "bool"),
        "points": ("points", int),
    },
    "parabolic": {
        "grid_n": ("grid_n", int),
        "tau_end": ("tau_end", float),
        "dtau": ("dtau", float),
    },
    "solver": {
        "rel_tol": ("rel_tol", float),
        "abs_tol": ("abs_tol", float),
        "max_steps": ("max_steps", int),
    },
}

_MATERIAL_FIELDS = {f.name: f for f in fields(MaterialParams)}


def _new_parser() -> configparser.ConfigParser:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    parser.optionxform = str  # keep key case: T_ambient != t_ambient
    return parser


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.replace(",", " ").split())


def _convert(section: str, key: str, raw: str, kind, parser: configparser.ConfigParser):
    where = f"{section}.{key}"
    try:
        if kind == "bool":
            return parser.getboolean(section, key)
        if kind is int:
            return int(raw)
        return kind(raw)
    except ValueError as exc:
        raise ConfigError(where, f"cannot parse {raw!r}: {exc}") from None


def _where(exc: configparser.Error, fallback: str) -> str:
    lineno = getattr(exc, "lineno", None)
    if lineno is None and getattr(exc, "errors", None):
        lineno = exc.errors[0][0]
    return f"line {lineno}" if lineno else fallback


def _read(path: str) -> configparser.ConfigParser:
    parser = _new_parser()
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh, source=path)
    except configparser.Error as exc:
        raise ConfigError(_where(exc, "file"), f"{path}: {exc.message}") from None
    except OSError as exc:
        raise ConfigError("file", f"cannot read {path}: {exc.strerror}") from None
    return parser


def _apply(cfg: ScenarioConfig, parser: configparser.ConfigParser) -> ScenarioConfig:
    updates: dict = {}
    material_updates: dict = {}
    for section in parser.sections():
        if section == "materials":
            for key, raw in parser.items(section):
                if key not in _MATERIAL_FIELDS:
                    raise ConfigError(f"materials.{key}", "unknown key")
                if key == "h_max" and raw.strip().lower() in ("", "none"):
                    material_updates[key] = None
                    continue
                material_updates[key] = _convert(section, key, raw, float, parser)
        elif section == "sweep":
            continue
        elif section in _SCHEMA:
            for key, raw in parser.items(section):
                if key not in _SCHEMA[section]:
                    raise ConfigError(f"{section}.{key}", "unknown key")
                attr, kind = _SCHEMA[section][key]
                updates[attr] = _convert(section, key, raw, kind, parser)
        else:
            raise ConfigError(section, "unknown section")
    if material_updates:
        try:
            updates["materials"] = dataclasses.replace(cfg.materials, **material_updates)
        except ValidationError as exc:
            raise ValidationError(f"materials.{exc.field}", exc.message) from None
    return dataclasses.replace(cfg, **updates)


def _sweep_from(parser: configparser.ConfigParser) -> SweepGrid:
    sec = parser["sweep"]
    known = {"base", "r_values", "v_values", "model", "bond_threshold"}
    for key in sec:
        if key not in known:
            raise ConfigError(f"sweep.{key}", "unknown key")
    try:
        r_values = _parse_floats(sec.get("r_values", ""))
        v_values = _parse_floats(sec.get("v_values", ""))
        threshold = float(sec.get("bond_threshold", "150"))
    except ValueError as exc:
        raise ConfigError("sweep", f"cannot parse numeric list: {exc}") from None
    return SweepGrid(r_values, v_values, sec.get("model", "parabolic").strip(), threshold)


def load_config(path: str) -> ScenarioConfig:
    """Parse and validate a scenario (or sweep) file."""
    parser = _read(path)
    cfg = ScenarioConfig(name=os.path.splitext(os.path.basename(path))[0])
    if parser.has_section("sweep") and parser.has_option("sweep", "base"):
        base_path = os.path.join(os.path.dirname(path), parser.get("sweep", "base"))
        cfg = _apply(cfg, _read(base_path))
    cfg = _apply(cfg, parser)
    if parser.has_section("sweep"):
        cfg = dataclasses.replace(cfg, sweep=_sweep_from(parser))
    cfg.validate()
    return cfg


def loads_config(text: str, name: str = "scenario") -> ScenarioConfig:
    parser = _new_parser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(_where(exc, "text"), exc.message) from None
    cfg = _apply(ScenarioConfig(name=name), parser)
    if parser.has_section("sweep"):
        cfg = dataclasses.replace(cfg, sweep=_sweep_from(parser))
    cfg.validate()
    return cfg


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)  # shortest repr round-trips exactly
    if value is None:
        return "none"
    if isinstance(value, Variant):
        return value.value
    return str(value)


def dump_config(cfg: ScenarioConfig) -> str:
    parser = _new_parser()
    parser["materials"] = {k: _fmt(v) for k, v in dataclasses.asdict(cfg.materials).items()}
    for section, keys in _SCHEMA.items():
        parser[section] = {key: _fmt(getattr(cfg, attr)) for key, (attr, _) in keys.items()}
    if cfg.sweep is not None:
        s = cfg.sweep
        parser["sweep"] = {
            "r_values": ", ".join(repr(float(r)) for r in s.r_values),
            "v_values": ", ".join(repr(float(v)) for v in s.v_values),
            "model": s.model,
            "bond_threshold": repr(float(s.bond_threshold)),
        }
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()
