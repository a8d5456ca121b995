"""Scenario configuration: ``[section]`` / ``key = value`` text files.

Defaults reproduce the driven reference setting (Gamma = 0.05 meV, M = 20 meV,
xi = 10 meV, delta = 0.1 meV, n0 = 10).  Unknown sections or keys are
rejected, and every model/grid invariant is checked here so that runs never
fail half way.
"""
from __future__ import annotations

import configparser
import math
import re
import warnings
from dataclasses import dataclass, field, fields, replace

from .params import ParameterWarning, SystemParams

MAX_STEPS = 10**6


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class InitialBlock:
    n0: float | None = 10.0
    alpha: complex | None = None
    dphi: float = math.pi
    c1: complex = complex(2**-0.5)
    c2: complex = complex(2**-0.5)


@dataclass(frozen=True)
class GridBlock:
    j: int = 4001
    w_mult: float = 50.0


@dataclass(frozen=True)
class RunBlock:
    t_end: float = 50.0  # units of 1/gamma
    samples: int = 501
    dt_rule: float = 0.01
    inset_t_end: float = 2.0
    inset_samples: int = 201
    probe_t: float = 1.0
    validate_t_end: float = 5.0


@dataclass(frozen=True)
class ToleranceBlock:
    volterra: float = 1e-6
    grid: float = 5e-3
    decoherence: float = 1e-3
    sum_rule: float = 1e-3  # relative to |alpha|^2


@dataclass(frozen=True)
class OutputBlock:
    dir: str = "out"
    formats: tuple = ("csv", "gnuplot")


@dataclass(frozen=True)
class ScenarioConfig:
    system: SystemParams = field(default_factory=SystemParams)
    initial: InitialBlock = field(default_factory=InitialBlock)
    grid: GridBlock = field(default_factory=GridBlock)
    run: RunBlock = field(default_factory=RunBlock)
    tolerances: ToleranceBlock = field(default_factory=ToleranceBlock)
    output: OutputBlock = field(default_factory=OutputBlock)

    @property
    def alpha(self) -> complex:
        if self.initial.alpha is not None:
            return complex(self.initial.alpha)
        return complex(math.sqrt(self.initial.n0))

    @property
    def n0(self) -> float:
        if self.initial.n0 is not None:
            return float(self.initial.n0)
        return abs(self.alpha) ** 2

    def with_overrides(self, *, grid_j=None, grid_w_mult=None, dt_rule=None, out_dir=None) -> "ScenarioConfig":
        grid = replace(self.grid, **{k: v for k, v in (("j", grid_j), ("w_mult", grid_w_mult)) if v is not None})
        run = self.run if dt_rule is None else replace(self.run, dt_rule=dt_rule)
        output = self.output if out_dir is None else replace(self.output, dir=str(out_dir))
        cfg = replace(self, grid=grid, run=run, output=output)
        validate_config(cfg)
        return cfg


_SECTIONS = {
    "system": SystemParams,
    "initial": InitialBlock,
    "grid": GridBlock,
    "run": RunBlock,
    "tolerances": ToleranceBlock,
    "output": OutputBlock,
}
_OPTIONAL = {("initial", "n0"), ("initial", "alpha")}


def _convert(section, key, raw, kind):
    raw = raw.strip()
    if (section, key) in _OPTIONAL and raw == "":
        return None
    if section == "output" and key == "formats":
        return tuple(s.strip() for s in raw.split(",") if s.strip())
    if section == "output":
        return raw
    if kind is int:
        return int(raw)
    if kind is complex:
        return complex(raw.replace(" ", ""))
    return float(raw)


_KINDS = {
    ("initial", "alpha"): complex,
    ("initial", "c1"): complex,
    ("initial", "c2"): complex,
    ("grid", "j"): int,
    ("run", "samples"): int,
    ("run", "inset_samples"): int,
}


def _line_index(text):
    idx, section = {}, None
    for n, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        m = re.match(r"^\[([^\]]+)\]$", s)
        if m:
            section = m.group(1).strip()
            idx[(section, None)] = n
        elif section and "=" in s and not s.startswith(("#", ";")):
            idx[(section, s.split("=", 1)[0].strip().lower())] = n
    return idx


def parse_config(text: str) -> ScenarioConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"), empty_lines_in_values=False)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"parse error: {exc}") from None
    lines = _line_index(text)
    blocks = {}
    for section in cp.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"line {lines.get((section, None), '?')}: unknown section [{section}]")
        cls = _SECTIONS[section]
        names = {f.name for f in fields(cls)}
        kw = {}
        for key, raw in cp.items(section):
            where = f"line {lines.get((section, key), '?')}"
            if key not in names:
                raise ConfigError(f"{where}: unknown key {section}.{key}")
            try:
                kw[key] = _convert(section, key, raw, _KINDS.get((section, key), float))
            except ValueError:
                raise ConfigError(f"{where}: cannot parse {section}.{key} = {raw!r}") from None
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ParameterWarning)
                blocks[section] = cls(**kw)
        except ValueError as exc:
            raise ConfigError(f"{section}: {exc}") from None
    cfg = ScenarioConfig(**blocks)
    validate_config(cfg)
    return cfg


def validate_config(cfg: ScenarioConfig) -> None:
    ini, grid, run, tol = cfg.initial, cfg.grid, cfg.run, cfg.tolerances
    if ini.alpha is None and ini.n0 is None:
        raise ConfigError("initial: one of n0 or alpha is required")
    if ini.n0 is not None and ini.n0 < 0:
        raise ConfigError("initial.n0: must be >= 0")
    if ini.alpha is not None and ini.n0 is not None and not math.isclose(abs(ini.alpha) ** 2, ini.n0, rel_tol=1e-9):
        raise ConfigError("initial: n0 and alpha disagree (n0 must equal |alpha|^2)")
    if ini.c1 == 0 and ini.c2 == 0:
        raise ConfigError("initial: c1 and c2 must not both vanish")
    if grid.j % 2 == 0 or grid.j < 101:
        raise ConfigError(f"grid.j: BathGrid needs an odd mode count >= 101, got {grid.j}")
    if grid.w_mult < 20:
        raise ConfigError(f"grid.w_mult: BathGrid window must be >= 20 gamma, got {grid.w_mult}")
    for name in ("t_end", "inset_t_end", "validate_t_end", "probe_t", "dt_rule"):
        if not getattr(run, name) > 0:
            raise ConfigError(f"run.{name}: must be > 0")
    if run.dt_rule > 0.01:
        raise ConfigError("run.dt_rule: must be <= 0.01 (RK4 step bound)")
    if run.samples < 2 or run.inset_samples < 2:
        raise ConfigError("run.samples: need at least 2 samples")
    if run.samples > 10**6 or run.inset_samples > 10**6:
        raise ConfigError("run.samples: at most 10^6 samples")
    steps = run.validate_t_end * max(grid.w_mult, 1.0) / run.dt_rule
    if steps > MAX_STEPS:
        raise ConfigError(f"run: validation would need {steps:.3g} RK4 steps (> {MAX_STEPS}); reduce validate_t_end")
    for name in ("volterra", "grid", "decoherence", "sum_rule"):
        if not getattr(tol, name) >= 0:
            raise ConfigError(f"tolerances.{name}: must be >= 0")


def _fmt(v):
    if isinstance(v, complex):
        return repr(v).strip("()")
    if isinstance(v, tuple):
        return ", ".join(v)
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    return repr(v)


def serialize_config(cfg: ScenarioConfig) -> str:
    out = []
    for section in _SECTIONS:
        block = getattr(cfg, section)
        out.append(f"[{section}]")
        for f in fields(block):
            out.append(f"{f.name} = {_fmt(getattr(block, f.name))}")
        out.append("")
    return "\n".join(out)


def load_config(path) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)
