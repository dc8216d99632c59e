"""Run configuration: a flat INI document mapped onto :class:`RunConfig`.

Example::

    [run]
    case = vortex
    N = 80

    [solver]
    predictor_variant = printed

Keys may also appear before any section header; they are read as ``[run]``.
"""
from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, fields
from typing import Optional, Tuple

from .cases import register_cases
from .implicit import SolverConfig

SECTIONS = {
    "run": ("case", "N", "end_time"),
    "physics": ("Re", "mu", "gamma", "Pr", "C_num", "alpha", "cfl", "limiter"),
    "solver": ("jacobi_tol", "jacobi_max_iters", "predictor_variant", "energy_rhs",
               "max_flagged_fraction"),
    "output": ("directory", "formats", "snapshots"),
}
VARIANTS = ("characteristic", "printed")
ENERGY_RHS = ("conservative", "printed")
FORMATS = ("csv", "vtk")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    case: str
    N: Optional[int] = None
    end_time: Optional[float] = None
    Re: Optional[float] = None
    mu: Optional[float] = None
    gamma: float = 1.4
    Pr: float = 0.72
    C_num: Optional[float] = None
    alpha: float = 1.3
    cfl: Optional[float] = None
    limiter: bool = True
    jacobi_tol: float = 1e-12
    jacobi_max_iters: int = 10_000
    predictor_variant: str = "characteristic"
    energy_rhs: str = "conservative"
    max_flagged_fraction: float = 1e-3
    directory: str = "output"
    formats: Tuple[str, ...] = ("csv",)
    snapshots: Tuple[float, ...] = ()

    def validate(self):
        known = register_cases()
        if self.case not in known:
            raise ConfigError(f"unknown case {self.case!r}; choose from {sorted(known)}")
        if not 0.0 <= self.alpha < 2.0:
            raise ConfigError(f"alpha={self.alpha} outside [0, 2): the limiter needs 0 <= alpha < 2")
        if self.Re is not None and self.mu is not None:
            raise ConfigError("give either Re or mu, not both")
        for name in ("N", "jacobi_max_iters"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("jacobi_tol", "cfl", "end_time", "Re", "gamma"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.mu is not None and self.mu < 0:
            raise ConfigError("mu must be non-negative")
        if self.predictor_variant not in VARIANTS:
            raise ConfigError(f"predictor_variant must be one of {VARIANTS}")
        if self.energy_rhs not in ENERGY_RHS:
            raise ConfigError(f"energy_rhs must be one of {ENERGY_RHS}")
        bad = [f for f in self.formats if f not in FORMATS]
        if bad:
            raise ConfigError(f"unknown output formats {bad}; choose from {FORMATS}")
        return self

    @property
    def viscosity(self) -> Optional[float]:
        if self.mu is not None:
            return self.mu
        if self.Re is not None:
            return self._case().viscosity_for(self.Re)
        return None

    def _case(self):
        return register_cases()[self.case]

    def effective_C_num(self) -> float:
        if self.C_num is not None:
            return self.C_num
        mu = self.viscosity if self.viscosity is not None else self._case().mu
        return 5.0 if mu == 0.0 else 1.0

    def case_spec(self):
        """The registered case with this configuration's physics applied."""
        case = self._case()
        kw = {"gamma": self.gamma, "Pr": self.Pr, "alpha": self.alpha,
              "limiter": self.limiter, "C_num": self.effective_C_num()}
        if self.viscosity is not None:
            kw["mu"] = self.viscosity
        if self.cfl is not None:
            kw["cfl"] = self.cfl
        if self.end_time is not None:
            kw["end_time"] = self.end_time
        if self.snapshots:
            kw["outputs"] = tuple(self.snapshots)
        return case.with_overrides(**kw)

    def solver_options(self) -> dict:
        return {"jacobi_tol": self.jacobi_tol, "jacobi_max_iters": self.jacobi_max_iters,
                "predictor_variant": self.predictor_variant, "energy_rhs": self.energy_rhs,
                "max_flagged_fraction": self.max_flagged_fraction}


_TYPES = {f.name: f.type for f in fields(RunConfig)}
assert set(_TYPES) == {k for keys in SECTIONS.values() for k in keys}
assert set(SolverConfig.__dataclass_fields__) >= set(SECTIONS["solver"])


def _convert(key, raw: str):
    kind = _TYPES[key]
    raw = raw.strip()
    try:
        if kind in ("Optional[int]", "int"):
            return int(raw)
        if kind in ("Optional[float]", "float"):
            return float(raw)
        if kind == "bool":
            low = raw.lower()
            if low in ("1", "yes", "true", "on"):
                return True
            if low in ("0", "no", "false", "off"):
                return False
            raise ValueError(raw)
        if kind == "Tuple[float, ...]":
            return tuple(float(x) for x in raw.replace(",", " ").split())
        if kind == "Tuple[str, ...]":
            return tuple(x for x in raw.replace(",", " ").split())
        return raw
    except ValueError:
        raise ConfigError(f"key {key!r}: cannot read {raw!r} as {kind}") from None


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration document.

    Raises :class:`ConfigError` for unknown sections or keys, duplicate
    keys, malformed values, a missing case name or out-of-range values.
    """
    body = text
    first = next((ln.strip() for ln in text.splitlines()
                  if ln.strip() and not ln.strip().startswith(("#", ";"))), "")
    offset = 0
    if first and not first.startswith("["):
        body = "[run]\n" + text
        offset = 1
    parser = configparser.ConfigParser(strict=True, interpolation=None,
                                       inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(body)
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"duplicate key {exc.option!r} in [{exc.section}] "
                          f"at line {exc.lineno - offset}") from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"duplicate section [{exc.section}] at line {exc.lineno - offset}") from None
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None

    values = {}
    for section in parser.sections():
        if section not in SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in parser.items(section):
            if key not in SECTIONS[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            values[key] = _convert(key, raw)
    if "case" not in values:
        raise ConfigError("missing required key 'case' in [run]")
    return RunConfig(**values).validate()


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(_format(v) for v in value)
    return str(value)


def serialize_config(cfg: RunConfig) -> str:
    """Write every non-default key; ``parse_config`` inverts this exactly."""
    default = RunConfig(case=cfg.case)
    lines = []
    for section, keys in SECTIONS.items():
        body = [f"{k} = {_format(getattr(cfg, k))}" for k in keys
                if k == "case" or getattr(cfg, k) != getattr(default, k)]
        if body:
            lines.append(f"[{section}]")
            lines.extend(body)
            lines.append("")
    return "\n".join(lines)


def replace(cfg: RunConfig, **kw) -> RunConfig:
    return dataclasses.replace(cfg, **kw).validate()
