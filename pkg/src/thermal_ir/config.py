"""Scenario files: a YAML tree with a ``params`` block and per-subcommand
sections.  Unknown keys are errors, so typos never pass silently."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from .params import SchemeTag, ThermalParams

PARAM_KEYS = {"beta", "e", "eps", "Lambda", "lam", "lambda0", "lambda_w", "q3", "p3", "i_lambda", "factors"}
SECTION_KEYS = {
    "selfenergy": {"eps_values"},
    "fixedpoint": {"beta_values", "e2_values"},
    "vertex": {"p_values"},
    "resum": {"p_values", "n_max"},
    "field": {"r_values", "source_width", "model"},
    "ward": {"eps_values", "p_values"},
}
TOP_KEYS = {"params", "scheme", "tol"} | set(SECTION_KEYS)


class ConfigError(ValueError):
    pass


@dataclass
class Scenario:
    params: ThermalParams
    scheme: SchemeTag = SchemeTag.EPSILON
    tol: float | None = None
    sections: dict[str, dict[str, Any]] = field(default_factory=dict)

    def section(self, name: str) -> dict[str, Any]:
        return self.sections.get(name, {})

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"params": self.params.to_dict(), "scheme": self.scheme.value}
        if self.tol is not None:
            d["tol"] = self.tol
        d.update(copy.deepcopy(self.sections))
        return d

    def dump(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=True)


def _real(where: str, v: Any) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {v!r}")
    return float(v)


def _vec3(where: str, v: Any) -> tuple[float, float, float]:
    if not isinstance(v, (list, tuple)) or len(v) != 3:
        raise ConfigError(f"{where}: expected a list of 3 numbers, got {v!r}")
    return tuple(_real(f"{where}[{i}]", x) for i, x in enumerate(v))


def parse_params(raw: Any) -> ThermalParams:
    if raw is None:
        return ThermalParams()
    if not isinstance(raw, dict):
        raise ConfigError("params: expected a mapping")
    unknown = set(raw) - PARAM_KEYS
    if unknown:
        raise ConfigError(f"params: unknown key(s) {sorted(unknown)}")
    kw: dict[str, Any] = {}
    for k, v in raw.items():
        where = f"params.{k}"
        if k in ("q3", "p3"):
            kw[k] = _vec3(where, v)
        elif k == "i_lambda":
            if isinstance(v, (list, tuple)) and len(v) == 2:
                kw[k] = complex(_real(where, v[0]), _real(where, v[1]))
            else:
                kw[k] = complex(_real(where, v))
        elif k == "factors":
            if not isinstance(v, dict):
                raise ConfigError(f"{where}: expected a mapping")
            kw[k] = {str(name): _real(f"{where}.{name}", x) for name, x in v.items()}
        else:
            kw[k] = _real(where, v)
    for k in ("beta", "Lambda", "lam", "lambda0", "lambda_w"):
        if k in kw and kw[k] <= 0:
            raise ConfigError(f"params.{k}: must be positive")
    return ThermalParams(**kw)


def from_dict(raw: Any) -> Scenario:
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("top level: expected a mapping")
    unknown = set(raw) - TOP_KEYS
    if unknown:
        raise ConfigError(f"top level: unknown key(s) {sorted(unknown)}")
    params = parse_params(raw.get("params"))
    try:
        scheme = SchemeTag(raw.get("scheme", SchemeTag.EPSILON.value))
    except ValueError:
        raise ConfigError(f"scheme: expected one of {[s.value for s in SchemeTag]}, got {raw.get('scheme')!r}") from None
    tol = raw.get("tol")
    tol = None if tol is None else _real("tol", tol)
    sections: dict[str, dict[str, Any]] = {}
    for name, keys in SECTION_KEYS.items():
        sec = raw.get(name)
        if sec is None:
            continue
        if not isinstance(sec, dict):
            raise ConfigError(f"{name}: expected a mapping")
        bad = set(sec) - keys
        if bad:
            raise ConfigError(f"{name}: unknown key(s) {sorted(bad)}")
        clean: dict[str, Any] = {}
        for k, v in sec.items():
            where = f"{name}.{k}"
            if k.endswith("_values"):
                if not isinstance(v, list) or not v:
                    raise ConfigError(f"{where}: expected a non-empty list")
                clean[k] = [_real(f"{where}[{i}]", x) for i, x in enumerate(v)]
            elif k == "n_max":
                if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                    raise ConfigError(f"{where}: expected a non-negative integer")
                clean[k] = v
            elif k == "model":
                if v not in ("full", "small_p"):
                    raise ConfigError(f"{where}: expected 'full' or 'small_p'")
                clean[k] = v
            else:
                clean[k] = _real(where, v)
        sections[name] = clean
    return Scenario(params, scheme, tol, sections)


def load(path: Path | str | None) -> Scenario:
    """Read a scenario file; ``None`` loads the packaged default."""
    try:
        if path is None:
            text = resources.files("thermal_ir").joinpath("data/default.yaml").read_text()
        else:
            text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ConfigError(f"YAML syntax error{where}: {getattr(exc, 'problem', exc)}") from exc
    return from_dict(raw)
