"""Scenario files: a YAML document with ``system``, ``grid`` and ``sim`` sections.

An empty file is valid and yields the reference study (N=20 devices,
100-bit payloads, unit bandwidth and noise, epsilon 0.99, L in [100, 400],
P from 0 to 8 dB in 0.5 dB steps, M in {1, 2, 4, 5, 10, 20}).
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field

import yaml

from mcaoi.errors import AoIError, ScenarioError
from mcaoi.simulator import SimConfig
from mcaoi.sweep import SweepGrid, SystemConfig

ENV_SCENARIO = "MCAOI_SCENARIO"

_SECTIONS = {"system": SystemConfig, "grid": SweepGrid, "sim": SimConfig}


@dataclass(frozen=True)
class ScenarioFile:
    system: SystemConfig = field(default_factory=SystemConfig)
    grid: SweepGrid = field(default_factory=SweepGrid)
    sim: SimConfig = field(default_factory=SimConfig)

    def to_dict(self) -> dict:
        out = {}
        for name in _SECTIONS:
            section = {}
            for f in dataclasses.fields(getattr(self, name)):
                value = getattr(getattr(self, name), f.name)
                if hasattr(value, "value"):  # enums
                    value = value.value
                elif isinstance(value, tuple):
                    value = list(value)
                section[f.name] = value
            out[name] = section
        return out


def _coerce(cls, name, raw, issues):
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        issues.append((name, f"expected a mapping, got {type(raw).__name__}"))
        return cls()
    known = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in raw.items():
        if key not in known:
            issues.append((f"{name}.{key}", "unknown field"))
            continue
        default = known[key].default
        if isinstance(default, bool) or default is None:
            kwargs[key] = value
        elif isinstance(default, int) and not isinstance(value, int):
            issues.append((f"{name}.{key}", f"expected an integer, got {value!r}"))
        elif isinstance(default, float) and not isinstance(value, (int, float)):
            issues.append((f"{name}.{key}", f"expected a number, got {value!r}"))
        elif isinstance(default, tuple) and not isinstance(value, (list, tuple)):
            issues.append((f"{name}.{key}", f"expected a list, got {value!r}"))
        else:
            kwargs[key] = value
    try:
        return cls(**kwargs)
    except (AoIError, ValueError, TypeError) as exc:
        issues.append((name, str(exc)))
        return None


def load_scenario_text(text: str, source: str = "<string>") -> ScenarioFile:
    try:
        doc = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        raise ScenarioError(f"cannot parse {source}", [(where, exc.problem or str(exc))]) from None
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ScenarioError(f"cannot parse {source}", [("<root>", "expected a mapping of sections")])
    issues = [(key, "unknown section") for key in doc if key not in _SECTIONS]
    parts = {name: _coerce(cls, name, doc.get(name), issues) for name, cls in _SECTIONS.items()}
    system = parts["system"]
    if system is None:
        # still check the grid against whatever N and K were given
        raw = doc.get("system") if isinstance(doc.get("system"), dict) else {}
        try:
            system = SystemConfig(num_devices=raw.get("num_devices", 20), info_bits=raw.get("info_bits", 100))
        except (AoIError, TypeError):
            system = None
    if system is not None and parts["grid"] is not None:
        issues.extend(parts["grid"].validate(system))
    if issues:
        raise ScenarioError(f"invalid scenario {source}", issues)
    return ScenarioFile(**parts)


def parse_scenario(path=None) -> ScenarioFile:
    """Load and validate a scenario; falls back to ``$MCAOI_SCENARIO``, then to defaults."""
    if path is None:
        path = os.environ.get(ENV_SCENARIO)
    if path is None:
        return ScenarioFile()
    with open(path) as fh:
        text = fh.read()
    return load_scenario_text(text, str(path))


def dump_scenario(scenario: ScenarioFile) -> str:
    return yaml.safe_dump(scenario.to_dict(), sort_keys=False, default_flow_style=None)
