"""Strict line-oriented model-spec parser.

Format: ``[section]`` headers followed by ``key = value`` lines.  Blank lines
and lines starting with ``#`` are ignored.  Anything else is an error with
an exact line number: unknown sections, unknown keys, duplicated keys,
malformed values.  Semantic constraints (dimension versus model kind) raise
:class:`SemanticError` after parsing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import ParseError, SemanticError

MODEL_KINDS = (
    "maxwell",
    "general-scalar",
    "interacting-multiplet",
    "dual-scalar-3",
    "mechanics",
)

FIELD_KINDS = ("maxwell", "general-scalar", "interacting-multiplet", "dual-scalar-3")

DEFAULT_TOLERANCES = {
    "exact": 1e-12,
    "identity": 1e-10,
    "oracle": 1e-6,
    "drift": 1e-8,
}

_SCHEMA = {
    "model": {"kind": "str", "dimension": "int"},
    "params": {
        "lambda": "float",
        "components": "int",
        "profile": "str",
        "l0": "float",
        "l1": "float",
    },
    "fixture": {
        "kind": "str",
        "k": "floats",
        "epsilon": "floats",
        "amplitude": "floats",
        "phase": "float",
    },
    "mechanics": {
        "q0": "floats",
        "p0": "floats",
        "t-end": "float",
        "step": "float",
    },
    "suite": {"checks": "str", "seed": "int"},
    "tolerances": {
        "exact": "float",
        "identity": "float",
        "oracle": "float",
        "drift": "float",
    },
}


@dataclass
class ModelSpec:
    """Parsed and validated declarative model description."""

    kind: str
    dimension: int
    coupling: float = 0.0
    components: int = 1
    profile: str = "linear"
    l0: float = 0.0
    l1: float = 0.5
    fixture: dict = field(default_factory=dict)
    mechanics: dict = field(default_factory=dict)
    checks: Optional[list] = None  # None means the full applicable set
    seed: int = 42
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def echo(self) -> dict:
        """Normalised key/value form embedded in reports."""
        out = {
            "kind": self.kind,
            "dimension": self.dimension,
            "coupling": self.coupling,
            "components": self.components,
            "seed": self.seed,
            "tolerances": dict(sorted(self.tolerances.items())),
        }
        if self.kind == "general-scalar":
            out["profile"] = self.profile
            if self.profile == "linear":
                out["l0"] = self.l0
                out["l1"] = self.l1
        if self.fixture:
            out["fixture"] = {k: self.fixture[k] for k in sorted(self.fixture)}
        if self.mechanics:
            out["mechanics"] = {k: self.mechanics[k] for k in sorted(self.mechanics)}
        out["checks"] = "all" if self.checks is None else list(self.checks)
        return out


def _convert(raw, kind, lineno):
    try:
        if kind == "str":
            return raw
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "floats":
            return [float(part.strip()) for part in raw.split(",") if part.strip()]
    except ValueError as exc:
        raise ParseError(f"bad {kind} value {raw!r}", lineno) from exc
    raise ParseError(f"unknown schema type {kind!r}", lineno)


def parse_spec(text: str) -> ModelSpec:
    """Parse the strict key = value format into a validated ModelSpec."""
    sections: dict = {}
    current = None
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in _SCHEMA:
                raise ParseError(f"unknown section [{name}]", lineno)
            if name in sections:
                raise ParseError(f"duplicate section [{name}]", lineno)
            sections[name] = {}
            current = name
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", lineno)
        if current is None:
            raise ParseError("entry outside any [section]", lineno)
        key, _, raw_value = line.partition("=")
        key = key.strip()
        value = raw_value.strip()
        schema = _SCHEMA[current]
        if key not in schema:
            raise ParseError(f"unknown key {key!r} in [{current}]", lineno)
        if key in sections[current]:
            raise ParseError(f"duplicate key {key!r} in [{current}]", lineno)
        if not value:
            raise ParseError(f"empty value for {key!r}", lineno)
        sections[current][key] = (_convert(value, schema[key], lineno), lineno)
    return _validate(sections)


def _take(sections, section, key, default=None):
    entry = sections.get(section, {}).get(key)
    return default if entry is None else entry[0]


def _validate(sections) -> ModelSpec:
    if "model" not in sections:
        raise SemanticError("missing [model] section")
    kind = _take(sections, "model", "kind")
    dimension = _take(sections, "model", "dimension")
    if kind is None or dimension is None:
        raise SemanticError("[model] must set both kind and dimension")
    if kind not in MODEL_KINDS:
        raise SemanticError(f"unknown model kind {kind!r}")

    if kind == "dual-scalar-3" and dimension != 3:
        raise SemanticError("dual-scalar-3 requires dimension = 3")
    if kind == "mechanics" and dimension != 1:
        raise SemanticError("mechanics has one-dimensional (time only) semantics")
    if kind in FIELD_KINDS and not 3 <= dimension <= 6:
        raise SemanticError("field models support 3 <= dimension <= 6")

    coupling = _take(sections, "params", "lambda", 0.0)
    if coupling < 0:
        raise SemanticError("lambda must be non-negative")
    components = _take(sections, "params", "components", 1)
    if components < 1:
        raise SemanticError("components must be >= 1")
    profile = _take(sections, "params", "profile", "linear")
    if profile not in ("linear", "quadratic"):
        raise SemanticError(f"unknown profile {profile!r}")

    fixture = {k: v[0] for k, v in sections.get("fixture", {}).items()}
    for key in ("k", "epsilon"):
        if key in fixture and len(fixture[key]) != dimension:
            raise SemanticError(f"fixture {key} must have {dimension} components")

    mech = {k: v[0] for k, v in sections.get("mechanics", {}).items()}
    if kind != "mechanics" and mech:
        raise SemanticError("[mechanics] section is only valid for kind = mechanics")
    if "q0" in mech and "p0" in mech and len(mech["q0"]) != len(mech["p0"]):
        raise SemanticError("q0 and p0 must have equal lengths")
    if mech.get("step", 1.0) <= 0:
        raise SemanticError("step must be positive")

    checks_raw = _take(sections, "suite", "checks", "all")
    if checks_raw == "all":
        checks = None
    elif checks_raw == "none":
        checks = []
    else:
        checks = [part.strip() for part in checks_raw.split(",") if part.strip()]
        from .suites import CHECKS  # deferred: avoid a cycle at import time

        for name in checks:
            if name not in CHECKS:
                raise SemanticError(f"unknown check name {name!r}")

    tolerances = dict(DEFAULT_TOLERANCES)
    for key, entry in sections.get("tolerances", {}).items():
        if entry[0] <= 0:
            raise SemanticError(f"tolerance {key} must be positive")
        tolerances[key] = entry[0]

    return ModelSpec(
        kind=kind,
        dimension=dimension,
        coupling=coupling,
        components=components,
        profile=profile,
        l0=_take(sections, "params", "l0", 0.0),
        l1=_take(sections, "params", "l1", 0.5),
        fixture=fixture,
        mechanics=mech,
        checks=checks,
        seed=_take(sections, "suite", "seed", 42),
        tolerances=tolerances,
    )
