"""Experiment configuration: a flat ``key = value`` text format.

Lines hold one ``key = value`` pair; ``#`` starts a comment; list-valued keys
take comma-separated entries.  Floats serialize through ``repr`` so a config
round-trips losslessly.  Validation collects every violation instead of
stopping at the first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

PROTOCOLS = (
    "redundancy-curve",
    "lr-sweep",
    "ee-sweep",
    "collapse",
    "mobility-edge",
    "lambda-sweep",
    "fixed-initial-sweep",
)

MAX_CHAIN = 14  # C(14, 7) = 3432 matches the dense-diagonalization cap


class ConfigError(ValueError):
    """Carries every parse/validation violation of a config text."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class ExperimentConfig:
    protocol: str
    L: tuple[int, ...]
    h: tuple[float, ...]
    master_seed: int
    eps: tuple[float, ...] = (0.5,)
    lam: tuple[float, ...] = (0.0,)
    t: float = math.pi / 4
    n_realizations: int = 1000
    fragment_mode: str = "auto"
    fragment_exact_limit: int = 4000
    fragment_sample_cap: int = 2000
    krylov_tol: float = 1e-8
    output_dir: str = "results"
    observable: str = "SE_per_site"  # collapse protocol: SE_per_site | LR
    init_h: float = 5.0  # fixed-initial protocol: eigenstate preparation
    init_eps: float = 0.5
    fresh_fields: bool = False  # lambda-sweep: redraw evolution fields
    hc_min: float = 1.5
    hc_max: float = 5.5
    hc_step: float = 0.05
    nu_min: float = 0.3
    nu_max: float = 2.0
    nu_step: float = 0.05
    n_bootstrap: int = 200


_INT_LIST = {"L"}
_FLOAT_LIST = {"h", "eps", "lam"}
_INT = {
    "master_seed",
    "n_realizations",
    "fragment_exact_limit",
    "fragment_sample_cap",
    "n_bootstrap",
}
_FLOAT = {
    "t",
    "krylov_tol",
    "init_h",
    "init_eps",
    "hc_min",
    "hc_max",
    "hc_step",
    "nu_min",
    "nu_max",
    "nu_step",
}
_BOOL = {"fresh_fields"}
_STR = {"protocol", "fragment_mode", "output_dir", "observable"}

_KEY_TO_FIELD = {f.name: f.name for f in fields(ExperimentConfig)}
_KEY_TO_FIELD["lambda"] = "lam"
_FIELD_TO_KEY = {v: k for k, v in _KEY_TO_FIELD.items() if k != "lam"}


def _parse_scalar(field_name: str, raw: str):
    if field_name in _INT_LIST:
        return tuple(int(part.strip()) for part in raw.split(","))
    if field_name in _FLOAT_LIST:
        return tuple(float(part.strip()) for part in raw.split(","))
    if field_name in _INT:
        return int(raw)
    if field_name in _FLOAT:
        return float(raw)
    if field_name in _BOOL:
        lowered = raw.strip().lower()
        if lowered in ("true", "yes", "1"):
            return True
        if lowered in ("false", "no", "0"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    return raw.strip()


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a config text; raises ConfigError with all issues."""
    errors: list[str] = []
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            errors.append(f"line {lineno}: expected 'key = value', got {stripped!r}")
            continue
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _KEY_TO_FIELD:
            errors.append(f"line {lineno}: unknown key {key!r}")
            continue
        name = _KEY_TO_FIELD[key]
        if name in values:
            errors.append(f"line {lineno}: duplicate key {key!r}")
            continue
        try:
            values[name] = _parse_scalar(name, raw)
        except ValueError:
            errors.append(f"line {lineno}: cannot parse value for {key!r}: {raw!r}")
    missing = [k for k in ("protocol", "L", "h", "master_seed") if k not in values]
    errors.extend(f"{k}: required key missing" for k in missing)
    if errors:
        raise ConfigError(errors)
    config = ExperimentConfig(**values)
    violations = validate_config(config)
    if violations:
        raise ConfigError(violations)
    return config


def validate_config(config: ExperimentConfig) -> list[str]:
    """All range and protocol-consistency violations, field-named."""
    out: list[str] = []
    if config.protocol not in PROTOCOLS:
        out.append(f"protocol: unknown protocol {config.protocol!r}")
    if not config.L:
        out.append("L: at least one chain size required")
    for L in config.L:
        if L < 3:
            out.append(f"L: chain size {L} below the minimum 3")
        if L > MAX_CHAIN:
            out.append(f"L: chain size {L} above the supported maximum {MAX_CHAIN}")
    if len(set(config.L)) != len(config.L):
        out.append("L: duplicate chain sizes")
    if not config.h:
        out.append("h: at least one disorder strength required")
    for h in config.h:
        if h < 0:
            out.append(f"h: disorder strength {h} must be >= 0")
    for eps in config.eps:
        if not 0.0 <= eps <= 1.0:
            out.append(f"eps: normalized energy {eps} outside [0, 1]")
    for lam in config.lam:
        if lam < 0:
            out.append(f"lambda: coupling {lam} must be >= 0")
    if not math.isfinite(config.t):
        out.append(f"t: evolution time must be finite, got {config.t}")
    if config.n_realizations < 1:
        out.append(f"n_realizations: need >= 1, got {config.n_realizations}")
    if not 0 <= config.master_seed < 2**64:
        out.append(f"master_seed: {config.master_seed} outside [0, 2^64)")
    if config.fragment_mode not in ("auto", "exact", "sampled"):
        out.append(f"fragment_mode: unknown mode {config.fragment_mode!r}")
    if config.fragment_exact_limit < 1:
        out.append("fragment_exact_limit: must be >= 1")
    if config.fragment_sample_cap < 1:
        out.append("fragment_sample_cap: must be >= 1")
    if config.krylov_tol <= 0:
        out.append(f"krylov_tol: must be > 0, got {config.krylov_tol}")
    if config.observable not in ("SE_per_site", "LR"):
        out.append(f"observable: unknown observable {config.observable!r}")
    if config.init_h < 0:
        out.append(f"init_h: must be >= 0, got {config.init_h}")
    if not 0.0 <= config.init_eps <= 1.0:
        out.append(f"init_eps: {config.init_eps} outside [0, 1]")
    if config.hc_step <= 0 or config.hc_min > config.hc_max:
        out.append("hc_min/hc_max/hc_step: need hc_min <= hc_max and hc_step > 0")
    if config.nu_step <= 0 or config.nu_min > config.nu_max or config.nu_min <= 0:
        out.append("nu_min/nu_max/nu_step: need 0 < nu_min <= nu_max and nu_step > 0")
    if config.n_bootstrap < 0:
        out.append(f"n_bootstrap: must be >= 0, got {config.n_bootstrap}")

    single_eps_lam = {"redundancy-curve", "lr-sweep", "ee-sweep", "collapse"}
    if config.protocol in single_eps_lam:
        if len(config.eps) != 1:
            out.append(f"eps: protocol {config.protocol} takes a single value")
        if len(config.lam) != 1:
            out.append(f"lambda: protocol {config.protocol} takes a single value")
    if config.protocol == "redundancy-curve" and len(config.L) != 1:
        out.append("L: protocol redundancy-curve takes a single chain size")
    if config.protocol == "collapse" and len(config.L) < 2:
        out.append("L: protocol collapse needs at least two chain sizes")
    if config.protocol == "mobility-edge":
        if len(config.L) != 2:
            out.append("L: protocol mobility-edge takes exactly two chain sizes")
        if len(config.lam) != 1:
            out.append("lambda: protocol mobility-edge takes a single value")
    return out


def _format_value(name: str, value) -> str:
    if name in _INT_LIST:
        return ", ".join(str(v) for v in value)
    if name in _FLOAT_LIST:
        return ", ".join(repr(float(v)) for v in value)
    if name in _FLOAT:
        return repr(float(value))
    if name in _BOOL:
        return "true" if value else "false"
    return str(value)


def serialize_config(config: ExperimentConfig) -> str:
    """Canonical text form; parse(serialize(c)) == c."""
    lines = []
    for f in fields(ExperimentConfig):
        key = _FIELD_TO_KEY.get(f.name, "lambda" if f.name == "lam" else f.name)
        lines.append(f"{key} = {_format_value(f.name, getattr(config, f.name))}")
    return "\n".join(lines) + "\n"
