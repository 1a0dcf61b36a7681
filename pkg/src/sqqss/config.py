"""Experiment configuration and its plain-text ``key = value`` file format.

Lines are ``key = value``; blank lines and lines starting with ``#`` are
ignored. Sequences are comma separated and an empty value for ``purity`` means
"unset". Keys are the field names of :class:`ExperimentConfig`.
"""
from __future__ import annotations

import dataclasses
import typing
from dataclasses import dataclass, field
from pathlib import Path

PRESETS = ("fig2_sweep", "fig3_fidelity", "fig5_sweep", "purity_scan", "session", "cheater", "custom")
TASKS = ("sweep", "session", "cheater", "attack", "purity_scan", "fidelity")
VARIANTS = ("correlation", "entanglement", "send-back")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


def _default_a2_grid() -> tuple[float, ...]:
    return tuple(round(0.5 + 0.025 * k, 3) for k in range(21))


@dataclass(frozen=True)
class ExperimentConfig:
    """Every knob an experiment run can turn.

    ``purity``, when set, overrides ``visibility`` through the dephased-pair
    relation. ``task`` selects what a ``custom`` preset runs.
    """

    preset: str = "custom"
    task: str = "attack"
    # source
    a_sq: float = 0.5
    visibility: float = 1.0
    purity: float | None = None
    photons_per_qubit: int = 100
    photon_number: str = "fixed"
    pickoff: float = 1.0
    # protocol
    variant: str = "correlation"
    participants: int = 3
    runs: int = 100_000
    check_fraction: float = 0.2
    cheater: int = 2
    cheater_basis: str = "random"
    # attack
    n_list: tuple[int, ...] = (10, 25, 50, 100)
    a2_grid: tuple[float, ...] = field(default_factory=_default_a2_grid)
    trials: int = 100_000
    mode: str = "both"
    reversal: bool = False
    calibration_runs: int = 20
    sender_phase: float = 0.0
    # purity scan
    idler_angles: tuple[float, ...] = (0.0, 45.0)
    hwp_step: float = 2.5
    # execution
    seed: int = 20260101
    workers: int = 1

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        def need(ok: bool, key: str, msg: str) -> None:
            if not ok:
                raise ConfigError(f"{key}: {msg}")

        need(self.preset in PRESETS, "preset", f"must be one of {', '.join(PRESETS)}")
        need(self.task in TASKS, "task", f"must be one of {', '.join(TASKS)}")
        need(0.0 <= self.a_sq <= 1.0, "a_sq", "must lie in [0, 1]")
        need(0.0 <= self.visibility <= 1.0, "visibility", "must lie in [0, 1]")
        need(self.purity is None or 0.5 <= self.purity <= 1.0, "purity", "must lie in [0.5, 1]")
        need(self.photons_per_qubit >= 1, "photons_per_qubit", "must be at least 1")
        need(self.photon_number in ("fixed", "poisson"), "photon_number", "must be 'fixed' or 'poisson'")
        need(0.0 < self.pickoff <= 1.0, "pickoff", "must lie in (0, 1]")
        need(self.variant in VARIANTS, "variant", f"must be one of {', '.join(VARIANTS)}")
        need(self.participants >= 2, "participants", "must be at least 2")
        need(self.runs >= 1, "runs", "must be at least 1")
        need(0.0 < self.check_fraction <= 1.0, "check_fraction", "must lie in (0, 1]")
        need(2 <= self.cheater <= self.participants, "cheater", "must index a recipient (2..participants)")
        need(self.cheater_basis in ("random", "oracle"), "cheater_basis", "must be 'random' or 'oracle'")
        need(len(self.n_list) > 0 and all(1 <= n <= 200 for n in self.n_list), "n_list", "values must lie in 1..200")
        need(len(self.a2_grid) > 0 and all(0.0 <= a <= 1.0 for a in self.a2_grid), "a2_grid", "values must lie in [0, 1]")
        need(self.trials >= 1, "trials", "must be at least 1")
        need(self.mode in ("exact", "mc", "both"), "mode", "must be 'exact', 'mc' or 'both'")
        need(self.calibration_runs >= 1, "calibration_runs", "must be at least 1")
        need(self.hwp_step > 0, "hwp_step", "must be positive")
        need(0 <= self.seed < 2**64, "seed", "must be a 64-bit unsigned integer")
        need(self.workers >= 1, "workers", "must be at least 1")

    @property
    def effective_visibility(self) -> float:
        if self.purity is None:
            return self.visibility
        from .source import visibility_from_purity

        return visibility_from_purity(self.purity)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


PRESET_DEFAULTS: dict[str, dict] = {
    "fig2_sweep": {"task": "sweep", "variant": "correlation", "mode": "both"},
    "fig5_sweep": {"task": "sweep", "variant": "entanglement", "mode": "both"},
    "fig3_fidelity": {"task": "fidelity", "variant": "entanglement", "purity": 0.78},
    "purity_scan": {"task": "purity_scan", "purity": 0.78},
    "session": {"task": "session"},
    "cheater": {"task": "cheater", "runs": 1_000_000},
    "custom": {},
}

_HINTS = typing.get_type_hints(ExperimentConfig)
FIELD_NAMES = tuple(f.name for f in dataclasses.fields(ExperimentConfig))


def parse_value(key: str, text: str):
    """Convert the text form of ``key`` to its typed value."""
    if key not in _HINTS:
        raise ConfigError(f"unknown key {key!r}")
    hint = _HINTS[key]
    text = text.strip()
    try:
        if hint == (float | None):
            return None if text in ("", "none", "None") else float(text)
        if hint is bool:
            lowered = text.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {text!r}")
        if hint is int:
            return int(text)
        if hint is float:
            return float(text)
        if hint is str:
            return text
        if typing.get_origin(hint) is tuple:
            item = typing.get_args(hint)[0]
            return tuple(item(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {text!r} ({exc})") from None
    raise ConfigError(f"{key}: unsupported type {hint}")


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(format_value(v) for v in value)
    return str(value)


def build_config(overrides: dict | None = None, preset: str | None = None) -> ExperimentConfig:
    """Defaults, then the preset's defaults, then explicit overrides."""
    overrides = dict(overrides or {})
    name = preset or overrides.get("preset", "custom")
    if name not in PRESET_DEFAULTS:
        raise ConfigError(f"preset: unknown preset {name!r}")
    values = {**PRESET_DEFAULTS[name], **overrides, "preset": name}
    return ExperimentConfig(**values)


def parse_config_text(text: str, source: str = "<string>") -> dict:
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        try:
            values[key] = parse_value(key, value)
        except ConfigError as exc:
            raise ConfigError(f"{source}:{lineno}: {exc}") from None
    return values


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    return build_config(parse_config_text(path.read_text(), str(path)))


def dump_config(config: ExperimentConfig) -> str:
    lines = [f"{name} = {format_value(getattr(config, name))}" for name in FIELD_NAMES]
    return "\n".join(lines) + "\n"


def save_config(config: ExperimentConfig, path) -> None:
    Path(path).write_text(dump_config(config))
