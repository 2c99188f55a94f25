"""Run configuration: one strict JSON document per invocation.

Unknown keys anywhere in the document are rejected by name rather than
ignored, so a typo in a solver knob fails loudly instead of silently running
with defaults.  Command-line flags override top-level scalar fields only;
nested blocks are config-file territory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

from .diagnostics import EpsMaxSolverConfig
from .lmg import ModelParams


class ConfigError(ValueError):
    """Configuration document violates the schema."""


MODEL_KEYS = {"j", "gamma_x", "gamma_y", "tau", "epsilon"}
SOLVER_KEYS = {f.name for f in fields(EpsMaxSolverConfig)}
SELECTION_KEYS = {"condition", "m", "n", "classical_energy"}

COMMAND_SCHEMAS: dict[str, dict[str, Any]] = {
    "spectrum": set(),
    "floquet": set(),
    "husimi": {"k", "n_grid"},
    "poincare": {"energies", "n_seeds", "n_periods", "period_curve"},
    "epsmax": SELECTION_KEYS | {"solver"},
    "scaling": SELECTION_KEYS | {"j_grid", "solver", "solve_budget", "collapse"},
    "upt": {"states"},
}

TOP_LEVEL_KEYS = {"model", "output_dir", "cache", "workers", *COMMAND_SCHEMAS}

PERIOD_CURVE_KEYS = {"e_min", "e_max", "n_points"}
J_GRID_KEYS = {"min", "max", "n"}
COLLAPSE_KEYS = {"variable", "z", "j_set", "subset_scan"}
COLLAPSE_Z_KEYS = {"min", "max", "n"}
SUBSET_SCAN_KEYS = {"j_min", "j_max", "n_scan", "n_pick"}


def _reject_unknown(mapping: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise ConfigError(
            f"unknown key(s) {', '.join(repr(u) for u in unknown)} in {where}; "
            f"allowed: {', '.join(sorted(allowed))}"
        )


@dataclass
class RunConfig:
    """Validated configuration with the model block materialized."""

    model: ModelParams
    output_dir: Path
    cache: bool = True
    workers: int = 1
    command_params: dict[str, dict] = field(default_factory=dict)

    def params_for(self, command: str) -> dict:
        return self.command_params.get(command, {})

    def resolved(self) -> dict:
        """Plain-JSON image of the configuration actually in effect."""
        out: dict[str, Any] = {
            "model": {
                "j": self.model.j,
                "gamma_x": self.model.gamma_x,
                "gamma_y": self.model.gamma_y,
                "tau": self.model.tau,
                "epsilon": self.model.epsilon,
            },
            "output_dir": str(self.output_dir),
            "cache": self.cache,
            "workers": self.workers,
        }
        for command, params in sorted(self.command_params.items()):
            out[command] = params
        return out


def _validate_selection(block: dict, where: str) -> None:
    condition = block.get("condition")
    if condition not in ("NR", "CR", "ER"):
        raise ConfigError(f"{where}.condition must be one of NR, CR, ER")
    if condition in ("CR", "ER"):
        if "m" not in block or "n" not in block:
            raise ConfigError(f"{where} needs integer 'm' and 'n' for {condition}")
    if condition == "NR" and "classical_energy" not in block:
        raise ConfigError(f"{where} needs 'classical_energy' for NR")


def validate_document(doc: dict) -> None:
    """Schema walk; raises ConfigError naming every offending key."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration root must be a JSON object")
    _reject_unknown(doc, TOP_LEVEL_KEYS, "top level")
    model = doc.get("model")
    if not isinstance(model, dict):
        raise ConfigError("'model' block is required and must be an object")
    _reject_unknown(model, MODEL_KEYS, "'model'")
    if "j" not in model:
        raise ConfigError("'model.j' is required")
    for command, allowed in COMMAND_SCHEMAS.items():
        block = doc.get(command)
        if block is None:
            continue
        if not isinstance(block, dict):
            raise ConfigError(f"'{command}' block must be an object")
        _reject_unknown(block, set(allowed), f"'{command}'")
        if "solver" in block:
            if not isinstance(block["solver"], dict):
                raise ConfigError(f"'{command}.solver' must be an object")
            _reject_unknown(block["solver"], SOLVER_KEYS, f"'{command}.solver'")
        if "period_curve" in block:
            _reject_unknown(
                block["period_curve"], PERIOD_CURVE_KEYS, f"'{command}.period_curve'"
            )
        if "j_grid" in block and isinstance(block["j_grid"], dict):
            _reject_unknown(block["j_grid"], J_GRID_KEYS, f"'{command}.j_grid'")
        if "collapse" in block:
            collapse = block["collapse"]
            if not isinstance(collapse, dict):
                raise ConfigError(f"'{command}.collapse' must be an object")
            _reject_unknown(collapse, COLLAPSE_KEYS, f"'{command}.collapse'")
            if isinstance(collapse.get("z"), dict):
                _reject_unknown(
                    collapse["z"], COLLAPSE_Z_KEYS, f"'{command}.collapse.z'"
                )
            if isinstance(collapse.get("subset_scan"), dict):
                _reject_unknown(
                    collapse["subset_scan"],
                    SUBSET_SCAN_KEYS,
                    f"'{command}.collapse.subset_scan'",
                )
        if command in ("epsmax", "scaling"):
            _validate_selection(block, f"'{command}'")
        if command == "upt":
            states = block.get("states")
            if not isinstance(states, list) or not states:
                raise ConfigError("'upt.states' must be a non-empty list")
            for i, state in enumerate(states):
                if not isinstance(state, dict):
                    raise ConfigError(f"'upt.states[{i}]' must be an object")
                _reject_unknown(state, SELECTION_KEYS, f"'upt.states[{i}]'")
                _validate_selection(state, f"'upt.states[{i}]'")


def load_config(
    path: Path | None,
    overrides: dict[str, Any] | None = None,
    default_output: str = "runs/latest",
) -> RunConfig:
    """Parse, validate, and apply flag overrides to a configuration.

    overrides may contain output_dir, cache, workers, and the scalar model
    fields j, tau, epsilon; None values are skipped so absent flags never
    mask config values.
    """
    doc: dict[str, Any] = {}
    if path is not None:
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as err:
            raise ConfigError(f"configuration is not valid JSON: {err}") from err
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}

    model_block = dict(doc.get("model", {}))
    for name in ("j", "tau", "epsilon"):
        if name in overrides:
            model_block[name] = overrides.pop(name)
    doc = dict(doc)
    doc["model"] = model_block
    validate_document(doc)

    model = ModelParams(
        j=float(model_block["j"]),
        gamma_x=float(model_block.get("gamma_x", 0.0)),
        gamma_y=float(model_block.get("gamma_y", 0.0)),
        tau=float(model_block.get("tau", 1.0)),
        epsilon=float(model_block.get("epsilon", 0.0)),
    )
    output_dir = overrides.get("output_dir") or doc.get("output_dir") or default_output
    cache = bool(overrides.get("cache", doc.get("cache", True)))
    workers = int(overrides.get("workers", doc.get("workers", 1)))
    if workers < 1:
        raise ConfigError("'workers' must be a positive integer")
    command_params = {
        command: doc[command] for command in COMMAND_SCHEMAS if command in doc
    }
    return RunConfig(
        model=model,
        output_dir=Path(output_dir),
        cache=cache,
        workers=workers,
        command_params=command_params,
    )
