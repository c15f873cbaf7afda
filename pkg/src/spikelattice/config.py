"""Config files: TOML surface, strict validation, fully resolved echoes.

A config names the network (dimension + extents), gamma, and optionally the
activation, campaign size, sweeps and seed. Parsing happens in two stages:

  resolve_config(text)   -> plain dict with every default materialized
  spec_from_resolved(d)  -> CampaignSpec (builds the lattice and params)

The resolved dict is what run manifests echo; it is a fixed point of
resolution, so a manifest's config block can be resolved again and compared
for identity. Unknown keys are rejected rather than ignored — a typo'd
option must never silently fall back to a default.

Every rejection raises ConfigError with a stable machine-readable `code`.
"""
from __future__ import annotations

import sys
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .campaign import CampaignSpec
from .model import (
    HARD_THRESHOLD,
    LINEAR,
    SIGMOID,
    ActivationFunction,
    SimulationParams,
    build_lattice,
)

_ACTIVATION_KINDS = {
    "hard": HARD_THRESHOLD,
    "hard_threshold": HARD_THRESHOLD,
    "linear": LINEAR,
    "sigmoid": SIGMOID,
}

_TOP_KEYS = {
    "dimension",
    "extents",
    "periodic",
    "gamma",
    "activation",
    "initial_potential",
    "init_spike_rate",
    "max_events",
    "max_time",
    "replications",
    "bins",
    "master_seed",
    "size_sweep",
    "gamma_sweep",
}
_ACTIVATION_KEYS = {"kind", "slope", "shift"}


class ConfigError(ValueError):
    """Config rejection with a stable error code (see module docstring)."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def _require_int(d: dict, key: str, minimum: Optional[int] = None) -> int:
    v = d[key]
    # bool passes isinstance(int) but `periodic = true` for `bins` is a bug
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError("bad_type", f"{key} must be an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ConfigError("bad_value", f"{key} must be >= {minimum}, got {v}")
    return v


def _require_number(d: dict, key: str) -> float:
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError("bad_type", f"{key} must be a number, got {v!r}")
    return float(v)


def resolve_config(text: str) -> dict[str, Any]:
    """Parse TOML text and resolve it (defaults applied, keys validated)."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        # tomllib reports "... (at line L, column C)" — keep that intact
        raise ConfigError("syntax", f"config syntax error: {exc}") from exc
    return resolve_config_dict(raw)


def resolve_config_dict(raw: dict[str, Any]) -> dict[str, Any]:
    """Validate a raw mapping and materialize every default.

    Accepts both fresh configs and already-resolved echoes (None values mean
    "absent"); resolving a resolved dict returns it unchanged.
    """
    raw = {k: v for k, v in raw.items() if v is not None}
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError("unknown_key", f"unknown config keys: {sorted(unknown)}")
    for key in ("dimension", "extents", "gamma"):
        if key not in raw:
            raise ConfigError("missing_key", f"config is missing required key '{key}'")

    dimension = _require_int(raw, "dimension")
    if not 1 <= dimension <= 3:
        raise ConfigError("bad_dimension", f"dimension must be 1, 2 or 3, got {dimension}")

    extents = raw["extents"]
    if not isinstance(extents, list) or not all(
        isinstance(e, int) and not isinstance(e, bool) for e in extents
    ):
        raise ConfigError("bad_type", f"extents must be a list of integers, got {extents!r}")
    if len(extents) != dimension:
        raise ConfigError(
            "bad_value", f"extents must list {dimension} sides, got {len(extents)}"
        )
    if any(e < 1 for e in extents):
        raise ConfigError("bad_value", f"extents must be positive, got {extents}")
    if any(e % 2 == 0 for e in extents):
        raise ConfigError(
            "even_extent", f"lattice extents must be odd (centered box), got {extents}"
        )

    gamma = _require_number(raw, "gamma")
    if not gamma > 0:
        raise ConfigError("gamma_not_positive", f"gamma must be positive, got {gamma}")

    act_raw = raw.get("activation", "hard")
    if isinstance(act_raw, str):  # flat shorthand: activation = "hard"
        act_raw = {"kind": act_raw}
    if not isinstance(act_raw, dict):
        raise ConfigError(
            "bad_type", f"activation must be a string or a table, got {act_raw!r}"
        )
    unknown = set(act_raw) - _ACTIVATION_KEYS
    if unknown:
        raise ConfigError("unknown_key", f"unknown activation keys: {sorted(unknown)}")
    kind_raw = act_raw.get("kind", "hard")
    if not isinstance(kind_raw, str) or kind_raw not in _ACTIVATION_KINDS:
        raise ConfigError(
            "unknown_activation",
            f"activation kind must be one of {sorted(_ACTIVATION_KINDS)}, got {kind_raw!r}",
        )
    kind = _ACTIVATION_KINDS[kind_raw]
    slope = _require_number(act_raw, "slope") if "slope" in act_raw else 3.0
    shift = _require_number(act_raw, "shift") if "shift" in act_raw else 6.0
    if not slope > 0:
        raise ConfigError("bad_value", f"activation slope must be positive, got {slope}")

    periodic = raw.get("periodic", False)
    if not isinstance(periodic, bool):
        raise ConfigError("bad_type", f"periodic must be a boolean, got {periodic!r}")

    initial_potential = (
        _require_int(raw, "initial_potential", 1) if "initial_potential" in raw else 1
    )
    init_spike_rate = raw.get("init_spike_rate", "phi")
    if init_spike_rate not in ("phi", "unit"):
        raise ConfigError(
            "bad_value", f"init_spike_rate must be 'phi' or 'unit', got {init_spike_rate!r}"
        )
    max_events = _require_int(raw, "max_events", 1) if "max_events" in raw else 10**9
    max_time = None
    if "max_time" in raw:
        max_time = _require_number(raw, "max_time")
        if not max_time > 0:
            raise ConfigError("bad_value", f"max_time must be positive, got {max_time}")
    replications = _require_int(raw, "replications", 1) if "replications" in raw else 1
    bins = _require_int(raw, "bins", 1) if "bins" in raw else 50
    master_seed = _require_int(raw, "master_seed") if "master_seed" in raw else None

    size_sweep = raw.get("size_sweep")
    if size_sweep is not None:
        if not isinstance(size_sweep, list) or not all(
            isinstance(n, int) and not isinstance(n, bool) for n in size_sweep
        ):
            raise ConfigError(
                "bad_type", f"size_sweep must be a list of integers, got {size_sweep!r}"
            )
        if not size_sweep or any(n < 1 for n in size_sweep):
            raise ConfigError(
                "bad_value", f"size_sweep entries must be >= 1, got {size_sweep}"
            )
        if dimension != 1:
            raise ConfigError("bad_value", "size_sweep requires dimension = 1")
    gamma_sweep = raw.get("gamma_sweep")
    if gamma_sweep is not None:
        if not isinstance(gamma_sweep, list) or not all(
            isinstance(g, (int, float)) and not isinstance(g, bool) for g in gamma_sweep
        ):
            raise ConfigError(
                "bad_type", f"gamma_sweep must be a list of numbers, got {gamma_sweep!r}"
            )
        gamma_sweep = [float(g) for g in gamma_sweep]
        if not gamma_sweep or any(not g > 0 for g in gamma_sweep):
            raise ConfigError(
                "bad_value", f"gamma_sweep entries must be positive, got {gamma_sweep}"
            )
    if size_sweep is not None and gamma_sweep is not None:
        raise ConfigError("sweep_conflict", "a campaign sweeps size or gamma, not both")

    return {
        "dimension": dimension,
        "extents": list(extents),
        "periodic": periodic,
        "gamma": gamma,
        "activation": {"kind": kind, "slope": slope, "shift": shift},
        "initial_potential": initial_potential,
        "init_spike_rate": init_spike_rate,
        "max_events": max_events,
        "max_time": max_time,
        "replications": replications,
        "bins": bins,
        "master_seed": master_seed,
        "size_sweep": list(size_sweep) if size_sweep is not None else None,
        "gamma_sweep": gamma_sweep,
    }


def spec_from_resolved(resolved: dict[str, Any]) -> CampaignSpec:
    """Build the campaign spec (lattice included) from a resolved config."""
    act = resolved["activation"]
    activation = ActivationFunction(
        act["kind"], sigmoid_slope=act["slope"], sigmoid_shift=act["shift"]
    )
    graph = build_lattice(
        resolved["dimension"], tuple(resolved["extents"]), periodic=resolved["periodic"]
    )
    params = SimulationParams(
        gamma=resolved["gamma"],
        activation=activation,
        graph=graph,
        initial_potential=resolved["initial_potential"],
        max_events=resolved["max_events"],
        max_time=resolved["max_time"],
        init_spike_rate=resolved["init_spike_rate"],
    )
    size_sweep = resolved["size_sweep"]
    gamma_sweep = resolved["gamma_sweep"]
    return CampaignSpec(
        base_params=params,
        replications=resolved["replications"],
        master_seed=resolved["master_seed"],
        size_sweep=tuple(size_sweep) if size_sweep is not None else None,
        gamma_sweep=tuple(gamma_sweep) if gamma_sweep is not None else None,
        bin_count=resolved["bins"],
    )


def parse_config(text: str) -> CampaignSpec:
    return spec_from_resolved(resolve_config(text))
