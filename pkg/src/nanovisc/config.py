"""TOML run configuration and dotted-path command line overrides.

A config file describes one run in named tables::

    [physics]
    temperature_K = 310.0
    particle_radius_m = 2e-8
    viscosity_mPas = 1.0

    [acquisition]
    frames_per_second = 40.0
    observation_s = 240.0
    trials_M = 100
    master_seed = 0

    [drive]                 # optional
    amplitude_N = 1.8e-13
    frequency_Hz = 2.0
    direction = [1.0, 0.0, 0.0]
    phase_rad = 0.0

    [geometry]              # optional, kind = "unbounded" | "half_space" | "periodic_box"
    kind = "half_space"
    wall_normal = [0.0, 0.0, 1.0]
    wall_offset_m = 0.0

Overrides are `section.key=value` strings whose values parse as TOML
(falling back to a bare string), so `--set acquisition.trials_M=10`
and `--set geometry.kind=periodic_box` both work.
"""

from __future__ import annotations

import sys
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .langevin import (
    DriveSpec,
    Geometry,
    HalfSpace,
    LangevinRun,
    PeriodicBox,
    SphericalObstacle,
    Unbounded,
)
from .paths import AcquisitionConfig
from .physics import PhysicalParams

GEOMETRY_KINDS = ("unbounded", "half_space", "periodic_box")


def load_config(path: "str | Path") -> dict:
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def parse_override(assignment: str) -> tuple[list[str], Any]:
    """Split ``a.b.c=value`` into a key path and a TOML-parsed value."""
    key, sep, raw = assignment.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ValueError(f"override must look like section.key=value, got {assignment!r}")
    try:
        value = tomllib.loads(f"v = {raw.strip()}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw.strip()
    return key.split("."), value


def apply_overrides(config: dict, assignments: "list[str] | None") -> dict:
    """Return a copy of config with each dotted assignment applied."""
    out: dict = {}

    def deep_copy(node: Any) -> Any:
        if isinstance(node, dict):
            return {k: deep_copy(v) for k, v in node.items()}
        if isinstance(node, list):
            return [deep_copy(v) for v in node]
        return node

    out = deep_copy(config)
    for assignment in assignments or []:
        path, value = parse_override(assignment)
        node = out
        for part in path[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ValueError(f"override path {'.'.join(path)!r} crosses a non-table value")
        node[path[-1]] = value
    return out


def _section(config: dict, name: str) -> dict:
    value = config.get(name, {})
    if not isinstance(value, dict):
        raise ValueError(f"config section {name!r} must be a table")
    return value


def build_physical_params(config: dict) -> PhysicalParams:
    sec = _section(config, "physics")
    kwargs = {}
    for key in ("temperature_K", "particle_radius_m", "viscosity_mPas", "boltzmann_J_per_K"):
        if key in sec:
            kwargs[key] = sec[key]
    unknown = set(sec) - {"temperature_K", "particle_radius_m", "viscosity_mPas", "boltzmann_J_per_K"}
    if unknown:
        raise ValueError(f"unknown physics keys: {sorted(unknown)}")
    return PhysicalParams(**kwargs)


def build_acquisition(config: dict, **cli_overrides: Any) -> AcquisitionConfig:
    sec = dict(_section(config, "acquisition"))
    for key, value in cli_overrides.items():
        if value is not None:
            sec[key] = value
    allowed = {"frames_per_second", "observation_s", "trials_M", "master_seed"}
    unknown = set(sec) - allowed
    if unknown:
        raise ValueError(f"unknown acquisition keys: {sorted(unknown)}")
    return AcquisitionConfig(**sec)


def build_drive(config: dict) -> "DriveSpec | None":
    sec = _section(config, "drive")
    if not sec:
        return None
    allowed = {"amplitude_N", "frequency_Hz", "direction", "phase_rad"}
    unknown = set(sec) - allowed
    if unknown:
        raise ValueError(f"unknown drive keys: {sorted(unknown)}")
    kwargs = dict(sec)
    if "direction" in kwargs:
        kwargs["direction"] = tuple(kwargs["direction"])
    return DriveSpec(**kwargs)


def build_geometry(config: dict) -> Geometry:
    sec = _section(config, "geometry")
    if not sec:
        return Unbounded()
    kind = sec.get("kind", "unbounded")
    if kind not in GEOMETRY_KINDS:
        raise ValueError(f"geometry.kind must be one of {GEOMETRY_KINDS}, got {kind!r}")
    if kind == "unbounded":
        extra = set(sec) - {"kind"}
        if extra:
            raise ValueError(f"unbounded geometry takes no other keys, got {sorted(extra)}")
        return Unbounded()
    if kind == "half_space":
        extra = set(sec) - {"kind", "wall_normal", "wall_offset_m"}
        if extra:
            raise ValueError(f"unknown half_space keys: {sorted(extra)}")
        kwargs = {}
        if "wall_normal" in sec:
            kwargs["wall_normal"] = tuple(sec["wall_normal"])
        if "wall_offset_m" in sec:
            kwargs["wall_offset_m"] = sec["wall_offset_m"]
        return HalfSpace(**kwargs)
    extra = set(sec) - {"kind", "edge_m", "obstacles"}
    if extra:
        raise ValueError(f"unknown periodic_box keys: {sorted(extra)}")
    if "edge_m" not in sec:
        raise ValueError("periodic_box geometry needs edge_m")
    obstacles = tuple(
        SphericalObstacle(center_m=tuple(entry["center_m"]), radius_m=entry["radius_m"])
        for entry in sec.get("obstacles", [])
    )
    return PeriodicBox(edge_m=sec["edge_m"], obstacles=obstacles)


def build_langevin_run(config: dict, **cli_overrides: Any) -> LangevinRun:
    sim = dict(_section(config, "simulation"))
    allowed = {"particle_count", "thermal_noise", "substeps_per_frame", "convention", "placement"}
    unknown = set(sim) - allowed
    if unknown:
        raise ValueError(f"unknown simulation keys: {sorted(unknown)}")
    acq_overrides = {
        k: cli_overrides.pop(k)
        for k in ("frames_per_second", "observation_s", "trials_M", "master_seed")
        if k in cli_overrides
    }
    sim.update((k, v) for k, v in cli_overrides.items() if v is not None)
    return LangevinRun(
        params=build_physical_params(config),
        acquisition=build_acquisition(config, **acq_overrides),
        drive=build_drive(config),
        geometry=build_geometry(config),
        **sim,
    )
