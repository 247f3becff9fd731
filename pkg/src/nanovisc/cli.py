"""Command line front end.

Subcommands::

    nanovisc simulate --config run.toml --out paths.csv
    nanovisc estimate --in paths.csv --mode 2d --factor 2
    nanovisc ensemble --obs 240 --fps 40 --trials 100 --seed 0 --out report.json
    nanovisc sweep --spec sweep.toml --out sweep.csv
    nanovisc box1 --out verdict.json

`box1` exits 0 only when the reproduction verdict passes, so it can
gate scripts and CI directly. All commands refuse to clobber results
they did not produce; pass --force to override.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from pathlib import Path

from . import __version__
from .config import (
    apply_overrides,
    build_acquisition,
    build_langevin_run,
    build_physical_params,
    load_config,
)
from .conventions import DEFAULT_CONVENTION, resolve_convention
from .estimators import (
    CORRECTION_EXACT,
    CORRECTION_HISTORICAL_4PI,
    FULL_3D,
    PROJECTED_2D,
    diffusion_from_msd,
    msd_at_lag,
    predicted_relative_std,
)
from .harness import (
    CANONICAL_BOX1_SEED,
    BOX1_TRIALS_M,
    EstimateReport,
    RunManifest,
    SweepSpec,
    reproduce_box1,
    run_ensemble,
    run_sweep,
    write_report_json,
    write_sweep_csv,
    write_verdict_json,
)
from .io import (
    read_trajectory_csv,
    write_multi_trajectory_csv,
    write_trajectory_csv,
)
from .langevin import simulate_langevin
from .paths import GENERATOR_SCHEME, generate_wiener, project_to_plane, subsample
from .physics import viscosity_from_diffusion

_MODE_FLAGS = {"3d": FULL_3D, "2d": PROJECTED_2D}


def _load_and_override(args: argparse.Namespace) -> dict:
    config = load_config(args.config) if args.config else {}
    return apply_overrides(config, args.set or [])


def _split_pairs(raw: str) -> list[str]:
    """Split 'a=1,b=[1,0,0]' on commas that sit outside brackets."""
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(raw):
        if ch in "[{":
            depth += 1
        elif ch in "]}":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append(raw[start:i])
            start = i + 1
    parts.append(raw[start:])
    return [p for p in parts if p.strip()]


def _merge_inline_section(config: dict, section: str, raw: "str | None") -> dict:
    if raw is None:
        return config
    return apply_overrides(config, [f"{section}.{pair}" for pair in _split_pairs(raw)])


def _refuse_plain_overwrite(path: str, force: bool) -> None:
    if Path(path).exists() and not force:
        raise RuntimeError(f"{path} already exists; pass --force to replace it")


def _cmd_simulate(args: argparse.Namespace) -> int:
    config = _load_and_override(args)
    config = _merge_inline_section(config, "drive", args.drive)
    config = _merge_inline_section(config, "geometry", args.geometry)
    model = args.model
    if model == "auto":
        has_dynamics = any(k in config for k in ("drive", "geometry", "simulation"))
        model = "langevin" if has_dynamics else "wiener"
    _refuse_plain_overwrite(args.out, args.force)
    if model == "wiener":
        params = build_physical_params(config)
        acq = build_acquisition(config, master_seed=args.seed)
        convention = config.get("simulation", {}).get("convention", DEFAULT_CONVENTION)
        trajectories = [generate_wiener(params, acq, args.trial, convention)]
    else:
        overrides = {"master_seed": args.seed} if args.seed is not None else {}
        run = build_langevin_run(config, **overrides)
        trajectories = simulate_langevin(run, args.trial)
    if args.factor > 1:
        trajectories = [subsample(t, args.factor) for t in trajectories]
    if len(trajectories) == 1:
        write_trajectory_csv(args.out, trajectories[0])
    else:
        write_multi_trajectory_csv(args.out, trajectories)
    print(f"wrote {args.out}")
    return 0


def _cmd_estimate(args: argparse.Namespace) -> int:
    traj = read_trajectory_csv(args.infile)
    if args.factor > 1:
        traj = subsample(traj, args.factor)
    mode = _MODE_FLAGS[args.mode]
    work = project_to_plane(traj) if mode == PROJECTED_2D else traj
    convention = resolve_convention(args.convention)
    estimate = msd_at_lag(work, args.lag)
    correction = args.correction if mode == PROJECTED_2D else CORRECTION_EXACT
    d = diffusion_from_msd(estimate, convention, correction)
    visc = viscosity_from_diffusion(d, args.temperature_K, args.radius_m, args.boltzmann)
    # One input file is one realization, so the spread columns that an
    # ensemble run would fill are null here and low_trials_warning is set.
    config = {
        "input": args.infile,
        "input_sha256": hashlib.sha256(Path(args.infile).read_bytes()).hexdigest(),
        "dimension_mode": mode,
        "factor": args.factor,
        "lag_frames": args.lag,
        "correction": correction,
        "temperature_K": args.temperature_K,
        "particle_radius_m": args.radius_m,
        "boltzmann_J_per_K": args.boltzmann,
        "trials_M": 1,
    }
    manifest = RunManifest(command="estimate", config=config, convention=convention.value)
    report = EstimateReport(
        config={**config, "manifest_hash": manifest.hash(), "low_trials_warning": True},
        convention=convention.value,
        per_resolution=[{"fps": 1.0 / traj.dt_s, "D_est": d, "visc_est": visc}],
        ensemble={
            "means": [visc],
            "stds": [None],
            "predicted_stds": [predicted_relative_std(estimate.sample_count)],
        },
        seeds={"master_seed": None, "scheme": GENERATOR_SCHEME},
    )
    if args.out:
        write_report_json(args.out, report, force=args.force)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(report.to_json_bytes().decode())
    return 0


def _parse_factors(raw: str) -> tuple[int, ...]:
    try:
        factors = tuple(int(part) for part in raw.split(",") if part.strip())
    except ValueError as exc:
        raise ValueError(f"--factors must be comma separated integers, got {raw!r}") from exc
    if not factors:
        raise ValueError("--factors must name at least one factor")
    return factors


def _cmd_ensemble(args: argparse.Namespace) -> int:
    config = _load_and_override(args)
    params = build_physical_params(config)
    acq = build_acquisition(
        config,
        frames_per_second=args.fps,
        observation_s=args.obs,
        trials_M=args.trials,
        master_seed=args.seed,
    )
    convention = config.get("simulation", {}).get("convention", args.convention)
    report = run_ensemble(
        params,
        acq,
        convention=convention,
        dimension_mode=_MODE_FLAGS[args.mode],
        factors=_parse_factors(args.factors),
    )
    write_report_json(args.out, report, force=args.force)
    if report.config["low_trials_warning"]:
        print("warning: fewer than 2 trials, the spread columns are not meaningful", file=sys.stderr)
    print(f"wrote {args.out}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = apply_overrides(load_config(args.spec), args.set or [])
    grid = config.get("grid", {})
    fixed = config.get("fixed", {})
    spec = SweepSpec(
        observation_s=tuple(grid.get("observation_s", ())),
        frames_per_second=tuple(grid.get("frames_per_second", (40.0,))),
        temperature_K=tuple(grid.get("temperature_K", (310.0,))),
        particle_radius_m=tuple(grid.get("particle_radius_m", (2e-8,))),
        viscosity_mPas=fixed.get("viscosity_mPas", 1.0),
        boltzmann_J_per_K=fixed.get("boltzmann_J_per_K", 1.38e-23),
        trials_M=fixed.get("trials_M", 100),
        master_seed=args.seed if args.seed is not None else fixed.get("master_seed", 0),
        factors=tuple(fixed.get("factors", (1, 2, 4))),
        dimension_mode=fixed.get("dimension_mode", PROJECTED_2D),
        convention=fixed.get("convention", DEFAULT_CONVENTION.value),
        run_ceiling=fixed.get("run_ceiling", 10_000),
    )
    rows, _manifest = run_sweep(spec)
    write_sweep_csv(args.out, rows, force=args.force)
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def _cmd_box1(args: argparse.Namespace) -> int:
    verdict = reproduce_box1(master_seed=args.seed, trials_M=args.trials)
    print(verdict.format_table())
    if args.out:
        write_verdict_json(args.out, verdict, force=args.force)
        print(f"wrote {args.out}")
    return 0 if verdict.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nanovisc",
        description="Particle tracking viscometry: simulate tracer paths and estimate viscosity.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="TOML run configuration")
        p.add_argument(
            "--set",
            action="append",
            metavar="KEY=VALUE",
            help="override a config value by dotted path, e.g. acquisition.trials_M=10",
        )
        p.add_argument("--force", action="store_true", help="replace existing output files")

    p = sub.add_parser("simulate", help="generate tracer paths and write them as CSV")
    add_common(p)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--seed", type=int, default=None, help="override the master seed")
    p.add_argument("--trial", type=int, default=0, help="trial index within the seed stream")
    p.add_argument(
        "--model",
        choices=("auto", "wiener", "langevin"),
        default="auto",
        help="auto picks langevin when drive/geometry/simulation sections are present",
    )
    p.add_argument(
        "--drive",
        metavar="KEY=VALUE,...",
        help="inline [drive] settings, e.g. force_N=1.8e-13,frequency_Hz=10.0",
    )
    p.add_argument(
        "--geometry",
        metavar="KEY=VALUE,...",
        help='inline [geometry] settings, e.g. "kind=half_space,normal=[0,0,1]"',
    )
    p.add_argument(
        "--factor",
        type=int,
        default=1,
        help="keep every Nth frame before writing, shrinking the frame rate",
    )
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("estimate", help="estimate D and viscosity from a trajectory CSV")
    p.add_argument("--in", dest="infile", required=True, help="input trajectory CSV")
    p.add_argument("--out", help="write the JSON result here instead of stdout")
    p.add_argument("--force", action="store_true", help="replace an existing output file")
    p.add_argument("--mode", choices=sorted(_MODE_FLAGS), default="2d")
    p.add_argument("--factor", type=int, default=1, help="subsample factor applied before estimating")
    p.add_argument("--lag", type=int, default=1, help="lag in frames for the displacement statistic")
    p.add_argument(
        "--correction",
        choices=(CORRECTION_EXACT, CORRECTION_HISTORICAL_4PI),
        default=CORRECTION_EXACT,
        help="in-plane to 3D correction factor (historical_4pi is for comparisons only)",
    )
    p.add_argument("--convention", default=DEFAULT_CONVENTION.value)
    p.add_argument("--temperature-K", dest="temperature_K", type=float, default=310.0)
    p.add_argument("--radius-m", dest="radius_m", type=float, default=2e-8)
    p.add_argument("--boltzmann", type=float, default=1.38e-23)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("ensemble", help="run M seeded trials and write an estimate report")
    add_common(p)
    p.add_argument("--out", required=True, help="output JSON report path")
    p.add_argument("--obs", type=float, default=None, help="observation window in seconds")
    p.add_argument("--fps", type=float, default=None, help="acquisition frame rate")
    p.add_argument("--trials", type=int, default=None, help="number of trials M")
    p.add_argument("--seed", type=int, default=None, help="master seed")
    p.add_argument("--factors", default="1,2,4", help="comma separated subsample factors")
    p.add_argument("--mode", choices=sorted(_MODE_FLAGS), default="2d")
    p.add_argument("--convention", default=DEFAULT_CONVENTION.value)
    p.set_defaults(func=_cmd_ensemble)

    p = sub.add_parser("sweep", help="run a grid of ensembles and write a long format CSV")
    p.add_argument("--spec", required=True, help="TOML sweep specification")
    p.add_argument(
        "--set",
        action="append",
        metavar="KEY=VALUE",
        help="override a spec value by dotted path, e.g. fixed.trials_M=10",
    )
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--seed", type=int, default=None, help="override the sweep master seed")
    p.add_argument("--force", action="store_true", help="replace an existing output file")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser(
        "box1", help="re-run the canonical resolution table; exit 0 only on a pass"
    )
    p.add_argument("--seed", type=int, default=CANONICAL_BOX1_SEED, help="master seed")
    p.add_argument("--trials", type=int, default=BOX1_TRIALS_M, help="trials per table row")
    p.add_argument("--out", help="also write the verdict as JSON")
    p.add_argument("--force", action="store_true", help="replace an existing output file")
    p.set_defaults(func=_cmd_box1)

    return parser


def main(argv: "list[str] | None" = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
