"""Trajectory CSV emission and parsing.

Files follow RFC 4180: comma separated, CRLF row endings, a mandatory
header row. Floats are written with repr so a read back returns the
exact same binary values, which the determinism guarantees elsewhere in
the package rely on.

Single particle files carry ``t,x,y,z`` rows; multi particle files carry
``t,particle,x,y,z`` rows grouped by particle then ordered by time.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .paths import Trajectory

TRAJECTORY_HEADER = ["t", "x", "y", "z"]
MULTI_TRAJECTORY_HEADER = ["t", "particle", "x", "y", "z"]

_REL_SPACING_TOL = 1e-9


def _cell(value: float) -> str:
    # repr of a Python float is the shortest string that round-trips, which
    # keeps re-read trajectories bit identical to the simulated ones.
    return repr(float(value))


def write_trajectory_csv(path: "str | Path", trajectory: Trajectory) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRAJECTORY_HEADER)
        for i, row in enumerate(trajectory.positions):
            writer.writerow([_cell(i * trajectory.dt_s), _cell(row[0]), _cell(row[1]), _cell(row[2])])


def write_multi_trajectory_csv(path: "str | Path", trajectories: Sequence[Trajectory]) -> None:
    if not trajectories:
        raise ValueError("need at least one trajectory")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(MULTI_TRAJECTORY_HEADER)
        for p, traj in enumerate(trajectories):
            for i, row in enumerate(traj.positions):
                writer.writerow(
                    [_cell(i * traj.dt_s), str(p), _cell(row[0]), _cell(row[1]), _cell(row[2])]
                )


def _dt_from_times(times: np.ndarray, source: str) -> float:
    if times.size < 2:
        raise ValueError(f"{source}: need at least two rows per particle")
    deltas = np.diff(times)
    dt = float(deltas[0])
    if dt <= 0:
        raise ValueError(f"{source}: time column must increase")
    if np.any(np.abs(deltas - dt) > _REL_SPACING_TOL * max(dt, 1.0)):
        raise ValueError(f"{source}: time column is not uniformly spaced")
    return dt


def _read_rows(path: "str | Path", header: list[str]) -> Iterable[list[str]]:
    with open(path, "r", newline="") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        if first != header:
            raise ValueError(f"{path}: expected header {','.join(header)!r}, got {first!r}")
        yield from reader


def read_trajectory_csv(path: "str | Path") -> Trajectory:
    times: list[float] = []
    coords: list[tuple[float, float, float]] = []
    for row in _read_rows(path, TRAJECTORY_HEADER):
        if len(row) != 4:
            raise ValueError(f"{path}: malformed row {row!r}")
        times.append(float(row[0]))
        coords.append((float(row[1]), float(row[2]), float(row[3])))
    dt = _dt_from_times(np.asarray(times), str(path))
    return Trajectory(dt_s=dt, positions=np.asarray(coords))


def read_multi_trajectory_csv(path: "str | Path") -> list[Trajectory]:
    by_particle: dict[int, list[tuple[float, float, float, float]]] = {}
    for row in _read_rows(path, MULTI_TRAJECTORY_HEADER):
        if len(row) != 5:
            raise ValueError(f"{path}: malformed row {row!r}")
        by_particle.setdefault(int(row[1]), []).append(
            (float(row[0]), float(row[2]), float(row[3]), float(row[4]))
        )
    out = []
    for particle in sorted(by_particle):
        rows = np.asarray(by_particle[particle])
        dt = _dt_from_times(rows[:, 0], f"{path} (particle {particle})")
        out.append(Trajectory(dt_s=dt, positions=rows[:, 1:]))
    return out
