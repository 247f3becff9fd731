"""Discrete time Wiener paths as a finite frame rate tracker records them.

Positions sit on a uniform frame grid. The generator draws independent
Gaussian increments per coordinate, with the coordinate variance set by
the active convention, and derives all randomness deterministically from
(master_seed, trial_index) so any single trial can be regenerated in
isolation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ._validation import check_frame_count, check_int_at_least, check_positive, check_seed
from .conventions import DEFAULT_CONVENTION, Convention, per_coordinate_variance
from .physics import PhysicalParams, einstein_diffusion

# Identifier recorded in run manifests. Child streams are spawned as
# SeedSequence(master_seed, spawn_key=(trial_index, ...)), which is a stable
# documented derivation: the same (master_seed, trial_index) always yields
# the same stream regardless of how many other trials run.
GENERATOR_SCHEME = "numpy-pcg64/seedsequence-spawn-key"

MAX_OBSERVATION_S = 600.0


@dataclass(frozen=True)
class AcquisitionConfig:
    """Frame rate, duration, trial count and master seed of a recording.

    observation_s is capped at 600 s: photobleaching and stage drift make
    longer single particle recordings unusable, so a request for one is
    almost certainly a typo. observation_s * frames_per_second must come
    out to a whole number of frames.
    """

    frames_per_second: float = 40.0
    observation_s: float = 240.0
    trials_M: int = 100
    master_seed: int = 0

    def __post_init__(self) -> None:
        check_positive("frames_per_second", self.frames_per_second)
        check_positive("observation_s", self.observation_s)
        if self.observation_s > MAX_OBSERVATION_S:
            raise ValueError(
                f"observation_s must be <= {MAX_OBSERVATION_S} s, got {self.observation_s!r}"
            )
        check_int_at_least("trials_M", self.trials_M, 1)
        check_seed("master_seed", self.master_seed)
        check_frame_count(self.observation_s, self.frames_per_second)

    @property
    def frame_count(self) -> int:
        return check_frame_count(self.observation_s, self.frames_per_second)

    @property
    def dt_s(self) -> float:
        return 1.0 / self.frames_per_second


def _freeze_positions(positions: object, n_cols: int) -> np.ndarray:
    arr = np.ascontiguousarray(np.asarray(positions, dtype=float))
    if arr.ndim != 2 or arr.shape[1] != n_cols:
        raise ValueError(f"positions must have shape (N+1, {n_cols}), got {arr.shape}")
    if arr.shape[0] < 2:
        raise ValueError("a trajectory needs at least two positions (one step)")
    if not np.all(np.isfinite(arr)):
        raise ValueError("positions must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Uniformly sampled 3D positions in meters; row 0 is the start point."""

    dt_s: float
    positions: np.ndarray

    def __post_init__(self) -> None:
        check_positive("dt_s", self.dt_s)
        object.__setattr__(self, "positions", _freeze_positions(self.positions, 3))

    @property
    def n_steps(self) -> int:
        return self.positions.shape[0] - 1

    @property
    def duration_s(self) -> float:
        return self.n_steps * self.dt_s

    @property
    def times_s(self) -> np.ndarray:
        return np.arange(self.positions.shape[0]) * self.dt_s


@dataclass(frozen=True, eq=False)
class Trajectory2D:
    """Plane projection of a trajectory; columns are the in-plane coordinates."""

    dt_s: float
    positions: np.ndarray

    def __post_init__(self) -> None:
        check_positive("dt_s", self.dt_s)
        object.__setattr__(self, "positions", _freeze_positions(self.positions, 2))

    @property
    def n_steps(self) -> int:
        return self.positions.shape[0] - 1

    @property
    def duration_s(self) -> float:
        return self.n_steps * self.dt_s


def trial_rng(master_seed: int, *stream_key: int) -> np.random.Generator:
    """Deterministic child generator for one trial (and optionally deeper keys)."""
    check_seed("master_seed", master_seed)
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=tuple(stream_key)))


def generate_wiener(
    params: PhysicalParams,
    acquisition: AcquisitionConfig,
    trial_index: int = 0,
    convention: "str | Convention" = DEFAULT_CONVENTION,
) -> Trajectory:
    """Simulate one free Brownian path at the configured frame rate.

    The path starts at the origin. Increments are drawn as an (N, 3)
    block of standard normals from the trial's own stream and scaled to
    the per coordinate variance 2*D*dt/3 under the default convention
    (2*D*dt under ``per-coordinate-standard``).
    """
    check_int_at_least("trial_index", trial_index, 0)
    n = acquisition.frame_count
    dt = acquisition.dt_s
    d = einstein_diffusion(params)
    sigma = float(np.sqrt(per_coordinate_variance(d, dt, convention)))
    rng = trial_rng(acquisition.master_seed, trial_index)
    steps = rng.standard_normal((n, 3)) * sigma
    positions = np.empty((n + 1, 3))
    positions[0] = 0.0
    np.cumsum(steps, axis=0, out=positions[1:])
    return Trajectory(dt_s=dt, positions=positions)


def subsample(trajectory: "Trajectory | Trajectory2D", factor: int) -> "Trajectory | Trajectory2D":
    """Keep every factor-th position starting at index 0; dt grows by factor.

    When factor does not divide the step count the trailing remainder is
    dropped and a warning reports how many steps were discarded.
    """
    check_int_at_least("factor", factor, 1)
    n = trajectory.n_steps
    remainder = n % factor
    if remainder:
        warnings.warn(
            f"subsample factor {factor} drops {remainder} trailing step(s) "
            f"of {n}; the retained window covers {n - remainder} step(s)",
            stacklevel=2,
        )
    kept = trajectory.positions[::factor]
    return type(trajectory)(dt_s=trajectory.dt_s * factor, positions=kept)


def project_to_plane(trajectory: Trajectory) -> Trajectory2D:
    """Drop the optical axis coordinate (y), keeping the x-z focal plane."""
    if not isinstance(trajectory, Trajectory):
        raise TypeError("project_to_plane expects a 3D Trajectory")
    return Trajectory2D(dt_s=trajectory.dt_s, positions=trajectory.positions[:, [0, 2]])
