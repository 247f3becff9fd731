"""Overdamped Langevin simulation of driven nanoparticles.

For a 20 nm particle in a ~1 mPa s medium the inertial relaxation time
m/gamma is of order 1e-10 s, many orders below any frame interval used
here, so velocity is slaved to force and the integrator advances
positions only:

    dx = (F_drive(t) / gamma) * dt + sqrt(2 * D_c * dt) * xi

per coordinate (Euler-Maruyama), where gamma is the Stokes drag and D_c
is the per coordinate diffusion under the active convention. The drive
is sampled at substep midpoints, which keeps the deterministic part of
the step second order accurate without changing the scheme's stochastic
order.

Geometry is one of: unbounded space, a reflecting plane wall bounding a
half space, or a periodic box with fixed spherical obstacles that
reflect specularly (neutral particles bounce elastically; no sticking,
no long range forces). Recorded trajectories are continuous (unwrapped)
coordinates even in a periodic box; wrap positions into the box only
when testing membership against windows or obstacles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from ._validation import check_int_at_least, check_positive, check_unit_vector
from .conventions import DEFAULT_CONVENTION, Convention, per_coordinate_variance
from .paths import AcquisitionConfig, Trajectory, trial_rng
from .physics import PhysicalParams, drag_coefficient, einstein_diffusion

_MAX_BOUNCES = 8
_MAX_SPLITS = 8
_PLACEMENT_TRIES = 1000


class InvalidStateError(RuntimeError):
    """A particle reached (or started in) a state the geometry forbids."""


@dataclass(frozen=True)
class DriveSpec:
    """Sinusoidal force F(t) = amplitude_N * sin(2*pi*f*t + phase) * direction."""

    amplitude_N: float
    frequency_Hz: float
    direction: tuple[float, float, float] = (1.0, 0.0, 0.0)
    phase_rad: float = 0.0

    def __post_init__(self) -> None:
        check_positive("amplitude_N", self.amplitude_N, allow_zero=True)
        check_positive("frequency_Hz", self.frequency_Hz)
        check_unit_vector("direction", self.direction)
        if not math.isfinite(self.phase_rad):
            raise ValueError("phase_rad must be finite")

    @property
    def direction_array(self) -> np.ndarray:
        return np.asarray(self.direction, dtype=float)


@dataclass(frozen=True)
class Unbounded:
    """No boundaries; free space."""


@dataclass(frozen=True)
class HalfSpace:
    """Reflecting plane wall; allowed positions satisfy dot(p, n) >= offset."""

    wall_normal: tuple[float, float, float] = (0.0, 0.0, 1.0)
    wall_offset_m: float = 0.0

    def __post_init__(self) -> None:
        check_unit_vector("wall_normal", self.wall_normal)
        if not math.isfinite(self.wall_offset_m):
            raise ValueError("wall_offset_m must be finite")

    @property
    def normal_array(self) -> np.ndarray:
        return np.asarray(self.wall_normal, dtype=float)


@dataclass(frozen=True)
class SphericalObstacle:
    center_m: tuple[float, float, float]
    radius_m: float

    def __post_init__(self) -> None:
        center = np.asarray(self.center_m, dtype=float)
        if center.shape != (3,) or not np.all(np.isfinite(center)):
            raise ValueError("center_m must be a finite 3-vector")
        check_positive("radius_m", self.radius_m)

    @property
    def center_array(self) -> np.ndarray:
        return np.asarray(self.center_m, dtype=float)


@dataclass(frozen=True)
class PeriodicBox:
    """Cubic box spanning [-edge/2, edge/2) per axis, with optional obstacles.

    Obstacles must sit entirely inside the box and must not overlap each
    other, so any point can be inside at most one obstacle.
    """

    edge_m: float
    obstacles: tuple[SphericalObstacle, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        check_positive("edge_m", self.edge_m)
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        half = self.edge_m / 2.0
        for i, ob in enumerate(self.obstacles):
            c = ob.center_array
            if np.any(np.abs(c) + ob.radius_m >= half):
                raise ValueError(f"obstacle {i} does not fit inside the box")
        for i, a in enumerate(self.obstacles):
            for j in range(i + 1, len(self.obstacles)):
                b = self.obstacles[j]
                gap = np.linalg.norm(a.center_array - b.center_array)
                if gap < a.radius_m + b.radius_m:
                    raise ValueError(f"obstacles {i} and {j} overlap")


Geometry = Union[Unbounded, HalfSpace, PeriodicBox]


@dataclass(frozen=True)
class LangevinRun:
    """Full description of one driven (or undriven) simulation.

    placement chooses initial positions: "origin" puts every particle at
    the origin; "uniform" scatters them uniformly over a periodic box
    (outside obstacles) and is only meaningful there.
    """

    params: PhysicalParams = field(default_factory=PhysicalParams)
    acquisition: AcquisitionConfig = field(default_factory=AcquisitionConfig)
    drive: "DriveSpec | None" = None
    geometry: Geometry = field(default_factory=Unbounded)
    particle_count: int = 1
    thermal_noise: bool = True
    substeps_per_frame: int = 100
    convention: "str | Convention" = DEFAULT_CONVENTION
    placement: str = "origin"

    def __post_init__(self) -> None:
        check_int_at_least("particle_count", self.particle_count, 1)
        check_int_at_least("substeps_per_frame", self.substeps_per_frame, 1)
        if self.placement not in ("origin", "uniform"):
            raise ValueError(f"placement must be 'origin' or 'uniform', got {self.placement!r}")
        if self.placement == "uniform" and not isinstance(self.geometry, PeriodicBox):
            raise ValueError("uniform placement requires a periodic box geometry")
        if self.placement == "origin":
            origin = np.zeros(3)
            if isinstance(self.geometry, HalfSpace):
                if float(origin @ self.geometry.normal_array) < self.geometry.wall_offset_m:
                    raise ValueError("origin lies on the forbidden side of the wall")
            if isinstance(self.geometry, PeriodicBox):
                if _first_containing(origin, self.geometry.obstacles) is not None:
                    raise ValueError("origin placement puts particles inside an obstacle")


def reflect_plane(positions: np.ndarray, wall_normal, wall_offset_m: float) -> np.ndarray:
    """Mirror any position on the forbidden side of the plane back across it.

    Works on a single point of shape (3,) or a batch of shape (..., 3).
    Positions already on the allowed side (dot(p, n) >= offset) come back
    unchanged.
    """
    n = check_unit_vector("wall_normal", wall_normal)
    pos = np.asarray(positions, dtype=float)
    signed = pos @ n - wall_offset_m
    shortfall = np.minimum(signed, 0.0)
    return pos - 2.0 * shortfall[..., None] * n


def _first_containing(point: np.ndarray, obstacles) -> "SphericalObstacle | None":
    # Obstacles are disjoint so at most one can contain the point; scanning
    # in declaration order makes the surface-contact tie deterministic.
    for ob in obstacles:
        delta = point - ob.center_array
        if float(delta @ delta) < ob.radius_m**2:
            return ob
    return None


def _reflect_once(
    pos_before: np.ndarray, pos_after: np.ndarray, center: np.ndarray, radius: float
) -> tuple[np.ndarray, np.ndarray]:
    """Specular reflection of pos_after about the tangent plane at the
    point where the step crosses the sphere surface. Returns (reflected,
    crossing_point)."""
    b = pos_before - center
    e = pos_after - center
    bb = float(b @ b)
    r2 = radius * radius
    if bb < r2 * (1.0 - 1e-9):
        raise InvalidStateError("step started inside an obstacle")
    d = e - b
    a2 = float(d @ d)
    if a2 == 0.0:
        return pos_after.copy(), pos_after.copy()
    a1 = 2.0 * float(b @ d)
    a0 = bb - r2
    disc = a1 * a1 - 4.0 * a2 * a0
    if disc < 0.0:
        disc = 0.0
    s = (-a1 - math.sqrt(disc)) / (2.0 * a2)
    s = min(max(s, 0.0), 1.0)
    q = b + s * d
    qn = float(np.linalg.norm(q))
    normal = q / qn if qn > 0.0 else np.array([1.0, 0.0, 0.0])
    reflected = e - 2.0 * float((e - q) @ normal) * normal
    return center + reflected, center + q


def reflect_sphere(
    pos_before: np.ndarray, pos_after: np.ndarray, obstacle: SphericalObstacle
) -> np.ndarray:
    """Reflect a step that ends inside a spherical obstacle.

    If pos_after is outside (or on) the sphere the step never registered
    a collision at this level and pos_after is returned unchanged. A
    pos_before inside the sphere is an invalid state: the caller let a
    particle tunnel in on a previous step.
    """
    before = np.asarray(pos_before, dtype=float)
    after = np.asarray(pos_after, dtype=float)
    if before.shape != (3,) or after.shape != (3,):
        raise ValueError("reflect_sphere expects single 3-vectors")
    center = obstacle.center_array
    delta = after - center
    if float(delta @ delta) >= obstacle.radius_m**2:
        b = before - center
        if float(b @ b) < obstacle.radius_m**2 * (1.0 - 1e-9):
            raise InvalidStateError("step started inside an obstacle")
        return after
    reflected, _ = _reflect_once(before, after, center, obstacle.radius_m)
    return reflected


def _resolve_bounces(before: np.ndarray, after: np.ndarray, obstacles) -> "np.ndarray | None":
    """Chase up to _MAX_BOUNCES successive reflections; None means give up."""
    for _ in range(_MAX_BOUNCES):
        ob = _first_containing(after, obstacles)
        if ob is None:
            return after
        after, crossing = _reflect_once(before, after, ob.center_array, ob.radius_m)
        before = crossing
    if _first_containing(after, obstacles) is None:
        return after
    return None


def _advance_one(before: np.ndarray, step: np.ndarray, obstacles, depth: int = 0) -> np.ndarray:
    resolved = _resolve_bounces(before, before + step, obstacles)
    if resolved is not None:
        return resolved
    if depth >= _MAX_SPLITS:
        raise InvalidStateError("could not resolve obstacle reflections for a substep")
    mid = _advance_one(before, 0.5 * step, obstacles, depth + 1)
    return _advance_one(mid, 0.5 * step, obstacles, depth + 1)


def _init_and_noise(
    run: LangevinRun, trial_index: int, n_substeps: int, sigma_sub: float
) -> tuple[np.ndarray, np.ndarray]:
    """Initial positions and the full substep noise block, one RNG stream
    per particle. Uniform placement draws come off the head of the same
    stream as that particle's noise."""
    p = run.particle_count
    init = np.zeros((p, 3))
    noise = np.zeros((p, n_substeps, 3))
    uniform = run.placement == "uniform"
    for i in range(p):
        rng = trial_rng(run.acquisition.master_seed, trial_index, i)
        if uniform:
            geometry = run.geometry
            assert isinstance(geometry, PeriodicBox)
            half = geometry.edge_m / 2.0
            for _ in range(_PLACEMENT_TRIES):
                candidate = rng.uniform(-half, half, 3)
                if _first_containing(candidate, geometry.obstacles) is None:
                    init[i] = candidate
                    break
            else:
                raise InvalidStateError("could not place a particle outside the obstacles")
        if run.thermal_noise:
            noise[i] = rng.standard_normal((n_substeps, 3)) * sigma_sub
    return init, noise


def _drive_displacements(
    run: LangevinRun, gamma: float, n_substeps: int, dt_sub: float
) -> "np.ndarray | None":
    if run.drive is None or run.drive.amplitude_N == 0.0:
        return None
    drive = run.drive
    t_mid = (np.arange(n_substeps) + 0.5) * dt_sub
    speed = (drive.amplitude_N / gamma) * np.sin(
        2.0 * math.pi * drive.frequency_Hz * t_mid + drive.phase_rad
    )
    return np.outer(speed * dt_sub, drive.direction_array)


def simulate_langevin(run: LangevinRun, trial_index: int = 0) -> list[Trajectory]:
    """Integrate one run and return a frame rate trajectory per particle.

    All randomness derives from (master_seed, trial_index, particle
    index), so per particle streams are stable no matter how many
    particles are simulated together.
    """
    check_int_at_least("trial_index", trial_index, 0)
    acq = run.acquisition
    n_frames = acq.frame_count
    s_per = run.substeps_per_frame
    dt_sub = acq.dt_s / s_per
    n_substeps = n_frames * s_per

    gamma = drag_coefficient(run.params.particle_radius_m, run.params.viscosity_mPas)
    diffusion = einstein_diffusion(run.params)
    sigma_sub = float(np.sqrt(per_coordinate_variance(diffusion, dt_sub, run.convention)))

    init, noise = _init_and_noise(run, trial_index, n_substeps, sigma_sub)
    drive_disp = _drive_displacements(run, gamma, n_substeps, dt_sub)

    geometry = run.geometry
    obstacles = geometry.obstacles if isinstance(geometry, PeriodicBox) else ()

    free = isinstance(geometry, Unbounded) or (isinstance(geometry, PeriodicBox) and not obstacles)
    if free:
        steps = noise if drive_disp is None else noise + drive_disp[None, :, :]
        cumulative = np.cumsum(steps, axis=1)
        frames = np.empty((run.particle_count, n_frames + 1, 3))
        frames[:, 0, :] = init
        frames[:, 1:, :] = init[:, None, :] + cumulative[:, s_per - 1 :: s_per, :]
    else:
        frames = _integrate_bounded(run, init, drive_disp, noise, n_frames, s_per)

    dt = acq.dt_s
    return [Trajectory(dt_s=dt, positions=frames[i]) for i in range(run.particle_count)]


def _integrate_bounded(
    run: LangevinRun,
    init: np.ndarray,
    drive_disp: "np.ndarray | None",
    noise: np.ndarray,
    n_frames: int,
    s_per: int,
) -> np.ndarray:
    geometry = run.geometry
    p = run.particle_count
    frames = np.empty((p, n_frames + 1, 3))
    frames[:, 0, :] = init

    if isinstance(geometry, HalfSpace):
        pos = init.copy()
        normal = geometry.normal_array
        offset = geometry.wall_offset_m
        k = 0
        for frame in range(1, n_frames + 1):
            for _ in range(s_per):
                step = noise[:, k, :]
                if drive_disp is not None:
                    step = step + drive_disp[k]
                pos = reflect_plane(pos + step, normal, offset)
                k += 1
            frames[:, frame, :] = pos
        return frames

    assert isinstance(geometry, PeriodicBox)
    obstacles = geometry.obstacles
    edge = geometry.edge_m
    half = edge / 2.0
    centers = np.stack([ob.center_array for ob in obstacles])
    radii = np.array([ob.radius_m for ob in obstacles])

    wrapped = init.copy()
    shift = np.zeros_like(wrapped)
    k = 0
    for frame in range(1, n_frames + 1):
        for _ in range(s_per):
            step = noise[:, k, :]
            if drive_disp is not None:
                step = step + drive_disp[k]
            proposal = wrapped + step
            # Broad phase: which proposals land inside some obstacle.
            d2 = np.sum((proposal[:, None, :] - centers[None, :, :]) ** 2, axis=2)
            hit = np.any(d2 < radii[None, :] ** 2, axis=1)
            for idx in np.nonzero(hit)[0]:
                proposal[idx] = _advance_one(wrapped[idx], step[idx], obstacles)
            rewrapped = np.mod(proposal + half, edge) - half
            # A wrap can drop a point into an obstacle sitting near the
            # opposite face; push such a point back out along the radius.
            d2 = np.sum((rewrapped[:, None, :] - centers[None, :, :]) ** 2, axis=2)
            hit = np.any(d2 < radii[None, :] ** 2, axis=1)
            for idx in np.nonzero(hit)[0]:
                rewrapped[idx] = _push_out(rewrapped[idx], obstacles)
            shift += proposal - rewrapped
            wrapped = rewrapped
            k += 1
        frames[:, frame, :] = wrapped + shift
    return frames


def _push_out(point: np.ndarray, obstacles) -> np.ndarray:
    ob = _first_containing(point, obstacles)
    while ob is not None:
        delta = point - ob.center_array
        dist = float(np.linalg.norm(delta))
        if dist == 0.0:
            delta = np.array([1.0, 0.0, 0.0])
            dist = 1.0
        point = ob.center_array + delta * ((2.0 * ob.radius_m - dist) / dist)
        ob = _first_containing(point, obstacles)
    return point
