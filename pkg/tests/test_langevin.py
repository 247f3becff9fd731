import math

import numpy as np
import pytest

from nanovisc import (
    AcquisitionConfig,
    DriveSpec,
    HalfSpace,
    InvalidStateError,
    LangevinRun,
    PeriodicBox,
    PhysicalParams,
    SphericalObstacle,
    Unbounded,
    drag_coefficient,
    msd_at_lag,
    read_multi_trajectory_csv,
    reflect_plane,
    reflect_sphere,
    simulate_langevin,
    write_multi_trajectory_csv,
)

PARAMS = PhysicalParams()
GAMMA = drag_coefficient(PARAMS.particle_radius_m, PARAMS.viscosity_mPas)


def _noiseless_run(phase=0.0, substeps=100):
    return LangevinRun(
        params=PARAMS,
        acquisition=AcquisitionConfig(frames_per_second=40.0, observation_s=2.0, master_seed=0),
        drive=DriveSpec(amplitude_N=1.8e-13, frequency_Hz=2.0, phase_rad=phase),
        thermal_noise=False,
        substeps_per_frame=substeps,
    )


def _closed_form(times, drive):
    """Deterministic overdamped response from the origin: integrate
    (F0/gamma) sin(w t + phi) dt."""
    w = 2.0 * math.pi * drive.frequency_Hz
    return (drive.amplitude_N / GAMMA) * (np.cos(drive.phase_rad) - np.cos(w * times + drive.phase_rad)) / w


@pytest.mark.parametrize("phase", [0.0, math.pi / 3])
def test_noiseless_drive_matches_closed_form(phase):
    run = _noiseless_run(phase=phase)
    traj = simulate_langevin(run, 0)[0]
    expected = _closed_form(traj.times_s, run.drive)
    amplitude = run.drive.amplitude_N / (GAMMA * 2.0 * math.pi * run.drive.frequency_Hz)
    worst = np.max(np.abs(traj.positions[:, 0] - expected)) / amplitude
    assert worst <= 1e-3
    # off-axis coordinates stay exactly at rest without noise
    np.testing.assert_array_equal(traj.positions[:, 1], 0.0)
    np.testing.assert_array_equal(traj.positions[:, 2], 0.0)


def test_noiseless_drive_off_axis_direction():
    direction = (0.0, 1.0, 0.0)
    run = LangevinRun(
        params=PARAMS,
        acquisition=AcquisitionConfig(frames_per_second=40.0, observation_s=1.0, master_seed=0),
        drive=DriveSpec(amplitude_N=1.8e-13, frequency_Hz=2.0, direction=direction),
        thermal_noise=False,
    )
    traj = simulate_langevin(run, 0)[0]
    assert np.max(np.abs(traj.positions[:, 1])) > 0.0
    np.testing.assert_array_equal(traj.positions[:, 0], 0.0)


def test_reflect_plane_frozen_point():
    reflected = reflect_plane(np.array([[1.0, 2.0, -0.3]]), np.array([0.0, 0.0, 1.0]), 0.0)
    np.testing.assert_allclose(reflected, [[1.0, 2.0, 0.3]], rtol=0, atol=1e-15)


def test_reflect_plane_leaves_allowed_points_alone():
    points = np.array([[0.5, -1.0, 0.2], [0.0, 0.0, 0.0]])
    out = reflect_plane(points, np.array([0.0, 0.0, 1.0]), 0.0)
    np.testing.assert_array_equal(out, points)


def test_reflect_plane_respects_offset_and_tilt():
    normal = np.array([1.0, 1.0, 0.0]) / math.sqrt(2.0)
    point = np.array([[0.0, 0.0, 5.0]])  # dot = 0, offset 1 puts it 1 below the wall
    out = reflect_plane(point, normal, 1.0)
    assert out[0] @ normal == pytest.approx(2.0, rel=1e-12)
    assert out[0, 2] == 5.0  # tangential coordinate untouched


def _entry_point(before, after, radius):
    """Independent crossing solver: smallest s in [0, 1] with
    |before + s (after - before)| = radius."""
    d = after - before
    a2 = d @ d
    a1 = 2.0 * (before @ d)
    a0 = before @ before - radius**2
    s = (-a1 - math.sqrt(a1 * a1 - 4.0 * a2 * a0)) / (2.0 * a2)
    return before + s * d


def test_reflect_sphere_head_on():
    obstacle = SphericalObstacle(center_m=(0.0, 0.0, 0.0), radius_m=1.0)
    reflected = reflect_sphere(np.array([2.0, 0.0, 0.0]), np.array([0.7, 0.0, 0.0]), obstacle)
    np.testing.assert_allclose(reflected, [1.3, 0.0, 0.0], rtol=0, atol=1e-12)


def test_reflect_sphere_miss_returns_endpoint():
    obstacle = SphericalObstacle(center_m=(0.0, 0.0, 0.0), radius_m=1.0)
    before = np.array([2.0, 1.5, 0.0])
    after = np.array([-2.0, 1.5, 0.0])  # passes above the sphere
    np.testing.assert_array_equal(reflect_sphere(before, after, obstacle), after)


def test_reflect_sphere_rejects_interior_start():
    obstacle = SphericalObstacle(center_m=(0.0, 0.0, 0.0), radius_m=1.0)
    with pytest.raises(InvalidStateError):
        reflect_sphere(np.array([0.1, 0.0, 0.0]), np.array([2.0, 0.0, 0.0]), obstacle)


def test_reflection_is_specular_about_the_tangent_plane():
    """The bounce must be the mirror image of the blocked endpoint about
    the tangent plane at the crossing, computed here independently."""
    obstacle = SphericalObstacle(center_m=(0.0, 0.0, 0.0), radius_m=1.0)
    before = np.array([1.8, 0.4, -0.2])
    after = np.array([0.3, 0.1, 0.05])
    crossing = _entry_point(before, after, 1.0)
    normal = crossing / np.linalg.norm(crossing)
    mirrored = after - 2.0 * ((after - crossing) @ normal) * normal
    reflected = reflect_sphere(before, after, obstacle)
    np.testing.assert_allclose(reflected, mirrored, rtol=1e-12, atol=0)
    # leftover travel length is preserved and the result is back outside
    assert np.linalg.norm(reflected - crossing) == pytest.approx(
        np.linalg.norm(after - crossing), rel=1e-9
    )
    assert np.linalg.norm(reflected) >= 1.0


def test_empty_periodic_box_equals_unbounded():
    """Without obstacles the box only relabels coordinates; the reported
    (unwrapped) path must be identical to free diffusion."""
    acq = AcquisitionConfig(frames_per_second=40.0, observation_s=2.0, master_seed=37)
    free = LangevinRun(params=PARAMS, acquisition=acq)
    boxed = LangevinRun(params=PARAMS, acquisition=acq, geometry=PeriodicBox(edge_m=1e-6))
    a = simulate_langevin(free, 0)[0]
    b = simulate_langevin(boxed, 0)[0]
    np.testing.assert_array_equal(a.positions, b.positions)


def test_half_space_keeps_allowed_side():
    run = LangevinRun(
        params=PARAMS,
        acquisition=AcquisitionConfig(frames_per_second=40.0, observation_s=5.0, master_seed=41),
        geometry=HalfSpace(),
        particle_count=20,
        substeps_per_frame=4,
    )
    for traj in simulate_langevin(run, 0):
        assert traj.positions[:, 2].min() >= 0.0


def test_tilted_half_space_keeps_allowed_side():
    normal = tuple(np.array([1.0, 2.0, 2.0]) / 3.0)
    run = LangevinRun(
        params=PARAMS,
        acquisition=AcquisitionConfig(frames_per_second=40.0, observation_s=2.0, master_seed=43),
        geometry=HalfSpace(wall_normal=normal, wall_offset_m=-1e-7),
        particle_count=10,
        substeps_per_frame=4,
    )
    n = np.array(normal)
    for traj in simulate_langevin(run, 0):
        assert (traj.positions @ n).min() >= -1e-7 - 1e-18


def test_crowded_box_slows_diffusion():
    acq = AcquisitionConfig(frames_per_second=40.0, observation_s=5.0, master_seed=47)
    obstacles = tuple(
        SphericalObstacle(center_m=c, radius_m=2.2e-7)
        for c in [(-2.4e-7, -2.4e-7, -2.4e-7), (2.4e-7, 2.4e-7, 2.4e-7), (-2.4e-7, 2.4e-7, 2.4e-7)]
    )
    crowded = LangevinRun(
        params=PARAMS,
        acquisition=acq,
        geometry=PeriodicBox(edge_m=1e-6, obstacles=obstacles),
        particle_count=8,
        substeps_per_frame=20,
        placement="uniform",
    )
    free = LangevinRun(params=PARAMS, acquisition=acq, particle_count=8, substeps_per_frame=20)
    msd_crowded = np.mean([msd_at_lag(t, 1).msd_m2 for t in simulate_langevin(crowded, 0)])
    msd_free = np.mean([msd_at_lag(t, 1).msd_m2 for t in simulate_langevin(free, 0)])
    assert msd_crowded < msd_free


def test_uniform_placement_stays_inside_and_off_obstacles():
    obstacle = SphericalObstacle(center_m=(0.0, 0.0, 0.0), radius_m=3e-7)
    run = LangevinRun(
        params=PARAMS,
        acquisition=AcquisitionConfig(frames_per_second=40.0, observation_s=0.05, master_seed=51),
        geometry=PeriodicBox(edge_m=1e-6, obstacles=(obstacle,)),
        particle_count=50,
        substeps_per_frame=2,
        placement="uniform",
    )
    starts = np.array([t.positions[0] for t in simulate_langevin(run, 0)])
    assert np.all(np.abs(starts) <= 5e-7)
    assert np.all(np.linalg.norm(starts, axis=1) >= 3e-7)


def test_particle_streams_do_not_depend_on_count():
    acq = AcquisitionConfig(frames_per_second=40.0, observation_s=1.0, master_seed=53)
    single = LangevinRun(params=PARAMS, acquisition=acq, particle_count=1)
    double = LangevinRun(params=PARAMS, acquisition=acq, particle_count=2)
    one = simulate_langevin(single, 0)[0]
    both = simulate_langevin(double, 0)
    np.testing.assert_array_equal(one.positions, both[0].positions)
    assert not np.array_equal(both[0].positions, both[1].positions)


def test_run_validation_rejects_impossible_setups():
    acq = AcquisitionConfig(frames_per_second=40.0, observation_s=1.0)
    with pytest.raises(ValueError):
        LangevinRun(params=PARAMS, acquisition=acq, placement="uniform")  # no box to fill
    with pytest.raises(ValueError):
        LangevinRun(
            params=PARAMS,
            acquisition=acq,
            geometry=PeriodicBox(
                edge_m=1e-6,
                obstacles=(SphericalObstacle(center_m=(0.0, 0.0, 0.0), radius_m=1e-7),),
            ),
        )  # origin placement starts inside the obstacle
    with pytest.raises(ValueError):
        LangevinRun(
            params=PARAMS,
            acquisition=acq,
            geometry=HalfSpace(wall_offset_m=1e-7),
        )  # origin on the forbidden side
    with pytest.raises(ValueError):
        LangevinRun(params=PARAMS, acquisition=acq, substeps_per_frame=0)
    with pytest.raises(ValueError):
        LangevinRun(params=PARAMS, acquisition=acq, placement="anywhere")


def test_geometry_validation():
    with pytest.raises(ValueError):
        PeriodicBox(edge_m=0.0)
    with pytest.raises(ValueError):
        PeriodicBox(
            edge_m=1e-6,
            obstacles=(SphericalObstacle(center_m=(4.5e-7, 0.0, 0.0), radius_m=1e-7),),
        )  # pokes through the face
    with pytest.raises(ValueError):
        PeriodicBox(
            edge_m=2e-6,
            obstacles=(
                SphericalObstacle(center_m=(0.0, 0.0, 2e-7), radius_m=2e-7),
                SphericalObstacle(center_m=(0.0, 0.0, 5e-7), radius_m=2e-7),
            ),
        )  # overlapping spheres
    with pytest.raises(ValueError):
        HalfSpace(wall_normal=(0.0, 0.0, 2.0))
    with pytest.raises(ValueError):
        DriveSpec(amplitude_N=-1e-15, frequency_Hz=1.0)
    with pytest.raises(ValueError):
        DriveSpec(amplitude_N=1e-15, frequency_Hz=0.0)


def test_langevin_csv_round_trip(tmp_path):
    run = LangevinRun(
        params=PARAMS,
        acquisition=AcquisitionConfig(frames_per_second=40.0, observation_s=1.0, master_seed=59),
        geometry=HalfSpace(),
        particle_count=3,
        substeps_per_frame=2,
    )
    trajs = simulate_langevin(run, 0)
    path = tmp_path / "wall.csv"
    write_multi_trajectory_csv(path, trajs)
    back = read_multi_trajectory_csv(path)
    for original, loaded in zip(trajs, back):
        np.testing.assert_array_equal(loaded.positions, original.positions)


def test_default_geometry_is_unbounded():
    run = LangevinRun(
        params=PARAMS,
        acquisition=AcquisitionConfig(frames_per_second=40.0, observation_s=1.0),
    )
    assert isinstance(run.geometry, Unbounded)
