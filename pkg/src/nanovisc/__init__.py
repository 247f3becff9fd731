"""Nanoparticle tracking viscometry: seeded Brownian path simulation and
viscosity estimation from displacement statistics.

The package is organized around a simulation layer (free paths in
``paths``, driven and bounded dynamics in ``langevin``), an estimation
layer (``estimators``, with scikit-learn style wrapper classes), and a
reproducible run harness (``harness``) behind the ``nanovisc`` command
line tool.
"""

__version__ = "0.1.0"

from .conventions import (
    Convention,
    DEFAULT_CONVENTION,
    msd_coefficient_3d,
    per_coordinate_variance,
    resolve_convention,
)
from .physics import (
    DEFAULT_BOLTZMANN_J_PER_K,
    PhysicalParams,
    ViscosityTempModel,
    drag_coefficient,
    einstein_diffusion,
    stokes_force,
    viscosity_at_temperature,
    viscosity_from_diffusion,
)
from .paths import (
    GENERATOR_SCHEME,
    AcquisitionConfig,
    Trajectory,
    Trajectory2D,
    generate_wiener,
    project_to_plane,
    subsample,
    trial_rng,
)
from .langevin import (
    DriveSpec,
    HalfSpace,
    InvalidStateError,
    LangevinRun,
    PeriodicBox,
    SphericalObstacle,
    Unbounded,
    reflect_plane,
    reflect_sphere,
    simulate_langevin,
)
from .estimators import (
    CORRECTION_EXACT,
    CORRECTION_HISTORICAL_4PI,
    FULL_3D,
    PROJECTED_2D,
    CountingWindow,
    DrivenViscosityEstimator,
    InversionRangeError,
    MsdDiffusionEstimator,
    MsdEstimate,
    WindowCountDiffusionEstimator,
    count_window_snapshots,
    diffusion_from_msd,
    estimate_diffusion_from_counts,
    estimate_viscosity_driven,
    fit_msd_line,
    invert_stay_fraction,
    msd_at_lag,
    observed_stay_fraction,
    predicted_relative_std,
    stay_probability,
)
from .io import (
    read_multi_trajectory_csv,
    read_trajectory_csv,
    write_multi_trajectory_csv,
    write_trajectory_csv,
)
from .harness import (
    BOX1_TARGET_RMSE,
    CANONICAL_BOX1_SEED,
    Box1Verdict,
    EstimateReport,
    ManifestMismatchError,
    RunManifest,
    SweepCeilingError,
    SweepSpec,
    reproduce_box1,
    run_ensemble,
    run_sweep,
)

__all__ = [
    "__version__",
    "Convention",
    "DEFAULT_CONVENTION",
    "msd_coefficient_3d",
    "per_coordinate_variance",
    "resolve_convention",
    "DEFAULT_BOLTZMANN_J_PER_K",
    "PhysicalParams",
    "ViscosityTempModel",
    "drag_coefficient",
    "einstein_diffusion",
    "stokes_force",
    "viscosity_at_temperature",
    "viscosity_from_diffusion",
    "GENERATOR_SCHEME",
    "AcquisitionConfig",
    "Trajectory",
    "Trajectory2D",
    "generate_wiener",
    "project_to_plane",
    "subsample",
    "trial_rng",
    "DriveSpec",
    "HalfSpace",
    "InvalidStateError",
    "LangevinRun",
    "PeriodicBox",
    "SphericalObstacle",
    "Unbounded",
    "reflect_plane",
    "reflect_sphere",
    "simulate_langevin",
    "CORRECTION_EXACT",
    "CORRECTION_HISTORICAL_4PI",
    "FULL_3D",
    "PROJECTED_2D",
    "CountingWindow",
    "DrivenViscosityEstimator",
    "InversionRangeError",
    "MsdDiffusionEstimator",
    "MsdEstimate",
    "WindowCountDiffusionEstimator",
    "count_window_snapshots",
    "diffusion_from_msd",
    "estimate_diffusion_from_counts",
    "estimate_viscosity_driven",
    "fit_msd_line",
    "invert_stay_fraction",
    "msd_at_lag",
    "observed_stay_fraction",
    "predicted_relative_std",
    "stay_probability",
    "read_multi_trajectory_csv",
    "read_trajectory_csv",
    "write_multi_trajectory_csv",
    "write_trajectory_csv",
    "BOX1_TARGET_RMSE",
    "CANONICAL_BOX1_SEED",
    "Box1Verdict",
    "EstimateReport",
    "ManifestMismatchError",
    "RunManifest",
    "SweepCeilingError",
    "SweepSpec",
    "reproduce_box1",
    "run_ensemble",
    "run_sweep",
]
