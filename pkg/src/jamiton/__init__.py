"""Self-sustained traffic waves: exact traveling-wave construction and a
mesh-free Lagrangian ring-road simulator for the same continuum model.
"""

from .model import (
    EquilibriumState,
    ModelParams,
    critical_densities,
    desired_speed,
    equilibrium,
    is_unstable,
    pressure,
    sound_speed,
)
from .waves import (
    JamitonSolution,
    ShockState,
    SonicState,
    WaveFrame,
    cj_construct,
    integrate_profile,
    match_ring_density,
    ode_rhs,
    periodic_train,
    rh_jump,
    solitary_jamiton,
    sonic_slope,
    sweep_existence,
)
from .particles import (
    FieldSnapshot,
    ParticleState,
    Perturbation,
    SimConfig,
    accel,
    density_estimate,
    init_uniform_perturbed,
    run,
    step,
)
from .analysis import (
    ComparisonResult,
    DetectedWave,
    Trajectory,
    compare_profiles,
    detect_jamitons,
    trajectories_analytic,
    trajectories_sim,
)
from .scenario import Scenario, load_scenario, preset_scenario

__version__ = "0.1.0"

__all__ = [
    "ModelParams",
    "EquilibriumState",
    "desired_speed",
    "pressure",
    "sound_speed",
    "is_unstable",
    "critical_densities",
    "equilibrium",
    "WaveFrame",
    "SonicState",
    "ShockState",
    "JamitonSolution",
    "ode_rhs",
    "cj_construct",
    "sonic_slope",
    "rh_jump",
    "integrate_profile",
    "solitary_jamiton",
    "periodic_train",
    "match_ring_density",
    "sweep_existence",
    "SimConfig",
    "Perturbation",
    "ParticleState",
    "FieldSnapshot",
    "init_uniform_perturbed",
    "density_estimate",
    "accel",
    "step",
    "run",
    "DetectedWave",
    "Trajectory",
    "ComparisonResult",
    "detect_jamitons",
    "trajectories_analytic",
    "trajectories_sim",
    "compare_profiles",
    "Scenario",
    "load_scenario",
    "preset_scenario",
    "__version__",
]
