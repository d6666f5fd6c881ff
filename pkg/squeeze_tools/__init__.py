""" Squeeze-Tools -- Spin squeezing simulations of lattice magnets with holes """
from __future__ import annotations

from .analysis import (
    ShotRecord,
    ShotTable,
    SqueezingCurve,
    inject_phase_noise,
    jackknife,
    shot_noise_subtract,
    shots_from_totals,
    squeezing_curve,
    squeezing_parameter,
    subsystem_variance,
    variance_scan,
)
from .app import App, Invocation
from .config import RunConfig, build_config, dump_config, load_config, parse_config
from .couplings import HubbardParams, SpinCouplings, derive_couplings, to_sim_units
from .dtwa import (
    EngineConfig,
    EnsembleMoments,
    Protocol,
    SpinConfig,
    TrajectoryTotals,
    apply_global_rotation,
    double_hop_step,
    hole_hop_step,
    local_field,
    precess_step,
    run_ensemble,
    run_totals,
    run_trajectory,
    sample_initial,
)
from .errors import ConfigError, DomainError, NumericError, SqueezeError
from .imaging import (
    CloudModel,
    FringeModel,
    ImageFrame,
    PcaBasis,
    RoiSpec,
    pca_fit,
    pca_reconstruct,
    quadrant_signal,
    render_frame,
    simulate_imaging_run,
)
from .lattice import LatticeGeometry, build_lattice, double_hop_paths, halves, neighbors
from .oracle import QuantumState, collective_moments, evolve_exact, oracle_curves, oracle_moments
from .presets import preset, presets
from .results import Result, ResultCSV, ResultFrame, ResultJSON, ResultText, parse_result

__all__ = (
    # Errors
    "ConfigError",
    "DomainError",
    "NumericError",
    "SqueezeError",
    # Couplings/Lattice
    "HubbardParams",
    "LatticeGeometry",
    "SpinCouplings",
    "build_lattice",
    "derive_couplings",
    "double_hop_paths",
    "halves",
    "neighbors",
    "to_sim_units",
    # Engine
    "EngineConfig",
    "EnsembleMoments",
    "Protocol",
    "SpinConfig",
    "TrajectoryTotals",
    "apply_global_rotation",
    "double_hop_step",
    "hole_hop_step",
    "local_field",
    "precess_step",
    "run_ensemble",
    "run_totals",
    "run_trajectory",
    "sample_initial",
    # Oracle
    "QuantumState",
    "collective_moments",
    "evolve_exact",
    "oracle_curves",
    "oracle_moments",
    # Analysis
    "ShotRecord",
    "ShotTable",
    "SqueezingCurve",
    "inject_phase_noise",
    "jackknife",
    "shot_noise_subtract",
    "shots_from_totals",
    "squeezing_curve",
    "squeezing_parameter",
    "subsystem_variance",
    "variance_scan",
    # Imaging
    "CloudModel",
    "FringeModel",
    "ImageFrame",
    "PcaBasis",
    "RoiSpec",
    "pca_fit",
    "pca_reconstruct",
    "quadrant_signal",
    "render_frame",
    "simulate_imaging_run",
    # App/config/results
    "App",
    "Invocation",
    "Result",
    "ResultCSV",
    "ResultFrame",
    "ResultJSON",
    "ResultText",
    "RunConfig",
    "build_config",
    "dump_config",
    "load_config",
    "parse_config",
    "parse_result",
    "preset",
    "presets",
)
