"""Scenario commands of the command line application."""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING, Final, Tuple, Union

import numpy as np

from .analysis import SqueezingCurve, inject_phase_noise, squeezing_curve
from .app import App, Invocation
from .couplings import derive_couplings, to_sim_units
from .dtwa import RAW_COLUMNS, TrajectoryTotals, run_totals
from .errors import ConfigError, DomainError
from .imaging import render_frame, simulate_imaging_run, variance_vs_gap, variance_vs_radius
from .oracle import oracle_moments
from .results import Result, ResultCSV, ResultFrame, ResultJSON
from .utils import stream_rng

if TYPE_CHECKING:
    from .config import RunConfig

NOISE_STREAM: Final = 1
IMAGING_STREAM: Final = 2

app = App()


def read_raw_dump(path: Union[str, Path]) -> TrajectoryTotals:
    """Load per-trajectory totals written by ``dtwa`` with ``raw_dump = true``."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Input file does not exist: {path}")

    with path.open(encoding="utf-8") as fh:
        header = tuple(fh.readline().strip().split(","))
    if header != RAW_COLUMNS:
        raise DomainError(f"{path} is not a trajectory dump: {header}")

    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return TrajectoryTotals.from_table(rows)


def curve_from_totals(run: TrajectoryTotals, config: RunConfig) -> SqueezingCurve:
    """Apply the configured phase noise and reduce to a squeezing curve."""
    if config.noise_rms:
        rng = stream_rng(config.seed, NOISE_STREAM)
        run = inject_phase_noise(
            run, config.noise_rms, config.noise_mode, echo=config.echo, rng=rng
        )

    return squeezing_curve(
        run.moments(config.spin_frame),
        config.thetas(),
        method=config.scan_method,
        difference=config.difference,
        blocks=min(config.jackknife_blocks, len(run)) or None,
    )


@app.command("params")
def params(invocation: Invocation) -> Result:
    """Derive the spin couplings of Hubbard parameters."""
    config = invocation.config
    absolute = derive_couplings(config.hubbard())
    sim, scale = to_sim_units(absolute, config.j_hz)
    record = {
        "J": absolute.J,
        "Jz": absolute.Jz,
        "hz": absolute.hz,
        "delta": sim.delta,
        "hz_ratio": sim.J_hz_ratio,
        "t_over_J": sim.t_over_J,
        "J_hz": scale.J_hz,
        "time_unit_ms": scale.milliseconds,
    }
    if config.record_format == "csv":
        return ResultCSV({key: [value] for key, value in record.items()}, name="params")
    return ResultJSON(record, name="params")


@app.command("oracle")
def oracle(invocation: Invocation) -> Result:
    """Exact squeezing curve of a small hole-free lattice."""
    config = invocation.config
    moments = oracle_moments(config.lattice(), config.couplings(), config.times)
    curve = squeezing_curve(
        moments, config.thetas(), method=config.scan_method, difference=config.difference
    )
    return ResultCSV(curve, name="oracle")


@app.command("dtwa")
def dtwa(invocation: Invocation) -> Tuple[Result, ...]:
    """Sample trajectories and write the squeezing curve."""
    config = invocation.config
    run = run_totals(
        config.lattice(),
        config.couplings(),
        config.engine(),
        config.protocol(),
        config.trajectories,
        threads=invocation.threads,
    )
    curve = ResultCSV(curve_from_totals(run, config), name="dtwa")
    if config.raw_dump:
        return curve, ResultCSV(run.table(), name="trajectories")
    return (curve,)


@app.command("analyze")
def analyze(invocation: Invocation) -> Result:
    """Reduce a raw trajectory dump to a squeezing curve."""
    config = invocation.config
    run = read_raw_dump(config.input)
    invocation.logger.info("Loaded %d trajectories of %d times", len(run), len(run.times))
    return ResultCSV(curve_from_totals(run, config), name="analyze")


@app.command("imaging-demo")
def imaging_demo(invocation: Invocation) -> Tuple[Result, ...]:
    """Synthetic imaging round trip with the quadrant sweeps."""
    config = invocation.config
    rng = stream_rng(config.seed, IMAGING_STREAM)
    cloud = config.cloud()
    fringes = config.fringes(rng)
    roi = config.roi()
    run = simulate_imaging_run(
        cloud,
        config.shots,
        rng,
        photons=config.photons,
        fringes=fringes,
        pool_size=config.pca_pool,
        n_components=config.pca_components,
        spin_variance=config.spin_variance,
        blur_fwhm=config.blur_fwhm,
    )
    variance = run.normalized_variance(roi)
    summary = {
        "shots": len(run),
        "injected": config.spin_variance,
        "var_diff": variance.value,
        "negative": variance.negative,
        "residual_rms": run.residual_rms,
        "components": run.basis.n_components if run.basis else 0,
    }

    sweeps = {"gap": [], "radius": [], "var_diff": [], "negative": []}
    for gap, value in variance_vs_gap(run, config.sweep_gaps, config.roi_radius):
        for key, item in zip(sweeps, (gap, config.roi_radius, value.value, value.negative)):
            sweeps[key].append(item)
    for radius, value in variance_vs_radius(run, config.sweep_radii, config.roi_gap):
        for key, item in zip(sweeps, (config.roi_gap, radius, value.value, value.negative)):
            sweeps[key].append(item)

    frame = render_frame(
        cloud.with_imbalance(cloud.spin_noise(rng, config.spin_variance)),
        fringes,
        config.photons,
        rng,
        blur_fwhm=config.blur_fwhm,
    )
    return (
        ResultJSON(summary, name="imaging"),
        ResultCSV(sweeps, name="imaging_sweeps"),
        ResultFrame(frame, name="frame"),
    )


def run(config: RunConfig, *, threads: int = 1) -> int:
    """Run a scenario, write its files into ``config.out`` and return the exit code."""
    return app.run(Invocation(config, threads=threads, logger=app.logger))
