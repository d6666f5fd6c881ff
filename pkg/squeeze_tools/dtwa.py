"""Discrete truncated Wigner engine for the XXZ magnet with mobile holes.

Spins of a batch of trajectories are stored as an ``(n_sites, batch, 3)``
array, so one sparse product evaluates the exchange field of every
trajectory at once. Stochastic hole moves run per trajectory in the
compiled kernels with numbers drawn from that trajectory's own stream.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from math import pi, sqrt
from typing import TYPE_CHECKING, Dict, Final, List, Optional, Tuple, Union

import numpy as np

from ._kernels import double_hop_holes, hop_holes
from .constants import (
    DEFAULT_ALPHA,
    DEFAULT_BATCH_SIZE,
    DEFAULT_DT,
    DEFAULT_STEPS,
    DEFAULT_T_OVER_J,
    SPIN_HALF,
    TWO_PI,
)
from .errors import DomainError, NumericError
from .lattice import halves
from .logs import logger
from .utils import rotation_matrix, trajectory_rng

if TYPE_CHECKING:
    from scipy import sparse

    from .couplings import SpinCouplings
    from .lattice import LatticeGeometry
    from .types import TBoolArray, TFloatArray, TIntArray


FULL: Final = 0
HALF_A: Final = 1
HALF_B: Final = 2
DIFF: Final = 3
GROUPS: Final = ("full", "a", "b", "diff")
ROTATE_SITES: Final = ("origin", "intermediate")
SPIN_FRAMES: Final = ("mean", "lab")
RAW_COLUMNS: Final = (
    "t",
    "trajectory",
    "sx",
    "sy",
    "sz",
    "sx_a",
    "sy_a",
    "sz_a",
    "sx_b",
    "sy_b",
    "sz_b",
    "n_a",
    "n_b",
)

# R_y(pi) is diagonal
_ECHO_FLIP: Final = np.array([-1.0, 1.0, -1.0])


@dataclass
class SpinConfig:
    """Classical spins of one trajectory. Hole sites hold the zero vector."""

    geom: LatticeGeometry
    spins: TFloatArray
    hole_mask: TBoolArray

    @property
    def n_atoms(self) -> int:
        return int(self.geom.n_sites - self.hole_mask.sum())

    @property
    def holes(self) -> TIntArray:
        return np.flatnonzero(self.hole_mask)

    def totals(self) -> TFloatArray:
        return self.spins.sum(axis=0)

    def copy(self) -> SpinConfig:
        return replace(self, spins=self.spins.copy(), hole_mask=self.hole_mask.copy())


@dataclass(frozen=True)
class EngineConfig:
    """Integration and hole-process settings, times in units of ``hbar/J``.

    ``double_hop_rate`` defaults to ``2z - 1`` of the lattice, ``hz`` defaults
    to the couplings' field.
    """

    dt: float = DEFAULT_DT
    n_steps: int = DEFAULT_STEPS
    hole_density: float = 0.0
    hop_rate: float = DEFAULT_T_OVER_J
    double_hop_rate: Optional[float] = None
    alpha: float = DEFAULT_ALPHA
    enable_hopping: bool = True
    enable_hz_field: bool = True
    enable_spin_flip: bool = True
    hz: Optional[float] = None
    echo: bool = False
    seed: int = 0
    rotate_site: str = "origin"
    batch_size: int = DEFAULT_BATCH_SIZE

    def __post_init__(self):  # noqa: C901
        if not self.dt > 0:
            raise DomainError(f"Time step must be positive: dt={self.dt}")

        if self.n_steps < 1:
            raise DomainError(f"At least one step is required: n_steps={self.n_steps}")

        if not 0 <= self.hole_density < 1:
            raise DomainError(f"Hole density must be in [0, 1): {self.hole_density}")

        if self.hop_rate < 0 or self.hop_rate * self.dt > 1:
            raise DomainError(f"Invalid hop probability: dt*hop_rate={self.dt * self.hop_rate}")

        if self.double_hop_rate is not None and (
            self.double_hop_rate < 0 or self.double_hop_rate * self.dt > 1
        ):
            raise DomainError(
                f"Invalid double-hop probability: dt*rate={self.dt * self.double_hop_rate}"
            )

        if self.alpha < 0:
            raise DomainError(f"Rotation scale must be non-negative: alpha={self.alpha}")

        if self.rotate_site not in ROTATE_SITES:
            raise DomainError(f"rotate_site must be one of {ROTATE_SITES}: {self.rotate_site!r}")

        if self.batch_size < 1:
            raise DomainError(f"Batch size must be positive: {self.batch_size}")

    @property
    def times(self) -> TFloatArray:
        return np.arange(self.n_steps + 1) * self.dt

    def n_holes(self, geom: LatticeGeometry) -> int:
        return hole_count(geom, self.hole_density)

    def probabilities(self, geom: LatticeGeometry) -> Tuple[float, float, float]:
        """Return the per-step hop and double-hop probabilities and the maximal rotation angle."""
        rate = 2 * geom.coordination - 1 if self.double_hop_rate is None else self.double_hop_rate
        if rate * self.dt > 1:
            raise DomainError(f"Invalid double-hop probability: dt*rate={rate * self.dt}")

        hop = self.hop_rate * self.dt if self.enable_hopping else 0.0
        double = rate * self.dt if self.enable_hopping or self.enable_spin_flip else 0.0
        angle = self.alpha * TWO_PI if self.enable_spin_flip else 0.0
        return hop, double, angle


@dataclass(frozen=True)
class Protocol:
    """Pulse protocol around the free evolution.

    :param initial_pulse: Sample z-polarized spins and apply the global pi/2
        pulse about y instead of sampling along x directly
    :param toggling_frame: After the echo pulse report totals in the pre-echo
        frame, so the spin length stays positive
    """

    initial_pulse: bool = False
    toggling_frame: bool = True


@dataclass(frozen=True, eq=False)
class TrajectoryTotals:
    """Per-trajectory collective sums.

    ``totals`` is ``(M, T, 3, 3)``: trajectory, time, group (full, a, b) and
    spin component. ``counts`` is ``(M, T, 2)``: atoms in the halves a and b.
    """

    times: TFloatArray
    totals: TFloatArray = field(repr=False)
    counts: TIntArray = field(repr=False)

    def __len__(self) -> int:
        return self.totals.shape[0]

    @property
    def n_atoms(self) -> int:
        return int(self.counts[0, 0].sum())

    def moments(self, frame: str = "lab") -> EnsembleMoments:
        return EnsembleMoments.from_totals(self, frame)

    @property
    def azimuth(self) -> TFloatArray:
        """Azimuth of the ensemble mean spin per time."""
        mean = self.totals[:, :, FULL].mean(axis=0)
        return np.arctan2(mean[:, 1], mean[:, 0])

    def rotated(self, angles: TFloatArray) -> TrajectoryTotals:
        """Rotate every total about z by ``-angles``, one angle per time."""
        cos, sin = np.cos(angles)[:, None], np.sin(angles)[:, None]
        sx, sy = self.totals[..., 0], self.totals[..., 1]
        totals = self.totals.copy()
        totals[..., 0] = cos * sx + sin * sy
        totals[..., 1] = cos * sy - sin * sx
        return replace(self, totals=totals)

    def in_mean_frame(self) -> TrajectoryTotals:
        """Totals in the frame that turns about z with the mean spin.

        A uniform hz field precesses the collective spin without shortening
        it. In this frame the mean spin stays on ``+x``, so ``2<Sx>/N`` is the
        transverse spin length and the ``(Sy, Sz)`` plane follows the spin.
        """
        return self.rotated(self.azimuth)

    def table(self) -> Dict[str, np.ndarray]:
        """Flatten into ``RAW_COLUMNS``, one row per time and trajectory."""
        size, steps = self.totals.shape[:2]
        vectors = self.totals.swapaxes(0, 1).reshape(steps * size, 9)
        counts = self.counts.swapaxes(0, 1).reshape(steps * size, 2)
        columns = {
            "t": np.repeat(self.times, size),
            "trajectory": np.tile(np.arange(size), steps),
        }
        columns.update(zip(RAW_COLUMNS[2:11], vectors.T))
        columns.update(zip(RAW_COLUMNS[11:], counts.T))
        return columns

    @classmethod
    def from_table(cls, rows: np.ndarray) -> TrajectoryTotals:
        """Rebuild totals from ``(rows, len(RAW_COLUMNS))`` table values."""
        rows = np.asarray(rows, dtype=float)
        if rows.ndim != 2 or not len(rows) or rows.shape[1] != len(RAW_COLUMNS):
            raise DomainError(f"Expected {len(RAW_COLUMNS)} columns, got {rows.shape}")

        size = int(rows[:, 1].max()) + 1
        order = np.tile(np.arange(size), len(rows) // size)
        if len(rows) % size or not np.array_equal(rows[:, 1], order):
            raise DomainError("Rows must list every trajectory once per time")

        grid = rows.reshape(-1, size, len(RAW_COLUMNS)).swapaxes(0, 1)
        return cls(
            times=grid[0, :, 0].copy(),
            totals=grid[..., 2:11].reshape(size, -1, 3, 3).copy(),
            counts=grid[..., 11:].astype(np.int64),
        )


@dataclass(frozen=True, eq=False)
class EnsembleMoments:
    """Ensemble statistics of the collective spin.

    Group axis is ``(full, a, b, diff)``. ``cov`` holds the covariance matrix
    of ``(Sy, Sz)`` per group and time, ``atoms`` the mean half atom counts.
    """

    times: TFloatArray
    n_atoms: int
    trajectories: int
    mean: TFloatArray = field(repr=False)
    mean_err: TFloatArray = field(repr=False)
    cov: TFloatArray = field(repr=False)
    cov_err: TFloatArray = field(repr=False)
    atoms: TFloatArray = field(repr=False)
    totals: Optional[TrajectoryTotals] = field(default=None, repr=False)

    @classmethod
    def from_totals(cls, run: TrajectoryTotals, frame: str = "lab") -> EnsembleMoments:
        """Reduce totals in the ``lab`` frame or the ``mean`` spin frame."""
        size = len(run)
        if size < 2:
            raise DomainError(f"Moments need at least two trajectories: {size}")
        if frame not in SPIN_FRAMES:
            raise DomainError(f"Unknown frame {frame!r}, expected one of {SPIN_FRAMES}")
        if frame == "mean":
            run = run.in_mean_frame()

        vecs = group_vectors(run.totals)
        mean = vecs.mean(axis=0)
        mean_err = vecs.std(axis=0, ddof=1) / sqrt(size)

        yz = vecs[..., 1:] - mean[..., 1:]
        prod = yz[..., :, None] * yz[..., None, :]
        cov = prod.sum(axis=0) / (size - 1)
        cov_err = prod.std(axis=0, ddof=1) / sqrt(size)

        if not (np.isfinite(mean).all() and np.isfinite(cov).all()):
            raise NumericError("Ensemble moments are not finite")

        return cls(
            times=run.times,
            n_atoms=run.n_atoms,
            trajectories=size,
            mean=np.moveaxis(mean, 1, 0),
            mean_err=np.moveaxis(mean_err, 1, 0),
            cov=np.moveaxis(cov, 1, 0),
            cov_err=np.moveaxis(cov_err, 1, 0),
            atoms=run.counts.mean(axis=0),
            totals=run,
        )

    @property
    def spin_length(self) -> TFloatArray:
        """``2<Sx>/N`` of the full system."""
        return 2.0 * self.mean[FULL, :, 0] / self.n_atoms

    @property
    def spin_length_err(self) -> TFloatArray:
        return 2.0 * self.mean_err[FULL, :, 0] / self.n_atoms

    def group(self, name: str) -> int:
        try:
            return GROUPS.index(name)
        except ValueError as exc:
            raise DomainError(f"Unknown group {name!r}, expected one of {GROUPS}") from exc


def group_vectors(totals: TFloatArray) -> TFloatArray:
    """Append the ``a - b`` difference to ``(..., 3 groups, 3)`` totals."""
    diff = totals[..., HALF_A, :] - totals[..., HALF_B, :]
    return np.concatenate([totals, diff[..., None, :]], axis=-2)


#  Single configuration operations
#  -------------------------------


def hole_count(geom: LatticeGeometry, rho_h: float) -> int:
    """Return ``round(rho_h * n_sites)`` with halves rounded up."""
    return int(np.floor(rho_h * geom.n_sites + 0.5))


def _draw(
    n_sites: int, n_holes: int, rng: np.random.Generator, axis: str
) -> Tuple[TFloatArray, TBoolArray, TIntArray]:
    holes = rng.choice(n_sites, size=n_holes, replace=False).astype(np.int64)
    signs = rng.integers(0, 2, size=(n_sites, 2)) - SPIN_HALF
    spins = np.empty((n_sites, 3))
    if axis == "x":
        spins[:, 0] = SPIN_HALF
        spins[:, 1:] = signs
    else:
        spins[:, :2] = signs
        spins[:, 2] = SPIN_HALF

    mask = np.zeros(n_sites, dtype=bool)
    mask[holes] = True
    spins[holes] = 0.0
    return spins, mask, holes


def sample_initial(
    geom: LatticeGeometry, rho_h: float, rng: np.random.Generator, *, axis: str = "x"
) -> SpinConfig:
    """Sample a discrete Wigner configuration polarized along `axis` with holes.

    ``round(rho_h * n_sites)`` holes are placed uniformly without replacement.
    """
    if not 0 <= rho_h < 1:
        raise DomainError(f"Hole density must be in [0, 1): {rho_h}")

    if axis not in ("x", "z"):
        raise DomainError(f"Initial polarization must be 'x' or 'z': {axis!r}")

    n_holes = hole_count(geom, rho_h)
    spins, mask, _ = _draw(geom.n_sites, n_holes, rng, axis)
    return SpinConfig(geom, spins, mask)


def local_field(
    config: SpinConfig,
    site: int,
    couplings: SpinCouplings,
    *,
    enable_hz_field: bool = True,
    hz: Optional[float] = None,
) -> TFloatArray:
    """Return the effective field ``dH/dS`` acting on an occupied site."""
    geom = config.geom
    if not 0 <= site < geom.n_sites:
        raise DomainError(f"Site {site} is outside of the lattice ({geom.n_sites} sites)")

    if config.hole_mask[site]:
        raise DomainError(f"Site {site} is a hole")

    nbrs = geom.nn_table[site, : geom.nn_count[site]]
    field_ = config.spins[nbrs].sum(axis=0) * np.array([couplings.J, couplings.J, couplings.Jz])
    if enable_hz_field:
        field_[2] += (couplings.hz if hz is None else hz) * config.hole_mask[nbrs].sum()

    return field_


def _rates(
    adjacency: sparse.csr_matrix,
    spins: TFloatArray,
    coefs: TFloatArray,
    zfield: Union[float, TFloatArray],
) -> TFloatArray:
    n_sites, batch, _ = spins.shape
    field_ = (adjacency @ spins.reshape(n_sites, batch * 3)).reshape(n_sites, batch, 3)
    field_ *= coefs
    field_[..., 2] += zfield
    return np.cross(field_, spins)


def _rk4(
    adjacency: sparse.csr_matrix,
    spins: TFloatArray,
    coefs: TFloatArray,
    zfield: Union[float, TFloatArray],
    dt: float,
) -> TFloatArray:
    k1 = _rates(adjacency, spins, coefs, zfield)
    k2 = _rates(adjacency, spins + 0.5 * dt * k1, coefs, zfield)
    k3 = _rates(adjacency, spins + 0.5 * dt * k2, coefs, zfield)
    k4 = _rates(adjacency, spins + dt * k3, coefs, zfield)
    return spins + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _hole_field(
    adjacency: sparse.csr_matrix, hole_mask: TBoolArray, hz: float
) -> Union[float, TFloatArray]:
    if hz == 0 or not hole_mask.any():
        return 0.0
    return hz * (adjacency @ hole_mask.astype(float))


def precess_step(
    config: SpinConfig,
    dt: float,
    couplings: SpinCouplings,
    *,
    enable_hz_field: bool = True,
    hz: Optional[float] = None,
) -> SpinConfig:
    """Advance ``dS/dt = B x S`` by one RK4 step, hole fields frozen over the step."""
    geom = config.geom
    coefs = np.array([couplings.J, couplings.J, couplings.Jz])
    hz = (couplings.hz if hz is None else hz) if enable_hz_field else 0.0
    zfield = _hole_field(geom.adjacency, config.hole_mask[:, None], hz)
    spins = _rk4(geom.adjacency, config.spins[:, None, :], coefs, zfield, dt)
    return replace(config, spins=spins[:, 0, :], hole_mask=config.hole_mask.copy())


def hole_hop_step(
    config: SpinConfig, dt: float, hop_rate: float, rng: np.random.Generator
) -> SpinConfig:
    """Exchange each hole with a random neighbour with probability ``hop_rate * dt``."""
    prob = dt * hop_rate
    if not 0 <= prob <= 1:
        raise DomainError(f"Invalid hop probability: {prob}")

    new = config.copy()
    holes = new.holes
    draws = rng.random((holes.size, 2))
    hop_holes(new.spins, new.hole_mask, holes, new.geom.nn_table, new.geom.nn_count, prob, draws)
    return new


def double_hop_step(  # noqa: PLR0913
    config: SpinConfig,
    dt: float,
    double_hop_rate: float,
    alpha: float,
    rng: np.random.Generator,
    *,
    enable_spin_flip: bool = True,
    rotate_site: str = "origin",
) -> SpinConfig:
    """Move holes by two sites and rotate the hopped-over spin about a random xy axis."""
    prob = dt * double_hop_rate
    if not 0 <= prob <= 1:
        raise DomainError(f"Invalid double-hop probability: {prob}")

    if rotate_site not in ROTATE_SITES:
        raise DomainError(f"rotate_site must be one of {ROTATE_SITES}: {rotate_site!r}")

    new = config.copy()
    holes = new.holes
    draws = rng.random((holes.size, 5))
    double_hop_holes(
        new.spins,
        new.hole_mask,
        holes,
        new.geom.nn_table,
        new.geom.nn_count,
        prob,
        alpha * TWO_PI if enable_spin_flip else 0.0,
        rotate_site == "origin",
        draws,
    )
    return new


def apply_global_rotation(
    config: SpinConfig, axis: Union[str, Tuple[float, float, float]], angle: float
) -> SpinConfig:
    """Rotate every spin about a lab axis, holes stay zero."""
    rot = rotation_matrix(axis, angle)
    return replace(config, spins=config.spins @ rot.T, hole_mask=config.hole_mask.copy())


#  Ensemble engine
#  ---------------


@dataclass(frozen=True, eq=False)
class _Plan:
    geom: LatticeGeometry
    couplings: SpinCouplings
    cfg: EngineConfig
    protocol: Protocol
    n_holes: int
    hz: float
    hop_prob: float
    double_prob: float
    max_angle: float
    left: TIntArray
    right: TIntArray

    @classmethod
    def build(
        cls,
        geom: LatticeGeometry,
        couplings: SpinCouplings,
        cfg: EngineConfig,
        protocol: Optional[Protocol],
    ) -> _Plan:
        hop, double, angle = cfg.probabilities(geom)
        hz = couplings.hz if cfg.hz is None else cfg.hz
        left, right = halves(geom)
        return cls(
            geom=geom,
            couplings=couplings,
            cfg=cfg,
            protocol=protocol or Protocol(),
            n_holes=cfg.n_holes(geom),
            hz=hz if cfg.enable_hz_field else 0.0,
            hop_prob=hop,
            double_prob=double,
            max_angle=angle,
            left=np.flatnonzero(left),
            right=np.flatnonzero(right),
        )


def _run_batch(plan: _Plan, start: int, stop: int) -> Tuple[TFloatArray, TIntArray]:  # noqa: C901
    geom, cfg = plan.geom, plan.cfg
    rngs = [trajectory_rng(cfg.seed, index) for index in range(start, stop)]
    size, n_sites, n_holes = len(rngs), geom.n_sites, plan.n_holes

    spins = np.empty((n_sites, size, 3))
    mask = np.empty((n_sites, size), dtype=bool)
    holes = np.empty((size, n_holes), dtype=np.int64)
    axis = "z" if plan.protocol.initial_pulse else "x"
    for b, rng in enumerate(rngs):
        spins[:, b], mask[:, b], holes[b] = _draw(n_sites, n_holes, rng, axis)

    if plan.protocol.initial_pulse:
        spins = spins @ rotation_matrix("y", pi / 2).T

    adjacency = geom.adjacency
    coefs = np.array([plan.couplings.J, plan.couplings.J, plan.couplings.Jz])
    rotate_origin = cfg.rotate_site == "origin"
    echo_step = max(1, cfg.n_steps // 2) if cfg.echo else -1

    totals = np.empty((size, cfg.n_steps + 1, 3, 3))
    counts = np.empty((size, cfg.n_steps + 1, 2), dtype=np.int64)
    flipped = False

    def record(k: int):
        sum_a = spins[plan.left].sum(axis=0)
        sum_b = spins[plan.right].sum(axis=0)
        if flipped:
            sum_a *= _ECHO_FLIP
            sum_b *= _ECHO_FLIP
        totals[:, k, HALF_A] = sum_a
        totals[:, k, HALF_B] = sum_b
        totals[:, k, FULL] = sum_a + sum_b
        counts[:, k, 0] = plan.left.size - mask[plan.left].sum(axis=0)
        counts[:, k, 1] = plan.right.size - mask[plan.right].sum(axis=0)

    record(0)
    for step in range(1, cfg.n_steps + 1):
        zfield = _hole_field(adjacency, mask, plan.hz) if n_holes else 0.0
        spins = _rk4(adjacency, spins, coefs, zfield, cfg.dt)

        if n_holes:
            for b, rng in enumerate(rngs):
                hop_draws = rng.random((n_holes, 2))
                double_draws = rng.random((n_holes, 5))
                view, view_mask, view_holes = spins[:, b], mask[:, b], holes[b]
                if plan.hop_prob > 0:
                    hop_holes(
                        view,
                        view_mask,
                        view_holes,
                        geom.nn_table,
                        geom.nn_count,
                        plan.hop_prob,
                        hop_draws,
                    )
                if plan.double_prob > 0:
                    double_hop_holes(
                        view,
                        view_mask,
                        view_holes,
                        geom.nn_table,
                        geom.nn_count,
                        plan.double_prob,
                        plan.max_angle,
                        rotate_origin,
                        double_draws,
                    )

        if step == echo_step:
            spins *= _ECHO_FLIP
            flipped = plan.protocol.toggling_frame

        record(step)

    return totals, counts


def run_trajectory(
    geom: LatticeGeometry,
    couplings: SpinCouplings,
    cfg: EngineConfig,
    protocol: Optional[Protocol] = None,
    index: int = 0,
) -> TrajectoryTotals:
    """Run one trajectory, its stream is derived from ``(cfg.seed, index)``."""
    plan = _Plan.build(geom, couplings, cfg, protocol)
    totals, counts = _run_batch(plan, index, index + 1)
    if not np.isfinite(totals).all():
        raise NumericError(f"Trajectory {index} diverged")

    return TrajectoryTotals(cfg.times, totals, counts)


def batches(trajectories: int, batch_size: int) -> List[Tuple[int, int]]:
    """Split trajectories into fixed ``[start, stop)`` batches."""
    return [
        (start, min(start + batch_size, trajectories))
        for start in range(0, trajectories, batch_size)
    ]


def run_totals(  # noqa: PLR0913
    geom: LatticeGeometry,
    couplings: SpinCouplings,
    cfg: EngineConfig,
    protocol: Optional[Protocol] = None,
    trajectories: int = 2,
    *,
    threads: int = 1,
) -> TrajectoryTotals:
    """Run `trajectories` independent trajectories and keep their totals.

    The batch partition depends only on ``(trajectories, batch_size)``, so the
    result is bit-identical for any number of threads.
    """
    if trajectories < 2:
        raise DomainError(f"An ensemble needs at least two trajectories: {trajectories}")

    plan = _Plan.build(geom, couplings, cfg, protocol)
    logger.info(
        "Run %d trajectories on %r: holes=%d steps=%d threads=%d",
        trajectories,
        geom,
        plan.n_holes,
        cfg.n_steps,
        threads,
    )

    totals = np.empty((trajectories, cfg.n_steps + 1, 3, 3))
    counts = np.empty((trajectories, cfg.n_steps + 1, 2), dtype=np.int64)

    def work(bounds: Tuple[int, int]):
        start, stop = bounds
        totals[start:stop], counts[start:stop] = _run_batch(plan, start, stop)
        logger.debug("Batch %d:%d done", start, stop)

    parts = batches(trajectories, cfg.batch_size)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, parts))
    else:
        for bounds in parts:
            work(bounds)

    if not np.isfinite(totals).all():
        raise NumericError("Trajectory totals are not finite, decrease dt")

    return TrajectoryTotals(cfg.times, totals, counts)


def run_ensemble(  # noqa: PLR0913
    geom: LatticeGeometry,
    couplings: SpinCouplings,
    cfg: EngineConfig,
    protocol: Optional[Protocol] = None,
    trajectories: int = 2,
    *,
    threads: int = 1,
    frame: str = "mean",
) -> EnsembleMoments:
    """Run an ensemble and reduce it to moments in the given spin frame."""
    run = run_totals(geom, couplings, cfg, protocol, trajectories, threads=threads)
    return run.moments(frame)
