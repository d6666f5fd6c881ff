"""Squeezing analysis: angle scans, the Wineland parameter and error bars.

Variances are normalized as ``4 Var / N`` (one at the standard quantum
limit) and angles live in ``[0, pi)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import pi
from typing import (
    TYPE_CHECKING,
    Dict,
    Final,
    Iterator,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
    Union,
    overload,
)

import numpy as np

from .dtwa import DIFF, FULL, HALF_A, HALF_B, EnsembleMoments, TrajectoryTotals
from .errors import DomainError, NumericError
from .logs import logger
from .utils import rotation_matrix, to_db

if TYPE_CHECKING:
    from .types import TBoolArray, TEstimator, TFloatArray, TIntArray

NOISE_MODES: Final = ("quasi-static", "fast")
SHOT_COLUMNS: Final = ("t", "theta", "s_a", "s_b", "n_a", "n_b")
CURVE_COLUMNS: Final = (
    "t",
    "Sx_mean",
    "Sx_err",
    "var_min",
    "var_max",
    "theta_min",
    "xi2",
    "xi2_err",
    "db",
    "db_err",
)
DEGENERACY_TOLERANCE: Final = 1e-9


@dataclass(frozen=True)
class ShotRecord:
    """Collective ``S^theta`` of both subsystems measured in one shot."""

    t: float
    theta: float
    s_a: float
    s_b: float
    n_a: int
    n_b: int

    def __post_init__(self):
        _check_shots(
            np.array([self.s_a]), np.array([self.s_b]), np.array([self.n_a]), np.array([self.n_b])
        )


def _check_shots(s_a, s_b, n_a, n_b):
    if (n_a <= 0).any() or (n_b <= 0).any():
        raise DomainError("Both subsystems must hold atoms")

    if (np.abs(s_a) > n_a / 2).any() or (np.abs(s_b) > n_b / 2).any():
        raise DomainError("Collective spin exceeds half the atom number")


@dataclass(frozen=True, eq=False)
class ShotTable:
    """Column storage for many shots."""

    t: TFloatArray
    theta: TFloatArray
    s_a: TFloatArray
    s_b: TFloatArray
    n_a: TIntArray
    n_b: TIntArray

    def __post_init__(self):
        sizes = {len(getattr(self, name)) for name in SHOT_COLUMNS}
        if len(sizes) > 1:
            raise DomainError(f"Shot columns have different lengths: {sorted(sizes)}")

        _check_shots(self.s_a, self.s_b, self.n_a, self.n_b)

    @classmethod
    def from_records(cls, records: Sequence[ShotRecord]) -> ShotTable:
        return cls(
            **{
                name: np.array([getattr(rec, name) for rec in records], dtype=_dtype(name))
                for name in SHOT_COLUMNS
            }
        )

    def __len__(self) -> int:
        return len(self.t)

    def __iter__(self) -> Iterator[ShotRecord]:
        for idx in range(len(self)):
            yield self[idx]

    def __getitem__(self, idx: int) -> ShotRecord:
        return ShotRecord(
            t=float(self.t[idx]),
            theta=float(self.theta[idx]),
            s_a=float(self.s_a[idx]),
            s_b=float(self.s_b[idx]),
            n_a=int(self.n_a[idx]),
            n_b=int(self.n_b[idx]),
        )

    @property
    def s_sum(self) -> TFloatArray:
        return self.s_a + self.s_b

    @property
    def s_diff(self) -> TFloatArray:
        return self.s_a - self.s_b

    @property
    def n_atoms(self) -> TIntArray:
        return self.n_a + self.n_b


def _dtype(name: str):
    return np.int64 if name.startswith("n_") else float


class VarianceScan(NamedTuple):
    """Extrema of ``Var[S^theta]`` over the readout angle."""

    var_min: TFloatArray
    var_max: TFloatArray
    theta_min: TFloatArray
    theta_max: TFloatArray
    degenerate: TBoolArray
    on_grid: Optional[TFloatArray] = None


class SqueezingValue(NamedTuple):
    xi2: Union[float, TFloatArray]
    db: Union[float, TFloatArray]
    divergent: Union[bool, TBoolArray]


class SubsystemVariance(NamedTuple):
    var_sum: float
    var_diff: float


class NormalizedVariance(NamedTuple):
    value: float
    negative: bool


class JackknifeResult(NamedTuple):
    estimate: Union[float, TFloatArray]
    error: Union[float, TFloatArray]


def project(vectors: TFloatArray, theta: Union[float, TFloatArray]) -> TFloatArray:
    """Return ``S^theta = cos(theta) Sz + sin(theta) Sy`` of ``(..., 3)`` vectors."""
    return np.cos(theta) * vectors[..., 2] + np.sin(theta) * vectors[..., 1]


def readout_after_rotation(vectors: TFloatArray, theta: float) -> TFloatArray:
    """Rotate ``(..., 3)`` vectors about x by `theta` and read out Sz."""
    return (vectors @ rotation_matrix("x", theta).T)[..., 2]


def variance_scan(
    moments: Union[EnsembleMoments, TFloatArray],
    theta_grid: Optional[Sequence[float]] = None,
    *,
    n_atoms: Optional[float] = None,
    group: str = "full",
    method: str = "closed",
    tol: float = DEGENERACY_TOLERANCE,
) -> VarianceScan:
    """Find the readout angles of minimal and maximal ``Var[S^theta]``.

    :param moments: ensemble moments or ``(..., 2, 2)`` covariance matrices of ``(Sy, Sz)``
    :param theta_grid: angles to evaluate the variance on
    :param n_atoms: normalize variances as ``4 Var / N`` (taken from the moments by default)
    :param method: ``closed`` for the exact extrema or ``grid`` for the extrema on the grid
    """
    if method not in ("closed", "grid"):
        raise DomainError(f"Unknown scan method: {method!r}")

    if isinstance(moments, EnsembleMoments):
        cov = moments.cov[moments.group(group)]
        n_atoms = moments.n_atoms if n_atoms is None else n_atoms
    else:
        cov = np.asarray(moments, dtype=float)

    if cov.shape[-2:] != (2, 2):
        raise DomainError(f"Expected (..., 2, 2) moment matrices, got {cov.shape}")

    scale = 4.0 / n_atoms if n_atoms else 1.0
    vyy, vzz, cyz = cov[..., 0, 0], cov[..., 1, 1], cov[..., 0, 1]
    mid = np.asarray(0.5 * (vzz + vyy))
    half = np.asarray(0.5 * (vzz - vyy))
    radius = np.asarray(np.hypot(half, cyz))
    phi = np.asarray(np.arctan2(cyz, half))
    degenerate = radius <= tol * np.maximum(np.abs(mid), np.finfo(float).tiny)

    theta_max = np.where(degenerate, 0.5 * pi, np.mod(0.5 * phi, pi))
    theta_min = np.where(degenerate, 0.0, np.mod(0.5 * phi + 0.5 * pi, pi))
    var_min, var_max = (mid - radius) * scale, (mid + radius) * scale

    on_grid = None
    if theta_grid is not None:
        grid = np.asarray(theta_grid, dtype=float)
        on_grid = (
            mid[..., None] + radius[..., None] * np.cos(2 * grid - phi[..., None])
        ) * scale
        if method == "grid":
            # argmin keeps the first, i.e. the smaller angle, on ties
            imin, imax = on_grid.argmin(axis=-1), on_grid.argmax(axis=-1)
            var_min = np.take_along_axis(on_grid, imin[..., None], axis=-1)[..., 0]
            var_max = np.take_along_axis(on_grid, imax[..., None], axis=-1)[..., 0]
            theta_min, theta_max = np.mod(grid[imin], pi), np.mod(grid[imax], pi)

    elif method == "grid":
        raise DomainError("A theta grid is required for the grid method")

    return VarianceScan(var_min, var_max, theta_min, theta_max, degenerate, on_grid)


@overload
def squeezing_parameter(var_min: float, mean_sx: float, n_atoms: float) -> SqueezingValue:
    ...


@overload
def squeezing_parameter(
    var_min: TFloatArray, mean_sx: TFloatArray, n_atoms: float
) -> SqueezingValue:
    ...


def squeezing_parameter(var_min, mean_sx, n_atoms):
    """Return ``xi^2 = N Var_min / <Sx>^2`` and its value in dB.

    ``var_min`` is the unnormalized minimal variance. A vanishing spin length
    gives an infinite ``xi^2`` flagged as divergent.
    """
    if not n_atoms > 0:
        raise DomainError(f"Atom number must be positive: {n_atoms}")

    var = np.asarray(var_min, dtype=float)
    sx = np.asarray(mean_sx, dtype=float)
    divergent = sx == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        xi2 = np.where(divergent, np.inf, n_atoms * var / np.where(divergent, 1.0, sx) ** 2)

    db = to_db(xi2)
    if xi2.ndim == 0:
        return SqueezingValue(float(xi2), float(db), bool(divergent))
    return SqueezingValue(xi2, db, divergent)


def subsystem_variance(shots: Union[ShotTable, Sequence[ShotRecord]]) -> SubsystemVariance:
    """Sample variances of ``S_a + S_b`` and ``S_a - S_b``."""
    table = shots if isinstance(shots, ShotTable) else ShotTable.from_records(shots)
    if len(table) < 2:
        raise DomainError(f"At least two shots are required: {len(table)}")

    return SubsystemVariance(
        float(np.var(table.s_sum, ddof=1)), float(np.var(table.s_diff, ddof=1))
    )


@overload
def inject_phase_noise(
    totals: TrajectoryTotals,
    rms: float,
    mode: str = ...,
    *,
    echo: bool = ...,
    rng: Optional[np.random.Generator] = ...,
) -> TrajectoryTotals:
    ...


@overload
def inject_phase_noise(
    totals: TFloatArray,
    rms: float,
    mode: str = ...,
    *,
    echo: bool = ...,
    rng: Optional[np.random.Generator] = ...,
) -> TFloatArray:
    ...


def inject_phase_noise(totals, rms, mode="quasi-static", *, echo=True, rng=None):
    """Rotate every shot's collective vectors by a random global phase about z.

    Totals are ``(..., groups, 3)``; one phase is drawn per leading index and
    shared by all groups. ``quasi-static`` noise accumulates the same phase in
    both echo halves and cancels with an echo, ``fast`` noise draws
    independent phases of rms ``rms / sqrt(2)`` for each half.
    """
    if rms < 0:
        raise DomainError(f"Phase noise rms must be non-negative: {rms}")

    if mode not in NOISE_MODES:
        raise DomainError(f"Unknown noise mode {mode!r}, expected one of {NOISE_MODES}")

    if isinstance(totals, TrajectoryTotals):
        noisy = inject_phase_noise(totals.totals, rms, mode, echo=echo, rng=rng)
        return TrajectoryTotals(totals.times, noisy, totals.counts)

    values = np.asarray(totals, dtype=float)
    if rms == 0:
        return values.copy()

    rng = rng or np.random.default_rng()
    shape = values.shape[:-2]
    if mode == "quasi-static":
        first = second = 0.5 * rng.normal(0.0, rms, size=shape)
    else:
        first = rng.normal(0.0, rms / np.sqrt(2), size=shape)
        second = rng.normal(0.0, rms / np.sqrt(2), size=shape)

    # R_z(b) R_y(pi) R_z(a) = R_y(pi) R_z(a - b), read in the toggling frame
    phase = (first - second if echo else first + second)[..., None]
    cos, sin = np.cos(phase), np.sin(phase)
    noisy = values.copy()
    noisy[..., 0] = values[..., 0] * cos - values[..., 1] * sin
    noisy[..., 1] = values[..., 0] * sin + values[..., 1] * cos
    return noisy


def shot_noise_subtract(var_atoms: float, var_noatoms: float, n_atoms: float) -> NormalizedVariance:
    """Return ``(4 var_atoms - 4 var_noatoms) / N``, flagging negative results."""
    if not n_atoms > 0:
        raise DomainError(f"Atom number must be positive: {n_atoms}")

    value = 4.0 * (var_atoms - var_noatoms) / n_atoms
    if value < 0:
        logger.warning("Shot-noise subtracted variance is negative: %r", value)

    return NormalizedVariance(float(value), bool(value < 0))


def jackknife(
    samples: Sequence, estimator: TEstimator, *, blocks: Optional[int] = None
) -> JackknifeResult:
    """Jackknife estimate and standard error of `estimator` over `samples`.

    Samples are split along the first axis. By default one sample is left out
    at a time, `blocks` leaves out contiguous blocks instead.
    """
    data = np.asarray(samples)
    size = len(data)
    if size < 3:
        raise DomainError(f"Jackknife needs at least three samples: {size}")

    count = size if blocks is None else blocks
    if not 2 <= count <= size:
        raise DomainError(f"Invalid number of jackknife blocks: {count}")

    parts = np.array_split(np.arange(size), count)
    keep = np.ones(size, dtype=bool)
    estimates = []
    for part in parts:
        keep[part] = False
        estimates.append(np.asarray(estimator(data[keep]), dtype=float))
        keep[part] = True

    values = np.stack(estimates)
    mean = values.mean(axis=0)
    error = np.sqrt((count - 1) / count * ((values - mean) ** 2).sum(axis=0))
    if values.ndim == 1:
        return JackknifeResult(float(mean), float(error))
    return JackknifeResult(mean, error)


def shots_from_totals(  # noqa: PLR0913
    run: TrajectoryTotals,
    time_index: int,
    theta: float,
    *,
    detection_noise: float = 0.0,
    rng: Optional[np.random.Generator] = None,
) -> ShotTable:
    """Emulate shots from trajectories: project both halves on ``S^theta``.

    Optional Gaussian detection noise of rms `detection_noise` (in spin units)
    is added to each half independently.
    """
    if not -len(run.times) <= time_index < len(run.times):
        raise DomainError(f"Time index out of range: {time_index}")

    if detection_noise < 0:
        raise DomainError(f"Detection noise must be non-negative: {detection_noise}")

    totals = run.totals[:, time_index]
    counts = run.counts[:, time_index]
    s_a, s_b = project(totals[:, HALF_A], theta), project(totals[:, HALF_B], theta)
    if detection_noise:
        rng = rng or np.random.default_rng()
        s_a = s_a + rng.normal(0.0, detection_noise, size=s_a.shape)
        s_b = s_b + rng.normal(0.0, detection_noise, size=s_b.shape)

    size = len(run)
    return ShotTable(
        t=np.full(size, run.times[time_index]),
        theta=np.full(size, theta),
        s_a=np.clip(s_a, -counts[:, 0] / 2, counts[:, 0] / 2),
        s_b=np.clip(s_b, -counts[:, 1] / 2, counts[:, 1] / 2),
        n_a=counts[:, 0].astype(np.int64),
        n_b=counts[:, 1].astype(np.int64),
    )


#  Squeezing curves
#  ----------------


@dataclass(frozen=True, eq=False)
class SqueezingCurve:
    """Normalized squeezing quantities per time with their errors."""

    times: TFloatArray
    var_min: TFloatArray
    var_max: TFloatArray
    theta_min: TFloatArray
    spin_length: TFloatArray
    xi2: TFloatArray
    db: TFloatArray
    degenerate: TBoolArray = field(repr=False)
    divergent: TBoolArray = field(repr=False)
    errors: Dict[str, TFloatArray] = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.times)

    def error(self, name: str) -> TFloatArray:
        return self.errors.get(name, np.full(len(self), np.nan))

    def columns(self) -> Dict[str, TFloatArray]:
        """Columns of the curve table, in output order."""
        return {
            "t": self.times,
            "Sx_mean": self.spin_length,
            "Sx_err": self.error("spin_length"),
            "var_min": self.var_min,
            "var_max": self.var_max,
            "theta_min": self.theta_min,
            "xi2": self.xi2,
            "xi2_err": self.error("xi2"),
            "db": self.db,
            "db_err": self.error("db"),
        }

    @property
    def best(self) -> int:
        """Index of the strongest squeezing."""
        return int(np.nanargmin(self.xi2))


def _estimates(
    mean_sx: TFloatArray,
    cov: TFloatArray,
    n_atoms: int,
    theta_grid: Optional[Sequence[float]],
    method: str,
) -> Dict[str, TFloatArray]:
    scan = variance_scan(cov, theta_grid, n_atoms=n_atoms, method=method)
    value = squeezing_parameter(scan.var_min * n_atoms / 4.0, mean_sx, n_atoms)
    return {
        "var_min": scan.var_min,
        "var_max": scan.var_max,
        "theta_min": scan.theta_min,
        "spin_length": 2.0 * mean_sx / n_atoms,
        "xi2": np.asarray(value.xi2),
        "db": np.asarray(value.db),
        "degenerate": scan.degenerate,
        "divergent": np.asarray(value.divergent),
    }


def _blocked_errors(
    run: TrajectoryTotals,
    group: int,
    blocks: int,
    reference: Dict[str, TFloatArray],
    theta_grid: Optional[Sequence[float]],
    method: str,
) -> Dict[str, TFloatArray]:
    size = len(run)
    if not 2 <= blocks <= size:
        raise DomainError(f"Invalid number of jackknife blocks: {blocks} for {size} trajectories")

    totals = run.totals
    sx = totals[:, :, FULL, 0]
    vec = totals[:, :, HALF_A] - totals[:, :, HALF_B] if group == DIFF else totals[:, :, group]
    yz = vec[..., 1:] - vec[..., 1:].mean(axis=0)
    outer = yz[..., :, None] * yz[..., None, :]

    parts = np.array_split(np.arange(size), blocks)
    total_sx, total_yz, total_outer = sx.sum(0), yz.sum(0), outer.sum(0)
    names = ("var_min", "var_max", "theta_min", "spin_length", "xi2", "db")
    samples: Dict[str, list] = {name: [] for name in names}
    for part in parts:
        n = size - part.size
        mean_yz = (total_yz - yz[part].sum(0)) / n
        second = total_outer - outer[part].sum(0)
        cov = (second - n * mean_yz[..., :, None] * mean_yz[..., None, :]) / (n - 1)
        est = _estimates((total_sx - sx[part].sum(0)) / n, cov, run.n_atoms, theta_grid, method)
        for name, values in samples.items():
            values.append(est[name])

    errors = {}
    for name, values in samples.items():
        stack = np.stack(values)
        if name == "theta_min":
            stack = np.mod(stack - reference[name] + 0.5 * pi, pi) - 0.5 * pi
        with np.errstate(invalid="ignore"):
            spread = ((stack - stack.mean(axis=0)) ** 2).sum(axis=0)
        errors[name] = np.sqrt((blocks - 1) / blocks * spread)

    return errors


def squeezing_curve(
    moments: EnsembleMoments,
    theta_grid: Optional[Sequence[float]] = None,
    *,
    method: str = "closed",
    difference: bool = False,
    blocks: Optional[int] = None,
) -> SqueezingCurve:
    """Assemble the squeezing curve from ensemble moments.

    :param difference: Use the ``a - b`` subsystem difference instead of the
        full-system variance (the spin length always comes from the full system)
    :param blocks: Number of jackknife blocks over trajectories, ``M`` is
        leave-one-out. Needs the per-trajectory totals.
    """
    group = DIFF if difference else FULL
    mean_sx = moments.mean[FULL, :, 0]
    est = _estimates(mean_sx, moments.cov[group], moments.n_atoms, theta_grid, method)
    if not np.isfinite(est["var_min"]).all():
        raise NumericError("Variance scan produced non-finite values")

    if est["divergent"].any():
        logger.warning("Spin length vanishes at %d times, xi2 diverges", est["divergent"].sum())
    if est["degenerate"].any():
        logger.debug("Isotropic variance at %d times, theta_min set to 0", est["degenerate"].sum())

    errors: Dict[str, TFloatArray] = {}
    if moments.trajectories == 0:
        errors = {name: np.zeros(len(moments.times)) for name in ("spin_length", "xi2", "db")}
    else:
        errors["spin_length"] = moments.spin_length_err
        if blocks:
            if moments.totals is None:
                raise DomainError("Jackknife errors need the per-trajectory totals")
            errors.update(
                _blocked_errors(moments.totals, group, blocks, est, theta_grid, method)
            )

    return SqueezingCurve(
        times=moments.times,
        var_min=est["var_min"],
        var_max=est["var_max"],
        theta_min=est["theta_min"],
        spin_length=est["spin_length"],
        xi2=est["xi2"],
        db=est["db"],
        degenerate=est["degenerate"],
        divergent=est["divergent"],
        errors=errors,
    )
