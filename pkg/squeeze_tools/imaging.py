"""Polarization-contrast imaging: forward model and image analysis chain.

A column with spin imbalance ``S = (n_b - n_c) / 2`` imprints the phase
``S * kappa`` with ``kappa = sigma0 / 2 * delta / (1 + delta^2)``. The polarizer
passes ``(1 - sin(phase)) / 2`` of the incident light and the incident count
per pixel is ``2 * photons``, so ``photons`` is the count at zero phase.

Frames are analyzed by fitting a PCA background outside of the atoms and
summing the inverted imbalance over diagonal quadrant pairs.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field, replace
from math import isfinite, log, sqrt
from pathlib import Path
from typing import (
    TYPE_CHECKING,
    Final,
    Iterable,
    List,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import numpy as np
from scipy import linalg
from scipy.ndimage import gaussian_filter

from .analysis import NormalizedVariance, shot_noise_subtract
from .constants import (
    DEFAULT_CLOUD_RADIUS,
    DEFAULT_DETUNING,
    DEFAULT_PCA_COMPONENTS,
    DEFAULT_PHOTONS,
    DEFAULT_ROI_GAP,
    DEFAULT_ROI_RADIUS,
    DEFAULT_SIGMA0,
    FRAME_MAGIC,
)
from .errors import DomainError
from .logs import logger

if TYPE_CHECKING:
    from .lattice import LatticeGeometry
    from .types import TBoolArray, TFloatArray, TIntArray

FWHM_PER_SIGMA: Final = 2 * sqrt(2 * log(2))
MASK_SCALE: Final = 1.5
FRINGE_MODES: Final = (10, 50)

_HEADER: Final = struct.Struct("<4sII4s")

TFrame = Union["ImageFrame", np.ndarray]


def _pixels(frame: TFrame) -> TFloatArray:
    return np.asarray(frame.counts if isinstance(frame, ImageFrame) else frame, dtype=float)


@dataclass(frozen=True, eq=False)
class ImageFrame:
    """CCD frame in photon counts."""

    counts: np.ndarray
    pixel_size: float = 1.0
    photons: float = DEFAULT_PHOTONS
    noisy: bool = True

    def __post_init__(self):
        if self.counts.ndim != 2:
            raise DomainError(f"Frames are two dimensional: {self.counts.shape}")

        if (self.counts < 0).any():
            raise DomainError("Photon counts must be non-negative")

    @property
    def shape(self) -> Tuple[int, int]:
        return self.counts.shape  # type: ignore[return-value]

    @property
    def mean(self) -> float:
        return float(self.counts.mean())

    def to_bytes(self) -> bytes:
        """Serialize as ``magic, uint32 H, uint32 W, dtype code`` and little-endian pixels."""
        data = self.counts.astype(self.counts.dtype.newbyteorder("<"), copy=False)
        code = data.dtype.str.encode().ljust(4)
        height, width = self.shape
        return _HEADER.pack(FRAME_MAGIC, height, width, code) + np.ascontiguousarray(data).tobytes()

    @classmethod
    def from_bytes(cls, raw: bytes, **meta) -> ImageFrame:
        if len(raw) < _HEADER.size:
            raise DomainError("Frame raster is truncated")

        magic, height, width, code = _HEADER.unpack_from(raw)
        if magic != FRAME_MAGIC:
            raise DomainError(f"Not a frame raster: {magic!r}")

        dtype = np.dtype(code.strip().decode())
        payload = raw[_HEADER.size :]
        if len(payload) != height * width * dtype.itemsize:
            raise DomainError("Frame raster size does not match its header")

        counts = np.frombuffer(payload, dtype=dtype).reshape(height, width)
        return cls(counts.astype(dtype.newbyteorder("=")), **meta)


def write_frame(frame: ImageFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_bytes(frame.to_bytes())
    return path


def read_frame(path: Union[str, Path]) -> ImageFrame:
    return ImageFrame.from_bytes(Path(path).read_bytes())


def phase_scale(detuning: float, sigma0: float) -> float:
    """Phase per unit column spin imbalance."""
    if not isfinite(detuning):
        return 0.0
    return sigma0 / 2 * detuning / (1 + detuning**2)


def _grid(shape: Tuple[int, int], center: Tuple[float, float]) -> Tuple[TFloatArray, TFloatArray]:
    """Pixel-center offsets ``(dy, dx)`` from `center`."""
    ys = np.arange(shape[0]) + 0.5 - center[0]
    xs = np.arange(shape[1]) + 0.5 - center[1]
    return ys[:, None], xs[None, :]


@dataclass(frozen=True, eq=False)
class CloudModel:
    """Column densities of both imaged states.

    :param n_b: Column density of state b per pixel
    :param n_c: Column density of state c per pixel
    :param center: Cloud center ``(y, x)`` in pixels
    :param radius: Cloud radius (the 1/e^2 radius of a Gaussian cloud)
    :param detuning: Probe detuning in half-linewidths
    :param sigma0: Resonant cross section in pixel areas
    """

    n_b: TFloatArray
    n_c: TFloatArray
    center: Tuple[float, float]
    radius: float = DEFAULT_CLOUD_RADIUS
    detuning: float = DEFAULT_DETUNING
    sigma0: float = DEFAULT_SIGMA0

    def __post_init__(self):
        if self.n_b.shape != self.n_c.shape or self.n_b.ndim != 2:
            raise DomainError(
                f"Column densities must be 2D and alike: {self.n_b.shape}, {self.n_c.shape}"
            )

        if (self.n_b < 0).any() or (self.n_c < 0).any():
            raise DomainError("Column densities must be non-negative")

    @classmethod
    def gaussian(  # noqa: PLR0913
        cls,
        shape: Tuple[int, int],
        atoms: float,
        radius: float = DEFAULT_CLOUD_RADIUS,
        *,
        center: Optional[Tuple[float, float]] = None,
        imbalance: Optional[TFloatArray] = None,
        detuning: float = DEFAULT_DETUNING,
        sigma0: float = DEFAULT_SIGMA0,
    ) -> CloudModel:
        """Gaussian cloud of `atoms` atoms with ``sigma = radius / 2``."""
        if not atoms >= 0 or not radius > 0:
            raise DomainError(f"Invalid cloud: atoms={atoms}, radius={radius}")

        center = center or (shape[0] / 2, shape[1] / 2)
        dy, dx = _grid(shape, center)
        sigma2 = (radius / 2) ** 2
        density = atoms / (2 * np.pi * sigma2) * np.exp(-(dx**2 + dy**2) / (2 * sigma2))
        spin = np.zeros(shape) if imbalance is None else np.asarray(imbalance, dtype=float)
        return cls._from_density(density, spin, center, radius, detuning, sigma0)

    @classmethod
    def from_columns(  # noqa: PLR0913
        cls,
        columns: TFloatArray,
        imbalance: TFloatArray,
        shape: Tuple[int, int],
        *,
        pixels_per_site: int = 2,
        center: Optional[Tuple[int, int]] = None,
        detuning: float = DEFAULT_DETUNING,
        sigma0: float = DEFAULT_SIGMA0,
    ) -> CloudModel:
        """Upsample lattice column atom numbers and imbalances onto pixels."""
        columns, imbalance = np.asarray(columns, dtype=float), np.asarray(imbalance, dtype=float)
        if columns.shape != imbalance.shape or columns.ndim != 2:
            raise DomainError("Columns and imbalances must be alike 2D grids")

        block = np.ones((pixels_per_site, pixels_per_site)) / pixels_per_site**2
        cy, cx = center or (shape[0] // 2, shape[1] // 2)
        height, width = columns.shape[0] * pixels_per_site, columns.shape[1] * pixels_per_site
        top, left = cy - height // 2, cx - width // 2
        if top < 0 or left < 0 or top + height > shape[0] or left + width > shape[1]:
            raise DomainError(f"Columns of {height}x{width} px do not fit into {shape}")

        density, spin = np.zeros(shape), np.zeros(shape)
        density[top : top + height, left : left + width] = np.kron(columns, block)
        spin[top : top + height, left : left + width] = np.kron(imbalance, block)
        return cls._from_density(
            density, spin, (float(cy), float(cx)), max(height, width) / 2, detuning, sigma0
        )

    @classmethod
    def _from_density(  # noqa: PLR0913
        cls, density, spin, center, radius, detuning, sigma0
    ) -> CloudModel:
        half = density / 2
        spin = np.clip(spin, -half, half)
        return cls(
            n_b=half + spin,
            n_c=half - spin,
            center=center,
            radius=radius,
            detuning=detuning,
            sigma0=sigma0,
        )

    @property
    def shape(self) -> Tuple[int, int]:
        return self.n_b.shape  # type: ignore[return-value]

    @property
    def density(self) -> TFloatArray:
        return self.n_b + self.n_c

    @property
    def imbalance(self) -> TFloatArray:
        return (self.n_b - self.n_c) / 2

    @property
    def kappa(self) -> float:
        return phase_scale(self.detuning, self.sigma0)

    def with_imbalance(self, imbalance: TFloatArray) -> CloudModel:
        """Return the cloud with a new per-pixel spin imbalance."""
        return self._from_density(
            self.density, imbalance, self.center, self.radius, self.detuning, self.sigma0
        )

    def spin_noise(self, rng: np.random.Generator, variance: float = 1.0) -> TFloatArray:
        """Draw an independent per-pixel imbalance with normalized variance `variance`."""
        if variance < 0:
            raise DomainError(f"Spin variance must be non-negative: {variance}")
        return rng.normal(size=self.shape) * np.sqrt(variance * self.density / 4)

    def atom_mask(self, scale: float = MASK_SCALE) -> TBoolArray:
        """Pixels within ``scale * radius`` of the cloud center."""
        dy, dx = _grid(self.shape, self.center)
        return dx**2 + dy**2 <= (scale * self.radius) ** 2


def phase_map(cloud: CloudModel) -> TFloatArray:
    """Phase imprinted by every column: ``(n_b - n_c) / 2 * sigma0 / 2 * delta / (1 + delta^2)``."""
    return cloud.imbalance * cloud.kappa


@dataclass(frozen=True, eq=False)
class FringeModel:
    """Background modulation by drifting sinusoidal fringes.

    The field is ``1 + sum_m a_m cos(k_m . r + phi_m)``, every frame adds a
    Gaussian drift of rms `drift` to each phase.
    """

    wavevectors: TFloatArray
    amplitudes: TFloatArray
    phases: TFloatArray
    drift: float = 1.0

    @classmethod
    def random(
        cls,
        rng: np.random.Generator,
        n_modes: int = 20,
        *,
        amplitude: float = 0.01,
        drift: float = 1.0,
        periods: Tuple[float, float] = (8.0, 40.0),
    ) -> FringeModel:
        """Draw `n_modes` modes with random directions and periods (pixels)."""
        if not FRINGE_MODES[0] <= n_modes <= FRINGE_MODES[1]:
            raise DomainError(f"Fringe models have {FRINGE_MODES[0]} to {FRINGE_MODES[1]} modes")

        angle = rng.uniform(0, 2 * np.pi, n_modes)
        k = 2 * np.pi / rng.uniform(*periods, n_modes)
        return cls(
            wavevectors=np.stack([k * np.sin(angle), k * np.cos(angle)], axis=1),
            amplitudes=np.full(n_modes, amplitude),
            phases=rng.uniform(0, 2 * np.pi, n_modes),
            drift=drift,
        )

    def with_mode(
        self, wavevector: Tuple[float, float], amplitude: float, phase: float = 0.0
    ) -> FringeModel:
        return replace(
            self,
            wavevectors=np.vstack([self.wavevectors, wavevector]),
            amplitudes=np.append(self.amplitudes, amplitude),
            phases=np.append(self.phases, phase),
        )

    def field(
        self, shape: Tuple[int, int], rng: Optional[np.random.Generator] = None
    ) -> TFloatArray:
        """Modulation of one frame, without drift when `rng` is None."""
        phases = self.phases
        if rng is not None and self.drift:
            phases = phases + rng.normal(0.0, self.drift, phases.size)

        ys, xs = np.arange(shape[0])[:, None, None], np.arange(shape[1])[None, :, None]
        arg = self.wavevectors[:, 0] * ys + self.wavevectors[:, 1] * xs + phases
        return np.clip(1.0 + (self.amplitudes * np.cos(arg)).sum(axis=-1), 0.0, None)


def render_frame(  # noqa: PLR0913
    cloud: Optional[CloudModel],
    fringes: Optional[FringeModel] = None,
    photons: float = DEFAULT_PHOTONS,
    rng: Optional[np.random.Generator] = None,
    *,
    shape: Optional[Tuple[int, int]] = None,
    blur_fwhm: float = 0.0,
    noise: bool = True,
) -> ImageFrame:
    """Render a CCD frame, `photons` being the mean count at the balanced point.

    The counts are ``base * (1 - sin(phase)) / 2`` with ``base = 2 * photons``.

    :param cloud: The atoms, None renders a no-atom frame of `shape`
    :param blur_fwhm: Optical resolution applied to the phase map (pixels)
    :param noise: Poisson-sample the intensity
    """
    if not photons > 0:
        raise DomainError(f"Photons per pixel must be positive: {photons}")

    if cloud is None:
        if shape is None:
            raise DomainError("A frame shape is required without atoms")
        phase = np.zeros(shape)
    else:
        phase = phase_map(cloud)
        if blur_fwhm > 0:
            phase = gaussian_filter(phase, sigma=blur_fwhm / FWHM_PER_SIGMA, mode="constant")

    rng = rng or np.random.default_rng()
    base = 2.0 * photons
    intensity = base * (1.0 - np.sin(phase)) / 2
    if fringes is not None:
        intensity *= fringes.field(phase.shape, rng)

    counts = rng.poisson(intensity) if noise else intensity
    return ImageFrame(counts, photons=photons, noisy=noise)


@dataclass(frozen=True, eq=False)
class PcaBasis:
    """Orthonormal background components (rows), orthonormal over `fit_mask` when set."""

    components: TFloatArray = field(repr=False)
    mean: TFloatArray = field(repr=False)
    singular_values: TFloatArray = field(repr=False)
    fit_mask: Optional[TBoolArray] = field(default=None, repr=False)

    @property
    def n_components(self) -> int:
        return self.components.shape[0]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.mean.shape  # type: ignore[return-value]


class Reconstruction(NamedTuple):
    background: TFloatArray
    residual: TFloatArray


def pca_fit(
    pool: Sequence[TFrame],
    n_components: int = DEFAULT_PCA_COMPONENTS,
    *,
    fit_mask: Optional[TBoolArray] = None,
    tol: float = 1e-10,
) -> PcaBasis:
    """Build a background basis from no-atom frames.

    Components with singular values below ``tol`` of the largest are dropped,
    so a pool of identical frames gives a single component.
    """
    if len(pool) < n_components:
        raise DomainError(f"Pool of {len(pool)} frames is smaller than {n_components} components")

    frames = np.stack([_pixels(frame) for frame in pool])
    data = frames.reshape(len(frames), -1)
    _, values, vt = linalg.svd(data, full_matrices=False)
    keep = min(n_components, int((values > tol * values[0]).sum()))
    components = vt[:keep]

    if fit_mask is not None:
        masked = components[:, fit_mask.ravel()]
        u, sv, _ = linalg.svd(masked, full_matrices=False)
        rank = int((sv > tol * sv[0]).sum())
        components = (u[:, :rank] / sv[:rank]).T @ components

    logger.debug("PCA basis of %d components from %d frames", components.shape[0], len(frames))
    return PcaBasis(components, frames.mean(axis=0), values[:keep], fit_mask)


def pca_reconstruct(frame: TFrame, basis: PcaBasis, atom_mask: TBoolArray) -> Reconstruction:
    """Fit the basis to the pixels outside `atom_mask` and return the background."""
    pixels = _pixels(frame)
    if pixels.shape != basis.shape or atom_mask.shape != basis.shape:
        raise DomainError(f"Frame {pixels.shape} does not match the basis {basis.shape}")

    fit = ~atom_mask.ravel()
    flat = pixels.ravel()
    if basis.fit_mask is not None and np.array_equal(basis.fit_mask.ravel(), fit):
        coeffs = basis.components[:, fit] @ flat[fit]
    else:
        coeffs = linalg.lstsq(basis.components[:, fit].T, flat[fit])[0]

    background = (coeffs @ basis.components).reshape(pixels.shape)
    return Reconstruction(background, pixels - background)


@dataclass(frozen=True)
class RoiSpec:
    """Quadrant region of interest with a cross-shaped gap."""

    radius: float = DEFAULT_ROI_RADIUS
    gap: float = DEFAULT_ROI_GAP
    center: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if not self.radius > self.gap >= 0:
            raise DomainError(f"ROI needs radius > gap >= 0: radius={self.radius}, gap={self.gap}")


def quadrants(shape: Tuple[int, int], roi: RoiSpec) -> TIntArray:
    """Label pixels by quadrant 1..4 (0 outside of the ROI or in the gap).

    Quadrant 1 is right-up (``dx > 0, dy < 0``), counting counter-clockwise.
    """
    center = roi.center or (shape[0] / 2, shape[1] / 2)
    if (
        center[0] - roi.radius < 0
        or center[1] - roi.radius < 0
        or center[0] + roi.radius > shape[0]
        or center[1] + roi.radius > shape[1]
    ):
        raise DomainError(f"ROI of radius {roi.radius} at {center} exceeds the frame {shape}")

    dy, dx = _grid(shape, center)
    inside = dx**2 + dy**2 <= roi.radius**2
    inside &= (np.abs(dx) >= roi.gap / 2) & (np.abs(dy) >= roi.gap / 2)
    inside &= (dx != 0) & (dy != 0)
    labels = np.select(
        [(dx > 0) & (dy < 0), (dx < 0) & (dy < 0), (dx < 0) & (dy > 0), (dx > 0) & (dy > 0)],
        [1, 2, 3, 4],
        0,
    )
    return np.where(inside, labels, 0)


def subsystem_weights(shape: Tuple[int, int], roi: RoiSpec) -> Tuple[TBoolArray, TBoolArray]:
    """Masks of subsystem a (quadrants 1 and 3) and b (quadrants 2 and 4)."""
    labels = quadrants(shape, roi)
    return (labels == 1) | (labels == 3), (labels == 2) | (labels == 4)


def column_imbalance(residual: TFrame, background: TFrame, kappa: float) -> TFloatArray:
    """Invert the intensity law: ``sin(phase) = -residual / background``."""
    if kappa == 0:
        raise DomainError("The phase scale vanishes, the imbalance is not observable")

    back = _pixels(background)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(back > 0, -_pixels(residual) / back, 0.0)
    return np.arcsin(np.clip(ratio, -1.0, 1.0)) / kappa


class QuadrantSignal(NamedTuple):
    diff: float
    s_a: float
    s_b: float
    n_estimate: float


def quadrant_signal(
    residual: TFrame, roi: RoiSpec, *, background: TFrame, kappa: float
) -> QuadrantSignal:
    """Sum the inverted imbalance over diagonal quadrant pairs.

    ``n_estimate = 2 (S_a + S_b)`` is the atom number of a fully polarized
    calibration frame.
    """
    spin = column_imbalance(residual, background, kappa)
    mask_a, mask_b = subsystem_weights(spin.shape, roi)
    s_a, s_b = float(spin[mask_a].sum()), float(spin[mask_b].sum())
    return QuadrantSignal(s_a - s_b, s_a, s_b, 2 * (s_a + s_b))


def roi_atom_number(cloud: CloudModel, roi: RoiSpec) -> float:
    """Atoms inside the ROI from the known column densities."""
    return float(cloud.density[quadrants(cloud.shape, roi) > 0].sum())


def columns_from_sites(geom: LatticeGeometry, values: Sequence[float]) -> TFloatArray:
    """Project per-site values along z onto the ``(Ly, Lx)`` column grid."""
    data = np.asarray(values, dtype=float)
    if data.shape != (geom.n_sites,):
        raise DomainError(f"Expected {geom.n_sites} site values, got {data.shape}")

    lx, ly, lz = geom.dims
    return data.reshape(lz, ly, lx).sum(axis=0)


#  Synthetic runs
#  --------------


@dataclass(frozen=True, eq=False)
class ImagingRun:
    """Recovered imbalance maps of atom and no-atom shots of one synthetic run."""

    cloud: CloudModel
    atoms: TFloatArray = field(repr=False)
    noatoms: TFloatArray = field(repr=False)
    residual_rms: float = 0.0
    basis: Optional[PcaBasis] = field(default=None, repr=False)

    def __len__(self) -> int:
        return self.atoms.shape[0]

    def signals(self, roi: RoiSpec) -> Tuple[TFloatArray, TFloatArray]:
        """Per-shot ``S_a - S_b`` of the atom and the no-atom shots."""
        mask_a, mask_b = subsystem_weights(self.cloud.shape, roi)
        weights = mask_a.astype(float) - mask_b.astype(float)
        return (
            np.tensordot(self.atoms, weights, axes=([1, 2], [0, 1])),
            np.tensordot(self.noatoms, weights, axes=([1, 2], [0, 1])),
        )

    def normalized_variance(self, roi: RoiSpec) -> NormalizedVariance:
        """Shot-noise subtracted ``4 Var[S_a - S_b] / N``."""
        diff_atoms, diff_noatoms = self.signals(roi)
        return shot_noise_subtract(
            float(np.var(diff_atoms, ddof=1)),
            float(np.var(diff_noatoms, ddof=1)),
            roi_atom_number(self.cloud, roi),
        )


def simulate_imaging_run(  # noqa: PLR0913
    cloud: CloudModel,
    shots: int,
    rng: np.random.Generator,
    *,
    photons: float = DEFAULT_PHOTONS,
    fringes: Optional[FringeModel] = None,
    pool_size: int = 0,
    n_components: int = DEFAULT_PCA_COMPONENTS,
    spin_variance: float = 1.0,
    spin_maps: Optional[Iterable[TFloatArray]] = None,
    blur_fwhm: float = 0.0,
    noise: bool = True,
) -> ImagingRun:
    """Render an atom and a no-atom frame per shot and recover the imbalance maps.

    Atom shots carry independent per-pixel spin noise of normalized variance
    `spin_variance` unless `spin_maps` supplies the imbalance of every shot.
    Backgrounds come from a PCA basis over `pool_size` no-atom frames, or from
    the exact intensity when no fringes are rendered.
    """
    if shots < 2:
        raise DomainError(f"A run needs at least two shots: {shots}")

    shape = cloud.shape
    mask = cloud.atom_mask()
    basis = None
    if fringes is not None:
        if pool_size < 1:
            raise DomainError("Fringed frames need a PCA pool")
        pool = [
            render_frame(None, fringes, photons, rng, shape=shape, noise=noise)
            for _ in range(pool_size)
        ]
        basis = pca_fit(pool, min(n_components, pool_size), fit_mask=~mask)

    maps = iter(spin_maps) if spin_maps is not None else None
    atoms, noatoms = np.empty((shots, *shape)), np.empty((shots, *shape))
    rms = []
    for shot in range(shots):
        spin = next(maps) if maps is not None else cloud.spin_noise(rng, spin_variance)
        frames = (
            render_frame(
                cloud.with_imbalance(spin), fringes, photons, rng, blur_fwhm=blur_fwhm, noise=noise
            ),
            render_frame(None, fringes, photons, rng, shape=shape, noise=noise),
        )
        for out, frame in zip((atoms, noatoms), frames):
            if basis is None:
                background = np.full(shape, photons)
                residual = frame.counts - background
            else:
                background, residual = pca_reconstruct(frame, basis, mask)
            out[shot] = column_imbalance(residual, background, cloud.kappa)

        rms.append(np.sqrt(np.mean(residual[mask] ** 2)) / np.mean(background[mask]))

    logger.info("Imaging run of %d shots, residual rms %.4f", shots, np.mean(rms))
    return ImagingRun(cloud, atoms, noatoms, float(np.mean(rms)), basis)


def variance_vs_gap(
    run: ImagingRun, gaps: Sequence[float], radius: float = DEFAULT_ROI_RADIUS
) -> List[Tuple[float, NormalizedVariance]]:
    """Normalized subsystem-difference variance for several quadrant gaps."""
    return [(gap, run.normalized_variance(RoiSpec(radius, gap))) for gap in gaps]


def variance_vs_radius(
    run: ImagingRun, radii: Sequence[float], gap: float = DEFAULT_ROI_GAP
) -> List[Tuple[float, NormalizedVariance]]:
    """Normalized subsystem-difference variance for several quadrant radii."""
    return [(radius, run.normalized_variance(RoiSpec(radius, gap))) for radius in radii]
