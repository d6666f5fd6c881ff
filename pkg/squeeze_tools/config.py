"""Run configuration.

Configs are flat ``key = value`` files, one key per line, ``#`` starts a
comment. Every key of :class:`RunConfig` may be set; unknown keys are
rejected. Layers are applied in the order: defaults, preset, file,
``SQUEEZE_<KEY>`` environment variables, command line flags.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import (
    TYPE_CHECKING,
    Any,
    Callable,
    Dict,
    Final,
    Mapping,
    Optional,
    Tuple,
    Union,
    get_type_hints,
)

import numpy as np

from .analysis import NOISE_MODES
from .constants import (
    DEFAULT_ALPHA,
    DEFAULT_ATOMS,
    DEFAULT_BATCH_SIZE,
    DEFAULT_BLUR_FWHM,
    DEFAULT_CLOUD_RADIUS,
    DEFAULT_DETUNING,
    DEFAULT_DT,
    DEFAULT_FRAME_SIZE,
    DEFAULT_J_HZ,
    DEFAULT_PCA_COMPONENTS,
    DEFAULT_PHOTONS,
    DEFAULT_ROI_GAP,
    DEFAULT_ROI_RADIUS,
    DEFAULT_SHOTS,
    DEFAULT_SIGMA0,
    DEFAULT_STEPS,
    DEFAULT_T_OVER_J,
    DEFAULT_TRAJECTORIES,
    ENV_PREFIX,
    OPERATING_DELTA,
    OPERATING_HZ,
)
from .couplings import HubbardParams, SpinCouplings
from .dtwa import ROTATE_SITES, SPIN_FRAMES, EngineConfig, Protocol
from .errors import ConfigError, DomainError
from .imaging import FRINGE_MODES, CloudModel, FringeModel, RoiSpec
from .lattice import LatticeGeometry, build_lattice

if TYPE_CHECKING:
    from .types import TFloatArray

SCENARIOS: Final = ("params", "oracle", "dtwa", "analyze", "imaging-demo")
RECORD_FORMATS: Final = ("json", "csv")
AUTO: Final = "auto"
TRUE: Final = ("1", "true", "yes", "on")
FALSE: Final = ("0", "false", "no", "off")


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs. Couplings are in units of ``J``."""

    scenario: str = "dtwa"
    out: str = "."

    # lattice and couplings
    dims: Tuple[int, ...] = (32,)
    periodic: bool = False
    delta: float = OPERATING_DELTA
    hz: float = OPERATING_HZ
    t_over_j: float = DEFAULT_T_OVER_J

    # hubbard parameters
    t_tunnel: float = 1.0
    u_uu: float = 4.0
    u_dd: float = 4.0
    u_ud: float = 4.0
    j_hz: float = DEFAULT_J_HZ
    record_format: str = "json"

    # engine
    rho_h: float = 0.0
    dt: float = DEFAULT_DT
    n_steps: int = DEFAULT_STEPS
    trajectories: int = DEFAULT_TRAJECTORIES
    hop_rate: Optional[float] = None
    double_hop_rate: Optional[float] = None
    alpha: float = DEFAULT_ALPHA
    enable_hopping: bool = True
    enable_hz_field: bool = True
    enable_spin_flip: bool = True
    echo: bool = False
    initial_pulse: bool = False
    toggling_frame: bool = True
    rotate_site: str = "origin"
    seed: int = 0
    batch_size: int = DEFAULT_BATCH_SIZE
    raw_dump: bool = False

    # analysis
    theta_grid: int = 0
    jackknife_blocks: int = 20
    difference: bool = False
    noise_rms: float = 0.0
    noise_mode: str = "quasi-static"
    spin_frame: str = "mean"
    input: str = ""

    # imaging
    frame_size: int = DEFAULT_FRAME_SIZE
    shots: int = DEFAULT_SHOTS
    atoms: float = DEFAULT_ATOMS
    photons: float = DEFAULT_PHOTONS
    cloud_radius: float = DEFAULT_CLOUD_RADIUS
    detuning: float = DEFAULT_DETUNING
    sigma0: float = DEFAULT_SIGMA0
    blur_fwhm: float = DEFAULT_BLUR_FWHM
    roi_radius: float = DEFAULT_ROI_RADIUS
    roi_gap: float = DEFAULT_ROI_GAP
    pca_components: int = DEFAULT_PCA_COMPONENTS
    pca_pool: int = 400
    fringe_modes: int = 20
    fringe_amplitude: float = 0.01
    fringe_drift: float = 1.0
    spin_variance: float = 1.0
    sweep_gaps: Tuple[float, ...] = (0.0, 1.0, 2.0, 3.0, 4.0)
    sweep_radii: Tuple[float, ...] = (8.0, 10.0, 12.0, 14.0, 16.0)

    def __post_init__(self):
        for name, value, choices in (
            ("scenario", self.scenario, SCENARIOS),
            ("record_format", self.record_format, RECORD_FORMATS),
            ("rotate_site", self.rotate_site, ROTATE_SITES),
            ("noise_mode", self.noise_mode, NOISE_MODES),
            ("spin_frame", self.spin_frame, SPIN_FRAMES),
        ):
            if value not in choices:
                raise ConfigError(f"Invalid {name} {value!r}, expected one of {choices}")

        for name in ("trajectories", "shots", "frame_size", "pca_components", "pca_pool"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive: {getattr(self, name)}")

        if self.theta_grid < 0 or self.jackknife_blocks < 0:
            raise ConfigError("theta_grid and jackknife_blocks must be non-negative")

    def replace(self, **changes) -> RunConfig:
        return replace(self, **changes)

    def check(self) -> RunConfig:
        """Validate the module preconditions of the selected scenario."""
        if self.scenario == "params":
            self.hubbard()
        elif self.scenario in ("oracle", "dtwa"):
            geom = self.lattice()
            self.engine().probabilities(geom)
        elif self.scenario == "analyze":
            if not self.input or not Path(self.input).is_file():
                raise ConfigError(f"Input file does not exist: {self.input!r}")
        else:
            self.roi()
            low, high = FRINGE_MODES
            if self.fringe_modes and not low <= self.fringe_modes <= high:
                raise DomainError(f"Fringe models have {low} to {high} modes: {self.fringe_modes}")
        return self

    def lattice(self) -> LatticeGeometry:
        return build_lattice(self.dims, periodic=self.periodic)

    def couplings(self) -> SpinCouplings:
        return SpinCouplings.from_ratios(self.delta, self.hz, t_over_J=self.t_over_j)

    def hubbard(self) -> HubbardParams:
        return HubbardParams(self.t_tunnel, self.u_uu, self.u_dd, self.u_ud)

    def engine(self) -> EngineConfig:
        return EngineConfig(
            dt=self.dt,
            n_steps=self.n_steps,
            hole_density=self.rho_h,
            hop_rate=self.t_over_j if self.hop_rate is None else self.hop_rate,
            double_hop_rate=self.double_hop_rate,
            alpha=self.alpha,
            enable_hopping=self.enable_hopping,
            enable_hz_field=self.enable_hz_field,
            enable_spin_flip=self.enable_spin_flip,
            hz=self.hz,
            echo=self.echo,
            seed=self.seed,
            rotate_site=self.rotate_site,
            batch_size=self.batch_size,
        )

    def protocol(self) -> Protocol:
        return Protocol(initial_pulse=self.initial_pulse, toggling_frame=self.toggling_frame)

    @property
    def times(self) -> TFloatArray:
        return np.arange(self.n_steps + 1) * self.dt

    def thetas(self) -> Optional[TFloatArray]:
        """Readout angles on ``[0, pi)``, None for the closed-form scan."""
        if not self.theta_grid:
            return None
        return np.linspace(0.0, np.pi, self.theta_grid, endpoint=False)

    @property
    def scan_method(self) -> str:
        return "grid" if self.theta_grid else "closed"

    def roi(self) -> RoiSpec:
        size = self.frame_size
        spec = RoiSpec(self.roi_radius, self.roi_gap, (size / 2, size / 2))
        if self.roi_radius > size / 2:
            raise DomainError(f"ROI radius {self.roi_radius} exceeds the frame {size}")
        return spec

    def cloud(self) -> CloudModel:
        return CloudModel.gaussian(
            (self.frame_size, self.frame_size),
            self.atoms,
            self.cloud_radius,
            detuning=self.detuning,
            sigma0=self.sigma0,
        )

    def fringes(self, rng: np.random.Generator) -> Optional[FringeModel]:
        if not self.fringe_modes:
            return None
        return FringeModel.random(
            rng, self.fringe_modes, amplitude=self.fringe_amplitude, drift=self.fringe_drift
        )


#  Parsing
#  -------


def _parse_bool(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in TRUE:
        return True
    if lowered in FALSE:
        return False
    raise ValueError(f"not a boolean: {value!r}")


def _parse_optional_float(value: str) -> Optional[float]:
    return None if value.strip().lower() in (AUTO, "") else float(value)


def _parse_ints(value: str) -> Tuple[int, ...]:
    return tuple(int(item) for item in value.replace("x", ",").split(",") if item.strip())


def _parse_floats(value: str) -> Tuple[float, ...]:
    return tuple(float(item) for item in value.split(",") if item.strip())


PARSERS: Final[Mapping[Any, Callable[[str], Any]]] = {
    bool: _parse_bool,
    int: int,
    float: float,
    str: str.strip,
    Optional[float]: _parse_optional_float,
    Tuple[int, ...]: _parse_ints,
    Tuple[float, ...]: _parse_floats,
}


def _schema() -> Dict[str, Callable[[str], Any]]:
    hints = get_type_hints(RunConfig)
    return {item.name: PARSERS[hints[item.name]] for item in fields(RunConfig)}


def parse_value(key: str, value: Union[str, Any]) -> Any:
    """Convert a raw value of `key` into its typed form."""
    schema = _schema()
    if key not in schema:
        raise ConfigError(f"Unknown config key: {key!r}")

    if not isinstance(value, str):
        return value

    try:
        return schema[key](value)
    except ValueError as exc:
        raise ConfigError(f"Invalid value for {key}: {value!r} ({exc})") from exc


def parse_config(text: str, *, source: str = "<config>") -> Dict[str, Any]:
    """Parse ``key = value`` lines into typed overrides."""
    values: Dict[str, Any] = {}
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue

        key, sep, value = line.partition("=")
        key = key.strip().lower().replace("-", "_")
        if not sep:
            raise ConfigError(f"{source}:{number}: expected 'key = value', got {raw!r}")

        if key in values:
            raise ConfigError(f"{source}:{number}: duplicate key {key!r}")

        values[key] = parse_value(key, value)

    return values


def load_config(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file does not exist: {path}")
    return parse_config(path.read_text(encoding="utf-8"), source=str(path))


def env_overrides(environ: Mapping[str, str]) -> Dict[str, Any]:
    """Collect ``SQUEEZE_<KEY>`` overrides."""
    values = {}
    for name, value in environ.items():
        if name.startswith(ENV_PREFIX):
            key = name[len(ENV_PREFIX) :].lower()
            values[key] = parse_value(key, value)
    return values


def _format(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return AUTO
    if isinstance(value, tuple):
        return ",".join(_format(item) for item in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dump_config(config: RunConfig) -> str:
    """Serialize every key in a canonical form that parses back unchanged."""
    return "".join(f"{key} = {_format(value)}\n" for key, value in asdict(config).items())


def build_config(*layers: Optional[Mapping[str, Any]]) -> RunConfig:
    """Apply override layers over the defaults, later layers win."""
    values: Dict[str, Any] = {}
    for layer in layers:
        if layer:
            values.update({key: parse_value(key, value) for key, value in layer.items()})

    try:
        return RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
