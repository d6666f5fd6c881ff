"""Named run scenarios: chains, cubes, coupling and imaging settings."""

from __future__ import annotations

from types import MappingProxyType
from typing import Any, Dict, Final, Mapping

from .config import RunConfig, build_config
from .errors import ConfigError

_CHAIN: Final = {"dims": (32,), "trajectories": 3000}
_CUBE: Final = {"dims": (22, 22, 22), "trajectories": 3000}

# Hubbard parameters giving J/h = -38 Hz, delta = -0.18 and hz = -1.1 J
_T_CLOCK: Final = 160.0
_U_UD_CLOCK: Final = 4 * _T_CLOCK**2 / 38.0

PRESETS: Final[Mapping[str, Mapping[str, Any]]] = MappingProxyType(
    {
        "paper-1d-ideal": {**_CHAIN, "rho_h": 0.0},
        "paper-1d-holes": {**_CHAIN, "rho_h": 0.05},
        "paper-1d-holes-11": {**_CHAIN, "rho_h": 0.11},
        "paper-3d-ideal": {**_CUBE, "rho_h": 0.0},
        "paper-3d-holes": {**_CUBE, "rho_h": 0.11},
        "shuffle-only": {
            **_CUBE,
            "rho_h": 0.11,
            "enable_hz_field": False,
            "enable_spin_flip": False,
        },
        "hz-only": {
            **_CUBE,
            "rho_h": 0.11,
            "enable_spin_flip": False,
        },
        "spin-flip-only": {
            **_CUBE,
            "rho_h": 0.11,
            "enable_hz_field": False,
        },
        "oracle-chain-10": {"scenario": "oracle", "dims": (10,)},
        "params-clock": {
            "scenario": "params",
            "t_tunnel": _T_CLOCK,
            "u_ud": _U_UD_CLOCK,
            "u_uu": _U_UD_CLOCK / 0.96,
            "u_dd": _U_UD_CLOCK / -0.14,
            "j_hz": 38.0,
        },
        "params-symmetric": {
            "scenario": "params",
            "t_tunnel": 1.0,
            "u_uu": 4.0,
            "u_dd": 4.0,
            "u_ud": 4.0,
        },
        "imaging-clock": {
            "scenario": "imaging-demo",
            "frame_size": 96,
            "atoms": 1.0e4,
            "photons": 5000.0,
            "cloud_radius": 17.0,
            "roi_radius": 14.0,
            "roi_gap": 2.0,
            "blur_fwhm": 5.0,
            "pca_components": 300,
            "pca_pool": 400,
        },
    }
)


def preset(name: str) -> Mapping[str, Any]:
    """Return the overrides of a named preset."""
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(f"Unknown preset {name!r}, expected one of {sorted(PRESETS)}") from None


def presets() -> Dict[str, RunConfig]:
    """Every named scenario as a complete run config."""
    return {name: build_config(overrides) for name, overrides in PRESETS.items()}
