from __future__ import annotations

from math import pi
from typing import Final

SPIN_HALF: Final = 0.5
SPIN_NORM2: Final = 0.75
TWO_PI: Final = 2 * pi

DEFAULT_DT: Final = 0.0176
DEFAULT_STEPS: Final = 200
DEFAULT_TRAJECTORIES: Final = 3000
DEFAULT_BATCH_SIZE: Final = 32
DEFAULT_ALPHA: Final = 1.0
DEFAULT_T_OVER_J: Final = 4.2

OPERATING_DELTA: Final = -0.18
OPERATING_HZ: Final = -1.1

ORACLE_MAX_SITES: Final = 14
ORACLE_DENSE_MAX_SITES: Final = 8

DEFAULT_PHOTONS: Final = 5000.0
DEFAULT_CLOUD_RADIUS: Final = 17.0
DEFAULT_PCA_COMPONENTS: Final = 300
DEFAULT_ROI_RADIUS: Final = 14.0
DEFAULT_ROI_GAP: Final = 2.0
DEFAULT_BLUR_FWHM: Final = 5.0
DEFAULT_DETUNING: Final = 35.0
DEFAULT_SIGMA0: Final = 0.8
DEFAULT_FRAME_SIZE: Final = 96
DEFAULT_SHOTS: Final = 500
DEFAULT_ATOMS: Final = 1.0e4
DEFAULT_J_HZ: Final = 38.0

FRAME_MAGIC: Final = b"SQZF"
FRAME_SUFFIX: Final = ".sqzf"
ENV_PREFIX: Final = "SQUEEZE_"
