"""Testing tools."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Dict, List, Mapping, Optional, Sequence, Union

import numpy as np

from ._compat import json_loads
from .analysis import ShotTable
from .dtwa import TrajectoryTotals

if TYPE_CHECKING:
    from .app import App
    from .types import TFloatArray


@dataclass
class RunOutcome:
    """Exit code and files of one command line run."""

    exit_code: int
    out: Path
    files: List[Path] = field(default_factory=list)

    def __getitem__(self, name: str) -> Path:
        for path in self.files:
            if path.name == name:
                return path
        raise KeyError(name)

    def table(self, name: str) -> Dict[str, TFloatArray]:
        return read_table(self[name])

    def json(self, name: str):
        return json_loads(self[name].read_bytes())


class CLIRunner:
    """Run an application in a scratch directory.

    .. code-block:: python

        runner = CLIRunner(app, tmp_path)
        outcome = runner("params", "--preset", "params-symmetric")
        assert outcome.exit_code == 0
        assert outcome.json("params.json")["delta"] == 1.0

    """

    def __init__(self, app: App, directory: Union[str, Path], environ: Optional[Mapping] = None):
        self.app = app
        self.directory = Path(directory)
        self.environ = dict(environ or {})
        self.runs = 0

    def __call__(self, *argv: str, out: Optional[Path] = None) -> RunOutcome:
        if out is None:
            self.runs += 1
            out = self.directory / f"run-{self.runs}"

        code = self.app([*argv, "--out", str(out)], environ=self.environ)
        files = sorted(out.iterdir()) if out.is_dir() else []
        return RunOutcome(code, out, files)


def read_table(path: Union[str, Path]) -> Dict[str, TFloatArray]:
    """Read a CSV result into float columns."""
    with Path(path).open(encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    return {name: np.array([float(row[i]) for row in body]) for i, name in enumerate(header)}


def product_shots(
    rng: np.random.Generator,
    shots: int,
    n_half: int = 500,
    *,
    variance: float = 1.0,
    detection_noise: float = 0.0,
) -> ShotTable:
    """Shots of two independent halves with normalized spin variance `variance`.

    Each half of ``n_half`` atoms has ``Var[S] = variance * n_half / 4`` plus
    Gaussian detection noise of rms `detection_noise`.
    """
    sigma = np.sqrt(variance * n_half / 4 + detection_noise**2)
    s_a, s_b = rng.normal(0.0, sigma, size=(2, shots))
    return ShotTable(
        t=np.zeros(shots),
        theta=np.zeros(shots),
        s_a=np.clip(s_a, -n_half / 2, n_half / 2),
        s_b=np.clip(s_b, -n_half / 2, n_half / 2),
        n_a=np.full(shots, n_half, dtype=np.int64),
        n_b=np.full(shots, n_half, dtype=np.int64),
    )


def coherent_totals(
    rng: np.random.Generator,
    trajectories: int,
    times: Sequence[float],
    n_half: int = 50,
) -> TrajectoryTotals:
    """Totals of an x-polarized product state sampled at every time.

    Every spin contributes ``Sx = 1/2`` and independent ``Sy, Sz = +-1/2``.
    """
    steps = len(times)
    totals = np.zeros((trajectories, steps, 3, 3))
    for half in (1, 2):
        signs = rng.integers(0, 2, size=(trajectories, steps, 2, n_half)) - 0.5
        totals[:, :, half, 0] = n_half / 2
        totals[:, :, half, 1:] = signs.sum(axis=-1)

    totals[:, :, 0] = totals[:, :, 1] + totals[:, :, 2]
    counts = np.full((trajectories, steps, 2), n_half, dtype=np.int64)
    return TrajectoryTotals(np.asarray(times, dtype=float), totals, counts)
