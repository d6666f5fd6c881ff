"""Squeeze-Tools Utils."""

from __future__ import annotations

from typing import TYPE_CHECKING, Final, Mapping, Sequence, Union

import numpy as np

from .errors import DomainError

if TYPE_CHECKING:
    from .types import TDims, TFloatArray

AXES: Final[Mapping[str, int]] = {"x": 0, "y": 1, "z": 2}


def axis_vector(axis: Union[str, Sequence[float]]) -> TFloatArray:
    """Return a unit vector for the given lab axis name or direction."""
    if isinstance(axis, str):
        try:
            vec = np.zeros(3)
            vec[AXES[axis.lower()]] = 1.0
        except KeyError as exc:
            raise DomainError(f"Unknown axis: {axis!r}") from exc
        return vec

    vec = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(vec)
    if vec.shape != (3,) or norm == 0:
        raise DomainError(f"Invalid rotation axis: {axis!r}")

    return vec / norm


def rotation_matrix(axis: Union[str, Sequence[float]], angle: float) -> TFloatArray:
    """Build the right-handed rotation matrix about `axis` by `angle` (Rodrigues)."""
    n = axis_vector(axis)
    k = np.array([[0.0, -n[2], n[1]], [n[2], 0.0, -n[0]], [-n[1], n[0], 0.0]])
    return np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)


def trajectory_rng(seed: int, index: int) -> np.random.Generator:
    """Return the counter-based random stream of one trajectory.

    Streams depend only on ``(seed, index)``, so any schedule of trajectories
    over workers draws the same numbers.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def as_dims(dims: Union[int, Sequence[int]]) -> TDims:
    """Normalize lattice dimensions into an (Lx, Ly, Lz) triple."""
    values = [int(dims)] if isinstance(dims, (int, np.integer)) else [int(d) for d in dims]
    if not 1 <= len(values) <= 3:
        raise DomainError(f"Lattice dims must have 1 to 3 entries: {dims!r}")

    values += [1] * (3 - len(values))
    if min(values) < 1:
        raise DomainError(f"Lattice dims must be positive: {dims!r}")

    return values[0], values[1], values[2]


def to_db(xi2: Union[float, TFloatArray]) -> Union[float, TFloatArray]:
    """Convert a squeezing parameter into decibels (positive means squeezed)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return -10.0 * np.log10(xi2)


def stream_rng(seed: int, stream: int) -> np.random.Generator:
    """Return an auxiliary random stream, disjoint from every trajectory stream."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(seed, spawn_key=(stream, 0)))
    )
