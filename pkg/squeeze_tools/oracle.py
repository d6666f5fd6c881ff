"""Exact evolution of the hole-free XXZ model for small systems.

Basis states are integers with site ``0`` as the most significant bit; a
set bit is a down spin, so ``Sz_i = 1/2 - bit_i`` and the layout matches
``kron`` ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg, sparse
from scipy.sparse.linalg import expm_multiply

from .analysis import squeezing_curve
from .constants import ORACLE_DENSE_MAX_SITES, ORACLE_MAX_SITES, SPIN_HALF
from .dtwa import DIFF, FULL, HALF_A, HALF_B, EnsembleMoments
from .errors import DomainError, NumericError
from .lattice import halves
from .logs import logger

if TYPE_CHECKING:
    from .analysis import SqueezingCurve
    from .couplings import SpinCouplings
    from .lattice import LatticeGeometry
    from .types import TComplexArray, TFloatArray

NORM_TOLERANCE = 1e-10
EVOLUTION_TOLERANCE = 1e-8


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Normalized state vector of ``n_sites`` spins one-half."""

    amplitudes: TComplexArray
    n_sites: int

    def __post_init__(self):
        if self.amplitudes.shape != (1 << self.n_sites,):
            raise DomainError(
                f"Expected {1 << self.n_sites} amplitudes for {self.n_sites} sites, "
                f"got {self.amplitudes.shape}"
            )

        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise NumericError(f"State is not normalized: |psi| = {norm!r}")

    @classmethod
    def x_polarized(cls, n_sites: int) -> QuantumState:
        """Product state with every spin along +x."""
        _check_size(n_sites)
        dim = 1 << n_sites
        return cls(np.full(dim, 2.0 ** (-n_sites / 2), dtype=complex), n_sites)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def _check_size(n_sites: int) -> int:
    if not 1 <= n_sites <= ORACLE_MAX_SITES:
        raise DomainError(f"Exact evolution supports 1..{ORACLE_MAX_SITES} sites, got {n_sites}")
    return n_sites


def _bits(n_sites: int) -> np.ndarray:
    """Return the ``(2**N, N)`` table of down-spin bits."""
    states = np.arange(1 << n_sites)
    shifts = n_sites - 1 - np.arange(n_sites)
    return (states[:, None] >> shifts[None, :]) & 1


@lru_cache(maxsize=32)
def _hamiltonian(n_sites: int, bonds: Tuple[Tuple[int, int], ...], J: float, Jz: float):
    dim = 1 << n_sites
    bits = _bits(n_sites)
    sz = SPIN_HALF - bits
    diagonal = np.zeros(dim)
    rows, cols = [np.arange(dim)], [np.arange(dim)]
    data = [diagonal]
    states = np.arange(dim)
    for i, j in bonds:
        diagonal += Jz * sz[:, i] * sz[:, j]
        flip = bits[:, i] != bits[:, j]
        mask = (1 << (n_sites - 1 - i)) | (1 << (n_sites - 1 - j))
        src = states[flip]
        rows.append(src ^ mask)
        cols.append(src)
        data.append(np.full(src.size, 0.5 * J))

    return sparse.csr_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
    )


def _bonds(geom: LatticeGeometry) -> Tuple[Tuple[int, int], ...]:
    return tuple(
        (i, int(j))
        for i in range(geom.n_sites)
        for j in geom.nn_table[i, : geom.nn_count[i]]
        if i < j
    )


def hamiltonian(geom: LatticeGeometry, couplings: SpinCouplings) -> sparse.csr_matrix:
    """Sparse XXZ Hamiltonian ``sum J (SxSx + SySy) + Jz SzSz`` over the bonds."""
    n_sites = _check_size(geom.n_sites)
    return _hamiltonian(n_sites, _bonds(geom), couplings.J, couplings.Jz)


@lru_cache(maxsize=64)
def _collective(n_sites: int, weights: Tuple[float, ...], axis: str) -> sparse.csr_matrix:
    dim = 1 << n_sites
    bits = _bits(n_sites)
    w = np.asarray(weights)
    if axis == "z":
        return sparse.diags((SPIN_HALF - bits) @ w).tocsr()

    states = np.arange(dim)
    rows, cols, data = [], [], []
    for i in np.flatnonzero(w):
        rows.append(states ^ (1 << (n_sites - 1 - i)))
        cols.append(states)
        if axis == "x":
            data.append(np.full(dim, 0.5 * w[i], dtype=complex))
        else:
            # <down|Sy|up> = i/2, <up|Sy|down> = -i/2
            data.append(np.where(bits[:, i] == 0, 0.5j, -0.5j) * w[i])

    return sparse.csr_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
    )


def collective_operator(
    n_sites: int, axis: str, weights: Optional[Sequence[float]] = None
) -> sparse.csr_matrix:
    """Weighted collective spin ``sum_i w_i S_i^axis`` (all weights one by default)."""
    _check_size(n_sites)
    if axis not in ("x", "y", "z"):
        raise DomainError(f"Unknown axis: {axis!r}")

    w = tuple(float(v) for v in (weights if weights is not None else np.ones(n_sites)))
    if len(w) != n_sites:
        raise DomainError(f"Expected {n_sites} weights, got {len(w)}")

    return _collective(n_sites, w, axis)


def evolve_exact(
    state: QuantumState,
    geom: LatticeGeometry,
    couplings: SpinCouplings,
    t: float,
    *,
    method: str = "krylov",
) -> QuantumState:
    """Return ``exp(-iHt)|psi>``.

    :param method: ``krylov`` applies the exponential to the vector, ``dense``
        builds the full propagator (up to 8 sites)
    """
    if geom.n_sites != state.n_sites:
        raise DomainError(f"State has {state.n_sites} sites, lattice has {geom.n_sites}")

    ham = hamiltonian(geom, couplings)
    if t == 0:
        return state

    if method == "dense":
        if state.n_sites > ORACLE_DENSE_MAX_SITES:
            raise DomainError(f"Dense evolution supports up to {ORACLE_DENSE_MAX_SITES} sites")
        amplitudes = linalg.expm(-1j * t * ham.toarray()) @ state.amplitudes
    elif method == "krylov":
        amplitudes = expm_multiply(-1j * t * ham, state.amplitudes)
    else:
        raise DomainError(f"Unknown evolution method: {method!r}")

    norm = np.linalg.norm(amplitudes)
    if abs(norm - 1.0) > EVOLUTION_TOLERANCE:
        raise NumericError(f"Evolution lost normalization: |psi| = {norm!r}")

    return QuantumState(amplitudes / norm, state.n_sites)


def collective_moments(state: QuantumState, theta: float) -> Tuple[float, float, float]:
    """Return ``(<Sx>, <S^theta>, <(S^theta)^2>)`` with ``S^theta = cos Sz + sin Sy``."""
    psi = state.amplitudes
    sx = collective_operator(state.n_sites, "x")
    s_theta = np.cos(theta) * collective_operator(state.n_sites, "z") + np.sin(
        theta
    ) * collective_operator(state.n_sites, "y")
    v = s_theta @ psi
    return (
        float(np.vdot(psi, sx @ psi).real),
        float(np.vdot(psi, v).real),
        float(np.vdot(v, v).real),
    )


def _group_moments(
    psi: TComplexArray, n_sites: int, weights: Sequence[float]
) -> Tuple[TFloatArray, TFloatArray]:
    vx, vy, vz = (collective_operator(n_sites, axis, weights) @ psi for axis in "xyz")
    mean = np.array([np.vdot(psi, v).real for v in (vx, vy, vz)])
    second = np.array(
        [
            [np.vdot(vy, vy).real, np.vdot(vy, vz).real],
            [np.vdot(vy, vz).real, np.vdot(vz, vz).real],
        ]
    )
    return mean, second - np.outer(mean[1:], mean[1:])


def oracle_moments(
    geom: LatticeGeometry,
    couplings: SpinCouplings,
    times: Sequence[float],
    *,
    method: str = "krylov",
) -> EnsembleMoments:
    """Exact moments of the collective spin and both halves on a time grid."""
    grid = np.asarray(times, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or (np.diff(grid) < 0).any() or grid[0] < 0:
        raise DomainError("Times must be a non-empty, non-decreasing, non-negative grid")

    n_sites = _check_size(geom.n_sites)
    left, right = halves(geom)
    weights = {
        FULL: np.ones(n_sites),
        HALF_A: left.astype(float),
        HALF_B: right.astype(float),
        DIFF: left.astype(float) - right.astype(float),
    }
    logger.info("Exact evolution of %d sites over %d times", n_sites, grid.size)

    mean = np.zeros((4, grid.size, 3))
    cov = np.zeros((4, grid.size, 2, 2))
    state, now = QuantumState.x_polarized(n_sites), 0.0
    for k, t in enumerate(grid):
        state = evolve_exact(state, geom, couplings, t - now, method=method)
        now = t
        for group, w in weights.items():
            mean[group, k], cov[group, k] = _group_moments(state.amplitudes, n_sites, w)

    return EnsembleMoments(
        times=grid,
        n_atoms=n_sites,
        trajectories=0,
        mean=mean,
        mean_err=np.zeros_like(mean),
        cov=cov,
        cov_err=np.zeros_like(cov),
        atoms=np.tile([left.sum(), right.sum()], (grid.size, 1)).astype(float),
    )


def oracle_curves(
    geom: LatticeGeometry,
    couplings: SpinCouplings,
    times: Sequence[float],
    theta_grid: Optional[Sequence[float]] = None,
    *,
    difference: bool = False,
) -> SqueezingCurve:
    """Exact squeezing curve, in the same layout as the sampled ones."""
    return squeezing_curve(
        oracle_moments(geom, couplings, times), theta_grid, difference=difference
    )
