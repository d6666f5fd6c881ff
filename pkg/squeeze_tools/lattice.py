"""Chain and cubic lattice geometries.

Sites are indexed row-major with x fastest: ``site = x + Lx * (y + Ly * z)``.
Boundaries are open unless ``periodic=True`` is requested for convergence
studies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, List, Sequence, Tuple, Union

import numpy as np
from scipy import sparse

from .errors import DomainError
from .utils import as_dims

if TYPE_CHECKING:
    from .types import TBoolArray, TDims, TIntArray


@dataclass(frozen=True, eq=False)
class LatticeGeometry:
    """Immutable lattice with precomputed neighbour and double-hop tables.

    ``nn_table`` is padded with ``-1`` up to ``2 * dimension`` columns and
    ``nn_count`` holds the number of valid entries per row. Double-hop pairs
    of site ``i`` are ``double_hop_pairs[double_hop_offsets[i]:double_hop_offsets[i + 1]]``.
    """

    dims: TDims
    periodic: bool
    nn_table: TIntArray = field(repr=False)
    nn_count: TIntArray = field(repr=False)
    double_hop_offsets: TIntArray = field(repr=False)
    double_hop_pairs: TIntArray = field(repr=False)

    @property
    def n_sites(self) -> int:
        return self.nn_table.shape[0]

    @property
    def dimension(self) -> int:
        return max(1, sum(1 for size in self.dims if size > 1))

    @property
    def coordination(self) -> int:
        """Half the interior neighbour count (``z = d`` on cubic lattices)."""
        return self.dimension

    @property
    def n_bonds(self) -> int:
        return int(self.nn_count.sum()) // 2

    @cached_property
    def coords(self) -> TIntArray:
        """Site coordinates as an ``(n_sites, 3)`` array."""
        lx, ly, _ = self.dims
        idx = np.arange(self.n_sites)
        return np.stack([idx % lx, (idx // lx) % ly, idx // (lx * ly)], axis=1)

    @cached_property
    def adjacency(self) -> sparse.csr_matrix:
        """Symmetric sparse nearest-neighbour matrix."""
        rows = np.repeat(np.arange(self.n_sites), self.nn_count)
        cols = self.nn_table[self.nn_table >= 0]
        data = np.ones(cols.size)
        return sparse.csr_matrix((data, (rows, cols)), shape=(self.n_sites, self.n_sites))

    def __repr__(self) -> str:
        return f"<LatticeGeometry {'x'.join(map(str, self.dims))} periodic={self.periodic}>"


def build_lattice(dims: Union[int, Sequence[int]], *, periodic: bool = False) -> LatticeGeometry:
    """Build a lattice with neighbour and double-hop tables.

    :param dims: ``L`` for a chain or ``(Lx, Ly, Lz)``
    :param periodic: Close the boundaries (convergence studies only)
    """
    shape = as_dims(dims)
    lx, ly, lz = shape
    n_sites = lx * ly * lz
    if n_sites < 2:
        raise DomainError(f"A lattice needs at least two sites: {shape}")

    idx = np.arange(n_sites)
    coords = np.stack([idx % lx, (idx // lx) % ly, idx // (lx * ly)], axis=1)
    strides = np.array([1, lx, lx * ly])
    dimension = max(1, sum(1 for size in shape if size > 1))

    table = np.full((n_sites, 2 * dimension), -1, dtype=np.int64)
    count = np.zeros(n_sites, dtype=np.int64)
    for axis, size in enumerate(shape):
        if size == 1:
            continue

        for step in (-1, 1):
            target = coords[:, axis] + step
            if periodic:
                target %= size
                valid = target != coords[:, axis]
            else:
                valid = (target >= 0) & (target < size)

            nbr = idx + (target - coords[:, axis]) * strides[axis]
            # size-2 periodic axes reach the same site both ways
            valid &= ~(table == nbr[:, None]).any(axis=1)
            sites = idx[valid]
            table[sites, count[sites]] = nbr[valid]
            count[sites] += 1

    offsets, pairs = _double_hops(table, count)
    return LatticeGeometry(
        dims=shape,
        periodic=periodic,
        nn_table=table,
        nn_count=count,
        double_hop_offsets=offsets,
        double_hop_pairs=pairs,
    )


def _double_hops(table: TIntArray, count: TIntArray) -> Tuple[TIntArray, TIntArray]:
    n_sites, width = table.shape
    origin = np.repeat(np.arange(n_sites), width * width)
    j = np.repeat(table, width, axis=1).ravel()
    slot = np.tile(np.arange(width), n_sites * width)
    k = np.where(j >= 0, table[np.maximum(j, 0), slot], -1)
    valid = (j >= 0) & (k >= 0) & (k != origin)

    pairs = np.stack([j[valid], k[valid]], axis=1)
    offsets = np.zeros(n_sites + 1, dtype=np.int64)
    np.cumsum(np.bincount(origin[valid], minlength=n_sites), out=offsets[1:])
    return offsets, pairs


def _check_site(geom: LatticeGeometry, site: int) -> int:
    if not 0 <= site < geom.n_sites:
        raise DomainError(f"Site {site} is outside of the lattice ({geom.n_sites} sites)")
    return int(site)


def neighbors(geom: LatticeGeometry, site: int) -> List[int]:
    """Return the nearest neighbours of a site."""
    site = _check_site(geom, site)
    return geom.nn_table[site, : geom.nn_count[site]].tolist()


def double_hop_paths(geom: LatticeGeometry, site: int) -> List[Tuple[int, int]]:
    """Return ``(j, k)`` with ``j`` a neighbour of `site` and ``k != site`` a neighbour of ``j``."""
    site = _check_site(geom, site)
    start, end = geom.double_hop_offsets[site], geom.double_hop_offsets[site + 1]
    return [(int(j), int(k)) for j, k in geom.double_hop_pairs[start:end]]


def halves(geom: LatticeGeometry) -> Tuple[TBoolArray, TBoolArray]:
    """Split the lattice into left/right subsystems along x."""
    left = geom.coords[:, 0] * 2 < geom.dims[0]
    return left, ~left


def coordination(geom: LatticeGeometry) -> int:
    """Return ``z = d``, used by the default double-hop rate ``2z - 1``."""
    return geom.coordination


def adjacency(geom: LatticeGeometry) -> sparse.csr_matrix:
    """Return the sparse nearest-neighbour matrix of the lattice."""
    return geom.adjacency
