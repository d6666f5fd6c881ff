"""Per-hole stochastic kernels.

The kernels work on one trajectory: ``spins`` is an ``(n_sites, 3)`` view,
``hole_mask`` an ``(n_sites,)`` view and ``holes`` the hole positions, all
updated in place. Random numbers are drawn by the caller, so the kernels
stay deterministic and the streams stay independent of numba.
"""

from __future__ import annotations

from math import cos, sin

from ._compat import njit


@njit(cache=True, nogil=True)
def hop_holes(spins, hole_mask, holes, nn_table, nn_count, prob, draws):  # noqa: PLR0913
    """Exchange every hole with a random neighbour with probability `prob`.

    ``draws`` is an ``(n_holes, 2)`` array of uniforms: event, neighbour.
    """
    for i in range(holes.shape[0]):
        if draws[i, 0] >= prob:
            continue

        h = holes[i]
        count = nn_count[h]
        if count == 0:
            continue

        j = nn_table[h, min(int(draws[i, 1] * count), count - 1)]
        if hole_mask[j]:
            continue

        for a in range(3):
            spins[h, a] = spins[j, a]
            spins[j, a] = 0.0
        hole_mask[h] = False
        hole_mask[j] = True
        holes[i] = j


@njit(cache=True, nogil=True)
def double_hop_holes(  # noqa: PLR0913, C901
    spins,
    hole_mask,
    holes,
    nn_table,
    nn_count,
    prob,
    max_angle,
    rotate_origin,
    draws,
):
    """Move holes two sites and rotate the hopped-over spin about a random xy axis.

    ``draws`` is an ``(n_holes, 5)`` array of uniforms: event, first
    neighbour, second neighbour, axis azimuth, rotation angle. The hole goes
    ``h -> j -> k``: the spin of ``j`` lands on ``h`` and the spin of ``k``
    lands on ``j``. The rotation targets the vector originally at ``j``
    (``rotate_origin``) or the vector occupying ``j`` afterwards.
    """
    for i in range(holes.shape[0]):
        if draws[i, 0] >= prob:
            continue

        h = holes[i]
        count = nn_count[h]
        if count == 0:
            continue

        j = nn_table[h, min(int(draws[i, 1] * count), count - 1)]
        onward = nn_count[j] - 1
        if onward <= 0:
            continue

        choice = min(int(draws[i, 2] * onward), onward - 1)
        k = -1
        seen = 0
        for s in range(nn_count[j]):
            candidate = nn_table[j, s]
            if candidate == h:
                continue
            if seen == choice:
                k = candidate
                break
            seen += 1

        if k < 0 or hole_mask[j] or hole_mask[k]:
            continue

        for a in range(3):
            spins[h, a] = spins[j, a]
            spins[j, a] = spins[k, a]
            spins[k, a] = 0.0
        hole_mask[h] = False
        hole_mask[k] = True
        holes[i] = k

        if max_angle <= 0.0:
            continue

        target = h if rotate_origin else j
        phi = 6.283185307179586 * draws[i, 3]
        angle = max_angle * draws[i, 4]
        nx, ny = cos(phi), sin(phi)
        c, s_ = cos(angle), sin(angle)
        vx, vy, vz = spins[target, 0], spins[target, 1], spins[target, 2]
        dot = nx * vx + ny * vy
        # Rodrigues with n = (nx, ny, 0)
        spins[target, 0] = vx * c + ny * vz * s_ + nx * dot * (1.0 - c)
        spins[target, 1] = vy * c - nx * vz * s_ + ny * dot * (1.0 - c)
        spins[target, 2] = vz * c + (nx * vy - ny * vx) * s_
