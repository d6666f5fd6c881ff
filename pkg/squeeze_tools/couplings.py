"""Spin-model couplings derived from Bose-Hubbard parameters.

Two-component bosons in the Mott regime map onto an XXZ magnet through
superexchange:

.. code-block:: text

    J  = -4 t^2 / U_ud
    Jz =  4 t^2 (1/U_ud - 1/U_uu - 1/U_dd)
    hz =  4 t^2 (1/U_uu - 1/U_dd)

Everything downstream works in simulation units where the exchange
coupling is normalized to one.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from math import pi
from typing import NamedTuple

from .constants import DEFAULT_T_OVER_J
from .errors import DomainError


@dataclass(frozen=True)
class HubbardParams:
    """Bose-Hubbard parameters of a two-component Mott insulator.

    :param t_tunnel: Tunneling energy (any consistent unit)
    :param U_uu: On-site interaction of two up atoms
    :param U_dd: On-site interaction of two down atoms
    :param U_ud: On-site interaction of an up and a down atom

    Interactions may be negative (attractive channels), only zero is rejected.
    """

    t_tunnel: float
    U_uu: float
    U_dd: float
    U_ud: float

    def __post_init__(self):
        if not self.t_tunnel > 0:
            raise DomainError(f"Tunneling must be positive: t={self.t_tunnel}")

        for name in ("U_uu", "U_dd", "U_ud"):
            if getattr(self, name) == 0:
                raise DomainError(f"Interaction {name} must be nonzero")


@dataclass(frozen=True)
class SpinCouplings:
    """XXZ couplings with the derived ratios.

    ``delta = Jz/J``, ``J_hz_ratio = hz/J`` and ``t_over_J = t/|J|``.
    """

    J: float
    Jz: float
    hz: float
    delta: float
    t_over_J: float
    J_hz_ratio: float

    @classmethod
    def build(cls, J: float, Jz: float, hz: float, t_tunnel: float) -> SpinCouplings:
        """Populate the ratios from the absolute couplings."""
        if J == 0:
            raise DomainError("Exchange coupling J must be nonzero")

        return cls(
            J=J,
            Jz=Jz,
            hz=hz,
            delta=Jz / J,
            t_over_J=t_tunnel / abs(J),
            J_hz_ratio=hz / J,
        )

    @classmethod
    def from_ratios(
        cls,
        delta: float,
        hz_ratio: float = 0.0,
        *,
        J: float = 1.0,
        t_over_J: float = DEFAULT_T_OVER_J,
    ) -> SpinCouplings:
        """Build couplings from the anisotropy and field ratio (``J = 1`` by default)."""
        return cls.build(J, delta * J, hz_ratio * J, t_over_J * abs(J))

    @property
    def t_tunnel(self) -> float:
        return self.t_over_J * abs(self.J)

    def recompute(self) -> SpinCouplings:
        """Recompute the ratios from J, Jz and hz."""
        return self.build(self.J, self.Jz, self.hz, self.t_tunnel)

    def scaled(self, factor: float) -> SpinCouplings:
        """Multiply every energy by `factor`, ratios are unchanged."""
        return replace(self, J=self.J * factor, Jz=self.Jz * factor, hz=self.hz * factor)


class TimeScale(NamedTuple):
    """Wall-clock duration of one simulation time unit."""

    J_hz: float
    seconds: float

    @property
    def milliseconds(self) -> float:
        return self.seconds * 1e3


def derive_couplings(p: HubbardParams) -> SpinCouplings:
    """Map Hubbard parameters onto the XXZ couplings through superexchange."""
    scale = 4.0 * p.t_tunnel**2
    J = -scale / p.U_ud
    Jz = scale * (1.0 / p.U_ud - 1.0 / p.U_uu - 1.0 / p.U_dd)
    hz = scale * (1.0 / p.U_uu - 1.0 / p.U_dd)
    return SpinCouplings.build(J, Jz, hz, p.t_tunnel)


def to_sim_units(c: SpinCouplings, J_hz: float) -> tuple[SpinCouplings, TimeScale]:
    """Rescale couplings so that ``|J| = 1`` and report the time unit.

    :param J_hz: The exchange rate ``J/h`` in Hz, e.g. 38 Hz for a 1D chain
    :return: couplings in units of ``|J|`` and the duration of one ``hbar/J``
    """
    if not J_hz > 0:
        raise DomainError(f"Exchange frequency must be positive: {J_hz}")

    return c.scaled(1.0 / abs(c.J)), TimeScale(J_hz, 1.0 / (2 * pi * J_hz))
