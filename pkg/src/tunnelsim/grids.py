"""Uniform spatial grid with its dual momentum lattice."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigurationError


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Periodic uniform grid on [z_min, z_max) with 2^m points.

    The spectral solvers assume periodicity; the right endpoint is
    excluded.  ``k`` is the angular-wavenumber lattice in FFT order.
    """

    z_min: float = -120.0
    z_max: float = 200.0
    n_points: int = 2**14

    def __post_init__(self):
        if self.z_max <= self.z_min:
            raise ConfigurationError("grid needs z_max > z_min")
        if not _is_power_of_two(self.n_points):
            raise ConfigurationError(
                f"n_points must be a power of two, got {self.n_points}")

    @property
    def length(self) -> float:
        return self.z_max - self.z_min

    @property
    def dz(self) -> float:
        return self.length / self.n_points

    @cached_property
    def z(self) -> np.ndarray:
        return self.z_min + self.dz * np.arange(self.n_points)

    @cached_property
    def k(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dz)

    def subgrid(self, z_lo: float, z_hi: float) -> tuple["Grid", slice]:
        """Smallest power-of-two aligned slice covering [z_lo, z_hi].

        The returned grid shares dz and point locations with self, so a
        field computed on it embeds into the parent exactly.
        """
        if z_lo < self.z_min or z_hi > self.z_max:
            raise ConfigurationError("requested window exceeds the grid")
        need = int(np.ceil((z_hi - z_lo) / self.dz)) + 1
        n = 1
        while n < need:
            n *= 2
        if n > self.n_points:
            raise ConfigurationError("window does not fit in the grid")
        i0 = int(np.floor((z_lo - self.z_min) / self.dz))
        i0 = max(0, min(i0 - (n - need) // 2, self.n_points - n))
        sub = Grid(self.z_min + i0 * self.dz,
                   self.z_min + (i0 + n) * self.dz, n)
        return sub, slice(i0, i0 + n)
