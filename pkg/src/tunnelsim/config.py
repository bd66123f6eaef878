"""Physical parameters and nondimensionalization.

All solvers operate in axial harmonic-oscillator units: length
l_z = sqrt(hbar/(m omega_z)), time 1/omega_z, energy hbar*omega_z,
so hbar = m = omega_z = 1 internally.  This module owns the SI ->
dimensionless conversion and the dimensional-reduction formulas that
produce the effective 1D interaction strength from the 3D scattering
length by matching chemical potentials.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .constants import BOHR_RADIUS, HBAR, RB85_MASS
from .errors import ConfigurationError, DerivationDomainError


@dataclass(frozen=True)
class PhysicsConfig:
    """Physical inputs for a run.

    Lengths are in units of l_z unless suffixed, scattering lengths are
    in Bohr radii, frequencies in rad/s.  Defaults reproduce the
    production scenario: 1e5 Rb-85 atoms in a 2*pi*(70, 10) Hz cigar
    trap, initial scattering length 5 a0, kick 20/l_z from z0 = -50.
    """

    atom_number: float = 1e5
    mass_kg: float = RB85_MASS
    omega_perp: float = 2 * math.pi * 70.0
    omega_z: float = 2 * math.pi * 10.0
    a_s_initial_a0: float = 5.0
    a_s_quench_a0: float = 0.0
    kick_k: float = 20.0
    trap_center: float = -50.0
    samples: int = 10_000
    realizations: int = 20

    def __post_init__(self):
        if self.atom_number <= 0:
            raise ConfigurationError("atom_number must be positive")
        if self.mass_kg <= 0:
            raise ConfigurationError("mass_kg must be positive")
        if self.omega_perp <= 0 or self.omega_z <= 0:
            raise ConfigurationError("trap frequencies must be positive")
        if self.a_s_initial_a0 <= 0:
            raise ConfigurationError(
                "a_s_initial_a0 must be positive: the Thomas-Fermi ground "
                "state requires repulsive interactions")
        if self.samples <= 0:
            raise ConfigurationError("samples must be positive")
        if self.realizations <= 0:
            raise ConfigurationError("realizations must be positive")

    def replace(self, **kwargs) -> "PhysicsConfig":
        return dataclasses.replace(self, **kwargs)


@dataclass(frozen=True)
class DerivedScales:
    """Oscillator units and dimensionless couplings derived from a
    :class:`PhysicsConfig`.

    ``l_z``/``energy_unit``/``time_unit`` carry SI values for reporting;
    every other field is dimensionless in oscillator units.  ``sigma_c``
    is the RMS width of the *computed* ground-state density and is None
    until a ground state has been measured (see ``with_sigma_c``).
    """

    l_z: float                 # m
    energy_unit: float         # J, hbar*omega_z
    time_unit: float           # s, 1/omega_z
    g3d: float                 # J m^3
    g1d_initial: float         # hbar*omega_z*l_z, at a_s_initial
    g1d_quench: float          # hbar*omega_z*l_z, at a_s_quench
    mu3d: float                # hbar*omega_z
    mu1d: float                # hbar*omega_z
    kinetic_energy: float      # hbar*omega_z, after the kick
    sigma_c: float | None = None  # l_z, measured from the ground state

    def with_sigma_c(self, sigma_c: float) -> "DerivedScales":
        return dataclasses.replace(self, sigma_c=float(sigma_c))


def derive_g3d(a_s_a0: float, mass_kg: float = RB85_MASS) -> float:
    """3D interaction strength 4 pi hbar^2 a_s / m in J m^3.

    Linear in the scattering length; sign is preserved, a_s = 0 gives 0.
    """
    return 4.0 * math.pi * HBAR**2 * (a_s_a0 * BOHR_RADIUS) / mass_kg


def derive_mu3d(cfg: PhysicsConfig, g3d: float) -> float:
    """Thomas-Fermi chemical potential of the 3D cloud, in hbar*omega_z.

    Closed form from normalizing the TF density over its ellipsoid:

        mu3d = [15 N g3d wperp^2 wz (m/2)^(3/2) / (8 pi)]^(2/5)

    Scales as (N a_s)^(2/5).  Requires repulsion.
    """
    if g3d <= 0:
        raise DerivationDomainError(
            "mu3d is defined only for repulsive interactions (g3d > 0)")
    m, wp, wz = cfg.mass_kg, cfg.omega_perp, cfg.omega_z
    mu_si = (15.0 * cfg.atom_number * g3d * wp**2 * wz
             * (m / 2.0) ** 1.5 / (8.0 * math.pi)) ** 0.4
    return mu_si / (HBAR * wz)


def mu1d_from_g1d(g1d: float, atom_number: float) -> float:
    """1D Thomas-Fermi chemical potential for dimensionless coupling g1d.

    mu1d = (1/2) [(3/2) g1d N]^(2/3) in oscillator units (m = omega_z = 1).
    """
    if g1d <= 0:
        raise DerivationDomainError("mu1d requires g1d > 0")
    return 0.5 * (1.5 * g1d * atom_number) ** (2.0 / 3.0)


def derive_g1d(cfg: PhysicsConfig, a_s_a0: float) -> float:
    """Effective 1D interaction strength, dimensionless (hbar*omega_z*l_z).

    For a_s > 0 this is the closed form obtained by setting mu1d = mu3d:

        g1d = 2^(5/2)/(3N) * [15 N g3d wperp^2 wz (m/2)^(3/2)/(8 pi)]^(3/5)
              / sqrt(m wz^2)

    The formula contains g3d^(3/5) and is undefined for attractive
    interactions, yet the quench protocol reaches a_s < 0.  Sign policy:
    g1d(-a) = -g1d(|a|), preserving odd symmetry of the mean-field term.
    a_s = 0 maps to exactly 0.
    """
    if a_s_a0 == 0.0:
        return 0.0
    sign = 1.0 if a_s_a0 > 0 else -1.0
    g3d = derive_g3d(abs(a_s_a0), cfg.mass_kg)
    m, wp, wz = cfg.mass_kg, cfg.omega_perp, cfg.omega_z
    bracket = (15.0 * cfg.atom_number * g3d * wp**2 * wz
               * (m / 2.0) ** 1.5 / (8.0 * math.pi)) ** 0.6
    g1d_si = (2.0 ** 2.5 / (3.0 * cfg.atom_number)) * bracket / math.sqrt(m * wz**2)
    l_z = math.sqrt(HBAR / (m * wz))
    return sign * g1d_si / (HBAR * wz * l_z)


def nondimensionalize(cfg: PhysicsConfig) -> DerivedScales:
    """Compute oscillator units and all closed-form derived quantities.

    Pure function of the config: identical inputs give bit-identical
    output.  ``sigma_c`` is left unset; the ground-state solver fills it.
    """
    m, wz = cfg.mass_kg, cfg.omega_z
    l_z = math.sqrt(HBAR / (m * wz))
    g3d = derive_g3d(cfg.a_s_initial_a0, m)
    mu3d = derive_mu3d(cfg, g3d)
    g1d_initial = derive_g1d(cfg, cfg.a_s_initial_a0)
    g1d_quench = derive_g1d(cfg, cfg.a_s_quench_a0)
    mu1d = mu1d_from_g1d(g1d_initial, cfg.atom_number)
    return DerivedScales(
        l_z=l_z,
        energy_unit=HBAR * wz,
        time_unit=1.0 / wz,
        g3d=g3d,
        g1d_initial=g1d_initial,
        g1d_quench=g1d_quench,
        mu3d=mu3d,
        mu1d=mu1d,
        kinetic_energy=0.5 * cfg.kick_k**2,
        sigma_c=None,
    )


def thomas_fermi_radius(mu: float) -> float:
    """Half-length of the 1D TF profile, sqrt(2 mu), in l_z."""
    return math.sqrt(2.0 * mu)


def thomas_fermi_rms_width(mu: float) -> float:
    """RMS width of the 1D TF density, Z/sqrt(5), in l_z."""
    return thomas_fermi_radius(mu) / math.sqrt(5.0)
