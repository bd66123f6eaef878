"""Physical constants (CODATA 2022) used for unit conversion.

Everything downstream of :mod:`tunnelsim.config` works in harmonic
oscillator units (hbar = m = omega_z = 1); these SI values appear only
when converting user inputs and reporting lengths/energies.
"""

HBAR = 1.0545718176461565e-34  # J s, h/(2 pi) with h exact
BOHR_RADIUS = 5.29177210544e-11  # m
ATOMIC_MASS = 1.66053906892e-27  # kg

RB85_MASS_AMU = 84.911789738
RB85_MASS = RB85_MASS_AMU * ATOMIC_MASS  # kg
