"""Quantum vs classical matterwave transmission toolkit.

Simulates a kicked, interacting 1D condensate hitting a Gaussian
barrier with two engines: the Gross-Pitaevskii equation (coherent
matterwave dynamics) and a Monte-Carlo Boltzmann-Vlasov model (classical
particles in the same mean field).  The difference of their transmission
coefficients isolates quantum tunneling.
"""

__version__ = "0.1.0"

from .config import (DerivedScales, PhysicsConfig, derive_g1d, derive_g3d,
                     derive_mu3d, mu1d_from_g1d, nondimensionalize)
from .grids import Grid
from .gpe import (BarrierSpec, Wavefunction, apply_kick, effective_potential,
                  evolve, gaussian_barrier, ground_state, harmonic_potential,
                  place_barrier)

__all__ = [
    "__version__",
    "PhysicsConfig", "DerivedScales", "nondimensionalize",
    "derive_g3d", "derive_mu3d", "derive_g1d", "mu1d_from_g1d",
    "Grid", "Wavefunction", "BarrierSpec",
    "harmonic_potential", "gaussian_barrier", "place_barrier",
    "ground_state", "apply_kick", "evolve", "effective_potential",
]
