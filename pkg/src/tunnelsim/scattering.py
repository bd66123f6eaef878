"""Stationary-scattering transmission of plane waves.

Independent oracle for the non-interacting limit of the time-dependent
solver: |t(k)|^2 is computed by marching the stationary Schroedinger
equation through a piecewise-constant slicing of the barrier (transfer
matrices), then averaged over the kicked cloud's momentum density.
Nothing here shares code with the split-step evolution.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConfigurationError
from .gpe import BarrierSpec, Wavefunction


def plane_wave_transmission(potential, z_lo: float, z_hi: float,
                            k_values, n_slices: int = 8192) -> np.ndarray:
    """|t(k)|^2 for unit-mass particles crossing a 1D potential.

    The potential callable is sampled at slice midpoints and treated as
    constant within each slice; (psi, psi') is propagated analytically
    across slices from a transmitted-only wave on the right back to the
    left boundary, where the incident amplitude is read off.  Exact for
    potentials that are genuinely piecewise constant on the slicing;
    O(h^2) otherwise.  The potential must vanish outside [z_lo, z_hi].
    """
    k = np.atleast_1d(np.asarray(k_values, dtype=float))
    if np.any(k <= 0):
        raise ConfigurationError("plane-wave transmission needs k > 0")
    h = (z_hi - z_lo) / n_slices
    mids = z_lo + h * (np.arange(n_slices) + 0.5)
    v = np.asarray([potential(z) for z in mids]) if not callable(potential) \
        else potential(mids)

    e = 0.5 * k**2
    # transmitted-only boundary condition on the right: psi = 1, psi' = ik
    psi = np.ones_like(k, dtype=complex)
    dpsi = 1j * k
    for j in range(n_slices - 1, -1, -1):
        q2 = (2.0 * (e - v[j])).astype(complex)
        q = np.sqrt(q2)
        # backward march: evaluate the slice propagator at -h
        c = np.cos(q * h)
        s = np.empty_like(q)
        small = np.abs(q) * h < 1e-8
        s[~small] = np.sin(q[~small] * h) / q[~small]
        s[small] = h  # sin(qh)/q -> h
        psi, dpsi = c * psi - s * dpsi, q2 * s * psi + c * dpsi
    # decompose at the left edge into incident + reflected plane waves
    a_inc = 0.5 * (psi + dpsi / (1j * k))
    t2 = 1.0 / np.abs(a_inc) ** 2
    return t2 if t2.shape else float(t2)


def gaussian_barrier_transmission(spec: BarrierSpec, k_values,
                                  n_slices: int = 8192,
                                  span_sigmas: float = 7.0) -> np.ndarray:
    """|t(k)|^2 for the Gaussian barrier, windowed where V is non-negligible."""
    def v(z):
        d = z - spec.z0_prime
        return spec.v0 * np.exp(-d * d / spec.sigma_b**2)

    w = span_sigmas * spec.sigma_b
    return plane_wave_transmission(v, spec.z0_prime - w, spec.z0_prime + w,
                                   k_values, n_slices)


def momentum_averaged_transmission(psi0: Wavefunction, kick_k: float,
                                   spec: BarrierSpec,
                                   n_slices: int = 8192,
                                   window: float = 8.0) -> float:
    """Transmission of the kicked cloud predicted by stationary scattering.

    Averages |t(k)|^2 over the momentum density of psi0 shifted by the
    kick.  Valid only in the non-interacting limit, where each momentum
    component scatters independently.
    """
    k, n_k = psi0.momentum_density()
    k = k + kick_k
    total = np.trapezoid(n_k, k)
    sel = (np.abs(k - kick_k) <= window) & (k > 0)
    t2 = gaussian_barrier_transmission(spec, k[sel], n_slices=n_slices)
    return float(np.trapezoid(n_k[sel] * t2, k[sel]) / total)
