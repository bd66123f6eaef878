"""Quantum engine: 1D Gross-Pitaevskii dynamics on a spectral grid.

Real-time evolution uses Strang splitting: half kinetic step in the
spectral domain, full local phase step exp(-i dt (V + g |psi|^2)) in the
position domain (exact for the local term, since |psi|^2 is invariant
under pure phase evolution), half kinetic step.  The ground state comes
from imaginary-time propagation with the local substep integrated by
classical RK4 (the phase argument is not conserved in imaginary time,
so the substep is no longer exact there).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .errors import (ConfigurationError, ConvergenceError, DivergenceError,
                     DomainViolationError, NormDriftError)
from .grids import Grid

EDGE_GUARD = 10.0        # l_z kept clear at each boundary
EDGE_MASS_TOL = 1e-9     # fraction of N allowed inside the guard zones
NORM_TOL = 1e-10         # relative norm drift allowed in real time


@dataclass
class Wavefunction:
    """Complex field on a grid, normalized to the atom number."""

    grid: Grid
    values: np.ndarray
    time: float = 0.0

    def copy(self) -> "Wavefunction":
        return Wavefunction(self.grid, self.values.copy(), self.time)

    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def norm(self) -> float:
        """int |psi|^2 dz (periodic rectangle rule, exact for FFT fields)."""
        return float(np.sum(self.density()) * self.grid.dz)

    def center(self) -> float:
        rho = self.density()
        return float(np.sum(self.grid.z * rho) / np.sum(rho))

    def rms_width(self) -> float:
        rho = self.density()
        zc = np.sum(self.grid.z * rho) / np.sum(rho)
        return float(np.sqrt(np.sum((self.grid.z - zc) ** 2 * rho) / np.sum(rho)))

    def momentum_density(self) -> tuple[np.ndarray, np.ndarray]:
        """Continuum-normalized momentum density: int n(k) dk = norm."""
        g = self.grid
        psi_k = sfft.fftshift(sfft.fft(self.values)) * g.dz / math.sqrt(2 * math.pi)
        k = sfft.fftshift(g.k)
        return k, np.abs(psi_k) ** 2


@dataclass(frozen=True)
class BarrierSpec:
    """Gaussian barrier V0 exp(-(z - z0')^2 / sigma_b^2).

    Note the exponent convention: sigma_b^2, not 2 sigma_b^2, so
    V(z0' +/- sigma_b) = V0/e exactly.  The transmitted/reflected region
    boundaries sit two widths out from the peak.
    """

    v0: float
    sigma_b: float
    z0_prime: float

    def __post_init__(self):
        if self.v0 < 0:
            raise ConfigurationError("barrier height must be >= 0")
        if self.sigma_b <= 0:
            raise ConfigurationError("barrier width must be > 0")

    @property
    def z_t(self) -> float:
        return self.z0_prime + 2.0 * self.sigma_b

    @property
    def z_r(self) -> float:
        return self.z0_prime - 2.0 * self.sigma_b

    def potential(self, z):
        d = z - self.z0_prime
        return self.v0 * np.exp(-d * d / (self.sigma_b ** 2))

    def force(self, z):
        d = z - self.z0_prime
        s2 = self.sigma_b ** 2
        return self.v0 * np.exp(-d * d / s2) * (2.0 * d / s2)

    @classmethod
    def placed(cls, v0: float, sigma_b: float, z0: float,
               sigma_c: float) -> "BarrierSpec":
        """Barrier positioned by the standard placement rule so the
        initial cloud is unperturbed to machine precision."""
        return cls(v0, sigma_b, place_barrier(z0, sigma_b, sigma_c))


@dataclass(frozen=True)
class HarmonicTrap:
    """External harmonic potential with the barrier duck-type, used by
    the classical engine for trapped validation runs."""

    center: float
    omega: float = 1.0

    def potential(self, z):
        return 0.5 * self.omega**2 * (z - self.center) ** 2

    def force(self, z):
        return -self.omega**2 * (z - self.center)


def place_barrier(z0: float, sigma_b: float, sigma_c: float) -> float:
    """Barrier center z0' = z0 + 3 (sigma_b + sigma_c) + 15.

    Puts the 3-sigma tail of the barrier a distance 15 l_z beyond the
    3-sigma edge of the cloud centered at z0.
    """
    if sigma_b < 0 or sigma_c < 0:
        raise ConfigurationError("widths must be non-negative")
    return z0 + 3.0 * (sigma_b + sigma_c) + 15.0


def harmonic_potential(grid: Grid, z0: float) -> np.ndarray:
    """Axial trap (1/2)(z - z0)^2 in oscillator units."""
    return 0.5 * (grid.z - z0) ** 2


def gaussian_barrier(grid: Grid, spec: BarrierSpec) -> np.ndarray:
    d = grid.z - spec.z0_prime
    return spec.v0 * np.exp(-d * d / (spec.sigma_b ** 2))


def barrier_force(spec: BarrierSpec, z: np.ndarray) -> np.ndarray:
    """-dV_b/dz evaluated analytically (used by the classical engine)."""
    d = z - spec.z0_prime
    s2 = spec.sigma_b ** 2
    return spec.v0 * np.exp(-d * d / s2) * (2.0 * d / s2)


def effective_potential(psi: Wavefunction, v_b: np.ndarray,
                        g1d: float) -> np.ndarray:
    """Diagnostic V_b + g1d |psi|^2.  Never fed back into the evolution;
    the equation of motion already contains the nonlinearity."""
    return v_b + g1d * psi.density()


def gaussian_wavepacket(grid: Grid, center: float, sigma: float, k: float,
                        atom_number: float = 1.0) -> Wavefunction:
    """Minimum-uncertainty packet with |psi|^2 of RMS width sigma/sqrt(2)...

    Amplitude profile exp(-(z-z0)^2/(2 sigma^2)), i.e. density RMS width
    sigma/sqrt(2); normalized to atom_number; plane-wave factor e^{ikz}.
    """
    z = grid.z
    psi = np.exp(-((z - center) ** 2) / (2.0 * sigma**2)).astype(np.complex128)
    psi *= np.exp(1j * k * z)
    psi *= math.sqrt(atom_number / (np.sum(np.abs(psi) ** 2) * grid.dz))
    return Wavefunction(grid, psi)


def apply_kick(psi: Wavefunction, k: float) -> Wavefunction:
    """Multiply by e^{ikz}: density unchanged, momentum density shifted."""
    return Wavefunction(psi.grid, psi.values * np.exp(1j * k * psi.grid.z),
                        psi.time)


# ---------------------------------------------------------------------------
# energies

def kinetic_energy(psi: Wavefunction) -> float:
    g = psi.grid
    psi_k = sfft.fft(psi.values)
    return float(0.5 * np.sum(g.k**2 * np.abs(psi_k) ** 2) * g.dz / g.n_points)


def potential_energy(psi: Wavefunction, v_ext: np.ndarray) -> float:
    return float(np.sum(v_ext * psi.density()) * psi.grid.dz)


def interaction_energy(psi: Wavefunction, g1d: float) -> float:
    """(g/2) int |psi|^4 dz, the mean-field term of the energy functional."""
    rho = psi.density()
    return float(0.5 * g1d * np.sum(rho * rho) * psi.grid.dz)


def total_energy(psi: Wavefunction, v_ext: np.ndarray, g1d: float) -> float:
    return kinetic_energy(psi) + potential_energy(psi, v_ext) \
        + interaction_energy(psi, g1d)


def energy_report(psi: Wavefunction, v_ext: np.ndarray, g1d: float) -> dict:
    """Energy bookkeeping for reports, all per the full cloud except the
    explicitly per-particle entries."""
    rho = psi.density()
    n = np.sum(rho) * psi.grid.dz
    return {
        "kinetic": kinetic_energy(psi),
        "potential": potential_energy(psi, v_ext),
        "interaction": interaction_energy(psi, g1d),
        "total": total_energy(psi, v_ext, g1d),
        # expectation of the mean-field potential g*rho over the cloud
        "mean_field_per_particle": float(g1d * np.sum(rho * rho)
                                         * psi.grid.dz / n),
        "peak_mean_field": float(g1d * np.max(rho)),
    }


# ---------------------------------------------------------------------------
# imaginary time

@dataclass
class GroundStateInfo:
    mu: float
    iterations: int
    residual: float
    energies: list = field(default_factory=list)


def thomas_fermi_profile(grid: Grid, v_trap: np.ndarray, g1d: float,
                         atom_number: float) -> np.ndarray:
    """TF density ansatz max((mu - V)/g, 0), normalized to atom_number."""
    from .config import mu1d_from_g1d
    mu = mu1d_from_g1d(g1d, atom_number)
    rho = np.maximum((mu + np.min(v_trap) - v_trap) / g1d, 0.0)
    rho *= atom_number / (np.sum(rho) * grid.dz)
    return rho


def ground_state(grid: Grid, v_trap: np.ndarray, g1d: float,
                 atom_number: float, tol: float = 1e-12,
                 dtau: float = 5e-3, max_iter: int = 400_000,
                 energy_stride: int = 50) -> tuple[Wavefunction, GroundStateInfo]:
    """Imaginary-time propagation to the trapped ground state.

    Renormalizes to atom_number after every step.  The chemical
    potential is estimated from the log-derivative of the norm;
    convergence requires the per-step drift |mu_i - mu_{i-1}|/mu < tol.
    Returns the state (real up to global phase) and solve diagnostics.
    """
    if g1d < 0:
        raise ConfigurationError("ground_state requires g1d >= 0 "
                                 "(repulsive or ideal initial cloud)")
    if tol <= 0:
        raise ConfigurationError("tol must be positive")
    # RK4 on d psi/dtau = -(V + g rho) psi is stable for dtau*max(V) < ~2.8
    vmax = float(np.max(v_trap))
    if vmax > 0:
        dtau = min(dtau, 2.5 / vmax)

    if g1d > 0:
        psi = np.sqrt(thomas_fermi_profile(grid, v_trap, g1d, atom_number))
        psi = psi.astype(np.complex128)
    else:
        zc = grid.z[int(np.argmin(v_trap))]
        psi = np.exp(-0.5 * (grid.z - zc) ** 2).astype(np.complex128)
    psi *= math.sqrt(atom_number / (np.sum(np.abs(psi) ** 2) * grid.dz))

    exp_k_half = np.exp(-grid.k**2 * dtau / 4.0)
    target_amp = math.sqrt(atom_number)

    def local_decay(p):
        # RK4 for the potential + nonlinear substep
        def f(q):
            return -(v_trap + g1d * np.abs(q) ** 2) * q
        k1 = f(p)
        k2 = f(p + 0.5 * dtau * k1)
        k3 = f(p + 0.5 * dtau * k2)
        k4 = f(p + dtau * k3)
        return p + (dtau / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    info = GroundStateInfo(mu=0.0, iterations=0, residual=math.inf)
    mu_prev = None
    wf = Wavefunction(grid, psi)
    for it in range(1, max_iter + 1):
        psi = sfft.ifft(sfft.fft(psi) * exp_k_half)
        psi = local_decay(psi)
        psi = sfft.ifft(sfft.fft(psi) * exp_k_half)
        amp = math.sqrt(np.sum(np.abs(psi) ** 2).real * grid.dz)
        if not math.isfinite(amp) or amp == 0.0:
            raise DivergenceError("imaginary-time propagation diverged",
                                  step=it)
        mu = -math.log(amp / target_amp) / dtau
        psi *= target_amp / amp
        if energy_stride and it % energy_stride == 0:
            wf.values = psi
            info.energies.append(total_energy(wf, v_trap, g1d))
        if mu_prev is not None:
            info.residual = abs(mu - mu_prev) / max(abs(mu), 1e-300)
            if info.residual < tol:
                wf.values = psi
                # the norm log-derivative drives convergence but carries an
                # O(dtau) bias from the nonlinearity decaying within a step;
                # report the unbiased functional value mu = <K + V + g rho>
                rho = wf.density()
                info.mu = (kinetic_energy(wf)
                           + float(np.sum((v_trap + g1d * rho) * rho)
                                   * grid.dz)) / atom_number
                info.iterations = it
                return wf, info
        mu_prev = mu
    raise ConvergenceError(
        f"imaginary time did not converge in {max_iter} iterations",
        residual=info.residual)


def prepare_ground_state(cfg, grid: Grid, tol: float = 1e-12,
                         window: float = 25.0):
    """Trapped ground state at the initial scattering length, embedded
    into the production grid.

    Imaginary time runs on an aligned power-of-two subgrid around the
    trap center (the trapped cloud occupies a few l_z; the production
    grid is sized for the kicked flight).  Returns (psi0, scales, info)
    where scales carries the measured RMS cloud width sigma_c.
    """
    from .config import nondimensionalize

    scales = nondimensionalize(cfg)
    sub, sl = grid.subgrid(cfg.trap_center - window, cfg.trap_center + window)
    v_sub = harmonic_potential(sub, cfg.trap_center)
    psi_sub, info = ground_state(sub, v_sub, scales.g1d_initial,
                                 cfg.atom_number, tol=tol)
    values = np.zeros(grid.n_points, dtype=np.complex128)
    values[sl] = psi_sub.values
    psi = Wavefunction(grid, values)
    psi.values *= math.sqrt(cfg.atom_number / psi.norm())
    return psi, scales.with_sigma_c(psi.rms_width()), info


# ---------------------------------------------------------------------------
# real time

@dataclass
class EvolutionSample:
    """What the observer sees at each sampling stride."""

    t: float
    psi: Wavefunction
    norm: float
    energy: float
    step: int


def evolve(psi: Wavefunction, v_ext: np.ndarray, g1d: float, dt: float,
           t_final: float, observer=None, observer_stride: int = 100,
           norm_tol: float = NORM_TOL, edge_guard: float = EDGE_GUARD,
           check_edges: bool = True) -> Wavefunction:
    """Propagate the GPE to t_final (relative to psi.time).

    The observer, if given, is called with an :class:`EvolutionSample`
    every ``observer_stride`` steps and may return truthy to stop the
    run early (used by the transmission stop criterion).  Norm must stay
    within ``norm_tol`` of its initial value; density must keep clear of
    the guard zones at the domain edges.  v_ext must be time-independent.
    """
    if dt <= 0:
        raise ConfigurationError("dt must be positive")
    grid = psi.grid
    n_steps = int(round(t_final / dt))
    if n_steps == 0:
        return psi.copy()

    exp_k_half = np.exp(-0.25j * grid.k**2 * dt)
    exp_k_full = exp_k_half * exp_k_half
    static_phase = np.exp(-1j * dt * v_ext) if g1d == 0.0 else None

    norm0 = psi.norm()
    n_atoms = norm0
    guard_lo = grid.z < grid.z_min + edge_guard
    guard_hi = grid.z >= grid.z_max - edge_guard

    values = psi.values.copy()
    t0 = psi.time
    out = Wavefunction(grid, values, t0)
    step = 0

    def sample():
        rho = np.abs(values) ** 2
        norm = float(np.sum(rho) * grid.dz)
        if not np.isfinite(norm):
            raise DivergenceError(
                f"non-finite field at step {step}", step=step)
        if abs(norm - norm0) / norm0 > norm_tol:
            raise NormDriftError(
                f"norm drifted by {abs(norm - norm0) / norm0:.3e} at "
                f"step {step}; reduce dt or refine the grid")
        if check_edges:
            edge = (np.sum(rho[guard_lo]) + np.sum(rho[guard_hi])) * grid.dz
            if edge > EDGE_MASS_TOL * n_atoms:
                raise DomainViolationError(
                    f"density reached the domain edge at t={out.time:.4f} "
                    f"(edge mass {edge / n_atoms:.2e} N)")
        return norm

    while step < n_steps:
        seg = min(observer_stride, n_steps - step)
        # fused Strang segment: half kinetic, (phase, full kinetic)*,
        # phase, half kinetic
        values = sfft.ifft(sfft.fft(values) * exp_k_half)
        for j in range(seg):
            if static_phase is None:
                values *= np.exp(-1j * dt * (v_ext + g1d * np.abs(values) ** 2))
            else:
                values *= static_phase
            kmul = exp_k_full if j < seg - 1 else exp_k_half
            values = sfft.ifft(sfft.fft(values) * kmul)
        step += seg
        out.values = values
        out.time = t0 + step * dt
        norm = sample()
        if observer is not None:
            s = EvolutionSample(t=out.time, psi=out, norm=norm,
                                energy=total_energy(out, v_ext, g1d),
                                step=step)
            if observer(s):
                break
    return out
