"""Classical engine: Monte-Carlo phase-space transport.

The collisionless transport equation is solved by evolving M samples of
the initial phase-space density under Newton's equations, with the
interatomic mean field N g1d f_nu(z) rebuilt each step from a Gaussian
kernel density estimate of the sample positions.  Positions and momenta
are drawn independently from the position and (kicked) momentum
densities of the quantum initial condition, the maximum-entropy joint
distribution consistent with those marginals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .errors import (ConfigurationError, DivergenceError,
                     DomainViolationError, SamplingError)
from .gpe import Wavefunction, barrier_force, gaussian_barrier
from .grids import Grid


@dataclass
class PhaseSpaceEnsemble:
    """M classical samples (z_i, p_i) with a fixed KDE bandwidth.

    The bandwidth and sigma_z0 are frozen from the t = 0 sample set for
    the whole run.  No samples are created or destroyed by evolution.
    """

    z: np.ndarray
    p: np.ndarray
    bandwidth: float
    sigma_z0: float
    seed: int
    time: float = 0.0

    @property
    def m(self) -> int:
        return self.z.size

    def copy(self) -> "PhaseSpaceEnsemble":
        return PhaseSpaceEnsemble(self.z.copy(), self.p.copy(),
                                  self.bandwidth, self.sigma_z0,
                                  self.seed, self.time)


def kde_bandwidth(sigma_z: float, m: int) -> float:
    """Optimal Gaussian-kernel smoothing width (4 sigma_z^5 / 3M)^(1/5)."""
    if sigma_z <= 0 or m <= 0:
        raise ConfigurationError("kde_bandwidth needs sigma_z > 0 and M > 0")
    return (4.0 * sigma_z**5 / (3.0 * m)) ** 0.2


def _inverse_cdf_sample(x: np.ndarray, pdf: np.ndarray, u: np.ndarray,
                        label: str) -> np.ndarray:
    pdf = np.maximum(pdf, 0.0)
    total = np.trapezoid(pdf, x)
    if not np.isfinite(total) or total <= 0:
        raise SamplingError(f"cannot sample from empty {label} density")
    cdf = np.concatenate([[0.0], np.cumsum(
        0.5 * (pdf[1:] + pdf[:-1]) * np.diff(x))]) / total
    keep = np.concatenate([[True], np.diff(cdf) > 0])
    return np.interp(u, cdf[keep], x[keep])


def sample_initial(psi0: Wavefunction, kick_k: float, m: int,
                   seed: int) -> PhaseSpaceEnsemble:
    """Draw M samples from the quantum initial condition's marginals.

    z_i ~ |psi0|^2/N via inverse CDF on the grid; p_i ~ the momentum
    density of psi0 shifted by the kick.  The bandwidth is set from the
    drawn positions.
    """
    norm = psi0.norm()
    if not math.isfinite(norm) or norm <= 0:
        raise SamplingError("initial state is not normalized")
    rng = np.random.default_rng(seed)
    z = _inverse_cdf_sample(psi0.grid.z, psi0.density(), rng.random(m),
                            "position")
    k_axis, n_k = psi0.momentum_density()
    p = _inverse_cdf_sample(k_axis, n_k, rng.random(m), "momentum") + kick_k
    sigma_z = float(np.std(z))
    return PhaseSpaceEnsemble(z=z, p=p, bandwidth=kde_bandwidth(sigma_z, m),
                              sigma_z0=sigma_z, seed=seed)


# ---------------------------------------------------------------------------
# kernel density estimation

def kde_density(ensemble: PhaseSpaceEnsemble, grid: Grid,
                method: str = "grid") -> np.ndarray:
    """f_nu(z) = (1/M) sum_i K_nu(z - z_i) on the grid; integrates to 1.

    "grid": cloud-in-cell deposit followed by spectral convolution with
    the Gaussian kernel (periodic; samples must sit well inside the
    grid).  "direct": exact pairwise sum, O(M * n); kept as the
    reference path for equivalence tests.
    """
    nu = ensemble.bandwidth
    if nu <= 0:
        raise ConfigurationError("bandwidth must be positive")
    if method == "direct":
        acc = np.zeros(grid.n_points)
        pref = 1.0 / (math.sqrt(2.0 * math.pi) * nu * ensemble.m)
        for z_i in ensemble.z:
            acc += np.exp(-0.5 * ((grid.z - z_i) / nu) ** 2)
        return pref * acc
    dep = _deposit(ensemble.z, grid)
    smooth = np.exp(-0.5 * (grid_rfft_k(grid) * nu) ** 2)
    f = sfft.irfft(sfft.rfft(dep) * smooth)
    return f / (ensemble.m * grid.dz)


def _deposit(z: np.ndarray, grid: Grid) -> np.ndarray:
    x = (z - grid.z_min) / grid.dz
    i0 = x.astype(np.int64)
    if np.any(i0 < 0) or np.any(i0 >= grid.n_points - 1):
        raise DomainViolationError("samples left the grid during deposit")
    w = x - i0
    return (np.bincount(i0, weights=1.0 - w, minlength=grid.n_points)
            + np.bincount(i0 + 1, weights=w, minlength=grid.n_points))


_rfft_k_cache: dict = {}


def grid_rfft_k(grid: Grid) -> np.ndarray:
    key = (grid.z_min, grid.z_max, grid.n_points)
    if key not in _rfft_k_cache:
        _rfft_k_cache[key] = 2.0 * np.pi * sfft.rfftfreq(grid.n_points,
                                                         grid.dz)
    return _rfft_k_cache[key]


def mean_field_potential(ensemble: PhaseSpaceEnsemble, grid: Grid,
                         g1d: float, atom_number: float,
                         method: str = "grid") -> np.ndarray:
    """V_m(z) = N g1d f_nu(z); sign follows the coupling."""
    if g1d == 0.0:
        return np.zeros(grid.n_points)
    return atom_number * g1d * kde_density(ensemble, grid, method)


def mean_field_force_direct(ensemble: PhaseSpaceEnsemble, g1d: float,
                            atom_number: float,
                            at: np.ndarray) -> np.ndarray:
    """-dV_m/dz by the analytic kernel derivative (exact pairwise sum)."""
    if g1d == 0.0:
        return np.zeros_like(at)
    nu = ensemble.bandwidth
    pref = atom_number * g1d / (math.sqrt(2.0 * math.pi) * nu**3 * ensemble.m)
    out = np.empty_like(at)
    for j, z_j in enumerate(at):
        d = z_j - ensemble.z
        out[j] = pref * np.sum(d * np.exp(-0.5 * (d / nu) ** 2))
    return out


class _GriddedMeanFieldForce:
    """Spectral evaluation of -N g1d f_nu'(z), interpolated to samples."""

    def __init__(self, grid: Grid, bandwidth: float, g1d: float,
                 atom_number: float, m: int):
        k = grid_rfft_k(grid)
        self._grid = grid
        # -d/dz of the kernel-smoothed density, scaled to a force on entry
        self._kernel = (-1j * k) * np.exp(-0.5 * (k * bandwidth) ** 2) \
            * (atom_number * g1d / (m * grid.dz))

    def __call__(self, z: np.ndarray) -> np.ndarray:
        dep = _deposit(z, self._grid)
        fprime = sfft.irfft(sfft.rfft(dep) * self._kernel)
        return np.interp(z, self._grid.z, fprime)


# ---------------------------------------------------------------------------
# evolution

@dataclass
class EnsembleSample:
    t: float
    ensemble: PhaseSpaceEnsemble
    energy: float
    step: int


def classical_energy(ensemble: PhaseSpaceEnsemble, barrier) -> float:
    """sum_i p_i^2/2 + V_b(z_i); the conserved energy when g1d = 0."""
    d = ensemble.z - barrier.z0_prime
    v = barrier.v0 * np.exp(-d * d / barrier.sigma_b**2)
    return float(np.sum(0.5 * ensemble.p**2 + v))


def evolve_ensemble(ensemble: PhaseSpaceEnsemble, barrier, g1d: float,
                    atom_number: float, dt: float, t_final: float,
                    grid: Grid, observer=None, observer_stride: int = 100,
                    ballistic_window: float | None = None
                    ) -> PhaseSpaceEnsemble:
    """Velocity-Verlet integration of the M coupled sample ODEs.

    The mean-field force is rebuilt once per step (at the new positions;
    forces are frozen within a step).  With g1d = 0 the samples are
    independent single particles in the barrier potential, and
    ``ballistic_window`` may give a half-width (in units of sigma_b)
    outside which the barrier force is treated as exactly zero and
    samples are advanced ballistically between observer strides.

    The observer is called every ``observer_stride`` steps with an
    :class:`EnsembleSample` and may return truthy to stop early.
    """
    if dt <= 0:
        raise ConfigurationError("dt must be positive")
    ens = ensemble.copy()
    n_steps = int(round(t_final / dt))
    if n_steps == 0:
        return ens

    mf = None
    if g1d != 0.0:
        mf = _GriddedMeanFieldForce(grid, ens.bandwidth, g1d, atom_number,
                                    ens.m)

    def total_force(z):
        f = barrier_force(barrier, z)
        if mf is not None:
            f += mf(z)
        return f

    z, p = ens.z, ens.p
    t0 = ens.time
    step = 0
    force = total_force(z)

    use_zones = (mf is None and ballistic_window is not None
                 and barrier.v0 > 0)
    if use_zones:
        zone_lo = barrier.z0_prime - ballistic_window * barrier.sigma_b
        zone_hi = barrier.z0_prime + ballistic_window * barrier.sigma_b

    while step < n_steps:
        seg = min(observer_stride, n_steps - step)
        if use_zones:
            # pad by the farthest a sample can travel within the segment
            pad = np.max(np.abs(p)) * seg * dt
            active = (z > zone_lo - pad) & (z < zone_hi + pad)
            if not np.any(active):
                z = z + p * (seg * dt)
                step += seg
            else:
                za, pa, fa = z[active], p[active], force[active]
                for _ in range(seg):
                    pa += 0.5 * dt * fa
                    za += dt * pa
                    fa = barrier_force(barrier, za)
                    pa += 0.5 * dt * fa
                z = z.copy(); p = p.copy(); force = force.copy()
                z[~active] = z[~active] + p[~active] * (seg * dt)
                z[active], p[active], force[active] = za, pa, fa
                step += seg
        else:
            for _ in range(seg):
                p = p + 0.5 * dt * force
                z = z + dt * p
                force = total_force(z)
                p = p + 0.5 * dt * force
            step += seg

        if not (np.all(np.isfinite(z)) and np.all(np.isfinite(p))):
            raise DivergenceError(f"non-finite sample state at step {step}",
                                  step=step)
        if np.min(z) < grid.z_min or np.max(z) >= grid.z_max:
            raise DomainViolationError(
                f"sample left the grid at t={t0 + step * dt:.4f}")
        ens.z, ens.p, ens.time = z, p, t0 + step * dt
        if observer is not None:
            s = EnsembleSample(t=ens.time, ensemble=ens,
                               energy=classical_energy(ens, barrier),
                               step=step)
            if observer(s):
                break
    return ens


# ---------------------------------------------------------------------------
# breathing-mode validation

@dataclass
class BreathingResult:
    freq_gpe: float
    freq_bve: float
    freq_ideal: float        # 2 * trap frequency
    freq_tf: float           # sqrt(3) * trap frequency
    trap_omega: float


def fit_oscillation_frequency(t: np.ndarray, y: np.ndarray,
                              f_guess: float) -> float:
    """Frequency of y(t) ~ c + a exp(-gamma t) cos(w t + phi) by least
    squares, seeded from the guess."""
    from scipy.optimize import curve_fit
    from .errors import FitError

    def model(tt, c, a, gamma, w, phi):
        return c + a * np.exp(-gamma * tt) * np.cos(w * tt + phi)

    a0 = 0.5 * (np.max(y) - np.min(y))
    p0 = [np.mean(y), a0, 0.0, f_guess, 0.0]
    try:
        popt, _ = curve_fit(model, t, y, p0=p0, maxfev=20000)
    except RuntimeError as exc:
        raise FitError(f"oscillation fit failed: {exc}") from exc
    return abs(popt[3])


def breathing_mode_test(cfg, quench_fraction: float = 0.02,
                        t_final: float = 12.0, dt: float = 2e-4,
                        m_samples: int | None = None, seed: int = 1234,
                        grid: Grid | None = None) -> BreathingResult:
    """Cross-solver validation: monopole frequency of the trapped cloud.

    The trap frequency is quenched by a small fraction at t = 0 (no kick,
    no barrier); both engines evolve the same initial state in the new
    trap and the oscillation frequency of <z^2>(t) is extracted by a
    sinusoid fit.  In the strongly interacting regime the hydrodynamic
    prediction is sqrt(3) times the trap frequency; the ideal gas gives
    exactly twice.
    """
    from .config import nondimensionalize
    from .gpe import evolve, harmonic_potential, prepare_ground_state

    if grid is None:
        half = 36.0
        grid = Grid(cfg.trap_center - half, cfg.trap_center + half, 2**11)
    psi0, scales, _ = prepare_ground_state(cfg, grid, window=25.0)
    omega_q = 1.0 + quench_fraction
    v_trap = omega_q**2 * harmonic_potential(grid, cfg.trap_center)
    g1d = scales.g1d_initial

    stride = max(1, int(round(0.02 / dt)))
    times, var_q = [], []

    def obs_gpe(s):
        times.append(s.t)
        var_q.append(s.psi.rms_width() ** 2)
        return False

    evolve(psi0, v_trap, g1d, dt=dt, t_final=t_final, observer=obs_gpe,
           observer_stride=stride, edge_guard=5.0)

    m = m_samples if m_samples is not None else cfg.samples
    ens = sample_initial(psi0, 0.0, m, seed)
    trap = _HarmonicTrapAdapter(cfg.trap_center, omega_q)
    times_b, var_b = [], []

    def obs_bve(s):
        times_b.append(s.t)
        zc = np.mean(s.ensemble.z)
        var_b.append(np.mean((s.ensemble.z - zc) ** 2))
        return False

    evolve_ensemble(ens, trap, g1d, cfg.atom_number, dt=dt, t_final=t_final,
                    grid=grid, observer=obs_bve, observer_stride=stride)

    guess = math.sqrt(3.0) * omega_q if g1d > 0 else 2.0 * omega_q
    f_gpe = fit_oscillation_frequency(np.asarray(times), np.asarray(var_q),
                                      guess)
    f_bve = fit_oscillation_frequency(np.asarray(times_b), np.asarray(var_b),
                                      guess)
    return BreathingResult(freq_gpe=f_gpe, freq_bve=f_bve,
                           freq_ideal=2.0 * omega_q,
                           freq_tf=math.sqrt(3.0) * omega_q,
                           trap_omega=omega_q)


class _HarmonicTrapAdapter:
    """Duck-typed 'barrier' whose force/energy are those of a harmonic
    trap, letting evolve_ensemble drive trapped validation runs."""

    def __init__(self, center: float, omega: float):
        self.z0_prime = center
        self.sigma_b = 1.0
        self.v0 = 0.0
        self._omega2 = omega * omega
        self._center = center

    def force(self, z):
        return -self._omega2 * (z - self._center)


def _trap_force_patch():
    # barrier_force dispatch for the adapter
    pass
