"""Quantum engine: potentials, ground state, kick, evolution."""

import math

import numpy as np
import pytest

from tunnelsim.config import PhysicsConfig, thomas_fermi_rms_width
from tunnelsim.errors import (ConfigurationError, DivergenceError,
                              DomainViolationError, NormDriftError)
from tunnelsim.gpe import (BarrierSpec, Wavefunction, apply_kick,
                           effective_potential, evolve, gaussian_barrier,
                           gaussian_wavepacket, ground_state,
                           harmonic_potential, kinetic_energy, place_barrier,
                           prepare_ground_state, total_energy)
from tunnelsim.grids import Grid


@pytest.fixture(scope="module")
def default_state():
    """Production ground state at a_s = 5 a0 on the production grid."""
    cfg = PhysicsConfig()
    grid = Grid()
    psi, scales, info = prepare_ground_state(cfg, grid)
    return cfg, grid, psi, scales, info


# ---------------------------------------------------------------------------
# grids and potentials

def test_grid_requires_power_of_two():
    with pytest.raises(ConfigurationError):
        Grid(-10, 10, 1000)
    g = Grid(-10.0, 10.0, 1024)
    assert g.dz == pytest.approx(20.0 / 1024)
    assert len(g.z) == len(g.k) == 1024


def test_subgrid_alignment():
    g = Grid(-120, 200, 2**14)
    sub, sl = g.subgrid(-75, -25)
    assert sub.n_points & (sub.n_points - 1) == 0
    np.testing.assert_allclose(sub.z, g.z[sl], rtol=0, atol=1e-12)
    assert sub.dz == g.dz


def test_harmonic_potential_shape():
    g = Grid(-58, -42, 2**10)   # dz = 1/64, so unit offsets are exact
    v = harmonic_potential(g, -50.0)
    i0 = 512
    assert g.z[i0] == -50.0
    assert v[i0] == pytest.approx(0.0, abs=1e-12)
    assert v[i0 + 64] == pytest.approx(0.5, abs=1e-12)
    # symmetry about the center for matched offsets
    d = 200
    assert v[i0 + d] == pytest.approx(v[i0 - d], rel=1e-12)


def test_gaussian_barrier_exponent_convention():
    g = Grid(-16, 16, 2**12)   # dz = 1/128, so 1.5 sits on the grid
    spec = BarrierSpec(v0=220.0, sigma_b=1.5, z0_prime=0.0)
    v = gaussian_barrier(g, spec)
    i0 = 2048
    assert g.z[i0] == 0.0
    assert v[i0] == pytest.approx(220.0, rel=1e-12)
    # exponent uses sigma_b^2, not 2 sigma_b^2
    assert v[i0 + 192] == pytest.approx(220.0 / math.e, rel=1e-12)
    assert np.all(gaussian_barrier(g, BarrierSpec(0.0, 1.0, 0.0)) == 0.0)


def test_barrier_spec_validation():
    with pytest.raises(ConfigurationError):
        BarrierSpec(v0=-1.0, sigma_b=1.0, z0_prime=0.0)
    with pytest.raises(ConfigurationError):
        BarrierSpec(v0=1.0, sigma_b=0.0, z0_prime=0.0)
    spec = BarrierSpec(v0=1.0, sigma_b=2.0, z0_prime=5.0)
    assert spec.z_r < spec.z0_prime < spec.z_t
    assert spec.z_t == 9.0 and spec.z_r == 1.0


def test_place_barrier_rule():
    # arithmetic from the placement rule with the published values
    assert place_barrier(-50.0, 1.0, 4.7) == pytest.approx(-17.9)
    assert place_barrier(-50.0, 1e-12, 1e-12) == pytest.approx(-35.0)
    spec = BarrierSpec.placed(200.0, 1.0, -50.0, 4.7)
    assert spec.z0_prime == pytest.approx(-17.9)


# ---------------------------------------------------------------------------
# ground state

def test_ground_state_ideal_gas_is_gaussian():
    grid = Grid(-62.0, -38.0, 2**10)
    v = harmonic_potential(grid, -50.0)
    psi, info = ground_state(grid, v, 0.0, 1.0, tol=1e-12)
    assert psi.rms_width() == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-3)
    assert psi.norm() == pytest.approx(1.0, rel=1e-12)
    # state is real up to a global phase
    phase = psi.values[np.argmax(np.abs(psi.values))]
    aligned = psi.values * np.conj(phase / abs(phase))
    assert np.max(np.abs(aligned.imag)) < 1e-8 * np.max(np.abs(aligned.real))


def test_ground_state_energy_decreases(default_state):
    _, _, _, _, info = default_state
    e = np.asarray(info.energies)
    diffs = np.diff(e)
    # monotone decrease down to the convergence floor
    assert np.all(diffs <= 1e-9 * np.abs(e[0]))
    assert e[-1] < e[0]


def test_ground_state_width_matches_tf_oracle(default_state):
    """RMS width of the computed state vs the independent Thomas-Fermi
    prediction sqrt(2 mu / 5) at the derived chemical potential."""
    _, _, psi, scales, _ = default_state
    assert scales.sigma_c == pytest.approx(psi.rms_width(), rel=1e-12)
    assert scales.sigma_c == pytest.approx(
        thomas_fermi_rms_width(scales.mu1d), rel=0.02)


def test_ground_state_mu_matches_config(default_state):
    _, _, _, scales, info = default_state
    # TF neglects quantum pressure, so the computed mu sits slightly above
    assert info.mu > scales.mu1d
    assert info.mu == pytest.approx(scales.mu1d, rel=0.02)


def test_barrier_leaves_initial_cloud_unperturbed(default_state):
    """Quadrature of rho * V_b with the placed barrier is below
    1e-30 * N * hbar omega_z."""
    cfg, grid, psi, scales, _ = default_state
    spec = BarrierSpec.placed(220.0, 1.0, cfg.trap_center, scales.sigma_c)
    overlap = float(np.trapezoid(psi.density() * gaussian_barrier(grid, spec),
                                 dx=grid.dz))
    assert overlap < 1e-30 * cfg.atom_number


# ---------------------------------------------------------------------------
# kick

def test_kick_preserves_density_and_shifts_momentum(default_state):
    _, _, psi, _, _ = default_state
    kicked = apply_kick(psi, 20.0)
    np.testing.assert_allclose(kicked.density(), psi.density(),
                               rtol=0, atol=1e-9 * psi.density().max())
    k0, n0 = psi.momentum_density()
    k1, n1 = kicked.momentum_density()
    p0 = np.trapezoid(k0 * n0, k0) / np.trapezoid(n0, k0)
    p1 = np.trapezoid(k1 * n1, k1) / np.trapezoid(n1, k1)
    assert p1 - p0 == pytest.approx(20.0, abs=1e-6)


def test_zero_kick_is_identity(default_state):
    _, _, psi, _, _ = default_state
    kicked = apply_kick(psi, 0.0)
    np.testing.assert_array_equal(kicked.values, psi.values)


# ---------------------------------------------------------------------------
# evolution

def test_free_gaussian_dispersion_matches_analytic():
    """g = 0, V = 0: compare against the closed-form spreading Gaussian."""
    grid = Grid(-40.0, 40.0, 2**12)
    sigma0 = 2.0
    psi = gaussian_wavepacket(grid, 0.0, sigma0, 0.0, 1.0)
    v = np.zeros(grid.n_points)
    out = evolve(psi, v, 0.0, dt=1e-4, t_final=1.0, check_edges=False)
    t = 1.0
    sig_t2 = sigma0**2 * (1.0 + (t / sigma0**2) ** 2)
    rho_exact = np.exp(-grid.z**2 / sig_t2) / math.sqrt(math.pi * sig_t2)
    assert np.max(np.abs(out.density() - rho_exact)) < 1e-6


def test_coherent_state_oscillates_without_dispersing():
    grid = Grid(-16.0, 16.0, 2**11)
    v = harmonic_potential(grid, 0.0)
    psi = gaussian_wavepacket(grid, 3.0, 1.0, 0.0, 1.0)
    width0 = psi.rms_width()
    centers, times = [], []
    out = evolve(psi, v, 0.0, dt=2e-4, t_final=2 * math.pi, observer_stride=250,
                 edge_guard=2.0,
                 observer=lambda s: (times.append(s.t),
                                     centers.append(s.psi.center())) and None)
    # ends where it started after one trap period
    assert out.center() == pytest.approx(3.0, abs=1e-3)
    assert out.rms_width() == pytest.approx(width0, rel=1e-6)
    centers = np.asarray(centers)
    expected = 3.0 * np.cos(np.asarray(times))
    assert np.max(np.abs(centers - expected)) < 1e-3


def test_norm_and_energy_conserved_with_interactions():
    grid = Grid(-40.0, 40.0, 2**12)
    barrier = BarrierSpec(v0=4.0, sigma_b=1.0, z0_prime=10.0)
    v = gaussian_barrier(grid, barrier)
    psi = apply_kick(gaussian_wavepacket(grid, -10.0, 2.0, 0.0, 1.0), 3.0)
    norms, energies = [], []
    evolve(psi, v, 5.0, dt=1e-4, t_final=2.0, observer_stride=500,
           observer=lambda s: (norms.append(s.norm),
                               energies.append(s.energy)) and None)
    norms = np.asarray(norms)
    energies = np.asarray(energies)
    assert np.max(np.abs(norms - norms[0])) / norms[0] < 1e-10
    assert np.max(np.abs(energies - energies[0])) / abs(energies[0]) < 1e-6


def test_quench_sign_controls_expansion(default_state):
    """Released cloud: repulsive quench expands the density, attractive
    contracts it, ideal stays put (width ratios at fixed time)."""
    cfg = PhysicsConfig()
    grid = Grid(-114.0, 14.0, 2**12)
    psi0, scales, _ = prepare_ground_state(cfg, grid)
    v = np.zeros(grid.n_points)
    widths = {}
    for a_s, g1d in [(-1.0, None), (0.0, 0.0), (1.0, None)]:
        from tunnelsim.config import derive_g1d
        g = derive_g1d(cfg, a_s) if g1d is None else g1d
        out = evolve(psi0.copy(), v, g, dt=1e-4, t_final=0.5)
        widths[a_s] = out.rms_width()
    w0 = scales.sigma_c
    assert widths[-1.0] < 0.99 * widths[0.0]
    assert widths[1.0] > 1.01 * widths[0.0]
    assert widths[0.0] == pytest.approx(w0, rel=0.01)


def test_evolution_diverges_loudly():
    grid = Grid(-10, 10, 2**8)
    bad = Wavefunction(grid, np.full(grid.n_points, np.nan, dtype=complex))
    with pytest.raises(DivergenceError):
        evolve(bad, np.zeros(grid.n_points), 0.0, dt=1e-3, t_final=0.1)


def test_norm_drift_guard_wiring():
    grid = Grid(-10, 10, 2**8)
    psi = gaussian_wavepacket(grid, 0.0, 1.0, 0.0, 1.0)
    with pytest.raises(NormDriftError):
        evolve(psi, np.zeros(grid.n_points), 0.0, dt=1e-3, t_final=0.1,
               norm_tol=-1.0)


def test_edge_guard_trips_on_escape():
    grid = Grid(-15.0, 15.0, 2**10)
    psi = gaussian_wavepacket(grid, 0.0, 1.0, 5.0, 1.0)
    with pytest.raises(DomainViolationError):
        evolve(psi, np.zeros(grid.n_points), 0.0, dt=1e-3, t_final=3.0,
               observer_stride=50)


# ---------------------------------------------------------------------------
# effective potential

def test_effective_potential_sign_structure():
    grid = Grid(-20, 20, 2**10)
    psi = gaussian_wavepacket(grid, 0.0, 2.0, 0.0, 100.0)
    barrier = BarrierSpec(5.0, 1.0, 0.0)
    vb = gaussian_barrier(grid, barrier)
    assert np.array_equal(effective_potential(psi, vb, 0.0), vb)
    assert np.all(effective_potential(psi, vb, 0.3) >= vb)
    assert np.all(effective_potential(psi, vb, -0.3) <= vb)


def test_kinetic_energy_matches_kick():
    cfg = PhysicsConfig()
    grid = Grid(-70.0, -30.0, 2**12)
    psi, scales, _ = prepare_ground_state(cfg, grid, window=15.0)
    e0 = kinetic_energy(psi) / cfg.atom_number
    kicked = apply_kick(psi, 20.0)
    e1 = kinetic_energy(kicked) / cfg.atom_number
    assert e1 - e0 == pytest.approx(200.0, rel=1e-9)
