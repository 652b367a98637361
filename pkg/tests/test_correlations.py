import numpy as np
import pytest

from photodet.correlations import (
    CorrelationKernel,
    _integrand_convolution,
    _integrand_direct,
    drive_correlation_kernel,
    gain_decomposition,
    n_d_flux,
    n_d_kernel,
    two_time_correlation,
)
from photodet.analytic import p_abs
from photodet.evolution import evolve_state, expectation_series
from photodet.model import ModelParams, build_absorber_generator, f_tilde
from photodet.operators import basis_state, embed, projector

BASE = ModelParams()  # mu = Gamma = gamma2 = gamma1, Delta = delta = 0, kappa/5


def test_zero_lag_reduces_to_equal_time_expectation():
    gen = build_absorber_generator(BASE)
    rho0 = basis_state(gen.space, (1, 0))
    f_op = f_tilde(BASE, gen.space)
    for t in (0.0, 1.5, 6.0):
        rho_t = evolve_state(gen, rho0, np.array([0.0, t]))[-1] if t > 0 else rho0
        direct = np.trace(f_op.entries @ f_op.entries @ rho_t.entries)
        reg = two_time_correlation(gen, rho0, f_op, f_op, t=t, tau=0.0)
        assert abs(direct - reg) < 1e-9


def test_identity_correlation_is_one():
    gen = build_absorber_generator(BASE)
    rho0 = basis_state(gen.space, (1, 0))
    ident = gen.space.identity()
    for t, tau in ((0.0, 0.0), (2.0, 3.0), (5.0, 0.5)):
        val = two_time_correlation(gen, rho0, ident, ident, t=t, tau=tau)
        assert abs(val - 1.0) < 1e-10
    with pytest.raises(ValueError):
        two_time_correlation(gen, rho0, ident, ident, t=1.0, tau=-0.5)


def test_kernel_hermitian_symmetry_and_limits():
    grid = np.linspace(0.0, 50.0, 401)
    kernel = drive_correlation_kernel(BASE, grid)
    assert kernel.hermitian_defect() < 1e-8
    # large-time plateau: mu^2 p_abs, off the diagonal as well as on it
    # (the slowest transient decays as e^(-kappa t), ~7e-5 by t = 48)
    pa = p_abs(BASE)
    tail = kernel.values[-1, -10:]
    assert np.max(np.abs(tail - BASE.mu**2 * pa)) < 1e-3


def test_kernel_matches_min_time_population():
    # for the one-photon fresh-molecule start the shelved state is absorbing,
    # so <F(t)F(t')> = mu^2 <P2>(min(t, t')); independent structural oracle
    grid = np.linspace(0.0, 10.0, 81)
    kernel = drive_correlation_kernel(BASE, grid)
    gen = build_absorber_generator(BASE)
    p2 = embed(projector(3, 2), 1, gen.space)
    pop = expectation_series(gen, basis_state(gen.space, (1, 0)), [p2], grid)[0].real
    ii, jj = np.meshgrid(np.arange(len(grid)), np.arange(len(grid)), indexing="ij")
    expected = BASE.mu**2 * pop[np.minimum(ii, jj)]
    assert np.max(np.abs(kernel.values - expected)) < 1e-8


def test_kernel_agrees_with_literal_regression():
    grid = np.linspace(0.0, 8.0, 33)
    kernel = drive_correlation_kernel(BASE, grid)
    gen = build_absorber_generator(BASE)
    rho0 = basis_state(gen.space, (1, 0))
    f_op = f_tilde(BASE, gen.space)
    for i, j in ((5, 2), (12, 12), (30, 7), (8, 20)):
        t = grid[min(i, j)]
        tau = abs(grid[i] - grid[j])
        literal = two_time_correlation(gen, rho0, f_op, f_op, t=t, tau=tau)
        if i < j:
            literal = np.conj(literal)
        assert abs(kernel.values[i, j] - literal) < 1e-9


def test_convolution_matches_direct_triple_quadrature():
    # O(n^2) nested-convolution evaluation vs the O(n^3) oracle at n=64
    grid = np.linspace(0.0, 8.0, 64)
    for delta_amp in (0.0, 0.9):
        params = ModelParams(Delta=delta_amp)
        kernel = drive_correlation_kernel(params, grid)
        fast = _integrand_convolution(kernel, params.Gamma, params.Delta)
        slow = _integrand_direct(kernel, params.Gamma, params.Delta)
        assert np.max(np.abs(fast - slow)) < 1e-9


def test_signal_vanishes_without_drive_or_photon():
    quiet = ModelParams(mu=0.0)
    curve = n_d_kernel(quiet, T=10.0, n_grid=161)
    assert np.max(np.abs(curve.values)) < 1e-12
    dark = n_d_kernel(BASE, T=10.0, n_grid=161,
                      rho0=basis_state(build_absorber_generator(BASE).space, (0, 0)))
    assert np.max(np.abs(dark.values)) < 1e-12


def test_signal_curve_is_nonnegative_and_nondecreasing():
    curve = n_d_kernel(BASE, T=20.0, n_grid=321)
    assert curve.values.min() >= -1e-12
    assert np.all(np.diff(curve.values) >= -1e-12)


def test_grid_coarseness_rejected():
    with pytest.raises(ValueError, match="grid too coarse"):
        n_d_kernel(BASE, T=30.0, n_grid=100)


def test_flux_route_matches_kernel_route():
    kernel = n_d_kernel(BASE, T=15.0)
    flux = n_d_flux(BASE, T=15.0)
    interp = np.interp(flux.times, kernel.times, kernel.values)
    scale = flux.values.max()
    assert np.max(np.abs(flux.values - interp)) / scale < 0.01


def test_pinned_molecule_slope_is_gain_rate():
    # molecule held in the shelf state: the signal grows at 4 mu^2 / Gamma
    pinned = ModelParams(kappa=0.0, gamma1=0.0)
    space = build_absorber_generator(pinned).space
    curve = n_d_kernel(pinned, T=30.0, rho0=basis_state(space, (0, 2)))
    rate = 4 * pinned.mu**2 / pinned.Gamma
    assert abs(curve.slope - rate) / rate < 0.01


def test_kernel_slope_linear_in_absorption_probability():
    slope_full = n_d_kernel(BASE, T=30.0).slope
    # choose gamma2 so the closed-form absorption probability halves
    target = 0.5 * p_abs(BASE)
    from scipy.optimize import brentq

    g2 = brentq(
        lambda g: p_abs(ModelParams(gamma2=g)) - target, 1e-4, 1.0, xtol=1e-12
    )
    slope_half = n_d_kernel(ModelParams(gamma2=g2), T=30.0).slope
    assert abs(slope_half / slope_full - 0.5) < 0.02 * 0.5


def test_gain_decomposition_values():
    decomp = gain_decomposition(ModelParams(), T=11.0)
    assert decomp.gain == pytest.approx(44.0)
    assert decomp.signal_no_photon == 0.0
    assert decomp.amplified_noise == 0.0
    assert decomp.signal_one_photon == pytest.approx(p_abs(ModelParams()) ** 2 * 44.0)
    # perfect absorption: the one-photon signal is the bare gain
    perfect = gain_decomposition(ModelParams(kappa=0.0), T=11.0)
    assert perfect.signal_one_photon == pytest.approx(perfect.gain)
    with pytest.raises(ValueError):
        gain_decomposition(ModelParams(), T=0.0)


def test_kernel_type_validation():
    grid = np.linspace(0, 1, 5)
    with pytest.raises(ValueError):
        CorrelationKernel(grid, np.zeros((4, 5)))
    with pytest.raises(ValueError):
        CorrelationKernel(np.array([0.0, 0.5, 2.0]), np.zeros((3, 3)))
